//! Linear part of the loop: actuator, plant and their cascade, evaluated on
//! the imaginary axis.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, ChatterError, Result};
use crate::poly::Polynomial;

/// Complex gain on the imaginary axis (`W(jw)`, `N(A, w)`, ...).
pub type ComplexValue = Complex64;

/// Proper rational transfer function `num(s) / den(s)` with ascending-power
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTransferFunction {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl RationalTransferFunction {
    pub fn new(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        let numerator = Polynomial::new(numerator)?;
        let denominator = Polynomial::new(denominator)?;
        if denominator.is_zero() {
            return domain("denominator must be a nonzero polynomial");
        }
        if numerator.degree() > denominator.degree() {
            return domain(format!(
                "transfer function must be proper: numerator degree {} > denominator degree {}",
                numerator.degree(),
                denominator.degree()
            ));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> &[f64] {
        self.numerator.coeffs()
    }

    pub fn denominator(&self) -> &[f64] {
        self.denominator.coeffs()
    }

    /// Value at `s = j omega` by Horner evaluation of both polynomials.
    pub fn eval(&self, omega: f64) -> Result<ComplexValue> {
        eval_response(self, omega)
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return domain(format!("actuator time constant must be positive, got {mu}"));
    }
    Ok(())
}

/// Critically damped actuator `1/(mu s + 1)^2`.
pub fn actuator_tf(mu: f64) -> Result<RationalTransferFunction> {
    check_mu(mu)?;
    let factor = Polynomial::new(vec![1.0, mu])?;
    RationalTransferFunction::new(vec![1.0], factor.pow(2).coeffs().to_vec())
}

/// Actuator in cascade with the integrator plant: `W(s) = 1/(s (mu s + 1)^2)`.
pub fn loop_tf(mu: f64) -> Result<RationalTransferFunction> {
    check_mu(mu)?;
    let actuator_den = Polynomial::new(vec![1.0, mu])?.pow(2);
    let den = Polynomial::new(vec![0.0, 1.0])?.mul(&actuator_den);
    RationalTransferFunction::new(vec![1.0], den.coeffs().to_vec())
}

pub fn eval_response(tf: &RationalTransferFunction, omega: f64) -> Result<ComplexValue> {
    if !(omega > 0.0 && omega.is_finite()) {
        return domain(format!("frequency must be positive and finite, got {omega}"));
    }
    let s = Complex64::new(0.0, omega);
    let den = tf.denominator.eval_complex(s);
    if den.re == 0.0 && den.im == 0.0 {
        return Err(ChatterError::Singularity(format!(
            "denominator vanishes at omega = {omega}"
        )));
    }
    let value = tf.numerator.eval_complex(s) / den;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(ChatterError::Singularity(format!(
            "non-finite response at omega = {omega}"
        )));
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NyquistPoint {
    pub omega: f64,
    pub value: ComplexValue,
}

/// Frequency response over a caller-supplied grid (positive, strictly increasing).
pub fn nyquist_locus(tf: &RationalTransferFunction, omega_grid: &[f64]) -> Result<Vec<NyquistPoint>> {
    if omega_grid.is_empty() {
        return domain("frequency grid is empty");
    }
    if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("frequency grid must be strictly increasing");
    }
    omega_grid
        .iter()
        .map(|&omega| {
            Ok(NyquistPoint {
                omega,
                value: eval_response(tf, omega)?,
            })
        })
        .collect()
}

/// Logarithmically spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) || count == 0 {
        return domain(format!("invalid log grid [{lo}, {hi}] x {count}"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect())
}
