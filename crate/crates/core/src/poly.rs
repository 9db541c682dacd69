//! Real polynomials in ascending-power form.
//!
//! `coeffs[i]` multiplies `x^i`. Used for transfer-function numerators and
//! denominators and for the critical-power equation, whose roots come from
//! the eigenvalues of the companion matrix followed by Newton polishing.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending-power coefficients. Trailing
    /// (highest-power) exact zeros are trimmed; the zero polynomial keeps a
    /// single `0.0` coefficient.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return domain("polynomial coefficients must be finite");
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial { coeffs: vec![0.0] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| i as f64 * c)
            .collect();
        Polynomial { coeffs }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out).expect("product of finite polynomials is finite")
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        (0..n).fold(Polynomial { coeffs: vec![1.0] }, |acc, _| acc.mul(self))
    }

    /// Adds a constant to the zeroth coefficient.
    pub fn add_constant(&self, c: f64) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Polynomial::new(coeffs).expect("finite shift")
    }

    /// Sum of absolute coefficient values; used to scale residual checks.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// All complex roots, counted with multiplicity.
    ///
    /// Eigenvalues of the companion matrix of the monic polynomial, each
    /// refined by a few Newton steps on the original coefficients.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return domain("the zero polynomial has no isolated roots");
        }
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let eig = companion.complex_eigenvalues();
        let deriv = self.derivative();
        let roots = eig
            .iter()
            .map(|&z0| {
                let mut z = z0;
                for _ in 0..8 {
                    let d = deriv.eval_complex(z);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval_complex(z) / d;
                    if !step.re.is_finite() || !step.im.is_finite() {
                        break;
                    }
                    let next = z - step;
                    // keep the eigenvalue if polishing makes things worse (multiple roots)
                    if self.eval_complex(next).norm() > self.eval_complex(z).norm() {
                        break;
                    }
                    z = next;
                    if step.norm() <= 1e-16 * z.norm().max(1.0) {
                        break;
                    }
                }
                z
            })
            .collect();
        Ok(roots)
    }
}
