//! Harmonic balance `N(A, w) W(jw) = -1` for the loop `W(s) = 1/(s (mu s + 1)^2)`.
//!
//! LSV-LCSMC and super-twisting have closed-form solutions; TSV-LCSMC is
//! solved by a damped Newton iteration which also handles the other two
//! families and so doubles as a cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::describing::{alpha1, ControlLaw, ControllerSpec, OscillationPoint};
use crate::error::{domain, ChatterError, Result};
use crate::lti::{loop_tf, ComplexValue};
use crate::poly::Polynomial;

/// Default Newton tolerance on `|N W + 1|`.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100;

/// Relative step for the central-difference Jacobian.
const FD_REL_STEP: f64 = 1e-6;

/// Imaginary parts below this fraction of `|root|` count as real.
pub const REAL_ROOT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChatteringPrediction {
    pub amplitude: f64,
    pub omega: f64,
    pub average_power: f64,
    pub controller: ControllerSpec,
    pub mu: f64,
}

impl ChatteringPrediction {
    pub fn point(&self) -> OscillationPoint {
        OscillationPoint {
            amplitude: self.amplitude,
            omega: self.omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HbSolveResult {
    pub prediction: ChatteringPrediction,
    /// `N W + 1` at the returned point.
    pub residual: ComplexValue,
    pub iterations: usize,
    pub converged: bool,
}

/// Average power of the first-harmonic oscillation, `P = 4 A^2 w / pi`.
///
/// This is the constant used throughout for predictions and measurements.
/// Averaging `|A^2 w sin(2wt) / 2|` over a period gives `A^2 w / pi`; see
/// [`crate::metrics::PowerMode`] for the raw trajectory average.
pub fn average_power(amplitude: f64, omega: f64) -> Result<f64> {
    if !(amplitude > 0.0 && omega > 0.0 && amplitude.is_finite() && omega.is_finite()) {
        return domain(format!(
            "average power needs positive amplitude and frequency, got A = {amplitude}, omega = {omega}"
        ));
    }
    Ok(4.0 * amplitude * amplitude * omega / PI)
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return domain(format!("actuator time constant must be positive, got {mu}"));
    }
    Ok(())
}

/// `N(A, w) W(jw) + 1`.
pub fn hb_residual(spec: &ControllerSpec, mu: f64, pt: OscillationPoint) -> Result<ComplexValue> {
    let n = spec.describing_function(pt)?;
    let w = loop_tf(mu)?.eval(pt.omega)?;
    Ok(n * w + 1.0)
}

/// LSV-LCSMC closed form, valid for `0 < mu < 1/(2b)`:
///
/// `A = 2k mu^2 / (pi (1 - 2 mu b)(1 - mu b))`, `w = sqrt(1 - 2 mu b) / mu`,
/// `P = 16 k^2 mu^3 / (pi^3 (1 - 2 mu b)^{3/2} (1 - mu b)^2)`.
pub fn solve_lsv_closed_form(k: f64, b: f64, mu: f64) -> Result<ChatteringPrediction> {
    let controller = ControllerSpec::lsv(k, b);
    controller.validate()?;
    check_mu(mu)?;
    let bound = 1.0 / (2.0 * b);
    if mu >= bound {
        return Err(ChatterError::StabilityViolation { mu, bound });
    }
    let e1 = 1.0 - 2.0 * mu * b;
    let e2 = 1.0 - mu * b;
    Ok(ChatteringPrediction {
        amplitude: mu * mu * 2.0 * k / (PI * e1 * e2),
        omega: e1.sqrt() / mu,
        average_power: mu.powi(3) * 16.0 * k * k / (PI.powi(3) * e1.powf(1.5) * e2 * e2),
        controller,
        mu,
    })
}

/// Super-twisting closed form with `c = alpha1^2 k1^2 + 4 pi k2`:
///
/// `A = mu^2 (c / (pi alpha1 k1))^2`, `w = sqrt(alpha1^2 k1^2 / c) / mu`,
/// `P = 4 mu^3 c^{7/2} / (pi^5 alpha1^3 k1^3)`.
pub fn solve_stc_closed_form(k1: f64, k2: f64, mu: f64) -> Result<ChatteringPrediction> {
    let controller = ControllerSpec::stc(k1, k2);
    controller.validate()?;
    check_mu(mu)?;
    let ak = alpha1() * k1;
    let c = ak * ak + 4.0 * PI * k2;
    Ok(ChatteringPrediction {
        amplitude: mu * mu * (c / (PI * ak)).powi(2),
        omega: (ak * ak / c).sqrt() / mu,
        average_power: mu.powi(3) * 4.0 * c.powf(3.5) / (PI.powi(5) * ak.powi(3)),
        controller,
        mu,
    })
}

/// Damped Newton on `F(A, w) = (Re, Im)(N W + 1)` with a central-difference
/// Jacobian. Steps are halved until the iterate stays in `A > 0, w > 0` and
/// the residual norm decreases.
///
/// Returns `converged = false` when `max_iter` is exhausted; an iterate that
/// runs into the edge of the domain is a [`ChatterError::BoundaryFailure`].
pub fn solve_numeric(
    spec: &ControllerSpec,
    mu: f64,
    initial: OscillationPoint,
    tol: f64,
    max_iter: usize,
) -> Result<HbSolveResult> {
    spec.validate()?;
    check_mu(mu)?;
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let initial = OscillationPoint::new(initial.amplitude, initial.omega)?;
    let w_tf = loop_tf(mu)?;
    let residual = |a: f64, w: f64| -> Result<Complex64> {
        let n = spec.describing_function(OscillationPoint::new(a, w)?)?;
        Ok(n * w_tf.eval(w)? + 1.0)
    };
    let boundary = |iterations: usize, reason: String| ChatterError::BoundaryFailure { iterations, reason };

    let (mut a, mut w) = (initial.amplitude, initial.omega);
    let mut f = residual(a, w)?;
    let mut iterations = 0;
    while f.norm() >= tol && iterations < max_iter {
        iterations += 1;
        let ha = FD_REL_STEP * a;
        let hw = FD_REL_STEP * w;
        let da = (residual(a + ha, w)? - residual(a - ha, w)?) / (2.0 * ha);
        let dw = (residual(a, w + hw)? - residual(a, w - hw)?) / (2.0 * hw);
        // [da.re dw.re; da.im dw.im] [sa; sw] = -[f.re; f.im]
        let det = da.re * dw.im - dw.re * da.im;
        if det == 0.0 || !det.is_finite() {
            return Err(boundary(iterations, format!("singular Jacobian at A = {a}, omega = {w}")));
        }
        let step_a = -(dw.im * f.re - dw.re * f.im) / det;
        let step_w = -(-da.im * f.re + da.re * f.im) / det;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let (na, nw) = (a + lambda * step_a, w + lambda * step_w);
            if na > 0.0 && nw > 0.0 {
                if let Ok(nf) = residual(na, nw) {
                    if nf.norm() < f.norm() {
                        accepted = Some((na, nw, nf));
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((na, nw, nf)) => {
                a = na;
                w = nw;
                f = nf;
            }
            None => {
                if f.norm() < tol.max(1e-13) * 1e3 {
                    // at the floating-point floor of the residual
                    break;
                }
                return Err(boundary(
                    iterations,
                    format!("no admissible descent step from A = {a}, omega = {w}, |F| = {}", f.norm()),
                ));
            }
        }
        if a > 1e12 || w < 1e-12 || w > 1e12 {
            return Err(boundary(
                iterations,
                format!("iterate left the physical range: A = {a}, omega = {w}"),
            ));
        }
    }
    let converged = f.norm() < tol;
    Ok(HbSolveResult {
        prediction: ChatteringPrediction {
            amplitude: a,
            omega: w,
            average_power: average_power(a, w)?,
            controller: *spec,
            mu,
        },
        residual: f,
        iterations,
        converged,
    })
}

/// Default Newton seed: the LSV closed form with the same `k, b` when it
/// exists, otherwise the ideal-actuator scaling `A ~ mu^2, w ~ 1/mu`.
pub fn default_seed(spec: &ControllerSpec, mu: f64) -> OscillationPoint {
    let seeded = match spec.law {
        ControlLaw::Lsv { k, b } | ControlLaw::Tsv { k, b } => solve_lsv_closed_form(k, b, mu).ok(),
        ControlLaw::Stc { k1, k2 } => solve_stc_closed_form(k1, k2, mu).ok(),
    };
    seeded
        .map(|p| p.point())
        .unwrap_or(OscillationPoint {
            amplitude: mu * mu,
            omega: 0.5 / mu,
        })
}

/// Prediction for any controller: closed form where one exists (with its
/// residual attached), Newton from [`default_seed`] otherwise.
///
/// LSV entries with `mu >= 1/(2b)` are rejected as stability violations.
pub fn predict(spec: &ControllerSpec, mu: f64) -> Result<HbSolveResult> {
    predict_from(spec, mu, None)
}

fn predict_from(spec: &ControllerSpec, mu: f64, seed: Option<OscillationPoint>) -> Result<HbSolveResult> {
    spec.validate()?;
    check_mu(mu)?;
    if let Some(bound) = spec.stability_bound() {
        if mu >= bound {
            return Err(ChatterError::StabilityViolation { mu, bound });
        }
    }
    let closed = match spec.law {
        ControlLaw::Lsv { k, b } => Some(solve_lsv_closed_form(k, b, mu)?),
        ControlLaw::Stc { k1, k2 } => Some(solve_stc_closed_form(k1, k2, mu)?),
        ControlLaw::Tsv { .. } => None,
    };
    match closed {
        Some(mut prediction) => {
            prediction.controller = *spec;
            Ok(HbSolveResult {
                residual: hb_residual(spec, mu, prediction.point())?,
                prediction,
                iterations: 0,
                converged: true,
            })
        }
        None => {
            let seed = seed.unwrap_or_else(|| default_seed(spec, mu));
            solve_numeric(spec, mu, seed, DEFAULT_TOL, DEFAULT_MAX_ITER)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalMuReport {
    /// Real roots in `(0, 1/(2b))`, ascending.
    pub mu_values: Vec<f64>,
    /// Complex roots and real roots outside the stable range.
    pub discarded_roots: Vec<ComplexValue>,
    pub stability_bound: f64,
    pub note: Option<String>,
}

fn check_positive(gains: &[(&str, f64)]) -> Result<()> {
    for &(name, g) in gains {
        if !(g > 0.0 && g.is_finite()) {
            return domain(format!("{name} must be positive, got {g}"));
        }
    }
    Ok(())
}

fn classify(roots: Vec<ComplexValue>, b: f64) -> CriticalMuReport {
    let bound = 1.0 / (2.0 * b);
    let mut mu_values = Vec::new();
    let mut discarded_roots = Vec::new();
    for r in roots {
        let real = r.im.abs() <= REAL_ROOT_REL_TOL * r.norm();
        if real && r.re > 0.0 && r.re < bound {
            mu_values.push(r.re);
        } else {
            discarded_roots.push(if real { Complex64::new(r.re, 0.0) } else { r });
        }
    }
    mu_values.sort_by(f64::total_cmp);
    discarded_roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    CriticalMuReport {
        mu_values,
        discarded_roots,
        stability_bound: bound,
        note: None,
    }
}

/// `gamma` of the equal-amplitude condition between LSV-LCSMC and super-twisting:
/// `(c^2 - 2 pi (alpha1 k1)^2 k) / c^2`, `c = (alpha1 k1)^2 + 4 pi k2`.
pub fn amplitude_gamma(k: f64, k1: f64, k2: f64) -> f64 {
    let ak2 = (alpha1() * k1).powi(2);
    let c = ak2 + 4.0 * PI * k2;
    (c * c - 2.0 * PI * ak2 * k) / (c * c)
}

/// Roots `mu = (3 +- sqrt(9 - 8 gamma)) / (4b)` classified against `1/(2b)`.
pub fn amplitude_crossings(gamma: f64, b: f64) -> CriticalMuReport {
    let disc = 9.0 - 8.0 * gamma;
    let denom = 4.0 * b;
    if disc < 0.0 {
        let im = (-disc).sqrt() / denom;
        let re = 3.0 / denom;
        let mut report = classify(vec![Complex64::new(re, -im), Complex64::new(re, im)], b);
        report.note = Some(format!(
            "9 - 8 gamma = {disc} < 0: amplitudes never coincide for real mu"
        ));
        return report;
    }
    let s = disc.sqrt();
    classify(
        vec![Complex64::new((3.0 - s) / denom, 0.0), Complex64::new((3.0 + s) / denom, 0.0)],
        b,
    )
}

/// Actuator time constants where LSV-LCSMC and super-twisting predict equal amplitude.
pub fn critical_mu_amplitude(k: f64, k1: f64, k2: f64, b: f64) -> Result<CriticalMuReport> {
    check_positive(&[("k", k), ("k1", k1), ("k2", k2), ("b", b)])?;
    Ok(amplitude_crossings(amplitude_gamma(k, k1, k2), b))
}

/// `mu_w = 4 pi k2 / (2b ((alpha1 k1)^2 + 4 pi k2))`: equal predicted frequency.
pub fn critical_mu_frequency(k1: f64, k2: f64, b: f64) -> Result<f64> {
    check_positive(&[("k1", k1), ("k2", k2), ("b", b)])?;
    let c = (alpha1() * k1).powi(2) + 4.0 * PI * k2;
    Ok(4.0 * PI * k2 / (2.0 * b * c))
}

/// Right side of the equal-power condition `(1 - 2 mu b)^3 (1 - mu b)^4 = rhs`.
pub fn power_rhs(k: f64, k1: f64, k2: f64) -> f64 {
    let ak = alpha1() * k1;
    let c = ak * ak + 4.0 * PI * k2;
    16.0 * PI.powi(4) * k.powi(4) * ak.powi(6) / c.powi(7)
}

/// `(1 - 2y)^3 (1 - y)^4 - rhs` in the scaled variable `y = mu b`.
pub fn power_polynomial(rhs: f64) -> Polynomial {
    let fast = Polynomial::new(vec![1.0, -2.0]).expect("finite").pow(3);
    let slow = Polynomial::new(vec![1.0, -1.0]).expect("finite").pow(4);
    fast.mul(&slow).add_constant(-rhs)
}

/// All seven roots of the equal-power condition (in `mu`), classified.
pub fn power_crossings(rhs: f64, b: f64) -> Result<CriticalMuReport> {
    let roots = power_polynomial(rhs).roots()?;
    Ok(classify(roots.into_iter().map(|y| y / b).collect(), b))
}

/// Actuator time constants where LSV-LCSMC and super-twisting predict equal average power.
pub fn critical_mu_power(k: f64, k1: f64, k2: f64, b: f64) -> Result<CriticalMuReport> {
    check_positive(&[("k", k), ("k1", k1), ("k2", k2), ("b", b)])?;
    power_crossings(power_rhs(k, k1, k2), b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    /// `mu` outside the stable range of an LSV entry.
    Unstable,
    /// Solver failed or did not converge.
    Unsolved,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Unstable => "unstable",
            CellStatus::Unsolved => "unsolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub controller: ControllerSpec,
    pub mu: f64,
    pub status: CellStatus,
    pub result: Option<HbSolveResult>,
}

/// Predictions over a grid of actuator time constants for each controller.
///
/// Cells are ordered controller-major, grid order within a controller.
/// Newton-solved entries are warm-started from the previous solved cell,
/// rescaled by `A ~ mu^2`, `w ~ 1/mu`.
pub fn sweep(specs: &[ControllerSpec], mu_grid: &[f64]) -> Vec<SweepCell> {
    let mut out = Vec::with_capacity(specs.len() * mu_grid.len());
    for spec in specs {
        let mut previous: Option<(f64, OscillationPoint)> = None;
        for &mu in mu_grid {
            let seed = previous.map(|(mu0, p)| OscillationPoint {
                amplitude: p.amplitude * (mu / mu0).powi(2),
                omega: p.omega * mu0 / mu,
            });
            let (status, result) = match predict_from(spec, mu, seed) {
                Ok(r) if r.converged => {
                    previous = Some((mu, r.prediction.point()));
                    (CellStatus::Ok, Some(r))
                }
                Ok(r) => (CellStatus::Unsolved, Some(r)),
                Err(ChatterError::StabilityViolation { .. }) => (CellStatus::Unstable, None),
                Err(_) => (CellStatus::Unsolved, None),
            };
            out.push(SweepCell {
                controller: *spec,
                mu,
                status,
                result,
            });
        }
    }
    out
}
