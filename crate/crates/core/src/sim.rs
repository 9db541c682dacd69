//! Forward-Euler simulation of the closed loop
//! controller -> critically damped actuator -> integrator plant.
//!
//! State: plant output `x1`, actuator states `z1, z2` and the controller's
//! integral state (`u` for the LCSMC families, `v` for super-twisting).
//! The actuator `1/(mu s + 1)^2` is realized as
//!
//! ```text
//! mu z1' = z2
//! mu z2' = u - z1 - 2 z2        u_bar = z1
//! ```
//!
//! and the plant is `x1' = u_bar` (no external perturbation).

use serde::{Deserialize, Serialize};

use crate::describing::{sign, signed_power, ControlLaw, ControllerSpec};
use crate::error::{domain, ChatterError, Result};

/// Default `|x1|` bound that marks a run as divergent.
///
/// Unstable LSV loops grow sub-linearly (about 9 after 20 s at `mu = 0.2`,
/// `b = 3`), so the bound has to sit just above the largest stable
/// oscillation instead of far out.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integration step in seconds.
    pub tau: f64,
    /// Simulated time in seconds.
    pub horizon: f64,
    pub x1_initial: f64,
    /// Initial value of the controller's integral state.
    pub controller_state_initial: f64,
    /// Initial `(z1, z2)`.
    pub actuator_state_initial: [f64; 2],
    /// Actuator time constant in seconds.
    pub mu: f64,
    /// The run stops once `|x1|` exceeds this.
    pub divergence_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            tau: 1e-4,
            horizon: 20.0,
            x1_initial: 1.0,
            controller_state_initial: 0.0,
            actuator_state_initial: [0.0, 0.0],
            mu: 0.05,
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
        }
    }
}

impl SimConfig {
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return domain(format!("step tau must be positive, got {}", self.tau));
        }
        if !(self.horizon.is_finite() && self.horizon >= 100.0 * self.tau) {
            return domain(format!(
                "horizon {} must be at least 100 steps of tau = {}",
                self.horizon, self.tau
            ));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return domain(format!("actuator time constant must be positive, got {}", self.mu));
        }
        if !(self.divergence_threshold > 0.0) {
            return domain(format!(
                "divergence threshold must be positive, got {}",
                self.divergence_threshold
            ));
        }
        let initial = [
            self.x1_initial,
            self.controller_state_initial,
            self.actuator_state_initial[0],
            self.actuator_state_initial[1],
        ];
        if initial.iter().any(|v| !v.is_finite()) {
            return domain("initial state must be finite");
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.tau).round() as usize
    }
}

/// Uniformly sampled closed-loop trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub tau: f64,
    pub t: Vec<f64>,
    pub x1: Vec<f64>,
    /// Actuator output, equal to `dx1/dt`.
    pub x1_dot: Vec<f64>,
    /// Controller output (actuator input).
    pub u: Vec<f64>,
    /// Sliding variable; `x1` itself for super-twisting.
    pub sigma: Vec<f64>,
    pub diverged_at: Option<f64>,
}

impl TimeSeries {
    pub fn with_capacity(tau: f64, n: usize) -> Self {
        Self {
            tau,
            t: Vec::with_capacity(n),
            x1: Vec::with_capacity(n),
            x1_dot: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            sigma: Vec::with_capacity(n),
            diverged_at: None,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn push(&mut self, t: f64, x1: f64, x1_dot: f64, u: f64, sigma: f64) {
        self.t.push(t);
        self.x1.push(x1);
        self.x1_dot.push(x1_dot);
        self.u.push(u);
        self.sigma.push(sigma);
    }

    /// Copy of samples `from..`.
    pub fn tail(&self, from: usize) -> TimeSeries {
        let from = from.min(self.len());
        TimeSeries {
            tau: self.tau,
            t: self.t[from..].to_vec(),
            x1: self.x1[from..].to_vec(),
            x1_dot: self.x1_dot[from..].to_vec(),
            u: self.u[from..].to_vec(),
            sigma: self.sigma[from..].to_vec(),
            diverged_at: self.diverged_at,
        }
    }

    /// Time between the first and last sample.
    pub fn duration(&self) -> f64 {
        match (self.t.first(), self.t.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// Integrates the closed loop with forward Euler at step `cfg.tau`.
///
/// Divergence (`|x1| > cfg.divergence_threshold` or a non-finite state)
/// stops the run and is recorded in [`TimeSeries::diverged_at`].
pub fn simulate(spec: &ControllerSpec, cfg: &SimConfig) -> Result<TimeSeries> {
    spec.validate()?;
    cfg.validate()?;
    let steps = cfg.steps();
    let tau = cfg.tau;
    let inv_mu = 1.0 / cfg.mu;
    let mut ts = TimeSeries::with_capacity(tau, steps + 1);

    let mut x1 = cfg.x1_initial;
    let [mut z1, mut z2] = cfg.actuator_state_initial;
    let mut c = cfg.controller_state_initial;

    for i in 0..=steps {
        let t = i as f64 * tau;
        let u_bar = z1;
        let (u, sigma, c_dot) = match spec.law {
            ControlLaw::Lsv { k, b } => {
                let sigma = u_bar + b * x1;
                (c, sigma, -k * sign(sigma))
            }
            ControlLaw::Tsv { k, b } => {
                let sigma = signed_power(u_bar, 2.0) + b * x1;
                (c, sigma, -k * sign(sigma))
            }
            ControlLaw::Stc { k1, k2 } => (-k1 * signed_power(x1, 0.5) + c, x1, -k2 * sign(x1)),
        };
        ts.push(t, x1, u_bar, u, sigma);

        let diverged = !(x1.abs() <= cfg.divergence_threshold)
            || !(z1.is_finite() && z2.is_finite() && c.is_finite());
        if diverged {
            ts.diverged_at = Some(t);
            break;
        }
        if i == steps {
            break;
        }

        let z1_dot = z2 * inv_mu;
        let z2_dot = (u - z1 - 2.0 * z2) * inv_mu;
        x1 += tau * u_bar;
        z1 += tau * z1_dot;
        z2 += tau * z2_dot;
        c += tau * c_dot;
    }
    Ok(ts)
}

/// Trailing `1 - transient_fraction` of a stable run.
///
/// With `expected_omega`, the window must span at least ten periods of that
/// frequency.
pub fn steady_state_window(
    ts: &TimeSeries,
    transient_fraction: f64,
    expected_omega: Option<f64>,
) -> Result<TimeSeries> {
    if let Some(at) = ts.diverged_at {
        return Err(ChatterError::Diverged { at });
    }
    if !(transient_fraction > 0.0 && transient_fraction < 1.0) {
        return domain(format!(
            "transient fraction must lie in (0, 1), got {transient_fraction}"
        ));
    }
    let start = (transient_fraction * (ts.len().max(1) - 1) as f64).ceil() as usize;
    let window = ts.tail(start);
    if window.len() < 2 {
        return Err(ChatterError::WindowTooShort(format!(
            "{} samples after discarding the transient",
            window.len()
        )));
    }
    if let Some(omega) = expected_omega {
        let needed = 10.0 * 2.0 * std::f64::consts::PI / omega;
        if window.duration() < needed {
            return Err(ChatterError::WindowTooShort(format!(
                "window of {:.4} s holds fewer than 10 periods at omega = {omega} (needs {needed:.4} s)",
                window.duration()
            )));
        }
    }
    Ok(window)
}
