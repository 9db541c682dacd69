//! Chattering analysis for sliding-mode controllers driven through fast
//! parasitic actuator dynamics.
//!
//! The crate predicts the amplitude, frequency and average power of the
//! self-excited oscillation with the describing-function / harmonic-balance
//! method and checks every prediction against a fixed-step simulation of the
//! closed loop.
//!
//! * [`lti`] - rational transfer functions, actuator and loop models, Nyquist data.
//! * [`describing`] - controller definitions and their describing functions.
//! * [`poly`] - real polynomial arithmetic and root finding.
//! * [`hb`] - harmonic-balance solvers, critical actuator time constants, sweeps.
//! * [`sim`] - forward-Euler closed-loop simulation.
//! * [`metrics`] - chattering measurement on simulated trajectories.

pub mod describing;
pub mod error;
pub mod hb;
pub mod lti;
pub mod metrics;
pub mod poly;
pub mod sim;

pub use describing::{ControlLaw, ControllerSpec, OscillationPoint};
pub use error::{ChatterError, Result};
pub use hb::{ChatteringPrediction, CriticalMuReport, HbSolveResult};
pub use lti::{ComplexValue, RationalTransferFunction};
pub use metrics::{MeasuredChattering, PowerMode};
pub use sim::{SimConfig, TimeSeries};
