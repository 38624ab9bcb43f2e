//! Covert communication through an untrusted amplify-and-forward UAV relay.
//!
//! Alice sends to Bob through a hovering relay that may decode what it
//! forwards, while a ground warden (Willie) runs a radiometer to detect the
//! relay's transmission. Bob jams in full duplex to blind the warden and
//! cancels his own jamming. The crate provides
//!
//! - [`model`]: geometry, line-of-sight gains, Rayleigh sampling, relay gain;
//! - [`detection`]: the warden's error probabilities, optimal threshold and a
//!   Monte Carlo detector;
//! - [`rates`]: relay and destination SNRs, capacities and the secrecy rate;
//! - [`link_sim`]: a symbol-level simulation of the relayed link;
//! - [`constraints`]: covertness and security limits on hover height;
//! - [`optimizer`]: secure covert rate maximization;
//! - [`experiments`]: sweeps, validation, configuration and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constraints;
pub mod detection;
pub mod error;
pub mod experiments;
pub mod link_sim;
pub mod model;
pub mod optimizer;
pub mod rates;

pub use constraints::{covert_height_bound, feasible_interval, security_height_bound, FeasibleHeightInterval, SecurityBound};
pub use detection::{optimal_detection, simulate_detection, total_error, DetectionPoint, EmpiricalDetection, OptimalDetection};
pub use error::{Error, Result};
pub use experiments::{
    ExperimentConfig, Overlay, PowerGridFile, SweepSpec, SweptParameter, Trend, CovertnessRecord, DetectionRecord,
    RateRecord, ValidationRecord,
};
pub use model::{los_gain_squared, relay_scaling, sample_rayleigh_power, LinkGainSquared, Scenario, ScenarioFile};
pub use optimizer::{maximize_covert_rate, optimal_height_given_powers, ActiveConstraint, GridAxis, GridSpec, OptimizationResult};
pub use rates::{rate_report, AuxCoefficients, RateReport};
