//! The warden's radiometer test.
//!
//! Willie compares the average received power `T` with a threshold `γ`.
//! With jamming of power `P_J` through a Rayleigh block `|h_bw|²`, the test
//! statistic is `P_J|h_bw|² + σ_w²` with no transmission and additionally
//! carries the relay's line-of-sight power `P_u β/(d_w² + H²)` otherwise.
//! Closed forms below give false alarm, missed detection and the optimal
//! threshold; [`simulate_detection`] reproduces them by sampling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{sample_rayleigh_power, trial_rng, Scenario};

/// Error probabilities at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionPoint {
    pub gamma: f64,
    pub p_fa: f64,
    pub p_md: f64,
    /// Total error `p_fa + p_md`.
    pub zeta: f64,
}

impl DetectionPoint {
    fn new(gamma: f64, p_fa: f64, p_md: f64) -> Self {
        Self { gamma, p_fa, p_md, zeta: p_fa + p_md }
    }
}

/// Minimizing threshold and the warden's minimum total error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalDetection {
    pub gamma_star: f64,
    pub zeta_star: f64,
}

/// Received relay power at the warden, `P_u β / (d_w² + H²)`.
pub fn warden_signal_power(p_u: f64, beta: f64, d_w2: f64, h: f64) -> f64 {
    p_u * beta / (d_w2 + h * h)
}

/// `P(P_J|h_bw|² + σ_w² > γ)`. Requires `p_j > 0`.
pub fn p_false_alarm(gamma: f64, p_j: f64, sigma_w2: f64) -> f64 {
    if gamma >= sigma_w2 {
        ((sigma_w2 - gamma) / p_j).exp()
    } else {
        1.0
    }
}

/// `P(P_u|h_uw|² + P_J|h_bw|² + σ_w² < γ)`. Requires `p_j > 0`.
pub fn p_missed_detection(gamma: f64, p_u: f64, p_j: f64, beta: f64, d_w2: f64, h: f64, sigma_w2: f64) -> f64 {
    let floor = sigma_w2 + warden_signal_power(p_u, beta, d_w2, h);
    if gamma >= floor {
        let tau = (floor - gamma) / p_j;
        -tau.exp_m1()
    } else {
        0.0
    }
}

/// Closed-form error probabilities at threshold `gamma`.
pub fn total_error(gamma: f64, s: &Scenario) -> DetectionPoint {
    let p_fa = p_false_alarm(gamma, s.p_j, s.sigma_w2);
    let p_md = p_missed_detection(gamma, s.p_u, s.p_j, s.beta, s.d_w2, s.h, s.sigma_w2);
    DetectionPoint::new(gamma, p_fa, p_md)
}

/// `dζ/dγ` above the optimal threshold, `[exp(τ) - exp((σ_w² - γ)/P_J)] / P_J`.
pub fn total_error_slope_above_optimum(gamma: f64, s: &Scenario) -> f64 {
    let floor = s.sigma_w2 + warden_signal_power(s.p_u, s.beta, s.d_w2, s.h);
    (((floor - gamma) / s.p_j).exp() - ((s.sigma_w2 - gamma) / s.p_j).exp()) / s.p_j
}

pub fn optimal_detection(s: &Scenario) -> OptimalDetection {
    let received = warden_signal_power(s.p_u, s.beta, s.d_w2, s.h);
    OptimalDetection {
        gamma_star: s.sigma_w2 + received,
        zeta_star: (-received / s.p_j).exp(),
    }
}

/// Sampled detection performance with raw error counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalDetection {
    pub point: DetectionPoint,
    pub n_trials: u64,
    /// Trials whose no-transmission statistic was declared a transmission.
    pub false_alarms: u64,
    /// Trials whose transmission statistic was declared silent.
    pub missed_detections: u64,
}

/// Radiometer decision: `true` means "transmission". Ties decide transmission.
fn declares_transmission(statistic: f64, gamma: f64) -> bool {
    statistic >= gamma
}

/// Monte Carlo estimate of the warden's error probabilities.
///
/// Each trial draws one quasi-static block `|h_bw|²` from its own stream
/// `(seed, trial)` and evaluates the radiometer under both hypotheses, so
/// the two hypotheses are equally weighted. The false alarm and missed
/// detection events are disjoint within a trial, which makes the per-trial
/// total error a Bernoulli(ζ) variable. Output is independent of the rayon
/// worker count.
pub fn simulate_detection(s: &Scenario, gamma: f64, n_trials: u64, seed: u64) -> Result<EmpiricalDetection> {
    if n_trials == 0 {
        return Err(Error::Config("n_trials must be at least 1".into()));
    }
    const CHUNK: u64 = 4096;
    let relay_power = warden_signal_power(s.p_u, s.beta, s.d_w2, s.h);
    let chunks = n_trials.div_ceil(CHUNK);
    let (false_alarms, missed_detections) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = (0u64, 0u64);
            for trial in c * CHUNK..((c + 1) * CHUNK).min(n_trials) {
                let fading = sample_rayleigh_power(&mut trial_rng(seed, trial)).value();
                let silent = s.p_j * fading + s.sigma_w2;
                let active = relay_power + silent;
                counts.0 += declares_transmission(silent, gamma) as u64;
                counts.1 += !declares_transmission(active, gamma) as u64;
            }
            counts
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = n_trials as f64;
    Ok(EmpiricalDetection {
        point: DetectionPoint::new(gamma, false_alarms as f64 / n, missed_detections as f64 / n),
        n_trials,
        false_alarms,
        missed_detections,
    })
}
