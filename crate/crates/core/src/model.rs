//! System geometry, channel gains and the relay's amplify-and-forward gain.
//!
//! All powers and noise variances are linear watts and all horizontal
//! distances are stored squared (m²), since every downstream formula
//! consumes `d²`. Decibel inputs are converted once, when a scenario file
//! is parsed.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Squared channel amplitude gain `|h|²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct LinkGainSquared(f64);

impl LinkGainSquared {
    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("squared link gain must be finite and >= 0, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Deterministic air-to-ground line-of-sight gain `β / (d² + H²)`.
pub fn los_gain_squared(beta: f64, d2: f64, h: f64) -> Result<LinkGainSquared> {
    let dist2 = d2 + h * h;
    if !(dist2 > 0.0) {
        return Err(Error::Domain(format!(
            "zero UAV-ground distance (d² = {d2}, H = {h})"
        )));
    }
    LinkGainSquared::new(beta / dist2)
}

/// One quasi-static Rayleigh block: `|h|²` drawn from the unit-mean exponential.
pub fn sample_rayleigh_power<R: Rng + ?Sized>(rng: &mut R) -> LinkGainSquared {
    LinkGainSquared(rng.sample::<f64, _>(Exp1))
}

/// Independent random stream for trial `index` under a run seed.
///
/// The stream depends only on `(seed, index)`, so work can be split across
/// any number of threads without changing the draws.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Relay scaling `G = 1/sqrt(P_a|h_ua|² + P_J|h_ub|² + σ_u²)` giving unit forwarded power.
pub fn relay_scaling(p_a: f64, p_j: f64, gain_ua2: f64, gain_ub2: f64, sigma_u2: f64) -> Result<f64> {
    let received = p_a * gain_ua2 + p_j * gain_ub2 + sigma_u2;
    if !(received > 0.0) || !received.is_finite() {
        return Err(Error::Domain(format!("relay input power must be positive, got {received}")));
    }
    Ok(received.sqrt().recip())
}

/// Converts a decibel value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Full system parameterization in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    /// Squared horizontal distance Alice to UAV, m².
    pub d_a2: f64,
    /// Squared horizontal distance Bob to UAV, m².
    pub d_b2: f64,
    /// Squared horizontal distance Willie to UAV, m².
    pub d_w2: f64,
    /// Hover altitude, m.
    pub h: f64,
    /// Channel power gain at 1 m (linear).
    pub beta: f64,
    pub p_a: f64,
    pub p_u: f64,
    pub p_j: f64,
    pub p_max: f64,
    pub sigma_u2: f64,
    pub sigma_b2: f64,
    pub sigma_w2: f64,
    /// Covertness slack: transmission is covert when the warden's minimum error is at least `1 - epsilon`.
    pub epsilon: f64,
    /// Secrecy-rate threshold, bits per channel use.
    pub r_s: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d_a2", self.d_a2),
            ("d_b2", self.d_b2),
            ("d_w2", self.d_w2),
            ("beta", self.beta),
            ("p_a", self.p_a),
            ("p_u", self.p_u),
            ("p_j", self.p_j),
            ("p_max", self.p_max),
            ("sigma_u2", self.sigma_u2),
            ("sigma_b2", self.sigma_b2),
            ("sigma_w2", self.sigma_w2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.h >= 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!("hover height must be finite and >= 0, got {}", self.h)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.r_s >= 0.0 && self.r_s.is_finite()) {
            return Err(Error::Config(format!("secrecy threshold must be finite and >= 0, got {}", self.r_s)));
        }
        for (name, v) in [("p_a", self.p_a), ("p_u", self.p_u), ("p_j", self.p_j)] {
            if v > self.p_max {
                return Err(Error::Config(format!("{name} = {v} W exceeds p_max = {} W", self.p_max)));
            }
        }
        Ok(())
    }

    pub fn gain_ua2(&self) -> f64 {
        self.beta / (self.d_a2 + self.h * self.h)
    }

    pub fn gain_ub2(&self) -> f64 {
        self.beta / (self.d_b2 + self.h * self.h)
    }

    pub fn gain_uw2(&self) -> f64 {
        self.beta / (self.d_w2 + self.h * self.h)
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_p_u(mut self, p_u: f64) -> Self {
        self.p_u = p_u;
        self
    }

    pub fn with_p_j(mut self, p_j: f64) -> Self {
        self.p_j = p_j;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_r_s(mut self, r_s: f64) -> Self {
        self.r_s = r_s;
        self
    }

    /// Short stable digest of the linear parameter set, used as record provenance.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("scenario serializes");
        let hash = Sha256::digest(&canonical);
        hex::encode(&hash[..8])
    }
}

/// On-disk scenario description. Field names carry their units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub beta_db: f64,
    pub sigma_u2_dbw: f64,
    pub sigma_b2_dbw: f64,
    pub sigma_w2_dbw: f64,
    pub d_a2_m2: f64,
    pub d_b2_m2: f64,
    pub d_w2_m2: f64,
    /// Hover height in metres; give exactly one of `h_m` and `h2_m2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2_m2: Option<f64>,
    pub p_a_w: f64,
    pub p_u_w: f64,
    pub p_j_w: f64,
    pub p_max_w: f64,
    pub epsilon: f64,
    pub r_s_bpcu: f64,
}

impl ScenarioFile {
    pub fn to_scenario(&self) -> Result<Scenario> {
        let h = match (self.h_m, self.h2_m2) {
            (Some(h), None) => h,
            (None, Some(h2)) if h2 >= 0.0 => h2.sqrt(),
            (None, Some(h2)) => return Err(Error::Config(format!("h2_m2 must be >= 0, got {h2}"))),
            _ => return Err(Error::Config("give exactly one of h_m and h2_m2".into())),
        };
        let scenario = Scenario {
            d_a2: self.d_a2_m2,
            d_b2: self.d_b2_m2,
            d_w2: self.d_w2_m2,
            h,
            beta: db_to_linear(self.beta_db),
            p_a: self.p_a_w,
            p_u: self.p_u_w,
            p_j: self.p_j_w,
            p_max: self.p_max_w,
            sigma_u2: db_to_linear(self.sigma_u2_dbw),
            sigma_b2: db_to_linear(self.sigma_b2_dbw),
            sigma_w2: db_to_linear(self.sigma_w2_dbw),
            epsilon: self.epsilon,
            r_s: self.r_s_bpcu,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str::<ScenarioFile>(text)?.to_scenario()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
