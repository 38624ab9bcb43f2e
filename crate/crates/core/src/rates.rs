//! Relay and destination SNRs, capacities and the secrecy rate.
//!
//! The relay is untrusted: whatever it can decode (`C_u`) is leaked, so the
//! secure rate is `C_s = C_b - C_u`. Bob cancels his own jamming perfectly,
//! including the jamming component the relay amplifies back to him.

use serde::Serialize;

use crate::model::Scenario;

/// Polynomial coefficients of the destination SNR denominator in `H²`.
///
/// The destination SNR equals `P_u P_a β² / (σ_b²φ₁ + p + (σ_b²φ₂ + q)H² + σ_b²σ_u²H⁴)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxCoefficients {
    pub phi_1: f64,
    pub phi_2: f64,
    pub p: f64,
    pub q: f64,
}

impl AuxCoefficients {
    /// Coefficients obtained by expanding the per-link destination SNR.
    pub fn new(s: &Scenario) -> Self {
        Self {
            p: s.p_u * s.sigma_u2 * s.d_a2 * s.beta + s.p_a * s.sigma_b2 * s.d_b2 * s.beta,
            ..Self::printed(s)
        }
    }

    /// Coefficients with the variant constant term `p = P_uσ_u²d_a²β + P_aσ_b⁴β`,
    /// which mistakes `d_b²` for `σ_b²`. Only kept to quantify how far it is from [`AuxCoefficients::new`].
    pub fn printed(s: &Scenario) -> Self {
        Self {
            phi_1: s.p_j * s.beta * s.d_a2 + s.sigma_u2 * s.d_a2 * s.d_b2,
            phi_2: s.p_j * s.beta + s.sigma_u2 * (s.d_a2 + s.d_b2),
            p: s.p_u * s.sigma_u2 * s.d_a2 * s.beta + s.p_a * s.sigma_b2 * s.sigma_b2 * s.beta,
            q: s.p_u * s.sigma_u2 * s.beta + s.p_a * s.sigma_b2 * s.beta,
        }
    }

    fn destination_snr(&self, s: &Scenario) -> f64 {
        let h2 = s.h * s.h;
        let den = s.sigma_b2 * self.phi_1
            + s.sigma_b2 * h2 * self.phi_2
            + h2 * self.q
            + self.p
            + s.sigma_b2 * s.sigma_u2 * h2 * h2;
        s.p_u * s.p_a * s.beta * s.beta / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub gamma_u: f64,
    pub gamma_b: f64,
    pub c_u: f64,
    pub c_b: f64,
    /// `c_b - c_u`; negative when the relay out-decodes Bob.
    pub c_s: f64,
    /// Secure covert rate, equal to `c_b`.
    pub r_b: f64,
}

/// SNR of Alice's signal at the relay, with Bob's jamming as interference.
pub fn snr_relay(s: &Scenario) -> f64 {
    s.p_a * s.gain_ua2() / (s.p_j * s.gain_ub2() + s.sigma_u2)
}

/// SNR at Bob through the amplify-and-forward relay, from per-link gains.
pub fn snr_destination(s: &Scenario) -> f64 {
    let (ua, ub) = (s.gain_ua2(), s.gain_ub2());
    let den = (s.p_u * s.sigma_u2 + s.p_j * s.sigma_b2) * ub + s.p_a * ua * s.sigma_b2 + s.sigma_b2 * s.sigma_u2;
    s.p_u * s.p_a * ub * ua / den
}

/// Same quantity as [`snr_destination`], via the polynomial in `H²`.
pub fn snr_destination_expanded(s: &Scenario) -> f64 {
    AuxCoefficients::new(s).destination_snr(s)
}

/// Destination SNR when the printed constant term `p` is used.
pub fn snr_destination_printed(s: &Scenario) -> f64 {
    AuxCoefficients::printed(s).destination_snr(s)
}

/// Relative deviation of the printed-`p` SNR from the per-link SNR.
///
/// Zero exactly when `σ_b² = d_b²`.
pub fn printed_coefficient_deviation(s: &Scenario) -> f64 {
    let reference = snr_destination(s);
    (snr_destination_printed(s) - reference) / reference
}

/// Capacity in bits per channel use.
pub fn capacity(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}

pub fn secrecy_rate(s: &Scenario) -> f64 {
    capacity(snr_destination(s)) - capacity(snr_relay(s))
}

pub fn rate_report(s: &Scenario) -> RateReport {
    let gamma_u = snr_relay(s);
    let gamma_b = snr_destination(s);
    let c_u = capacity(gamma_u);
    let c_b = capacity(gamma_b);
    RateReport { gamma_u, gamma_b, c_u, c_b, c_s: c_b - c_u, r_b: c_b }
}
