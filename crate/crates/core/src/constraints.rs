//! Hover-height limits from the covertness and security requirements.
//!
//! Covertness (`ζ* ≥ 1 - ε`) bounds the height from below in closed form.
//! Security (`C_s ≥ R_s`) bounds it from above at the root `H'` of
//! `C_s(H) = R_s`, located by bisection since `C_s` falls with height.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::rates::secrecy_rate;

/// Upper end of the height search, m.
pub const SEARCH_CEILING_M: f64 = 1e6;
pub const MAX_BISECTION_ITERS: usize = 200;
/// Largest accepted `|C_s(H') - R_s|`, bits per channel use.
pub const SECRECY_RESIDUAL_TOL: f64 = 1e-9;

/// Smallest height meeting `ζ* ≥ 1 - ε`; zero when every height does.
pub fn covert_height_bound(p_u: f64, p_j: f64, beta: f64, epsilon: f64, d_w2: f64) -> f64 {
    // -ln(1 - ε) > 0 for ε in (0, 1)
    let log_slack = -(-epsilon).ln_1p();
    let radicand = p_u * beta / (p_j * log_slack) - d_w2;
    if radicand > 0.0 {
        radicand.sqrt()
    } else {
        0.0
    }
}

/// Outcome of the security-constraint root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SecurityBound {
    /// `C_s(0) < R_s`: no height is secure.
    Empty,
    /// Secure exactly on `[0, H']`.
    Finite(f64),
    /// `C_s` stays at or above `R_s` up to the search ceiling.
    Unbounded,
}

impl SecurityBound {
    /// Upper height limit, `+∞` when unbounded and `None` when empty.
    pub fn h_max(self) -> Option<f64> {
        match self {
            SecurityBound::Empty => None,
            SecurityBound::Finite(h) => Some(h),
            SecurityBound::Unbounded => Some(f64::INFINITY),
        }
    }
}

/// Largest height whose secrecy rate still meets `r_s`.
pub fn security_height_bound(s: &Scenario, r_s: f64) -> Result<SecurityBound> {
    if !(r_s >= 0.0) {
        return Err(Error::Config(format!("secrecy threshold must be >= 0, got {r_s}")));
    }
    let excess = |h: f64| secrecy_rate(&s.with_h(h)) - r_s;
    if excess(0.0) < 0.0 {
        return Ok(SecurityBound::Empty);
    }
    match bracket_decreasing_root(excess, SEARCH_CEILING_M)? {
        None => Ok(SecurityBound::Unbounded),
        Some((lo, hi)) => {
            let root = bisect(excess, lo, hi)?;
            let residual = excess(root);
            if residual.abs() > SECRECY_RESIDUAL_TOL {
                return Err(Error::Numerical(format!(
                    "secrecy root at H = {root} m leaves residual {residual}"
                )));
            }
            Ok(SecurityBound::Finite(root))
        }
    }
}

/// Scans `0, 1, 2, 4, ...` up to `ceiling` for the first sign change of a
/// function expected to decrease, returning `[lo, hi]` with `f(lo) >= 0 > f(hi)`.
/// Any increase seen before the crossing is reported as an error.
fn bracket_decreasing_root(f: impl Fn(f64) -> f64, ceiling: f64) -> Result<Option<(f64, f64)>> {
    let (mut h_lo, mut f_lo) = (0.0, f(0.0));
    let mut h_hi = 1.0f64.min(ceiling);
    loop {
        let f_hi = f(h_hi);
        if f_hi > f_lo + 1e-12 * f_lo.abs().max(1.0) {
            return Err(Error::NonMonotone { h_lo, h_hi, c_lo: f_lo, c_hi: f_hi });
        }
        if f_hi < 0.0 {
            return Ok(Some((h_lo, h_hi)));
        }
        if h_hi >= ceiling {
            return Ok(None);
        }
        (h_lo, f_lo) = (h_hi, f_hi);
        h_hi = (2.0 * h_hi).min(ceiling);
    }
}

/// Bisection keeping `f(lo) >= 0 > f(hi)`; returns `lo`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(lo);
        }
        let v = f(mid);
        if v.is_nan() {
            return Err(Error::Numerical(format!("secrecy rate is NaN at H = {mid} m")));
        }
        if v >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Heights satisfying both requirements: `[h_min, H']`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleHeightInterval {
    pub h_min: f64,
    pub security: SecurityBound,
    pub empty: bool,
}

impl FeasibleHeightInterval {
    pub fn h_max(&self) -> Option<f64> {
        self.security.h_max()
    }

    pub fn contains(&self, h: f64) -> bool {
        !self.empty && h >= self.h_min && self.h_max().is_some_and(|top| h <= top)
    }
}

pub fn feasible_interval(s: &Scenario) -> Result<FeasibleHeightInterval> {
    let h_min = covert_height_bound(s.p_u, s.p_j, s.beta, s.epsilon, s.d_w2);
    let security = security_height_bound(s, s.r_s)?;
    let empty = match security {
        SecurityBound::Empty => true,
        SecurityBound::Finite(top) => h_min > top,
        SecurityBound::Unbounded => false,
    };
    Ok(FeasibleHeightInterval { h_min, security, empty })
}
