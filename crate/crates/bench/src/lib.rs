//! Fixtures shared by the benchmarks.

use uavcovert::Scenario;

/// Two-hop geometry with a warden 300 m² off the relay's ground point.
pub fn scenario(p_u: f64, p_j: f64, h: f64) -> Scenario {
    Scenario {
        d_a2: 3600.0,
        d_b2: 2500.0,
        d_w2: 300.0,
        h,
        beta: 10.0,
        p_a: 1.0,
        p_u,
        p_j,
        p_max: 50.0,
        sigma_u2: 0.01,
        sigma_b2: 0.01,
        sigma_w2: 0.01,
        epsilon: 0.02,
        r_s: 0.0,
    }
}
