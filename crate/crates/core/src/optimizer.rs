//! Secure covert rate maximization over relay power, jamming power and height.
//!
//! The destination capacity falls strictly with height, so for fixed powers
//! the best height is the lower end of the feasible interval. Powers are
//! searched exhaustively on a grid.

use rayon::prelude::*;
use serde::Serialize;

use crate::constraints::{feasible_interval, FeasibleHeightInterval, SecurityBound};
use crate::detection::optimal_detection;
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::rates::{rate_report, RateReport};

/// Sorted, de-duplicated candidate values for one power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridAxis(Vec<f64>);

impl GridAxis {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("power grid axis is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("grid powers must be finite and > 0, got {v}")));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self(values))
    }

    pub fn fixed(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    ///
    /// The grid with `2·steps - 1` points contains this one exactly.
    pub fn linspace(start: f64, stop: f64, steps: usize) -> Result<Self> {
        Self::new(crate::experiments::linspace(start, stop, steps)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub p_u: GridAxis,
    pub p_j: GridAxis,
}

impl GridSpec {
    /// The scenario's own powers as a one-point grid.
    pub fn fixed(s: &Scenario) -> Result<Self> {
        Ok(Self { p_u: GridAxis::fixed(s.p_u)?, p_j: GridAxis::fixed(s.p_j)? })
    }

    /// `steps` points per axis spanning `(0, p_max]`, starting at `p_max / steps`.
    pub fn uniform(p_max: f64, steps_u: usize, steps_j: usize) -> Result<Self> {
        let axis = |n: usize| GridAxis::linspace(p_max / n as f64, p_max, n);
        Ok(Self { p_u: axis(steps_u)?, p_j: axis(steps_j)? })
    }

    pub fn len(&self) -> usize {
        self.p_u.0.len() * self.p_j.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveConstraint {
    /// Minimum warden error sits exactly at `1 - ε`.
    Covertness,
    /// Secrecy rate sits exactly at `R_s`.
    Security,
    UavPowerCap,
    JammingPowerCap,
}

impl ActiveConstraint {
    pub fn as_str(self) -> &'static str {
        match self {
            ActiveConstraint::Covertness => "covertness",
            ActiveConstraint::Security => "security",
            ActiveConstraint::UavPowerCap => "p_u_cap",
            ActiveConstraint::JammingPowerCap => "p_j_cap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeightOptimum {
    pub h: f64,
    pub interval: FeasibleHeightInterval,
    pub rates: RateReport,
}

/// Best hover height for the scenario's powers: the interval's lower end.
pub fn optimal_height_given_powers(s: &Scenario) -> Result<HeightOptimum> {
    let interval = feasible_interval(s)?;
    if interval.empty {
        return Err(Error::Infeasible(format!(
            "no hover height meets both requirements at P_u = {} W, P_J = {} W",
            s.p_u, s.p_j
        )));
    }
    let h = interval.h_min;
    Ok(HeightOptimum { h, interval, rates: rate_report(&s.with_h(h)) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub p_u: f64,
    pub p_j: f64,
    pub h: f64,
    pub r_b: f64,
    /// Secrecy rate at the optimum, reported alongside the objective.
    pub c_s: f64,
    pub zeta_star: f64,
    pub interval: FeasibleHeightInterval,
    pub active_constraints: Vec<ActiveConstraint>,
    pub evaluated: usize,
    pub feasible_points: usize,
}

/// Exhaustive search over the power grid.
///
/// Ties on the rate keep the smaller `P_u`, then the smaller `P_J`. The
/// result does not depend on the rayon pool size.
pub fn maximize_covert_rate(s: &Scenario, grid: &GridSpec) -> Result<OptimizationResult> {
    let pairs: Vec<(f64, f64)> = grid
        .p_u
        .values()
        .iter()
        .flat_map(|&p_u| grid.p_j.values().iter().map(move |&p_j| (p_u, p_j)))
        .collect();
    if let Some(&(p_u, p_j)) = pairs.iter().find(|(u, j)| *u > s.p_max || *j > s.p_max) {
        return Err(Error::Config(format!(
            "grid point (P_u = {p_u}, P_J = {p_j}) exceeds p_max = {}",
            s.p_max
        )));
    }

    let outcomes: Vec<Option<HeightOptimum>> = pairs
        .par_iter()
        .map(|&(p_u, p_j)| match optimal_height_given_powers(&s.with_p_u(p_u).with_p_j(p_j)) {
            Ok(opt) => Ok(Some(opt)),
            Err(Error::Infeasible(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, &HeightOptimum)> = None;
    for (i, opt) in outcomes.iter().enumerate() {
        if let Some(opt) = opt {
            if best.is_none_or(|(_, b)| opt.rates.r_b > b.rates.r_b) {
                best = Some((i, opt));
            }
        }
    }
    let Some((i, opt)) = best else {
        return Err(Error::Infeasible(format!("none of the {} grid points is feasible", pairs.len())));
    };

    let (p_u, p_j) = pairs[i];
    let at = s.with_p_u(p_u).with_p_j(p_j).with_h(opt.h);
    let mut active = Vec::new();
    if opt.interval.h_min > 0.0 {
        active.push(ActiveConstraint::Covertness);
    }
    if opt.interval.security == SecurityBound::Finite(opt.h) {
        active.push(ActiveConstraint::Security);
    }
    if p_u == s.p_max {
        active.push(ActiveConstraint::UavPowerCap);
    }
    if p_j == s.p_max {
        active.push(ActiveConstraint::JammingPowerCap);
    }
    Ok(OptimizationResult {
        p_u,
        p_j,
        h: opt.h,
        r_b: opt.rates.r_b,
        c_s: opt.rates.c_s,
        zeta_star: optimal_detection(&at).zeta_star,
        interval: opt.interval,
        active_constraints: active,
        evaluated: pairs.len(),
        feasible_points: outcomes.iter().flatten().count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::reference_scenario;

    /// Fig. 4 geometry with enough relay power for a positive secrecy rate.
    fn base() -> Scenario {
        Scenario { p_a: 1.0, p_u: 10.0, p_j: 5.0, h: 0.0, epsilon: 0.01, ..reference_scenario() }
    }

    #[test]
    fn height_is_interval_floor() {
        let s = base();
        let opt = optimal_height_given_powers(&s).unwrap();
        assert_eq!(opt.h, opt.interval.h_min);
        let top = opt.interval.h_max().unwrap().min(opt.h + 500.0);
        for i in 0..=1000 {
            let h = opt.h + (top - opt.h) * i as f64 / 1000.0;
            assert!(rate_report(&s.with_h(h)).c_b <= opt.rates.c_b);
        }
    }

    #[test]
    fn infeasible_powers_are_reported() {
        let s = base().with_r_s(100.0);
        assert!(matches!(optimal_height_given_powers(&s), Err(Error::Infeasible(_))));
        let grid = GridSpec::fixed(&s).unwrap();
        assert!(matches!(maximize_covert_rate(&s, &grid), Err(Error::Infeasible(_))));
    }

    #[test]
    fn looser_covertness_lowers_height_and_raises_rate() {
        let tight = optimal_height_given_powers(&base().with_epsilon(0.01)).unwrap();
        let loose = optimal_height_given_powers(&base().with_epsilon(0.02)).unwrap();
        assert!(loose.h < tight.h);
        assert!(loose.rates.r_b > tight.rates.r_b);
    }

    #[test]
    fn single_point_grid_matches_rate_report() {
        let s = base();
        let res = maximize_covert_rate(&s, &GridSpec::fixed(&s).unwrap()).unwrap();
        let expected = rate_report(&s.with_h(feasible_interval(&s).unwrap().h_min));
        assert_eq!(res.r_b, expected.r_b);
        assert_eq!(res.c_s, expected.c_s);
        assert_eq!((res.p_u, res.p_j), (s.p_u, s.p_j));
        assert!(res.active_constraints.contains(&ActiveConstraint::Covertness));
    }

    #[test]
    fn refinement_never_hurts() {
        let s = base();
        let mut prev = f64::NEG_INFINITY;
        for steps in [3, 5, 9, 17] {
            let grid = GridSpec {
                p_u: GridAxis::linspace(0.5, 20.0, steps).unwrap(),
                p_j: GridAxis::linspace(0.5, 20.0, steps).unwrap(),
            };
            let r = maximize_covert_rate(&s, &grid).unwrap().r_b;
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn linspace_refinement_is_superset() {
        let coarse = GridAxis::linspace(0.3, 17.0, 7).unwrap();
        let fine = GridAxis::linspace(0.3, 17.0, 13).unwrap();
        assert!(coarse.values().iter().all(|v| fine.values().contains(v)));
    }

    #[test]
    fn more_jamming_helps_at_fixed_relay_power() {
        // Holds while the covertness bound is binding hard.
        let strong = Scenario { p_u: 50.0, p_max: 50.0, epsilon: 0.02, ..base() };
        let rates: Vec<f64> = [5.0, 10.0, 15.0]
            .iter()
            .map(|&p_j| {
                let s = strong.with_p_j(p_j);
                maximize_covert_rate(&s, &GridSpec::fixed(&s).unwrap()).unwrap().r_b
            })
            .collect();
        assert!(rates.windows(2).all(|w| w[1] >= w[0]), "{rates:?}");
    }

    #[test]
    fn ties_prefer_lower_power() {
        // Two identical grid values collapse, and equal rates keep the first candidate.
        let axis = GridAxis::new(vec![3.0, 1.0, 3.0]).unwrap();
        assert_eq!(axis.values(), &[1.0, 3.0]);
    }

    #[test]
    fn grid_rejects_bad_values() {
        assert!(GridAxis::new(vec![]).is_err());
        assert!(GridAxis::new(vec![0.0]).is_err());
        let s = base();
        let grid = GridSpec { p_u: GridAxis::fixed(30.0).unwrap(), p_j: GridAxis::fixed(5.0).unwrap() };
        assert!(matches!(maximize_covert_rate(&s, &grid), Err(Error::Config(_))));
    }

    #[test]
    fn power_cap_reported_when_binding() {
        let s = Scenario { epsilon: 0.5, ..base() };
        let grid = GridSpec::uniform(s.p_max, 4, 1).unwrap();
        let res = maximize_covert_rate(&s, &grid).unwrap();
        assert_eq!(res.p_u, s.p_max);
        assert!(res.active_constraints.contains(&ActiveConstraint::UavPowerCap));
        assert!(res.active_constraints.contains(&ActiveConstraint::JammingPowerCap));
    }

    #[test]
    fn pool_size_does_not_change_result() {
        let s = base();
        let grid = GridSpec::uniform(s.p_max, 12, 12).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()
            .install(|| maximize_covert_rate(&s, &grid).unwrap());
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap()
            .install(|| maximize_covert_rate(&s, &grid).unwrap());
        assert_eq!(one, many);
    }
}
