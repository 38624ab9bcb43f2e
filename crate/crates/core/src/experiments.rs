//! Parameter sweeps, the closed-form versus Monte Carlo validation suite,
//! experiment configuration files and CSV output.
//!
//! Every record carries the full linear scenario it was computed from, a
//! scenario digest, and the seed and trial count where sampling is involved,
//! so each closed-form column can be recomputed from its own row. Sweeps are
//! evaluated in parallel and always emitted in (overlay, swept value) order.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constraints::feasible_interval;
use crate::detection::{optimal_detection, simulate_detection, total_error};
use crate::error::{Error, Result};
use crate::link_sim::simulate_link;
use crate::model::{Scenario, ScenarioFile};
use crate::optimizer::{maximize_covert_rate, ActiveConstraint, GridAxis, GridSpec};
use crate::rates::rate_report;

/// `steps` evenly spaced values from `start` to `stop` inclusive.
///
/// A single step requires `start == stop`.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) {
        return Err(Error::Config(format!("range [{start}, {stop}] must be finite")));
    }
    match steps {
        0 => Err(Error::Config("a range needs at least one step".into())),
        1 if start == stop => Ok(vec![start]),
        1 => Err(Error::Config(format!("a one-step range needs start == stop, got [{start}, {stop}]"))),
        _ if start >= stop => Err(Error::Config(format!("range start {start} must be below stop {stop}"))),
        _ => {
            let span = stop - start;
            let last = (steps - 1) as f64;
            Ok((0..steps)
                .map(|i| if i == steps - 1 { stop } else { start + span * i as f64 / last })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    /// Warden detection threshold, W.
    Gamma,
    /// Hover height, m.
    H,
    Epsilon,
    PU,
    PJ,
}

impl SweptParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweptParameter::Gamma => "gamma",
            SweptParameter::H => "h",
            SweptParameter::Epsilon => "epsilon",
            SweptParameter::PU => "p_u",
            SweptParameter::PJ => "p_j",
        }
    }

    /// Scenario with this parameter set to `value`; thresholds are not part of a scenario.
    pub fn apply(self, s: &Scenario, value: f64) -> Scenario {
        match self {
            SweptParameter::Gamma => *s,
            SweptParameter::H => s.with_h(value),
            SweptParameter::Epsilon => s.with_epsilon(value),
            SweptParameter::PU => s.with_p_u(value),
            SweptParameter::PJ => s.with_p_j(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    pub parameter: SweptParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay: Option<Overlay>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        linspace(self.start, self.stop, self.steps)?;
        if let Some(overlay) = &self.overlay {
            if overlay.parameter == self.parameter || overlay.parameter == SweptParameter::Gamma {
                return Err(Error::Config(format!(
                    "cannot overlay {} on a {} sweep",
                    overlay.parameter.name(),
                    self.parameter.name()
                )));
            }
            if overlay.values.is_empty() {
                return Err(Error::Config("overlay needs at least one value".into()));
            }
            let mut sorted = overlay.values.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Config("overlay values must be distinct".into()));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        linspace(self.start, self.stop, self.steps)
    }

    fn expect(&self, parameter: SweptParameter) -> Result<()> {
        self.validate()?;
        if self.parameter != parameter {
            return Err(Error::Config(format!(
                "expected a {} sweep, got {}",
                parameter.name(),
                self.parameter.name()
            )));
        }
        Ok(())
    }

    /// One validated scenario per overlay value, in ascending overlay order.
    fn curves(&self, base: &Scenario) -> Result<Vec<(Option<f64>, Scenario)>> {
        let Some(overlay) = &self.overlay else {
            base.validate()?;
            return Ok(vec![(None, *base)]);
        };
        let mut values = overlay.values.clone();
        values.sort_by(f64::total_cmp);
        values
            .into_iter()
            .map(|v| {
                let s = overlay.parameter.apply(base, v);
                s.validate()?;
                Ok((Some(v), s))
            })
            .collect()
    }

    /// `(overlay value, scenario, swept value)` for every point, in output order.
    fn grid(&self, base: &Scenario) -> Result<Vec<(Option<f64>, Scenario, f64)>> {
        let points = self.points()?;
        let mut out = Vec::new();
        for (overlay, curve) in self.curves(base)? {
            for &x in &points {
                let s = self.parameter.apply(&curve, x);
                s.validate()?;
                out.push((overlay, s, x));
            }
        }
        Ok(out)
    }
}

/// Acceptance band for a Monte Carlo frequency: `max(0.005, 3·sqrt(p(1-p)/n))`.
pub fn mc_tolerance(p: f64, n_trials: u64) -> f64 {
    (3.0 * (p * (1.0 - p) / n_trials as f64).sqrt()).max(0.005)
}

/// Strict monotonicity of one curve, checked point to point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trend {
    pub overlay: Option<f64>,
    pub quantity: &'static str,
    pub direction: Direction,
    pub violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    StrictlyDecreasing,
    NonDecreasing,
}

impl Trend {
    fn check(overlay: Option<f64>, quantity: &'static str, direction: Direction, values: &[f64]) -> Self {
        let violations = values
            .windows(2)
            .filter(|w| match direction {
                Direction::StrictlyDecreasing => !(w[1] < w[0]),
                Direction::NonDecreasing => !(w[1] >= w[0]),
            })
            .count();
        Self { overlay, quantity, direction, violations }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Groups consecutive records sharing an overlay value.
fn per_curve<R>(records: &[R], overlay: impl Fn(&R) -> Option<f64>) -> Vec<(Option<f64>, Vec<&R>)> {
    let mut curves: Vec<(Option<f64>, Vec<&R>)> = Vec::new();
    for r in records {
        let key = overlay(r);
        match curves.last_mut() {
            Some((k, rows)) if *k == key => rows.push(r),
            _ => curves.push((key, vec![r])),
        }
    }
    curves
}

// ---------------------------------------------------------------------------
// Records

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRecord {
    pub scenario: Scenario,
    pub overlay: Option<f64>,
    pub gamma: f64,
    pub p_fa: f64,
    pub p_md: f64,
    pub zeta: f64,
    pub p_fa_mc: f64,
    pub p_md_mc: f64,
    pub zeta_mc: f64,
    pub zeta_band: f64,
    pub gamma_star: f64,
    pub zeta_star: f64,
    pub seed: u64,
    pub n_trials: u64,
}

impl DetectionRecord {
    pub fn within_band(&self) -> bool {
        (self.zeta_mc - self.zeta).abs() <= self.zeta_band
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRecord {
    pub scenario: Scenario,
    pub overlay: Option<f64>,
    pub gamma_u: f64,
    pub gamma_b: f64,
    pub c_u: f64,
    pub c_b: f64,
    pub c_s: f64,
    pub r_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovertnessRecord {
    pub scenario: Scenario,
    pub overlay: Option<f64>,
    pub h_min: f64,
    /// `None` when no height is secure, `+∞` when security never binds.
    pub h_max: Option<f64>,
    pub feasible: bool,
    pub p_u_star: f64,
    pub p_j_star: f64,
    pub h_star: f64,
    pub r_b_star: f64,
    pub c_s_star: f64,
    pub zeta_star: f64,
    pub active: Vec<ActiveConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub check: &'static str,
    pub scenario: Scenario,
    /// Threshold for detection checks, height for link checks.
    pub at: f64,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub n_trials: u64,
}

// ---------------------------------------------------------------------------
// Sweeps

/// Closed-form and simulated warden error over a threshold sweep.
///
/// All thresholds reuse the same seed, so the simulated curve is drawn from
/// one set of fading blocks per overlay value.
pub fn run_detection_sweep(base: &Scenario, sweep: &SweepSpec, n_trials: u64, seed: u64) -> Result<Vec<DetectionRecord>> {
    sweep.expect(SweptParameter::Gamma)?;
    sweep
        .grid(base)?
        .into_par_iter()
        .map(|(overlay, s, gamma)| {
            let closed = total_error(gamma, &s);
            let mc = simulate_detection(&s, gamma, n_trials, seed)?;
            let opt = optimal_detection(&s);
            Ok(DetectionRecord {
                scenario: s,
                overlay,
                gamma,
                p_fa: closed.p_fa,
                p_md: closed.p_md,
                zeta: closed.zeta,
                p_fa_mc: mc.point.p_fa,
                p_md_mc: mc.point.p_md,
                zeta_mc: mc.point.zeta,
                zeta_band: mc_tolerance(closed.zeta, n_trials),
                gamma_star: opt.gamma_star,
                zeta_star: opt.zeta_star,
                seed,
                n_trials,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSweep {
    pub records: Vec<RateRecord>,
    /// `C_s` and `R_b` strictly decreasing in height, per curve.
    pub trends: Vec<Trend>,
}

pub fn run_rate_sweep(base: &Scenario, sweep: &SweepSpec) -> Result<RateSweep> {
    sweep.expect(SweptParameter::H)?;
    let records: Vec<RateRecord> = sweep
        .grid(base)?
        .into_par_iter()
        .map(|(overlay, s, _)| {
            let r = rate_report(&s);
            RateRecord {
                scenario: s,
                overlay,
                gamma_u: r.gamma_u,
                gamma_b: r.gamma_b,
                c_u: r.c_u,
                c_b: r.c_b,
                c_s: r.c_s,
                r_b: r.r_b,
            }
        })
        .collect();
    let mut trends = Vec::new();
    for (overlay, rows) in per_curve(&records, |r| r.overlay) {
        let c_s: Vec<f64> = rows.iter().map(|r| r.c_s).collect();
        let r_b: Vec<f64> = rows.iter().map(|r| r.r_b).collect();
        trends.push(Trend::check(overlay, "c_s", Direction::StrictlyDecreasing, &c_s));
        trends.push(Trend::check(overlay, "r_b", Direction::StrictlyDecreasing, &r_b));
    }
    Ok(RateSweep { records, trends })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovertnessSweep {
    pub records: Vec<CovertnessRecord>,
    /// Optimized `R_b` nondecreasing in ε over feasible points, per curve.
    pub trends: Vec<Trend>,
}

/// Optimized secure covert rate across covertness requirements.
///
/// `grid` maps each point's scenario to the power grid searched there; pass
/// [`GridSpec::fixed`] to hold the scenario's powers.
pub fn run_covertness_sweep(
    base: &Scenario,
    sweep: &SweepSpec,
    grid: impl Fn(&Scenario) -> Result<GridSpec> + Sync,
) -> Result<CovertnessSweep> {
    sweep.expect(SweptParameter::Epsilon)?;
    let records: Vec<CovertnessRecord> = sweep
        .grid(base)?
        .into_par_iter()
        .map(|(overlay, s, _)| {
            let mut rec = optimization_record(&s, &grid(&s)?)?;
            rec.overlay = overlay;
            Ok(rec)
        })
        .collect::<Result<_>>()?;
    let trends = per_curve(&records, |r| r.overlay)
        .into_iter()
        .map(|(overlay, rows)| {
            let r_b: Vec<f64> = rows.iter().filter(|r| r.feasible).map(|r| r.r_b_star).collect();
            Trend::check(overlay, "r_b_star", Direction::NonDecreasing, &r_b)
        })
        .collect();
    Ok(CovertnessSweep { records, trends })
}

/// Feasible interval and grid optimum for one scenario; infeasible scenarios
/// yield a record with `feasible = false` and NaN optimum columns.
pub fn optimization_record(s: &Scenario, grid: &GridSpec) -> Result<CovertnessRecord> {
    let interval = feasible_interval(s)?;
    let mut rec = CovertnessRecord {
        scenario: *s,
        overlay: None,
        h_min: interval.h_min,
        h_max: interval.h_max(),
        feasible: false,
        p_u_star: f64::NAN,
        p_j_star: f64::NAN,
        h_star: f64::NAN,
        r_b_star: f64::NAN,
        c_s_star: f64::NAN,
        zeta_star: f64::NAN,
        active: Vec::new(),
    };
    match maximize_covert_rate(s, grid) {
        Ok(opt) => {
            rec.feasible = true;
            rec.p_u_star = opt.p_u;
            rec.p_j_star = opt.p_j;
            rec.h_star = opt.h;
            rec.r_b_star = opt.r_b;
            rec.c_s_star = opt.c_s;
            rec.zeta_star = opt.zeta_star;
            rec.active = opt.active_constraints;
        }
        Err(Error::Infeasible(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(rec)
}

/// Relative tolerance of the symbol-level SINR and forwarded-power checks.
pub const LINK_RELATIVE_TOL: f64 = 0.01;

/// Closed forms against their Monte Carlo counterparts.
///
/// Detection checks cover false alarm, missed detection and total error at
/// every threshold of `sweep`; link checks compare the simulated SINR and
/// forwarded power at each overlay scenario using `n_symbols` symbols.
pub fn run_validation(base: &Scenario, sweep: &SweepSpec, n_trials: u64, n_symbols: u64, seed: u64) -> Result<Vec<ValidationRecord>> {
    let mut out = Vec::new();
    for d in run_detection_sweep(base, sweep, n_trials, seed)? {
        for (check, expected, observed) in [
            ("p_fa", d.p_fa, d.p_fa_mc),
            ("p_md", d.p_md, d.p_md_mc),
            ("zeta", d.zeta, d.zeta_mc),
        ] {
            let tolerance = mc_tolerance(expected, n_trials);
            out.push(ValidationRecord {
                check,
                scenario: d.scenario,
                at: d.gamma,
                expected,
                observed,
                tolerance,
                pass: (observed - expected).abs() <= tolerance,
                seed,
                n_trials,
            });
        }
    }
    for (_, s) in sweep.curves(base)? {
        let sim = simulate_link(&s, n_symbols, seed)?;
        let expected = crate::rates::snr_destination(&s);
        for (check, expected, observed) in [("sinr_b", expected, sim.sinr), ("forwarded_power", 1.0, sim.forwarded_power)] {
            let tolerance = LINK_RELATIVE_TOL * expected;
            out.push(ValidationRecord {
                check,
                scenario: s,
                at: s.h,
                expected,
                observed,
                tolerance,
                pass: (observed - expected).abs() <= tolerance,
                seed,
                n_trials: n_symbols,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Configuration files

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum AxisFile {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, steps: usize },
}

impl AxisFile {
    fn resolve(&self) -> Result<GridAxis> {
        match self {
            AxisFile::Values(v) => GridAxis::new(v.clone()),
            AxisFile::Range { start, stop, steps } => GridAxis::linspace(*start, *stop, *steps),
        }
    }
}

/// Power grid for the optimizer; a missing axis holds the scenario's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerGridFile {
    #[serde(default)]
    pub p_u_w: Option<AxisFile>,
    #[serde(default)]
    pub p_j_w: Option<AxisFile>,
}

impl PowerGridFile {
    pub fn resolve(&self, s: &Scenario) -> Result<GridSpec> {
        Ok(GridSpec {
            p_u: self.p_u_w.as_ref().map_or_else(|| GridAxis::fixed(s.p_u), AxisFile::resolve)?,
            p_j: self.p_j_w.as_ref().map_or_else(|| GridAxis::fixed(s.p_j), AxisFile::resolve)?,
        })
    }
}

/// A scenario plus the optional sweep, power grid and sampling settings of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioFile,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub power_grid: Option<PowerGridFile>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
}

impl ExperimentConfig {
    /// Parses a full experiment file, or a bare scenario object with no sweep.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let config: Self = if value.get("scenario").is_some() {
            serde_json::from_value(value)?
        } else {
            Self { scenario: serde_json::from_value(value)?, sweep: None, power_grid: None, seed: None, trials: None }
        };
        config.scenario.to_scenario()?;
        if let Some(sweep) = &config.sweep {
            sweep.validate()?;
        }
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario.to_scenario()
    }

    pub fn grid_for(&self, s: &Scenario) -> Result<GridSpec> {
        self.power_grid.clone().unwrap_or_default().resolve(s)
    }
}

// ---------------------------------------------------------------------------
// CSV

/// Row layout of a CSV output file.
pub trait CsvRecord {
    fn header() -> Vec<&'static str>;
    fn fields(&self) -> Vec<String>;
}

const SCENARIO_COLUMNS: [&str; 15] = [
    "scenario_hash",
    "d_a2_m2",
    "d_b2_m2",
    "d_w2_m2",
    "h_m",
    "beta",
    "p_a_w",
    "p_u_w",
    "p_j_w",
    "p_max_w",
    "sigma_u2_w",
    "sigma_b2_w",
    "sigma_w2_w",
    "epsilon",
    "r_s_bpcu",
];

/// Shortest decimal that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

fn scenario_fields(s: &Scenario) -> Vec<String> {
    let mut out = vec![s.digest()];
    out.extend(
        [
            s.d_a2, s.d_b2, s.d_w2, s.h, s.beta, s.p_a, s.p_u, s.p_j, s.p_max, s.sigma_u2, s.sigma_b2, s.sigma_w2,
            s.epsilon, s.r_s,
        ]
        .map(format_f64),
    );
    out
}

fn optional(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

fn with_scenario(tail: &[&'static str]) -> Vec<&'static str> {
    SCENARIO_COLUMNS.iter().chain(tail).copied().collect()
}

impl CsvRecord for DetectionRecord {
    fn header() -> Vec<&'static str> {
        with_scenario(&[
            "overlay", "gamma_w", "p_fa", "p_md", "zeta", "p_fa_mc", "p_md_mc", "zeta_mc", "zeta_band", "gamma_star_w",
            "zeta_star", "seed", "n_trials",
        ])
    }

    fn fields(&self) -> Vec<String> {
        let mut f = scenario_fields(&self.scenario);
        f.push(optional(self.overlay));
        f.extend(
            [
                self.gamma, self.p_fa, self.p_md, self.zeta, self.p_fa_mc, self.p_md_mc, self.zeta_mc, self.zeta_band,
                self.gamma_star, self.zeta_star,
            ]
            .map(format_f64),
        );
        f.push(self.seed.to_string());
        f.push(self.n_trials.to_string());
        f
    }
}

impl CsvRecord for RateRecord {
    fn header() -> Vec<&'static str> {
        with_scenario(&["overlay", "gamma_u", "gamma_b", "c_u", "c_b", "c_s", "r_b"])
    }

    fn fields(&self) -> Vec<String> {
        let mut f = scenario_fields(&self.scenario);
        f.push(optional(self.overlay));
        f.extend([self.gamma_u, self.gamma_b, self.c_u, self.c_b, self.c_s, self.r_b].map(format_f64));
        f
    }
}

impl CsvRecord for CovertnessRecord {
    fn header() -> Vec<&'static str> {
        with_scenario(&[
            "overlay", "h_min_m", "h_max_m", "feasible", "p_u_star_w", "p_j_star_w", "h_star_m", "r_b_star",
            "c_s_star", "zeta_star", "active_constraints",
        ])
    }

    fn fields(&self) -> Vec<String> {
        let mut f = scenario_fields(&self.scenario);
        f.push(optional(self.overlay));
        f.push(format_f64(self.h_min));
        f.push(optional(self.h_max));
        f.push(self.feasible.to_string());
        f.extend(
            [self.p_u_star, self.p_j_star, self.h_star, self.r_b_star, self.c_s_star, self.zeta_star].map(format_f64),
        );
        f.push(self.active.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(";"));
        f
    }
}

impl CsvRecord for ValidationRecord {
    fn header() -> Vec<&'static str> {
        with_scenario(&["check", "at", "expected", "observed", "tolerance", "pass", "seed", "n_trials"])
    }

    fn fields(&self) -> Vec<String> {
        let mut f = scenario_fields(&self.scenario);
        f.push(self.check.to_owned());
        f.extend([self.at, self.expected, self.observed, self.tolerance].map(format_f64));
        f.push(self.pass.to_string());
        f.push(self.seed.to_string());
        f.push(self.n_trials.to_string());
        f
    }
}

pub fn write_csv<W: Write, R: CsvRecord>(out: W, records: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::header())?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<R: CsvRecord>(records: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::reference_scenario;

    fn gamma_sweep(steps: usize) -> SweepSpec {
        SweepSpec {
            parameter: SweptParameter::Gamma,
            start: 0.0,
            stop: 1.0,
            steps,
            overlay: Some(Overlay { parameter: SweptParameter::PU, values: vec![4.0, 2.0, 3.0] }),
        }
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 5).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(3.0, 3.0, 1).unwrap(), vec![3.0]);
        assert!(linspace(3.0, 4.0, 1).is_err());
        assert!(linspace(1.0, 0.0, 3).is_err());
        assert!(linspace(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn sweep_validation() {
        assert!(gamma_sweep(10).validate().is_ok());
        let mut dup = gamma_sweep(10);
        dup.overlay.as_mut().unwrap().values = vec![2.0, 2.0];
        assert!(dup.validate().is_err());
        let mut same = gamma_sweep(10);
        same.overlay.as_mut().unwrap().parameter = SweptParameter::Gamma;
        assert!(same.validate().is_err());
    }

    #[test]
    fn detection_sweep_sorted_and_within_band() {
        let records = run_detection_sweep(&reference_scenario(), &gamma_sweep(11), 100_000, 7).unwrap();
        assert_eq!(records.len(), 33);
        let keys: Vec<(f64, f64)> = records.iter().map(|r| (r.overlay.unwrap(), r.gamma)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert!(records.iter().all(DetectionRecord::within_band));
    }

    #[test]
    fn detection_sweep_single_trial() {
        let records = run_detection_sweep(&reference_scenario(), &gamma_sweep(5), 1, 3).unwrap();
        assert!(records.iter().all(|r| [0.0, 0.5, 1.0].contains(&r.zeta_mc)));
        let csv = to_csv_string(&records).unwrap();
        assert_eq!(csv.lines().count(), 16);
    }

    #[test]
    fn rate_sweep_wrong_parameter() {
        assert!(matches!(run_rate_sweep(&reference_scenario(), &gamma_sweep(3)), Err(Error::Config(_))));
    }

    #[test]
    fn rate_sweep_single_point() {
        let sweep = SweepSpec { parameter: SweptParameter::H, start: 50.0, stop: 50.0, steps: 1, overlay: None };
        let out = run_rate_sweep(&reference_scenario(), &sweep).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(to_csv_string(&out.records).unwrap().lines().count(), 2);
        assert!(out.trends.iter().all(Trend::holds));
    }

    #[test]
    fn covertness_sweep_keeps_infeasible_points() {
        let s = reference_scenario().with_p_u(10.0).with_r_s(0.05);
        let sweep = SweepSpec { parameter: SweptParameter::Epsilon, start: 1e-6, stop: 0.2, steps: 20, overlay: None };
        let out = run_covertness_sweep(&s, &sweep, GridSpec::fixed).unwrap();
        assert_eq!(out.records.len(), 20);
        assert!(!out.records[0].feasible);
        assert!(out.records[0].r_b_star.is_nan());
        assert!(out.records.iter().any(|r| r.feasible));
        assert!(out.trends.iter().all(Trend::holds));
    }

    #[test]
    fn records_recompute_from_their_columns() {
        let sweep = SweepSpec {
            parameter: SweptParameter::H,
            start: 0.0,
            stop: 300.0,
            steps: 7,
            overlay: Some(Overlay { parameter: SweptParameter::PU, values: vec![7.0, 9.0] }),
        };
        let out = run_rate_sweep(&reference_scenario(), &sweep).unwrap();
        let csv = to_csv_string(&out.records).unwrap();
        let mut reader = csv::Reader::from_reader(csv.as_bytes());
        let header = reader.headers().unwrap().clone();
        let col = |row: &csv::StringRecord, name: &str| -> f64 {
            row[header.iter().position(|h| h == name).unwrap()].parse().unwrap()
        };
        for row in reader.records() {
            let row = row.unwrap();
            let s = Scenario {
                d_a2: col(&row, "d_a2_m2"),
                d_b2: col(&row, "d_b2_m2"),
                d_w2: col(&row, "d_w2_m2"),
                h: col(&row, "h_m"),
                beta: col(&row, "beta"),
                p_a: col(&row, "p_a_w"),
                p_u: col(&row, "p_u_w"),
                p_j: col(&row, "p_j_w"),
                p_max: col(&row, "p_max_w"),
                sigma_u2: col(&row, "sigma_u2_w"),
                sigma_b2: col(&row, "sigma_b2_w"),
                sigma_w2: col(&row, "sigma_w2_w"),
                epsilon: col(&row, "epsilon"),
                r_s: col(&row, "r_s_bpcu"),
            };
            assert_eq!(&row[0], s.digest());
            assert_eq!(rate_report(&s).c_s, col(&row, "c_s"));
        }
    }

    #[test]
    fn config_is_strict() {
        let text = r#"{
            "scenario": {
                "beta_db": 10, "sigma_u2_dbw": -20, "sigma_b2_dbw": -20, "sigma_w2_dbw": -20,
                "d_a2_m2": 3600, "d_b2_m2": 2500, "d_w2_m2": 300, "h_m": 10,
                "p_a_w": 1, "p_u_w": 2, "p_j_w": 5, "p_max_w": 20,
                "epsilon": 0.1, "r_s_bpcu": 0
            },
            "power_grid": { "p_u_w": { "start": 1, "stop": 20, "steps": 20 }, "p_j_w": [5, 10] },
            "seed": 3
        }"#;
        let config = ExperimentConfig::from_json_str(text).unwrap();
        let s = config.scenario().unwrap();
        let grid = config.grid_for(&s).unwrap();
        assert_eq!(grid.p_u.values().len(), 20);
        assert_eq!(grid.p_j.values(), &[5.0, 10.0]);

        let bad = text.replace(r#""seed": 3"#, r#""seed": 3, "colour": "red""#);
        assert!(ExperimentConfig::from_json_str(&bad).is_err());
        let bare = serde_json::to_string(&ExperimentConfig::from_json_str(text).unwrap().scenario).unwrap();
        let config = ExperimentConfig::from_json_str(&bare).unwrap();
        assert!(config.sweep.is_none());
        assert!(ExperimentConfig::from_json_str(&bare.replace("\"epsilon\"", "\"eps\"")).is_err());
    }

    #[test]
    fn floats_round_trip_through_csv() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 12345.678901234567, f64::MIN_POSITIVE] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
