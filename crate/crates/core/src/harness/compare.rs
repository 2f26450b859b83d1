//! Analytic versus simulated metrics, metric by metric.

use std::fmt;

use rayon::prelude::*;

use crate::analytic::{evaluate_scenario, MeanAge};
use crate::error::Result;
use crate::scenario::ScenarioConfig;
use crate::sim::{run_simulation, Estimate, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `|sim − analytic| / |analytic| ≤ bound`.
    Relative(f64),
    /// `|sim − analytic| ≤ bound`.
    Absolute(f64),
    /// Reported, never judged.
    Informational,
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Relative(b) => write!(f, "rel<={b}"),
            Tolerance::Absolute(b) => write!(f, "abs<={b}"),
            Tolerance::Informational => f.write_str("info"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// A relative bound against an analytic value of 0 or infinity.
    Undefined,
    Info,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undefined => "UNDEFINED",
            Verdict::Info => "info",
        }
    }
}

pub const AVG_AOI_TOLERANCE: Tolerance = Tolerance::Relative(0.03);
pub const Q_D_TOLERANCE: Tolerance = Tolerance::Relative(0.03);
pub const PLP_TOLERANCE: Tolerance = Tolerance::Absolute(0.01);
pub const P_QUEUE_TOLERANCE: Tolerance = Tolerance::Absolute(0.01);

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub metric: String,
    /// `f64::INFINITY` for an unbounded analytic mean age.
    pub analytic: f64,
    pub simulated: f64,
    pub abs_error: f64,
    pub rel_error: Option<f64>,
    pub half_width: Option<f64>,
    pub tolerance: Tolerance,
    pub verdict: Verdict,
}

impl MetricRow {
    pub fn new(
        metric: impl Into<String>,
        analytic: f64,
        sim: Estimate,
        tolerance: Tolerance,
    ) -> Self {
        let abs_error = (sim.mean - analytic).abs();
        let rel_error =
            (analytic != 0.0 && analytic.is_finite()).then(|| abs_error / analytic.abs());
        let verdict = match tolerance {
            Tolerance::Informational => Verdict::Info,
            Tolerance::Absolute(b) if abs_error <= b => Verdict::Pass,
            Tolerance::Absolute(_) => Verdict::Fail,
            Tolerance::Relative(b) => match rel_error {
                None => Verdict::Undefined,
                Some(r) if r <= b => Verdict::Pass,
                Some(_) => Verdict::Fail,
            },
        };
        MetricRow {
            metric: metric.into(),
            analytic,
            simulated: sim.mean,
            abs_error,
            rel_error,
            half_width: sim.half_width,
            tolerance,
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison {
    pub label: String,
    pub seed: u64,
    pub measured_slots: u64,
    pub rows: Vec<MetricRow>,
}

impl ScenarioComparison {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn row(&self, metric: &str) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

/// Largest error seen for one metric across all scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub metric: String,
    pub tolerance: Tolerance,
    /// Relative error for relative bounds, absolute error otherwise.
    pub error: f64,
    pub scenario: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub scenarios: Vec<ScenarioComparison>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.scenarios.iter().all(ScenarioComparison::passed)
    }

    pub fn failures(&self) -> usize {
        self.scenarios.iter().filter(|s| !s.passed()).count()
    }

    /// Worst error per judged metric, in first-seen metric order.
    pub fn worst(&self) -> Vec<WorstCase> {
        let mut out: Vec<WorstCase> = Vec::new();
        for sc in &self.scenarios {
            for row in sc
                .rows
                .iter()
                .filter(|r| r.tolerance != Tolerance::Informational)
            {
                let error = match row.tolerance {
                    Tolerance::Relative(_) => match row.rel_error {
                        Some(e) => e,
                        None => continue,
                    },
                    _ => row.abs_error,
                };
                match out.iter_mut().find(|w| w.metric == row.metric) {
                    Some(w) if error > w.error => {
                        w.error = error;
                        w.scenario = sc.label.clone();
                        w.verdict = row.verdict;
                    }
                    Some(_) => {}
                    None => out.push(WorstCase {
                        metric: row.metric.clone(),
                        tolerance: row.tolerance,
                        error,
                        scenario: sc.label.clone(),
                        verdict: row.verdict,
                    }),
                }
            }
        }
        out
    }

    /// Largest relative error among rows judged on a relative bound.
    pub fn worst_relative_error(&self) -> Option<f64> {
        self.scenarios
            .iter()
            .flat_map(|s| &s.rows)
            .filter(|r| matches!(r.tolerance, Tolerance::Relative(_)))
            .filter_map(|r| r.rel_error)
            .reduce(f64::max)
    }
}

/// Simulates `scenario` and compares every metric with the analytic model.
pub fn compare_one(scenario: &ScenarioConfig, sim: &SimConfig) -> Result<ScenarioComparison> {
    let analytic = evaluate_scenario(scenario)?;
    let simulated = run_simulation(scenario, sim)?;
    let mut rows = Vec::new();

    if let (Some(pooled), Some(avg)) = (analytic.pooled(), simulated.avg_aoi) {
        let a = match pooled.avg_aoi {
            MeanAge::Finite(v) => v,
            MeanAge::Unbounded => f64::INFINITY,
        };
        rows.push(MetricRow::new("avg_aoi", a, avg, AVG_AOI_TOLERANCE));
    }
    if let Some(qd) = simulated.q_d {
        rows.push(MetricRow::new("q_d", analytic.q_d(), qd, Q_D_TOLERANCE));
    }
    rows.push(MetricRow::new(
        "plp",
        analytic.plp,
        simulated.plp,
        PLP_TOLERANCE,
    ));
    rows.push(MetricRow::new(
        "p_queue_nonempty",
        analytic.p_queue_nonempty,
        simulated.p_queue_nonempty,
        P_QUEUE_TOLERANCE,
    ));
    if let (Some(a), Some(s)) = (analytic.loss_ratio, simulated.loss_ratio) {
        rows.push(MetricRow::new("loss_ratio", a, s, Tolerance::Informational));
    }
    if let (Some(pooled), Some(q)) = (analytic.pooled(), simulated.q_aoi) {
        rows.push(MetricRow::new(
            "q_aoi",
            pooled.q_aoi,
            q,
            Tolerance::Informational,
        ));
        for v in &pooled.violations {
            if let Some((_, e)) = simulated
                .violations
                .iter()
                .find(|(c, _)| *c == v.constraint)
            {
                rows.push(MetricRow::new(
                    format!("violation_c{}", v.constraint),
                    v.prob,
                    *e,
                    Tolerance::Informational,
                ));
            }
        }
    }
    Ok(ScenarioComparison {
        label: scenario.label.clone(),
        seed: sim.seed,
        measured_slots: simulated.measured_slots,
        rows,
    })
}

pub fn compare(scenario: &ScenarioConfig, sim: &SimConfig) -> Result<ComparisonReport> {
    Ok(ComparisonReport {
        scenarios: vec![compare_one(scenario, sim)?],
    })
}

/// Compares many scenarios in parallel; scenario `i` is simulated with seed
/// `sim.seed ^ i`. Output order follows input order.
pub fn compare_all(scenarios: &[ScenarioConfig], sim: &SimConfig) -> Result<ComparisonReport> {
    let scenarios = scenarios
        .par_iter()
        .enumerate()
        .map(|(i, sc)| {
            let cfg = SimConfig {
                seed: sim.seed ^ i as u64,
                ..*sim
            };
            compare_one(sc, &cfg)
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonReport { scenarios })
}

/// The 108-point cross-validation grid over the default geometry:
/// γ ∈ {−2, 0, 2} dB, p1, p2 ∈ {0.2, 0.5, 0.8}, λ ∈ {0.3, 0.7}, D ∈ {3, 5}.
pub fn validation_grid() -> Vec<ScenarioConfig> {
    let mut out = Vec::with_capacity(108);
    for gamma in [-2.0, 0.0, 2.0] {
        for p1 in [0.2, 0.5, 0.8] {
            for p2 in [0.2, 0.5, 0.8] {
                for lambda in [0.3, 0.7] {
                    for deadline in [3, 5] {
                        let mut cfg = ScenarioConfig::baseline();
                        cfg.radio.capture_threshold_db = gamma;
                        cfg.access.p1 = p1;
                        cfg.access.p2 = p2;
                        cfg.access.lambda = lambda;
                        cfg.access.deadline = deadline;
                        cfg.label = format!("g{gamma}_p1{p1}_p2{p2}_l{lambda}_D{deadline}");
                        out.push(cfg);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(mean: f64) -> Estimate {
        Estimate {
            mean,
            half_width: None,
        }
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            MetricRow::new("x", 2.0, est(2.05), Tolerance::Relative(0.03)).verdict,
            Verdict::Pass
        );
        assert_eq!(
            MetricRow::new("x", 2.0, est(2.1), Tolerance::Relative(0.03)).verdict,
            Verdict::Fail
        );
        let zero = MetricRow::new("x", 0.0, est(0.0), Tolerance::Relative(0.03));
        assert_eq!(zero.verdict, Verdict::Undefined);
        assert_eq!(zero.rel_error, None);
        let inf = MetricRow::new("x", f64::INFINITY, est(1e6), Tolerance::Relative(0.03));
        assert_eq!(inf.verdict, Verdict::Undefined);
        assert_eq!(
            MetricRow::new("x", 0.1, est(0.105), Tolerance::Absolute(0.01)).verdict,
            Verdict::Pass
        );
        assert_eq!(
            MetricRow::new("x", 0.1, est(0.5), Tolerance::Informational).verdict,
            Verdict::Info
        );
    }

    #[test]
    fn no_arrivals_gives_zero_deadline_error() {
        let mut cfg = ScenarioConfig::baseline();
        cfg.access.lambda = 0.0;
        let report = compare(&cfg, &SimConfig::measured(20_000, 3)).unwrap();
        let sc = &report.scenarios[0];
        assert_eq!(sc.row("plp").unwrap().abs_error, 0.0);
        assert_eq!(sc.row("p_queue_nonempty").unwrap().abs_error, 0.0);
        assert!(sc.row("loss_ratio").is_none());
    }

    #[test]
    fn sure_delivery_gives_zero_plp_error() {
        let mut cfg = ScenarioConfig::baseline();
        cfg.access.p1 = 1.0;
        cfg.access.p2 = 0.0;
        cfg.radio.noise_power_dbm = -300.0;
        let report = compare(&cfg, &SimConfig::measured(20_000, 3)).unwrap();
        let plp = report.scenarios[0].row("plp").unwrap();
        assert_eq!(plp.analytic, 0.0);
        assert_eq!(plp.abs_error, 0.0);
        assert_eq!(report.scenarios[0].row("q_d").unwrap().abs_error, 0.0);
    }

    #[test]
    fn defaults_pass_and_worst_is_tracked() {
        let report = compare(
            &ScenarioConfig::baseline(),
            &SimConfig::measured(200_000, 5),
        )
        .unwrap();
        assert!(report.passed(), "{report:?}");
        let worst = report.worst();
        let names: Vec<_> = worst.iter().map(|w| w.metric.as_str()).collect();
        assert_eq!(names, ["avg_aoi", "q_d", "plp", "p_queue_nonempty"]);
        assert!(report.worst_relative_error().unwrap() < 0.03);
    }

    #[test]
    fn grid_is_complete_and_distinct() {
        let grid = validation_grid();
        assert_eq!(grid.len(), 108);
        let mut labels: Vec<_> = grid.iter().map(|g| g.label.clone()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 108);
        assert!(grid.iter().all(|g| g.validate().is_ok()));
    }
}
