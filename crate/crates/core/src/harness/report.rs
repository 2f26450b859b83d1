//! Plain-text renderings of reports. Output depends only on the inputs.

use std::fmt::Write as _;

use super::compare::{ComparisonReport, Verdict};
use super::config::render_config;
use crate::analytic::AnalyticReport;
use crate::scenario::ScenarioConfig;
use crate::sim::{Estimate, SimConfig, SimReport};

fn list(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "na".to_string(), |x| x.to_string())
}

fn estimate(e: &Estimate) -> String {
    match e.half_width {
        Some(h) => format!("{} +/- {}", e.mean, h),
        None => e.mean.to_string(),
    }
}

/// The effective configuration as `#`-prefixed lines.
pub fn config_echo(cfg: &ScenarioConfig) -> String {
    let mut s = String::from("# effective config\n");
    for line in render_config(cfg).lines() {
        let _ = writeln!(s, "#   {line}");
    }
    s
}

pub fn render_analytic(cfg: &ScenarioConfig, report: &AnalyticReport) -> String {
    let mut s = config_echo(cfg);
    let _ = writeln!(s, "[analytic]");
    let _ = writeln!(s, "q_d = {}", report.q_d());
    let _ = writeln!(s, "q_s0 = {}", list(&report.rates.q_s0));
    let _ = writeln!(s, "q_s1 = {}", list(&report.rates.q_s1));
    let _ = writeln!(s, "stationary = {}", list(&report.chain.stationary));
    let _ = writeln!(s, "plp = {}", report.plp);
    let _ = writeln!(s, "loss_ratio = {}", opt(report.loss_ratio));
    let _ = writeln!(s, "p_queue_nonempty = {}", report.p_queue_nonempty);
    for (i, node) in report.aoi_nodes.iter().enumerate() {
        let _ = writeln!(
            s,
            "aoi_node {i}: q_aoi = {}, avg_aoi = {}",
            node.q_aoi, node.avg_aoi
        );
        for v in &node.violations {
            let _ = writeln!(s, "aoi_node {i}: violation_c{} = {}", v.constraint, v.prob);
        }
    }
    if let Some(p) = report.pooled() {
        let _ = writeln!(s, "q_aoi = {}", p.q_aoi);
        let _ = writeln!(s, "avg_aoi = {}", p.avg_aoi);
        for v in &p.violations {
            let _ = writeln!(s, "violation_c{} = {}", v.constraint, v.prob);
        }
    }
    s
}

pub fn render_simulation(cfg: &ScenarioConfig, sim: &SimConfig, report: &SimReport) -> String {
    let mut s = config_echo(cfg);
    let _ = writeln!(
        s,
        "# simulation: seed = {}, warmup = {}, measured = {}, batches = {}",
        sim.seed, sim.warmup_slots, report.measured_slots, report.batch_count
    );
    let c = &report.counters;
    let _ = writeln!(s, "[simulated]");
    let _ = writeln!(
        s,
        "counters: arrivals = {}, deliveries = {}, drops = {}, residual_queue = {}, multi_capture_slots = {}",
        c.arrivals, c.deliveries, c.drops, c.residual_queue, c.multi_capture_slots
    );
    let _ = writeln!(
        s,
        "q_d = {}",
        report.q_d.as_ref().map_or("na".into(), estimate)
    );
    let _ = writeln!(s, "plp = {}", estimate(&report.plp));
    let _ = writeln!(
        s,
        "loss_ratio = {}",
        report.loss_ratio.as_ref().map_or("na".into(), estimate)
    );
    let _ = writeln!(
        s,
        "p_queue_nonempty = {}",
        estimate(&report.p_queue_nonempty)
    );
    for (i, (avg, q)) in report
        .node_avg_aoi
        .iter()
        .zip(&report.node_q_aoi)
        .enumerate()
    {
        let _ = writeln!(s, "aoi_node {i}: q_aoi = {q}, avg_aoi = {avg}");
    }
    if let Some(q) = &report.q_aoi {
        let _ = writeln!(s, "q_aoi = {}", estimate(q));
    }
    if let Some(a) = &report.avg_aoi {
        let _ = writeln!(s, "avg_aoi = {}", estimate(a));
    }
    for (c, e) in &report.violations {
        let _ = writeln!(s, "violation_c{c} = {}", estimate(e));
    }
    s
}

pub fn render_comparison(report: &ComparisonReport) -> String {
    let mut s = String::new();
    for sc in &report.scenarios {
        let _ = writeln!(
            s,
            "[compare {}] seed = {}, measured = {}",
            sc.label, sc.seed, sc.measured_slots
        );
        let _ = writeln!(
            s,
            "{:<18} {:>22} {:>22} {:>12} {:>12} {:>12} {:>10} verdict",
            "metric", "analytic", "simulated", "abs_err", "rel_err", "half_width", "tolerance"
        );
        for r in &sc.rows {
            let _ = writeln!(
                s,
                "{:<18} {:>22} {:>22} {:>12.3e} {:>12} {:>12} {:>10} {}",
                r.metric,
                r.analytic,
                r.simulated,
                r.abs_error,
                r.rel_error
                    .map_or("undefined".into(), |e| format!("{e:.3e}")),
                r.half_width.map_or("na".into(), |h| format!("{h:.3e}")),
                r.tolerance.to_string(),
                r.verdict.name()
            );
        }
    }
    let _ = writeln!(s, "[worst case]");
    for w in report.worst() {
        let _ = writeln!(
            s,
            "{:<18} error = {:.4e} ({}) in {} {}",
            w.metric,
            w.error,
            w.tolerance,
            w.scenario,
            w.verdict.name()
        );
    }
    let undefined = report
        .scenarios
        .iter()
        .flat_map(|s| &s.rows)
        .filter(|r| r.verdict == Verdict::Undefined)
        .count();
    if undefined > 0 {
        let _ = writeln!(s, "undefined relative errors: {undefined}");
    }
    let _ = writeln!(
        s,
        "worst relative error = {}",
        report
            .worst_relative_error()
            .map_or("undefined".into(), |e| format!("{e:.4e}"))
    );
    let _ = writeln!(
        s,
        "result: {} ({} of {} scenarios outside tolerance)",
        if report.passed() { "PASS" } else { "FAIL" },
        report.failures(),
        report.scenarios.len()
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::evaluate_scenario;
    use crate::harness::compare::compare;
    use crate::sim::run_simulation;

    #[test]
    fn analytic_text() {
        let cfg = ScenarioConfig::baseline();
        let text = render_analytic(&cfg, &evaluate_scenario(&cfg).unwrap());
        assert!(text.starts_with("# effective config\n"));
        assert!(text.contains("#   p1 = 0.6"));
        assert!(text.contains("\nq_d = "));
        assert!(text.contains("\nviolation_c5 = "));
    }

    #[test]
    fn simulation_and_comparison_text() {
        let cfg = ScenarioConfig::baseline();
        let sim = SimConfig::measured(20_000, 2);
        let text = render_simulation(&cfg, &sim, &run_simulation(&cfg, &sim).unwrap());
        assert!(text.contains("seed = 2"));
        assert!(text.contains("plp = "));
        let cmp = render_comparison(&compare(&cfg, &sim).unwrap());
        assert!(cmp.contains("worst relative error = "));
        assert!(cmp.lines().last().unwrap().starts_with("result: "));
    }
}
