//! One-parameter sweeps over a base scenario.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use super::config::{file_stem, scenario_from_key_values, KeyValues};
use super::presets;
use crate::analytic::{evaluate_scenario, AnalyticReport, MeanAge};
use crate::error::{ConfigIssue, Error, Result};
use crate::scenario::ScenarioConfig;
use crate::sim::{run_simulation, SimConfig, SimReport};

/// Keys of a sweep file that are not scenario overrides.
pub const SWEEP_KEYS: &[&str] = &[
    "label",
    "base",
    "sweep_param",
    "sweep_values",
    "gamma_db_list",
    "simulate",
    "slots",
    "warmup",
    "seed",
    "batches",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    P1,
    P2,
    Lambda,
    GammaDb,
    Deadline,
    N,
    Alpha,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] = [
        SweepParam::P1,
        SweepParam::P2,
        SweepParam::Lambda,
        SweepParam::GammaDb,
        SweepParam::Deadline,
        SweepParam::N,
        SweepParam::Alpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::P1 => "p1",
            SweepParam::P2 => "p2",
            SweepParam::Lambda => "lambda",
            SweepParam::GammaDb => "gamma_db",
            SweepParam::Deadline => "deadline",
            SweepParam::N => "n",
            SweepParam::Alpha => "alpha",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "D" => Some(SweepParam::Deadline),
            "N" => Some(SweepParam::N),
            _ => Self::ALL.into_iter().find(|p| p.name() == s),
        }
    }

    /// Checks `value` against the parameter's legal domain.
    pub fn check(self, value: f64) -> std::result::Result<(), String> {
        let integral = |v: f64| v.fract() == 0.0 && v >= 0.0 && v <= f64::from(u32::MAX);
        let ok = match self {
            SweepParam::P1 | SweepParam::P2 | SweepParam::Lambda => (0.0..=1.0).contains(&value),
            SweepParam::GammaDb => value.is_finite(),
            SweepParam::Deadline => integral(value) && value >= 1.0,
            SweepParam::N => integral(value),
            SweepParam::Alpha => value.is_finite() && value > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(format!(
                "{value} is outside the domain of `{}`",
                self.name()
            ))
        }
    }

    pub fn apply(self, cfg: &mut ScenarioConfig, value: f64) -> Result<()> {
        self.check(value)
            .map_err(|reason| Error::invalid("sweep_values", reason))?;
        match self {
            SweepParam::P1 => cfg.access.p1 = value,
            SweepParam::P2 => cfg.access.p2 = value,
            SweepParam::Lambda => cfg.access.lambda = value,
            SweepParam::GammaDb => cfg.radio.capture_threshold_db = value,
            SweepParam::Deadline => cfg.access.deadline = value as u32,
            SweepParam::Alpha => cfg.radio.path_loss_exponent = value,
            SweepParam::N => {
                let n = value as usize;
                let distance = match cfg.geometry.aoi_distances_m.first() {
                    Some(d) => *d,
                    None if n == 0 => 1.0,
                    None => {
                        return Err(Error::invalid(
                            "sweep_values",
                            "an N sweep needs at least one AoI distance in the base scenario",
                        ))
                    }
                };
                cfg.geometry.aoi_distances_m = vec![distance; n];
            }
        }
        Ok(())
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Analytic,
    Simulated,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Simulated => "simulated",
        }
    }
}

/// One result row. `None` marks a value that does not exist for the row,
/// e.g. AoI figures without AoI nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_param: String,
    pub sweep_value: Option<f64>,
    pub gamma_db: f64,
    pub avg_aoi: Option<MeanAge>,
    pub plp: f64,
    pub p_queue_nonempty: f64,
    pub q_d: Option<f64>,
    pub q_aoi: Option<f64>,
    /// Aligned with [`SweepTable::constraints`].
    pub violations: Vec<Option<f64>>,
    pub source: Source,
}

impl SweepRow {
    pub fn analytic(
        cfg: &ScenarioConfig,
        report: &AnalyticReport,
        param: Option<(SweepParam, f64)>,
    ) -> Self {
        let pooled = report.pooled();
        SweepRow {
            sweep_param: param.map_or("none", |(p, _)| p.name()).to_string(),
            sweep_value: param.map(|(_, v)| v),
            gamma_db: cfg.radio.capture_threshold_db,
            avg_aoi: pooled.as_ref().map(|p| p.avg_aoi),
            plp: report.plp,
            p_queue_nonempty: report.p_queue_nonempty,
            q_d: Some(report.q_d()),
            q_aoi: pooled.as_ref().map(|p| p.q_aoi),
            violations: cfg
                .access
                .aoi_constraints
                .iter()
                .enumerate()
                .map(|(i, _)| pooled.as_ref().map(|p| p.violations[i].prob))
                .collect(),
            source: Source::Analytic,
        }
    }

    pub fn simulated(
        cfg: &ScenarioConfig,
        report: &SimReport,
        param: Option<(SweepParam, f64)>,
    ) -> Self {
        SweepRow {
            sweep_param: param.map_or("none", |(p, _)| p.name()).to_string(),
            sweep_value: param.map(|(_, v)| v),
            gamma_db: cfg.radio.capture_threshold_db,
            avg_aoi: report.avg_aoi.map(|e| MeanAge::Finite(e.mean)),
            plp: report.plp.mean,
            p_queue_nonempty: report.p_queue_nonempty.mean,
            q_d: report.q_d.map(|e| e.mean),
            q_aoi: report.q_aoi.map(|e| e.mean),
            violations: cfg
                .access
                .aoi_constraints
                .iter()
                .map(|c| {
                    report
                        .violations
                        .iter()
                        .find(|(k, _)| k == c)
                        .map(|(_, e)| e.mean)
                })
                .collect(),
            source: Source::Simulated,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub label: String,
    /// Path-loss exponent used, when known. Not carried by the CSV form.
    pub alpha: Option<f64>,
    pub constraints: Vec<u32>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Compares every cell of two tables, floats within `tol`.
    pub fn cells_match(&self, other: &SweepTable, tol: f64) -> bool {
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => (x - y).abs() <= tol,
            (None, None) => true,
            _ => false,
        };
        let age = |a: Option<MeanAge>, b: Option<MeanAge>| match (a, b) {
            (Some(MeanAge::Finite(x)), Some(MeanAge::Finite(y))) => (x - y).abs() <= tol,
            (Some(MeanAge::Unbounded), Some(MeanAge::Unbounded)) | (None, None) => true,
            _ => false,
        };
        self.constraints == other.constraints
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.sweep_param == b.sweep_param
                    && a.source == b.source
                    && close(a.sweep_value, b.sweep_value)
                    && close(Some(a.gamma_db), Some(b.gamma_db))
                    && age(a.avg_aoi, b.avg_aoi)
                    && close(Some(a.plp), Some(b.plp))
                    && close(Some(a.p_queue_nonempty), Some(b.p_queue_nonempty))
                    && close(a.q_d, b.q_d)
                    && close(a.q_aoi, b.q_aoi)
                    && a.violations.len() == b.violations.len()
                    && a.violations
                        .iter()
                        .zip(&b.violations)
                        .all(|(x, y)| close(*x, *y))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub label: String,
    pub base: ScenarioConfig,
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// One curve per capture threshold; empty means the base threshold only.
    pub gamma_db: Vec<f64>,
    /// Simulation settings; `None` for analytic-only sweeps.
    pub sim: Option<SimConfig>,
}

fn issue(kv: &KeyValues, key: &str, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue {
        line: kv.get(key).and_then(|e| e.line),
        key: key.to_string(),
        message: message.into(),
    }
}

fn resolve_base(name: &str, dir: Option<&Path>) -> Result<(String, String)> {
    if let Some(dir) = dir {
        let path = dir.join(name);
        if path.is_file() {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            return Ok((text, file_stem(&path)));
        }
    }
    match presets::get(name) {
        Some(text) => Ok((text.to_string(), file_stem(Path::new(name)))),
        None => Err(Error::Config(vec![ConfigIssue {
            line: None,
            key: "base".into(),
            message: format!("base scenario `{name}` not found"),
        }])),
    }
}

/// Parses a sweep file. `dir` is where a relative `base` is looked up before
/// falling back to the shipped presets. `overrides` apply to the base
/// scenario after the sweep file's own overrides.
pub fn parse_sweep(
    text: &str,
    dir: Option<&Path>,
    default_label: &str,
    overrides: &[String],
) -> Result<SweepSpec> {
    let mut kv = KeyValues::parse(text)?;
    let mut issues = Vec::new();

    let label = kv
        .remove("label")
        .map_or_else(|| default_label.to_string(), |e| e.value);
    let Some(base_entry) = kv.get("base").cloned() else {
        return Err(Error::Config(vec![issue(
            &kv,
            "base",
            "missing required key",
        )]));
    };
    let (base_text, base_label) = resolve_base(&base_entry.value, dir)?;

    let param = match kv.get("sweep_param") {
        None => {
            issues.push(issue(&kv, "sweep_param", "missing required key"));
            None
        }
        Some(e) => {
            let p = SweepParam::parse(&e.value);
            if p.is_none() {
                let names: Vec<_> = SweepParam::ALL.iter().map(|p| p.name()).collect();
                issues.push(issue(
                    &kv,
                    "sweep_param",
                    format!(
                        "unknown parameter `{}`; expected one of {}",
                        e.value,
                        names.join(", ")
                    ),
                ));
            }
            p
        }
    };

    let mut float_list = |kv: &KeyValues, key: &str, required: bool| -> Vec<f64> {
        let Some(e) = kv.get(key) else {
            if required {
                issues.push(issue(kv, key, "missing required key"));
            }
            return Vec::new();
        };
        let mut out = Vec::new();
        for item in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => issues.push(issue(kv, key, format!("cannot parse list entry `{item}`"))),
            }
        }
        if required && out.is_empty() {
            issues.push(issue(kv, key, "must list at least one value"));
        }
        out
    };
    let values = float_list(&kv, "sweep_values", true);
    let gamma_db = float_list(&kv, "gamma_db_list", false);

    let mut int_key = |kv: &KeyValues, key: &str, default: u64| -> u64 {
        match kv.get(key) {
            None => default,
            Some(e) => e.value.parse::<u64>().unwrap_or_else(|_| {
                issues.push(issue(
                    kv,
                    key,
                    format!("expected a non-negative integer, got `{}`", e.value),
                ));
                default
            }),
        }
    };
    let slots = int_key(&kv, "slots", 1_000_000);
    let warmup = int_key(&kv, "warmup", SimConfig::DEFAULT_WARMUP);
    let seed = int_key(&kv, "seed", 1);
    let batches = int_key(&kv, "batches", u64::from(SimConfig::DEFAULT_BATCHES));
    let simulate = match kv.get("simulate").map(|e| e.value.as_str()) {
        None | Some("false") | Some("no") | Some("0") => false,
        Some("true") | Some("yes") | Some("1") => true,
        Some(other) => {
            issues.push(issue(
                &kv,
                "simulate",
                format!("expected true or false, got `{other}`"),
            ));
            false
        }
    };

    if let Some(p) = param {
        for v in &values {
            if let Err(reason) = p.check(*v) {
                issues.push(issue(&kv, "sweep_values", reason));
            }
        }
        if p == SweepParam::GammaDb && !gamma_db.is_empty() {
            issues.push(issue(
                &kv,
                "gamma_db_list",
                "cannot be combined with sweep_param = gamma_db",
            ));
        }
    }

    let mut base_kv = KeyValues::parse(&base_text)?;
    for e in kv.entries() {
        if !SWEEP_KEYS.contains(&e.key.as_str()) {
            base_kv.set(&e.key, &e.value, e.line);
        }
    }
    base_kv.apply_overrides(overrides)?;
    let base = match scenario_from_key_values(&base_kv, &base_label) {
        Ok(b) => Some(b),
        Err(Error::Config(more)) => {
            issues.extend(more);
            None
        }
        Err(e) => return Err(e),
    };

    let sim = simulate.then(|| SimConfig {
        total_slots: warmup + slots,
        warmup_slots: warmup,
        seed,
        batch_count: u32::try_from(batches).unwrap_or(u32::MAX),
    });
    if let Some(sim) = &sim {
        if let Err(e) = sim.validate() {
            issues.push(issue(&kv, "slots", e.to_string()));
        }
    }

    match (base, param) {
        (Some(base), Some(param)) if issues.is_empty() => Ok(SweepSpec {
            label,
            base,
            param,
            values,
            gamma_db,
            sim,
        }),
        _ => Err(Error::Config(issues)),
    }
}

pub fn load_sweep(path: &Path, overrides: &[String]) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sweep(&text, path.parent(), &file_stem(path), overrides)
}

/// Loads one of the shipped sweep presets (`fig3`, `fig4`, `fig5`).
pub fn preset_sweep(name: &str, overrides: &[String]) -> Result<SweepSpec> {
    let text = presets::get(name)
        .filter(|t| t.contains("sweep_param"))
        .ok_or_else(|| Error::invalid("figure", format!("unknown figure preset `{name}`")))?;
    parse_sweep(text, None, name, overrides)
}

/// Closed-form identities that must hold for every analytic row.
fn check_analytic_invariants(report: &AnalyticReport) -> Result<()> {
    for node in &report.aoi_nodes {
        if let MeanAge::Finite(avg) = node.avg_aoi {
            if (avg * node.q_aoi - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("avg_aoi", "avg_aoi * q_aoi != 1"));
            }
        }
        for v in &node.violations {
            if (v.prob - (1.0 - node.q_aoi).powi(v.constraint as i32)).abs() > 1e-15 {
                return Err(Error::invalid("violation", "violation != (1 - q_aoi)^c"));
            }
        }
    }
    Ok(())
}

/// Runs every `(γ, value)` point of the sweep. Rows come out in sweep order:
/// curves in `gamma_db` order, values in listed order, the analytic row
/// before its simulated counterpart. Points run in parallel; each simulated
/// point seeds its own generator with `seed ^ point_index`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let gammas: Vec<Option<f64>> = if spec.gamma_db.is_empty() {
        vec![None]
    } else {
        spec.gamma_db.iter().copied().map(Some).collect()
    };
    let points: Vec<(usize, Option<f64>, f64)> = gammas
        .iter()
        .flat_map(|g| spec.values.iter().map(move |v| (*g, *v)))
        .enumerate()
        .map(|(i, (g, v))| (i, g, v))
        .collect();

    let chunks: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(index, gamma, value)| {
            let mut cfg = spec.base.clone();
            if let Some(g) = gamma {
                cfg.radio.capture_threshold_db = g;
            }
            spec.param.apply(&mut cfg, value)?;
            let tag = Some((spec.param, value));
            let report = evaluate_scenario(&cfg)?;
            check_analytic_invariants(&report)?;
            let mut rows = vec![SweepRow::analytic(&cfg, &report, tag)];
            if let Some(sim) = &spec.sim {
                let sim = SimConfig {
                    seed: sim.seed ^ index as u64,
                    ..*sim
                };
                let sim_report = run_simulation(&cfg, &sim)?;
                rows.push(SweepRow::simulated(&cfg, &sim_report, tag));
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    Ok(SweepTable {
        label: spec.label.clone(),
        alpha: Some(spec.base.radio.path_loss_exponent),
        constraints: spec.base.access.aoi_constraints.clone(),
        rows: chunks.into_iter().flatten().collect(),
    })
}
