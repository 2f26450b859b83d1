use std::fs;

use aoiplp::analytic::MeanAge;
use aoiplp::harness::sweep::Source;
use aoiplp::harness::{
    emit_csv, load_config, load_config_with, load_sweep, parse_csv, preset_sweep, run_sweep,
    to_csv_string, SweepTable,
};
use aoiplp::{Error, ScenarioConfig};

fn issues(err: Error) -> Vec<aoiplp::ConfigIssue> {
    match err {
        Error::Config(i) => i,
        other => panic!("expected a config error, got {other}"),
    }
}

fn curves(table: &SweepTable) -> Vec<Vec<&aoiplp::harness::SweepRow>> {
    let mut out: Vec<Vec<&aoiplp::harness::SweepRow>> = Vec::new();
    for row in table.rows.iter().filter(|r| r.source == Source::Analytic) {
        match out.last_mut() {
            Some(c) if c[0].gamma_db == row.gamma_db => c.push(row),
            _ => out.push(vec![row]),
        }
    }
    out
}

#[test]
fn shipped_preset_is_the_default_scenario() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/presets/paperV.cfg");
    let cfg = load_config(path.as_ref()).unwrap();
    let defaults = ScenarioConfig::baseline();
    assert_eq!(cfg.radio, defaults.radio);
    assert_eq!(cfg.geometry, defaults.geometry);
    assert_eq!(cfg.access, defaults.access);
    assert_eq!(cfg.label, "paperV");
}

#[test]
fn file_errors_name_key_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(
        &path,
        "tx_power_dbm = 10\nnoise_power_dbm = -80\ngamma_db = 0\n\
         deadline_distance_m = 30\naoi_distances_m = 40, 40\nn = 3\n\
         p1 = 1.5\np2 = 0.5\nlambda = 0.5\n",
    )
    .unwrap();
    let found = issues(load_config(&path).unwrap_err());
    let p1 = found.iter().find(|i| i.key == "p1").expect("p1 reported");
    assert_eq!(p1.line, Some(7));
    assert!(p1.message.contains("[0, 1]"));
    assert!(found.iter().any(|i| i.key == "n"));
    assert!(found.iter().any(|i| i.key == "deadline"));
}

#[test]
fn missing_alpha_takes_default_and_says_so() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noalpha.cfg");
    fs::write(
        &path,
        "tx_power_dbm = 10\nnoise_power_dbm = -80\ngamma_db = 0\n\
         deadline_distance_m = 30\naoi_distances_m = 40\n\
         p1 = 0.5\np2 = 0.5\nlambda = 0.5\ndeadline = 2\n",
    )
    .unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.radio.path_loss_exponent, 3.0);
    assert!(cfg.defaults_applied.iter().any(|d| d == "alpha"));
    let over = load_config_with(&path, &["alpha=4".into(), "alpha=3.5".into()]).unwrap();
    assert_eq!(over.radio.path_loss_exponent, 3.5);
    assert!(!over.defaults_applied.iter().any(|d| d == "alpha"));
}

#[test]
fn sweep_base_resolves_next_to_the_sweep_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("local.cfg"),
        "tx_power_dbm = 10\nnoise_power_dbm = -80\ngamma_db = 0\nalpha = 3\n\
         deadline_distance_m = 30\naoi_distances_m = 40, 40, 40\n\
         p1 = 0.5\np2 = 0.5\nlambda = 0.5\ndeadline = 3\naoi_constraints = 4\n",
    )
    .unwrap();
    let path = dir.path().join("s.sweep");
    fs::write(
        &path,
        "base = local.cfg\nsweep_param = lambda\nsweep_values = 0, 0.5, 1\n",
    )
    .unwrap();
    let table = run_sweep(&load_sweep(&path, &[]).unwrap()).unwrap();
    assert_eq!(table.label, "s");
    assert_eq!(table.constraints, vec![4]);
    assert_eq!(table.rows.len(), 3);
    assert_eq!(table.rows[0].plp, 0.0);
}

#[test]
fn fig3_rows_are_finite() {
    let table = run_sweep(&preset_sweep("fig3", &[]).unwrap()).unwrap();
    for curve in curves(&table) {
        assert_eq!(curve.len(), 10);
        assert!(curve
            .iter()
            .all(|r| matches!(r.avg_aoi, Some(MeanAge::Finite(v)) if v.is_finite())));
    }
}

#[test]
fn fig4_low_threshold_keeps_plp_lower() {
    let table = run_sweep(&preset_sweep("fig4", &[]).unwrap()).unwrap();
    let c = curves(&table);
    let (low, high) = (&c[0], &c[c.len() - 1]);
    assert!(low[0].gamma_db < high[0].gamma_db);
    for (l, h) in low.iter().zip(high.iter()) {
        assert!(l.plp < h.plp, "p2 = {:?}", l.sweep_value);
    }
}

#[test]
fn fig5_violation_falls_until_the_success_peak() {
    let table = run_sweep(&preset_sweep("fig5", &[]).unwrap()).unwrap();
    for curve in curves(&table) {
        let peak = (0..curve.len())
            .max_by(|&a, &b| curve[a].q_aoi.partial_cmp(&curve[b].q_aoi).unwrap())
            .unwrap();
        assert!(peak > 0 && peak + 1 < curve.len());
        for k in 0..table.constraints.len() {
            for (i, w) in curve.windows(2).enumerate() {
                let (a, b) = (w[0].violations[k].unwrap(), w[1].violations[k].unwrap());
                if i < peak {
                    assert!(b < a);
                } else {
                    assert!(b > a);
                }
            }
        }
    }
}

#[test]
fn fig4_csv_round_trip() {
    let table = run_sweep(&preset_sweep("fig4", &[]).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    emit_csv(&table, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let back = parse_csv(&text).unwrap();
    assert!(back.cells_match(&table, 1e-9));
    assert_eq!(to_csv_string(&back).unwrap(), text);
}

#[test]
fn single_row_csv() {
    let mut spec = preset_sweep("fig3", &[]).unwrap();
    spec.values = vec![0.5];
    spec.gamma_db.clear();
    let text = to_csv_string(&run_sweep(&spec).unwrap()).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn simulated_sweeps_are_byte_stable() {
    let overrides = ["p2=0.5".to_string()];
    let mut spec = preset_sweep("fig4", &overrides).unwrap();
    assert_eq!(spec.base.access.p2, 0.5);
    spec.values = vec![0.2, 0.7];
    spec.sim = Some(aoiplp::SimConfig::measured(30_000, 9));
    let a = to_csv_string(&run_sweep(&spec).unwrap()).unwrap();
    let b = to_csv_string(&run_sweep(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.matches(",simulated").count(), 8);
}
