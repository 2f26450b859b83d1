//! Flat `key = value` config files.
//!
//! ```text
//! # comment
//! [radio]
//! tx_power_dbm = 10
//! noise_power_dbm = -80
//! gamma_db = 0
//! [geometry]
//! deadline_distance_m = 30
//! aoi_distances_m = 40, 40, 40, 40, 40
//! [access]
//! p1 = 0.6
//! ...
//! ```
//!
//! Section headers only group keys; every key is global. Overrides given on
//! top of a file follow last-wins semantics.

use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{LinkGeometry, RadioParams};
use crate::error::{ConfigIssue, Error, Result};
use crate::scenario::{AccessParams, ScenarioConfig};

/// Every key a scenario config understands.
pub const SCENARIO_KEYS: &[&str] = &[
    "label",
    "tx_power_dbm",
    "deadline_tx_power_dbm",
    "aoi_tx_power_dbm",
    "noise_power_dbm",
    "alpha",
    "gamma_db",
    "deadline_distance_m",
    "aoi_distances_m",
    "n",
    "p1",
    "p2",
    "lambda",
    "deadline",
    "aoi_constraints",
    "literal_psk",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// `None` for command-line overrides.
    pub line: Option<usize>,
}

/// Ordered key/value entries as read from a file plus overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<Entry>,
}

impl KeyValues {
    /// Parses the text of a config file. Duplicate keys within a file are an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::default();
        let mut issues = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                let ok = line.ends_with(']')
                    && line[1..line.len() - 1]
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !ok {
                    issues.push(ConfigIssue {
                        line: Some(line_no),
                        key: line.to_string(),
                        message: "malformed section header".into(),
                    });
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                issues.push(ConfigIssue {
                    line: Some(line_no),
                    key: line.to_string(),
                    message: "expected `key = value`".into(),
                });
                continue;
            };
            let key = key.trim().to_string();
            if let Some(prev) = kv.entries.iter().find(|e| e.key == key) {
                issues.push(ConfigIssue {
                    line: Some(line_no),
                    key: key.clone(),
                    message: format!(
                        "duplicate key (first set on line {})",
                        prev.line.unwrap_or(0)
                    ),
                });
                continue;
            }
            kv.entries.push(Entry {
                key,
                value: value.trim().to_string(),
                line: Some(line_no),
            });
        }
        if issues.is_empty() {
            Ok(kv)
        } else {
            Err(Error::Config(issues))
        }
    }

    /// Applies `key=value` overrides; later ones win.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        let mut issues = Vec::new();
        for o in overrides {
            let o = o.as_ref();
            match o.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => self.set(k.trim(), v.trim(), None),
                _ => issues.push(ConfigIssue {
                    line: None,
                    key: o.to_string(),
                    message: "override must have the form key=value".into(),
                }),
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) {
        self.entries.retain(|e| e.key != key);
        self.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn remove(&mut self, key: &str) -> Option<Entry> {
        let pos = self.entries.iter().rposition(|e| e.key == key)?;
        let entry = self.entries.remove(pos);
        self.entries.retain(|e| e.key != key);
        Some(entry)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.get(key).and_then(|e| e.line)
    }
}

/// Collects typed values and every problem encountered along the way.
struct Reader<'a> {
    kv: &'a KeyValues,
    issues: Vec<ConfigIssue>,
}

impl<'a> Reader<'a> {
    fn issue(&mut self, key: &str, message: impl Into<String>) {
        let line = self.kv.line_of(key);
        self.issues.push(ConfigIssue {
            line,
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.kv.get(key).map(|e| e.value.as_str())
    }

    fn f64_opt(&mut self, key: &str) -> Option<f64> {
        let raw = self.raw(key)?;
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.issue(key, format!("expected a finite number, got `{raw}`"));
                None
            }
        }
    }

    fn f64_req(&mut self, key: &str) -> Option<f64> {
        if self.raw(key).is_none() {
            self.issue(key, "missing required key");
            return None;
        }
        self.f64_opt(key)
    }

    fn u32_opt(&mut self, key: &str) -> Option<u32> {
        let raw = self.raw(key)?;
        match raw.parse::<u32>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.issue(key, format!("expected a non-negative integer, got `{raw}`"));
                None
            }
        }
    }

    fn u32_req(&mut self, key: &str) -> Option<u32> {
        if self.raw(key).is_none() {
            self.issue(key, "missing required key");
            return None;
        }
        self.u32_opt(key)
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str) -> Option<Vec<T>> {
        let raw = self.raw(key)?;
        let mut out = Vec::new();
        for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<T>() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.issue(key, format!("cannot parse list entry `{item}`"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn bool_opt(&mut self, key: &str) -> Option<bool> {
        let raw = self.raw(key)?;
        match raw {
            "true" | "yes" | "1" => Some(true),
            "false" | "no" | "0" => Some(false),
            _ => {
                self.issue(key, format!("expected true or false, got `{raw}`"));
                None
            }
        }
    }
}

/// Builds a validated scenario, reporting every violated rule at once.
pub fn scenario_from_key_values(kv: &KeyValues, default_label: &str) -> Result<ScenarioConfig> {
    let mut r = Reader {
        kv,
        issues: Vec::new(),
    };
    for e in kv.entries() {
        if !SCENARIO_KEYS.contains(&e.key.as_str()) {
            r.issues.push(ConfigIssue {
                line: e.line,
                key: e.key.clone(),
                message: "unknown key".into(),
            });
        }
    }
    let mut defaults_applied = Vec::new();

    let common_power = r.f64_opt("tx_power_dbm");
    let class_power = |r: &mut Reader, key: &str| {
        let specific = r.f64_opt(key);
        if specific.is_none() && common_power.is_none() && r.raw(key).is_none() {
            r.issue(
                key,
                "missing required key (or set tx_power_dbm for all nodes)",
            );
        }
        specific.or(common_power)
    };
    let deadline_tx = class_power(&mut r, "deadline_tx_power_dbm");
    let aoi_tx = class_power(&mut r, "aoi_tx_power_dbm");
    let noise = r.f64_req("noise_power_dbm");
    let gamma_db = r.f64_req("gamma_db");
    let alpha = if r.raw("alpha").is_some() {
        r.f64_opt("alpha")
    } else {
        defaults_applied.push("alpha".to_string());
        Some(RadioParams::DEFAULT_PATH_LOSS_EXPONENT)
    };

    let deadline_distance = r.f64_req("deadline_distance_m");
    let aoi_distances: Option<Vec<f64>> = if r.raw("aoi_distances_m").is_some() {
        r.list("aoi_distances_m")
    } else {
        r.issue("aoi_distances_m", "missing required key");
        None
    };
    if let (Some(n), Some(d)) = (r.u32_opt("n"), aoi_distances.as_ref()) {
        if n as usize != d.len() {
            r.issue(
                "n",
                format!(
                    "N = {n} does not match the {} entries of aoi_distances_m",
                    d.len()
                ),
            );
        }
    }

    let p1 = r.f64_req("p1");
    let p2 = r.f64_req("p2");
    let lambda = r.f64_req("lambda");
    let deadline = r.u32_req("deadline");
    let constraints: Option<Vec<u32>> = if r.raw("aoi_constraints").is_some() {
        r.list("aoi_constraints")
    } else {
        defaults_applied.push("aoi_constraints".to_string());
        Some(Vec::new())
    };
    let literal_psk = r.bool_opt("literal_psk").unwrap_or(false);
    let label = r
        .raw("label")
        .map(str::to_string)
        .unwrap_or_else(|| default_label.to_string());

    // Placeholders stand in for unreadable values so range checks still run
    // on the keys that were given.
    let cfg = ScenarioConfig {
        label,
        radio: RadioParams {
            deadline_tx_power_dbm: deadline_tx.unwrap_or(0.0),
            aoi_tx_power_dbm: aoi_tx.unwrap_or(0.0),
            noise_power_dbm: noise.unwrap_or(0.0),
            path_loss_exponent: alpha.unwrap_or(RadioParams::DEFAULT_PATH_LOSS_EXPONENT),
            capture_threshold_db: gamma_db.unwrap_or(0.0),
        },
        geometry: LinkGeometry {
            deadline_distance_m: deadline_distance.unwrap_or(1.0),
            aoi_distances_m: aoi_distances.unwrap_or_default(),
        },
        access: AccessParams {
            p1: p1.unwrap_or(0.0),
            p2: p2.unwrap_or(0.0),
            lambda: lambda.unwrap_or(0.0),
            deadline: deadline.unwrap_or(1),
            aoi_constraints: constraints.unwrap_or_default(),
        },
        literal_psk,
        defaults_applied,
    };
    for (key, message) in cfg.violations() {
        let line = kv.line_of(key).or_else(|| {
            key.ends_with("tx_power_dbm")
                .then(|| kv.line_of("tx_power_dbm"))
                .flatten()
        });
        r.issues.push(ConfigIssue {
            line,
            key: key.to_string(),
            message,
        });
    }
    if r.issues.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(r.issues))
    }
}

pub fn parse_config(
    text: &str,
    default_label: &str,
    overrides: &[String],
) -> Result<ScenarioConfig> {
    let mut kv = KeyValues::parse(text)?;
    kv.apply_overrides(overrides)?;
    scenario_from_key_values(&kv, default_label)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    load_config_with(path, &[])
}

pub fn load_config_with(path: &Path, overrides: &[String]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &file_stem(path), overrides)
}

pub(crate) fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string())
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text form of a scenario; parsing it gives the scenario back.
pub fn render_config(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "label = {}", cfg.label);
    if !cfg.defaults_applied.is_empty() {
        let _ = writeln!(s, "# defaults applied: {}", cfg.defaults_applied.join(", "));
    }
    let r = &cfg.radio;
    let _ = writeln!(s, "[radio]");
    let _ = writeln!(s, "deadline_tx_power_dbm = {}", r.deadline_tx_power_dbm);
    let _ = writeln!(s, "aoi_tx_power_dbm = {}", r.aoi_tx_power_dbm);
    let _ = writeln!(s, "noise_power_dbm = {}", r.noise_power_dbm);
    let _ = writeln!(s, "alpha = {}", r.path_loss_exponent);
    let _ = writeln!(s, "gamma_db = {}", r.capture_threshold_db);
    let _ = writeln!(s, "[geometry]");
    let _ = writeln!(
        s,
        "deadline_distance_m = {}",
        cfg.geometry.deadline_distance_m
    );
    let _ = writeln!(
        s,
        "aoi_distances_m = {}",
        join(&cfg.geometry.aoi_distances_m)
    );
    let a = &cfg.access;
    let _ = writeln!(s, "[access]");
    let _ = writeln!(s, "p1 = {}", a.p1);
    let _ = writeln!(s, "p2 = {}", a.p2);
    let _ = writeln!(s, "lambda = {}", a.lambda);
    let _ = writeln!(s, "deadline = {}", a.deadline);
    let _ = writeln!(s, "aoi_constraints = {}", join(&a.aoi_constraints));
    let _ = writeln!(s, "[flags]");
    let _ = writeln!(s, "literal_psk = {}", cfg.literal_psk);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::presets;

    fn issues(err: Error) -> Vec<ConfigIssue> {
        match err {
            Error::Config(i) => i,
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn shipped_preset_is_the_reference_scenario() {
        let cfg = parse_config(presets::REFERENCE_SCENARIO, "paperV", &[]).unwrap();
        let reference = ScenarioConfig::baseline();
        assert_eq!(cfg.radio, reference.radio);
        assert_eq!(cfg.geometry, reference.geometry);
        assert_eq!(cfg.access, reference.access);
        assert!(cfg.defaults_applied.is_empty());
    }

    #[test]
    fn out_of_range_probability_names_the_key() {
        let errs =
            issues(parse_config(presets::REFERENCE_SCENARIO, "x", &["p1=1.5".into()]).unwrap_err());
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].key, "p1");
        assert!(errs[0].message.contains("[0, 1]"), "{}", errs[0].message);
    }

    #[test]
    fn line_numbers_are_reported() {
        let text = presets::REFERENCE_SCENARIO.replace("p1 = 0.6", "p1 = 1.5");
        let errs = issues(parse_config(&text, "x", &[]).unwrap_err());
        let expected_line = text.lines().position(|l| l.starts_with("p1")).unwrap() + 1;
        assert_eq!(errs[0].line, Some(expected_line));
    }

    #[test]
    fn alpha_defaults_when_absent() {
        let text: String = presets::REFERENCE_SCENARIO
            .lines()
            .filter(|l| !l.starts_with("alpha"))
            .map(|l| format!("{l}\n"))
            .collect();
        let cfg = parse_config(&text, "x", &[]).unwrap();
        assert_eq!(cfg.radio.path_loss_exponent, 3.0);
        assert!(cfg.defaults_applied.contains(&"alpha".to_string()));
        assert!(render_config(&cfg).contains("# defaults applied: alpha"));
    }

    #[test]
    fn all_problems_reported_together() {
        let text = "\
tx_power_dbm = 10
noise_power_dbm = -80
gamma_db = 0
deadline_distance_m = 30
aoi_distances_m = 40, 40, 40
n = 5
p1 = 1.5
p2 = 0.3
deadline = 0
bogus = 1
";
        let errs = issues(parse_config(text, "x", &[]).unwrap_err());
        let keys: Vec<&str> = errs.iter().map(|i| i.key.as_str()).collect();
        for k in ["bogus", "n", "lambda"] {
            assert!(keys.contains(&k), "{k} missing: {keys:?}");
        }
        let n_issue = errs.iter().find(|i| i.key == "n").unwrap();
        assert_eq!(n_issue.line, Some(6));
        let missing = errs.iter().find(|i| i.key == "lambda").unwrap();
        assert!(missing.message.contains("missing"));
    }

    #[test]
    fn range_errors_reported_with_structural_ones() {
        let text = presets::REFERENCE_SCENARIO
            .replace("p2 = 0.6", "p2 = 7")
            .replace("deadline = 5", "deadline = 0");
        let errs = issues(parse_config(&text, "x", &[]).unwrap_err());
        let keys: Vec<&str> = errs.iter().map(|i| i.key.as_str()).collect();
        assert!(
            keys.contains(&"p2") && keys.contains(&"deadline"),
            "{keys:?}"
        );
    }

    #[test]
    fn overrides_last_wins_and_commute_for_distinct_keys() {
        let a = parse_config(
            presets::REFERENCE_SCENARIO,
            "x",
            &["p1=0.1".into(), "lambda=0.2".into()],
        )
        .unwrap();
        let b = parse_config(
            presets::REFERENCE_SCENARIO,
            "x",
            &["lambda=0.2".into(), "p1=0.1".into()],
        )
        .unwrap();
        assert_eq!(a, b);
        let c = parse_config(
            presets::REFERENCE_SCENARIO,
            "x",
            &["p1=0.1".into(), "p1=0.9".into()],
        )
        .unwrap();
        assert_eq!(c.access.p1, 0.9);
        assert!(parse_config(presets::REFERENCE_SCENARIO, "x", &["p1".into()]).is_err());
    }

    #[test]
    fn duplicate_and_malformed_lines() {
        let errs = issues(KeyValues::parse("a = 1\na = 2\nnonsense\n[bad section\n").unwrap_err());
        assert_eq!(errs.len(), 3);
        assert_eq!(errs[0].line, Some(2));
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = ScenarioConfig::baseline();
        cfg.geometry.aoi_distances_m = vec![12.5, 40.0, 33.3];
        cfg.literal_psk = true;
        let back = parse_config(&render_config(&cfg), "ignored", &[]).unwrap();
        assert_eq!(back, cfg);
    }
}
