//! Full description of one network scenario.

use crate::channel::{mean_rx_power, LinkGeometry, MeanRxPower, RadioParams};
use crate::error::{ConfigIssue, Error, Result};

/// Channel-access and traffic parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessParams {
    /// Per-slot transmit probability of the deadline node when it holds a packet.
    pub p1: f64,
    /// Per-slot transmit probability of each AoI node.
    pub p2: f64,
    /// Per-slot Bernoulli arrival probability at the deadline node.
    pub lambda: f64,
    /// Deadline in slots: a packet gets at most this many transmission opportunities.
    pub deadline: u32,
    /// Age thresholds `c` for the violation probability `P(Δ > c)`.
    pub aoi_constraints: Vec<u32>,
}

impl AccessParams {
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        for (name, v) in [("p1", self.p1), ("p2", self.p2), ("lambda", self.lambda)] {
            if !(0.0..=1.0).contains(&v) {
                out.push((name, format!("must lie in [0, 1], got {v}")));
            }
        }
        if self.deadline < 1 {
            out.push(("deadline", "must be >= 1".to_string()));
        }
        if self.aoi_constraints.iter().any(|c| *c < 1) {
            out.push((
                "aoi_constraints",
                "every constraint must be >= 1".to_string(),
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub label: String,
    pub radio: RadioParams,
    pub geometry: LinkGeometry,
    pub access: AccessParams,
    /// Treat the deadline node as an ordinary AoI-distance interferer when it
    /// collides with an AoI node, instead of using its own received power.
    pub literal_psk: bool,
    /// Keys that were absent from the source and took their default value.
    pub defaults_applied: Vec<String>,
}

impl ScenarioConfig {
    /// One deadline node at 30 m, five AoI nodes at 40 m, 10 dBm transmit
    /// power, −80 dBm noise, α = 3.
    pub fn baseline() -> Self {
        ScenarioConfig {
            label: "paperV".to_string(),
            radio: RadioParams {
                deadline_tx_power_dbm: 10.0,
                aoi_tx_power_dbm: 10.0,
                noise_power_dbm: -80.0,
                path_loss_exponent: RadioParams::DEFAULT_PATH_LOSS_EXPONENT,
                capture_threshold_db: 0.0,
            },
            geometry: LinkGeometry {
                deadline_distance_m: 30.0,
                aoi_distances_m: vec![40.0; 5],
            },
            access: AccessParams {
                p1: 0.6,
                p2: 0.6,
                lambda: 0.7,
                deadline: 5,
                aoi_constraints: vec![3, 5],
            },
            literal_psk: false,
            defaults_applied: Vec::new(),
        }
    }

    pub fn aoi_node_count(&self) -> usize {
        self.geometry.aoi_node_count()
    }

    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = self.radio.violations();
        out.extend(self.geometry.violations());
        out.extend(self.access.violations());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues: Vec<ConfigIssue> = self
            .violations()
            .into_iter()
            .map(|(key, message)| ConfigIssue {
                line: None,
                key: key.to_string(),
                message,
            })
            .collect();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    pub fn deadline_rx(&self) -> Result<MeanRxPower> {
        mean_rx_power(
            self.radio.deadline_tx_power_dbm,
            self.geometry.deadline_distance_m,
            self.radio.path_loss_exponent,
        )
    }

    pub fn aoi_rx(&self) -> Result<Vec<MeanRxPower>> {
        self.geometry
            .aoi_distances_m
            .iter()
            .map(|d| {
                mean_rx_power(
                    self.radio.aoi_tx_power_dbm,
                    *d,
                    self.radio.path_loss_exponent,
                )
            })
            .collect()
    }
}
