//! Physical-layer capture model.
//!
//! A transmission is decoded when its SINR at the controller exceeds the
//! capture ratio γ. Fading is Rayleigh, so the received power of node `i` in
//! a slot is `ρ_i · g_i` with `ρ_i = P_i · d_i^(−α)` and `g_i ~ Exp(1)` drawn
//! independently per transmitter per slot.
//!
//! Two routes are provided: [`capture_prob`] averages the fading out in closed
//! form, [`sample_slot_captures`] draws it. The simulator uses the second, the
//! analytic pipeline the first.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Converts a ratio given in dB to its linear value.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Radio parameters shared by every link in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    pub deadline_tx_power_dbm: f64,
    pub aoi_tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    /// Path-loss exponent.
    pub path_loss_exponent: f64,
    /// Capture ratio in dB. This is a dimensionless SINR threshold.
    pub capture_threshold_db: f64,
}

impl RadioParams {
    pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 3.0;

    pub fn gamma_linear(&self) -> f64 {
        db_to_linear(self.capture_threshold_db)
    }

    pub fn noise_mw(&self) -> f64 {
        dbm_to_mw(self.noise_power_dbm)
    }

    /// Returns a description of every violated invariant.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        for (name, v) in [
            ("deadline_tx_power_dbm", self.deadline_tx_power_dbm),
            ("aoi_tx_power_dbm", self.aoi_tx_power_dbm),
            ("noise_power_dbm", self.noise_power_dbm),
            ("gamma_db", self.capture_threshold_db),
        ] {
            if !v.is_finite() {
                out.push((name, format!("must be finite, got {v}")));
            }
        }
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent > 0.0) {
            out.push((
                "alpha",
                format!("must be > 0, got {}", self.path_loss_exponent),
            ));
        }
        if self.noise_power_dbm.is_finite() && self.noise_mw() <= 0.0 {
            out.push((
                "noise_power_dbm",
                "linear noise power underflows to 0".into(),
            ));
        }
        if self.capture_threshold_db.is_finite() && self.gamma_linear() <= 0.0 {
            out.push(("gamma_db", "linear capture ratio underflows to 0".into()));
        }
        out
    }
}

/// Distances from every node to the controller.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGeometry {
    pub deadline_distance_m: f64,
    pub aoi_distances_m: Vec<f64>,
}

impl LinkGeometry {
    pub fn aoi_node_count(&self) -> usize {
        self.aoi_distances_m.len()
    }

    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(self.deadline_distance_m.is_finite() && self.deadline_distance_m > 0.0) {
            out.push((
                "deadline_distance_m",
                format!("must be > 0, got {}", self.deadline_distance_m),
            ));
        }
        for (i, d) in self.aoi_distances_m.iter().enumerate() {
            if !(d.is_finite() && *d > 0.0) {
                out.push((
                    "aoi_distances_m",
                    format!("entry {} must be > 0, got {d}", i + 1),
                ));
            }
        }
        out
    }
}

/// Fading-averaged received power `P · d^(−α)` in mW.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeanRxPower(f64);

impl MeanRxPower {
    pub fn new(mw: f64) -> Result<Self> {
        if mw.is_finite() && mw > 0.0 {
            Ok(MeanRxPower(mw))
        } else {
            Err(Error::invalid(
                "mean_rx_power",
                format!("must be > 0 mW, got {mw}"),
            ))
        }
    }

    pub fn mw(self) -> f64 {
        self.0
    }
}

pub fn mean_rx_power(tx_power_dbm: f64, distance_m: f64, alpha: f64) -> Result<MeanRxPower> {
    if !(distance_m.is_finite() && distance_m > 0.0) {
        return Err(Error::invalid(
            "distance_m",
            format!("must be > 0, got {distance_m}"),
        ));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid("alpha", format!("must be > 0, got {alpha}")));
    }
    MeanRxPower::new(dbm_to_mw(tx_power_dbm) * distance_m.powf(-alpha))
}

fn check_threshold_and_noise(gamma_linear: f64, noise_mw: f64) -> Result<()> {
    if !(gamma_linear.is_finite() && gamma_linear > 0.0) {
        return Err(Error::invalid(
            "gamma",
            format!("must be > 0, got {gamma_linear}"),
        ));
    }
    if !(noise_mw.is_finite() && noise_mw >= 0.0) {
        return Err(Error::invalid(
            "noise_mw",
            format!("must be >= 0, got {noise_mw}"),
        ));
    }
    Ok(())
}

/// Probability that `signal` is decoded against `interferers` under Rayleigh
/// fading:
///
/// ```text
/// exp(−γσ²/ρ_s) · ∏_j 1 / (1 + γ ρ_j / ρ_s)
/// ```
pub fn capture_prob(
    signal: MeanRxPower,
    interferers: &[MeanRxPower],
    gamma_linear: f64,
    noise_mw: f64,
) -> Result<f64> {
    check_threshold_and_noise(gamma_linear, noise_mw)?;
    let s = signal.mw();
    let noise_term = (-gamma_linear * noise_mw / s).exp();
    let interference_term: f64 = interferers
        .iter()
        .map(|j| 1.0 / (1.0 + gamma_linear * j.mw() / s))
        .product();
    Ok(noise_term * interference_term)
}

/// Draws one slot of fading for `transmitters` and reports which of them are
/// decoded. Each transmitter is tested independently, so with γ < 1 more than
/// one flag can be set.
pub fn sample_slot_captures<R: Rng + ?Sized>(
    rng: &mut R,
    transmitters: &[MeanRxPower],
    gamma_linear: f64,
    noise_mw: f64,
) -> Result<Vec<bool>> {
    check_threshold_and_noise(gamma_linear, noise_mw)?;
    let mut sampler = CaptureSampler::default();
    let mut out = Vec::with_capacity(transmitters.len());
    sampler.sample_into(rng, transmitters, gamma_linear, noise_mw, &mut out);
    Ok(out)
}

/// Reusable buffers for per-slot capture sampling in hot loops. Inputs are
/// assumed already validated.
#[derive(Debug, Default, Clone)]
pub(crate) struct CaptureSampler {
    rx: Vec<f64>,
}

impl CaptureSampler {
    pub(crate) fn sample_into<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        transmitters: &[MeanRxPower],
        gamma_linear: f64,
        noise_mw: f64,
        out: &mut Vec<bool>,
    ) {
        out.clear();
        self.rx.clear();
        let mut total = 0.0;
        for t in transmitters {
            let g: f64 = Exp1.sample(rng);
            let p = t.mw() * g;
            total += p;
            self.rx.push(p);
        }
        // SINR_i > γ  <=>  p_i > γ (σ² + Σ_{j≠i} p_j); no division so σ² = 0 is fine.
        out.extend(
            self.rx
                .iter()
                .map(|&p| p > gamma_linear * (noise_mw + (total - p).max(0.0))),
        );
    }
}
