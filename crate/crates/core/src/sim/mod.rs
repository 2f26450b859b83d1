//! Slot-level Monte Carlo simulator of the network.
//!
//! Each slot `t` runs, in order:
//!
//! 1. a Bernoulli(λ) arrival at the deadline node, stamped `t`;
//! 2. the deadline node transmits its eligible head-of-line packet (stamped
//!    before `t`) with probability `p1`; each AoI node transmits a fresh sample
//!    with probability `p2`;
//! 3. fading is drawn and every transmitter is tested against γ;
//! 4. a decoded head-of-line packet leaves the queue;
//! 5. an undecoded head-of-line packet on its `D`-th opportunity is lost;
//! 6. AoI ages are updated;
//! 7. statistics are recorded if the slot is past warmup.
//!
//! The measured window is split into `batch_count` equal batches; slots that
//! do not fill a whole batch are not simulated.

mod node;
mod stats;

pub use node::{AoiNodeState, DeadlineNodeState};
pub use stats::{half_width_95, Estimate};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{CaptureSampler, MeanRxPower};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use stats::RatioBatches;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub total_slots: u64,
    pub warmup_slots: u64,
    pub seed: u64,
    pub batch_count: u32,
}

impl SimConfig {
    pub const DEFAULT_WARMUP: u64 = 10_000;
    pub const DEFAULT_BATCHES: u32 = 20;

    /// `measured` slots after the default warmup, in the default number of batches.
    pub fn measured(measured: u64, seed: u64) -> Self {
        SimConfig {
            total_slots: Self::DEFAULT_WARMUP + measured,
            warmup_slots: Self::DEFAULT_WARMUP,
            seed,
            batch_count: Self::DEFAULT_BATCHES,
        }
    }

    pub fn batch_len(&self) -> u64 {
        self.total_slots.saturating_sub(self.warmup_slots) / u64::from(self.batch_count.max(1))
    }

    pub fn measured_slots(&self) -> u64 {
        self.batch_len() * u64::from(self.batch_count)
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_slots <= self.warmup_slots {
            return Err(Error::invalid(
                "total_slots",
                format!(
                    "must exceed warmup_slots ({} <= {})",
                    self.total_slots, self.warmup_slots
                ),
            ));
        }
        if self.batch_count < 1 {
            return Err(Error::invalid("batch_count", "must be >= 1"));
        }
        if self.measured_slots() == 0 {
            return Err(Error::NoMeasuredSlots);
        }
        Ok(())
    }
}

/// Event counters over the whole run, warmup included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimCounters {
    pub slots: u64,
    pub arrivals: u64,
    pub deliveries: u64,
    pub drops: u64,
    pub residual_queue: u64,
    /// Slots in which more than one transmission was decoded.
    pub multi_capture_slots: u64,
    /// Largest opportunity index at which a packet was delivered.
    pub max_delivery_opportunity: u64,
    /// Smallest and largest opportunity index at which a packet was lost.
    pub min_drop_opportunity: Option<u64>,
    pub max_drop_opportunity: Option<u64>,
}

/// Pooled age histogram: `pmf[i]` is the mass at age `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeHistogram {
    pub pmf: Vec<f64>,
    pub tail: f64,
}

impl AgeHistogram {
    /// Total variation distance to a reference pmf on the same buckets.
    pub fn total_variation(&self, reference_pmf: &[f64], reference_tail: f64) -> f64 {
        let body: f64 = self
            .pmf
            .iter()
            .zip(reference_pmf)
            .map(|(a, b)| (a - b).abs())
            .sum();
        0.5 * (body + (self.tail - reference_tail).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub measured_slots: u64,
    pub batch_count: u32,
    pub counters: SimCounters,
    /// Deadline successes per slot with an eligible head-of-line packet.
    pub q_d: Option<Estimate>,
    /// Fraction of slots that start with an eligible head-of-line packet.
    pub p_queue_nonempty: Estimate,
    /// Deadline losses per slot.
    pub plp: Estimate,
    /// Losses over resolved arrivals of the measured window.
    pub loss_ratio: Option<Estimate>,
    /// Pooled over AoI nodes; `None` without AoI nodes.
    pub avg_aoi: Option<Estimate>,
    pub q_aoi: Option<Estimate>,
    pub violations: Vec<(u32, Estimate)>,
    pub node_avg_aoi: Vec<f64>,
    pub node_q_aoi: Vec<f64>,
    pub histogram: Option<AgeHistogram>,
}

pub fn run_simulation(scenario: &ScenarioConfig, config: &SimConfig) -> Result<SimReport> {
    Simulator::new(scenario, config)?.run()
}

/// Pooled empirical age distribution over ages `1..=max_age` plus the tail
/// mass beyond `max_age`.
pub fn empirical_aoi_histogram(
    scenario: &ScenarioConfig,
    config: &SimConfig,
    max_age: u32,
) -> Result<AgeHistogram> {
    if max_age < 1 {
        return Err(Error::invalid("max_age", "must be >= 1"));
    }
    if scenario.aoi_node_count() == 0 {
        return Err(Error::invalid("aoi_distances_m", "no AoI nodes to observe"));
    }
    let report = Simulator::new(scenario, config)?
        .with_histogram(max_age)
        .run()?;
    Ok(report.histogram.expect("histogram was requested"))
}

struct Simulator<'a> {
    scenario: &'a ScenarioConfig,
    config: SimConfig,
    histogram_max_age: Option<u32>,
    deadline_rx: MeanRxPower,
    aoi_rx: Vec<MeanRxPower>,
}

impl<'a> Simulator<'a> {
    fn new(scenario: &'a ScenarioConfig, config: &SimConfig) -> Result<Self> {
        scenario.validate()?;
        config.validate()?;
        Ok(Simulator {
            scenario,
            config: *config,
            histogram_max_age: None,
            deadline_rx: scenario.deadline_rx()?,
            aoi_rx: scenario.aoi_rx()?,
        })
    }

    fn with_histogram(mut self, max_age: u32) -> Self {
        self.histogram_max_age = Some(max_age);
        self
    }

    fn run(self) -> Result<SimReport> {
        let access = &self.scenario.access;
        let (p1, p2, lambda) = (access.p1, access.p2, access.lambda);
        let deadline = u64::from(access.deadline);
        let constraints = &access.aoi_constraints;
        let gamma = self.scenario.radio.gamma_linear();
        let noise = self.scenario.radio.noise_mw();
        let n_aoi = self.aoi_rx.len();

        let warmup = self.config.warmup_slots;
        let batch_len = self.config.batch_len();
        let batches = self.config.batch_count as usize;
        let end = warmup + self.config.measured_slots();

        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut sampler = CaptureSampler::default();
        let mut queue = DeadlineNodeState::default();
        let mut aoi = vec![AoiNodeState::default(); n_aoi];
        let mut counters = SimCounters::default();

        let mut tx_power: Vec<MeanRxPower> = Vec::with_capacity(n_aoi + 1);
        let mut tx_aoi_index: Vec<usize> = Vec::with_capacity(n_aoi);
        let mut decoded: Vec<bool> = Vec::with_capacity(n_aoi + 1);
        let mut aoi_delivered = vec![false; n_aoi];

        let mut occupancy = RatioBatches::new(batches);
        let mut deadline_success = RatioBatches::new(batches);
        let mut loss_per_slot = RatioBatches::new(batches);
        let mut loss_per_packet = RatioBatches::new(batches);
        let mut age = RatioBatches::new(batches);
        let mut aoi_success = RatioBatches::new(batches);
        let mut violation: Vec<RatioBatches> = constraints
            .iter()
            .map(|_| RatioBatches::new(batches))
            .collect();
        let mut node_age_sum = vec![0u128; n_aoi];
        let mut node_success = vec![0u64; n_aoi];
        let mut hist = self.histogram_max_age.map(|m| vec![0u64; m as usize + 1]);

        for t in 0..end {
            if rng.random::<f64>() < lambda {
                queue.arrive(t);
            }

            tx_power.clear();
            tx_aoi_index.clear();
            let hol = queue.hol_opportunity(t);
            let deadline_tx = hol.is_some() && rng.random::<f64>() < p1;
            if deadline_tx {
                tx_power.push(self.deadline_rx);
            }
            for (i, rx) in self.aoi_rx.iter().enumerate() {
                if rng.random::<f64>() < p2 {
                    tx_power.push(*rx);
                    tx_aoi_index.push(i);
                }
            }

            sampler.sample_into(&mut rng, &tx_power, gamma, noise, &mut decoded);
            if decoded.iter().filter(|d| **d).count() > 1 {
                counters.multi_capture_slots += 1;
            }

            let measured = t >= warmup;
            let mut deadline_ok = false;
            let mut lost = false;
            if let Some(opportunity) = hol {
                deadline_ok = deadline_tx && decoded[0];
                let arrival = if deadline_ok {
                    counters.max_delivery_opportunity =
                        counters.max_delivery_opportunity.max(opportunity);
                    Some(queue.deliver())
                } else if opportunity >= deadline {
                    lost = true;
                    counters.min_drop_opportunity = Some(
                        counters
                            .min_drop_opportunity
                            .map_or(opportunity, |m| m.min(opportunity)),
                    );
                    counters.max_drop_opportunity = Some(
                        counters
                            .max_drop_opportunity
                            .map_or(opportunity, |m| m.max(opportunity)),
                    );
                    Some(queue.drop_hol())
                } else {
                    None
                };
                if measured && arrival.is_some_and(|a| a >= warmup) {
                    let batch = ((t - warmup) / batch_len) as usize;
                    loss_per_packet.record(batch, f64::from(u8::from(lost)), 1.0);
                }
            }

            aoi_delivered.iter_mut().for_each(|d| *d = false);
            let offset = usize::from(deadline_tx);
            for (k, &i) in tx_aoi_index.iter().enumerate() {
                aoi_delivered[i] = decoded[offset + k];
            }
            for (state, &ok) in aoi.iter_mut().zip(&aoi_delivered) {
                state.advance(ok);
            }

            if !measured {
                continue;
            }
            let batch = ((t - warmup) / batch_len) as usize;
            occupancy.record(batch, f64::from(u8::from(hol.is_some())), 1.0);
            if hol.is_some() {
                deadline_success.record(batch, f64::from(u8::from(deadline_ok)), 1.0);
            }
            loss_per_slot.record(batch, f64::from(u8::from(lost)), 1.0);

            if n_aoi > 0 {
                let mut slot_age = 0u64;
                let mut slot_success = 0u64;
                for (i, state) in aoi.iter().enumerate() {
                    slot_age += state.age;
                    node_age_sum[i] += u128::from(state.age);
                    let ok = aoi_delivered[i];
                    slot_success += u64::from(ok);
                    node_success[i] += u64::from(ok);
                    if let Some(h) = hist.as_mut() {
                        let bucket = (state.age as usize).min(h.len()) - 1;
                        h[bucket] += 1;
                    }
                }
                let nodes = n_aoi as f64;
                age.record(batch, slot_age as f64, nodes);
                aoi_success.record(batch, slot_success as f64, nodes);
                for (v, &c) in violation.iter_mut().zip(constraints) {
                    let over = aoi.iter().filter(|s| s.age > u64::from(c)).count();
                    v.record(batch, over as f64, nodes);
                }
            }
        }

        counters.slots = end;
        counters.arrivals = queue.arrivals;
        counters.deliveries = queue.deliveries;
        counters.drops = queue.drops;
        counters.residual_queue = queue.queued() as u64;

        let measured_slots = self.config.measured_slots();
        let histogram = hist.map(|h| {
            let total: u64 = h.iter().sum();
            let mut pmf: Vec<f64> = h.iter().map(|c| *c as f64 / total as f64).collect();
            let tail = pmf.pop().unwrap_or(0.0);
            AgeHistogram { pmf, tail }
        });

        Ok(SimReport {
            measured_slots,
            batch_count: self.config.batch_count,
            counters,
            q_d: deadline_success.estimate(),
            p_queue_nonempty: occupancy.estimate().ok_or(Error::NoMeasuredSlots)?,
            plp: loss_per_slot.estimate().ok_or(Error::NoMeasuredSlots)?,
            loss_ratio: loss_per_packet.estimate(),
            avg_aoi: age.estimate(),
            q_aoi: aoi_success.estimate(),
            violations: constraints
                .iter()
                .zip(&violation)
                .filter_map(|(c, v)| v.estimate().map(|e| (*c, e)))
                .collect(),
            node_avg_aoi: node_age_sum
                .iter()
                .map(|s| *s as f64 / measured_slots as f64)
                .collect(),
            node_q_aoi: node_success
                .iter()
                .map(|s| *s as f64 / measured_slots as f64)
                .collect(),
            histogram,
        })
    }
}
