//! Closed-form evaluation of a scenario.
//!
//! Order of evaluation: capture tables, deadline success `q_d`, deadline
//! chain and its stationary vector, loss and occupancy, and finally each AoI
//! node's success probability and age metrics. `q_d` does not depend on the
//! AoI side, so no fixed point is involved.

pub mod aoi;
pub mod deadline;
pub mod rates;

pub use aoi::{aoi_metrics, q_aoi, AoiMetrics, GeometricAge, MeanAge, Violation};
pub use deadline::{
    build_deadline_matrix, deadline_metrics, stationary_residual, steady_state, DeadlineChain,
    DeadlineMetrics,
};
pub use rates::{binomial_pmf, p_sk_table, q_d, q_s_pair, PskTables, SuccessRates};

use crate::error::Result;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticReport {
    pub rates: SuccessRates,
    pub chain: DeadlineChain,
    /// Per-slot probability of a deadline loss, `π_D (1 − q_d)`.
    pub plp: f64,
    /// Fraction of arrivals lost, `plp / λ`. `None` when `λ = 0`.
    pub loss_ratio: Option<f64>,
    pub p_queue_nonempty: f64,
    /// One entry per AoI node, in config order.
    pub aoi_nodes: Vec<AoiMetrics>,
}

/// AoI metrics averaged over all AoI nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledAoi {
    pub q_aoi: f64,
    pub avg_aoi: MeanAge,
    pub violations: Vec<Violation>,
}

impl AnalyticReport {
    pub fn q_d(&self) -> f64 {
        self.rates.q_d
    }

    /// The first AoI node, standing in for "an arbitrary AoI node".
    pub fn tagged(&self) -> Option<&AoiMetrics> {
        self.aoi_nodes.first()
    }

    pub fn pooled(&self) -> Option<PooledAoi> {
        let first = self.aoi_nodes.first()?;
        let n = self.aoi_nodes.len() as f64;
        let q_aoi = self.aoi_nodes.iter().map(|m| m.q_aoi).sum::<f64>() / n;
        let avg_aoi = self
            .aoi_nodes
            .iter()
            .map(|m| m.avg_aoi.finite())
            .sum::<Option<f64>>()
            .map_or(MeanAge::Unbounded, |s| MeanAge::Finite(s / n));
        let violations = first
            .violations
            .iter()
            .enumerate()
            .map(|(i, v)| Violation {
                constraint: v.constraint,
                prob: self
                    .aoi_nodes
                    .iter()
                    .map(|m| m.violations[i].prob)
                    .sum::<f64>()
                    / n,
            })
            .collect();
        Some(PooledAoi {
            q_aoi,
            avg_aoi,
            violations,
        })
    }
}

pub fn evaluate_scenario(scenario: &ScenarioConfig) -> Result<AnalyticReport> {
    scenario.validate()?;
    let access = &scenario.access;
    let rates = SuccessRates::evaluate(scenario)?;
    let chain = DeadlineChain::new(access.deadline, access.lambda, rates.q_d)?;
    let DeadlineMetrics {
        plp,
        p_queue_nonempty,
    } = chain.metrics(rates.q_d);
    let loss_ratio = (access.lambda > 0.0).then(|| (plp / access.lambda).min(1.0));

    let aoi_nodes = rates
        .q_s0
        .iter()
        .zip(&rates.q_s1)
        .map(|(&s0, &s1)| {
            let q = q_aoi(access.p1, access.p2, s0, s1, p_queue_nonempty);
            aoi_metrics(q, &access.aoi_constraints)
        })
        .collect();

    Ok(AnalyticReport {
        rates,
        chain,
        plp,
        loss_ratio,
        p_queue_nonempty,
        aoi_nodes,
    })
}
