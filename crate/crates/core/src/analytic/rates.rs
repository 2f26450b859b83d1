//! Per-slot success probabilities of the deadline node and of each AoI node.

use crate::channel::{capture_prob, MeanRxPower};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;

/// Largest interferer pool enumerated subset by subset when AoI nodes sit at
/// different distances.
pub const MAX_HETEROGENEOUS_POOL: usize = 20;

/// Conditional capture probabilities `P_{S_k}`, indexed by the number `k` of
/// transmitting AoI interferers.
///
/// Given `k`, every size-`k` subset of AoI nodes is equally likely, so each
/// entry is the capture probability averaged over those subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct PskTables {
    /// Deadline node as signal; `k = 0..=N`.
    pub deadline: Vec<f64>,
    /// Per AoI node as signal with the deadline node silent; `k = 0..=N-1`.
    pub aoi_idle: Vec<Vec<f64>>,
    /// Per AoI node as signal with the deadline node transmitting; `k = 0..=N-1`.
    pub aoi_busy: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuccessRates {
    pub q_d: f64,
    /// `q_{S0}` per AoI node.
    pub q_s0: Vec<f64>,
    /// `q_{S1}` per AoI node.
    pub q_s1: Vec<f64>,
    pub psk: PskTables,
}

impl SuccessRates {
    pub fn evaluate(scenario: &ScenarioConfig) -> Result<Self> {
        let psk = p_sk_table(scenario)?;
        let access = &scenario.access;
        let q_d = q_d(access.p1, access.p2, &psk.deadline);
        let mut q_s0 = Vec::with_capacity(psk.aoi_idle.len());
        let mut q_s1 = Vec::with_capacity(psk.aoi_idle.len());
        for node in 0..psk.aoi_idle.len() {
            let (s0, s1) = q_s_pair(access.p2, &psk, node)?;
            q_s0.push(s0);
            q_s1.push(s1);
        }
        Ok(SuccessRates {
            q_d,
            q_s0,
            q_s1,
            psk,
        })
    }
}

/// `C(n, k) p^k (1−p)^(n−k)` for `k = 0..=n`.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut coeff = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            coeff = coeff * (n + 1 - k) as f64 / k as f64;
        }
        out.push(coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32));
    }
    out
}

/// Mean capture probability of `signal` over all size-`k` subsets of `pool`,
/// for every `k`, with `fixed` always present as an extra interferer.
fn capture_by_subset_size(
    signal: MeanRxPower,
    pool: &[MeanRxPower],
    fixed: Option<MeanRxPower>,
    gamma: f64,
    noise: f64,
) -> Result<Vec<f64>> {
    let m = pool.len();
    let homogeneous = pool.windows(2).all(|w| w[0] == w[1]);
    if homogeneous {
        let mut interferers: Vec<MeanRxPower> = fixed.into_iter().collect();
        let mut out = Vec::with_capacity(m + 1);
        out.push(capture_prob(signal, &interferers, gamma, noise)?);
        for &j in pool {
            interferers.push(j);
            out.push(capture_prob(signal, &interferers, gamma, noise)?);
        }
        return Ok(out);
    }
    if m > MAX_HETEROGENEOUS_POOL {
        return Err(Error::invalid(
            "aoi_distances_m",
            format!(
                "unequal AoI distances are supported for at most {} interferers, got {m}",
                MAX_HETEROGENEOUS_POOL
            ),
        ));
    }

    let base = capture_prob(signal, fixed.as_slice(), gamma, noise)?;
    let s = signal.mw();
    let factors: Vec<f64> = pool
        .iter()
        .map(|j| 1.0 / (1.0 + gamma * j.mw() / s))
        .collect();
    // products[mask] = ∏_{j ∈ mask} factor_j, built from the mask minus its lowest bit.
    let mut products = vec![1.0f64; 1 << m];
    let mut sums = vec![0.0f64; m + 1];
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        products[mask] = products[mask & (mask - 1)] * factors[low];
    }
    for (mask, prod) in products.iter().enumerate() {
        sums[mask.count_ones() as usize] += prod;
    }
    let mut choose = 1.0f64;
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(k, sum)| {
            if k > 0 {
                choose = choose * (m + 1 - k) as f64 / k as f64;
            }
            base * sum / choose
        })
        .collect())
}

/// Builds the `P_{S_k}` tables for the scenario.
pub fn p_sk_table(scenario: &ScenarioConfig) -> Result<PskTables> {
    scenario.validate()?;
    let gamma = scenario.radio.gamma_linear();
    let noise = scenario.radio.noise_mw();
    let deadline_rx = scenario.deadline_rx()?;
    let aoi_rx = scenario.aoi_rx()?;

    let deadline = capture_by_subset_size(deadline_rx, &aoi_rx, None, gamma, noise)?;

    // Literal mode stands the deadline node in as one more AoI-like interferer,
    // at the average AoI received power.
    let busy_interferer = if scenario.literal_psk && !aoi_rx.is_empty() {
        MeanRxPower::new(aoi_rx.iter().map(|r| r.mw()).sum::<f64>() / aoi_rx.len() as f64)?
    } else {
        deadline_rx
    };

    let mut aoi_idle: Vec<Vec<f64>> = Vec::with_capacity(aoi_rx.len());
    let mut aoi_busy: Vec<Vec<f64>> = Vec::with_capacity(aoi_rx.len());
    let homogeneous = aoi_rx.windows(2).all(|w| w[0] == w[1]);
    for (i, &signal) in aoi_rx.iter().enumerate() {
        if homogeneous && i > 0 {
            aoi_idle.push(aoi_idle[0].clone());
            aoi_busy.push(aoi_busy[0].clone());
            continue;
        }
        let others: Vec<MeanRxPower> = aoi_rx
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| *r)
            .collect();
        aoi_idle.push(capture_by_subset_size(signal, &others, None, gamma, noise)?);
        aoi_busy.push(capture_by_subset_size(
            signal,
            &others,
            Some(busy_interferer),
            gamma,
            noise,
        )?);
    }
    Ok(PskTables {
        deadline,
        aoi_idle,
        aoi_busy,
    })
}

/// Per-slot success probability of the deadline node given it holds a packet:
/// `p1 · Σ_k C(N,k) p2^k (1−p2)^(N−k) P_{S_k}`.
pub fn q_d(p1: f64, p2: f64, deadline_psk: &[f64]) -> f64 {
    let n = deadline_psk.len().saturating_sub(1);
    let weights = binomial_pmf(n, p2);
    p1 * weights
        .iter()
        .zip(deadline_psk)
        .map(|(w, p)| w * p)
        .sum::<f64>()
}

/// `(q_{S0}, q_{S1})` for AoI node `node`: its success probability given it
/// transmits, with the deadline node silent and transmitting respectively.
pub fn q_s_pair(p2: f64, psk: &PskTables, node: usize) -> Result<(f64, f64)> {
    let (idle, busy) = match (psk.aoi_idle.get(node), psk.aoi_busy.get(node)) {
        (Some(i), Some(b)) => (i, b),
        _ => {
            return Err(Error::invalid(
                "aoi_node",
                format!(
                    "node {node} does not exist among {} AoI nodes",
                    psk.aoi_idle.len()
                ),
            ))
        }
    };
    let weights = binomial_pmf(idle.len() - 1, p2);
    let dot = |table: &[f64]| weights.iter().zip(table).map(|(w, p)| w * p).sum::<f64>();
    Ok((dot(idle), dot(busy)))
}
