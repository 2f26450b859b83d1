//! Age of information of one AoI node under a per-slot success probability.

use std::fmt;

/// Mean age in slots. `Unbounded` when the node never delivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanAge {
    Finite(f64),
    Unbounded,
}

impl MeanAge {
    pub fn finite(self) -> Option<f64> {
        match self {
            MeanAge::Finite(v) => Some(v),
            MeanAge::Unbounded => None,
        }
    }
}

impl fmt::Display for MeanAge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanAge::Finite(v) => write!(f, "{v}"),
            MeanAge::Unbounded => f.write_str("inf"),
        }
    }
}

/// Per-slot success probability of an AoI node:
/// `p2 [q_s0 P(Q=0) + q_s0 (1−p1) P(Q>0) + q_s1 p1 P(Q>0)]`.
pub fn q_aoi(p1: f64, p2: f64, q_s0: f64, q_s1: f64, p_queue_nonempty: f64) -> f64 {
    let idle = q_s0 * (1.0 - p_queue_nonempty);
    let busy_silent = q_s0 * (1.0 - p1) * p_queue_nonempty;
    let busy_transmitting = q_s1 * p1 * p_queue_nonempty;
    (p2 * (idle + busy_silent + busy_transmitting)).clamp(0.0, 1.0)
}

/// Stationary age distribution when deliveries are i.i.d. per slot with
/// probability `q`: geometric on `1, 2, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricAge {
    q: f64,
}

impl GeometricAge {
    pub fn new(q: f64) -> Self {
        GeometricAge {
            q: q.clamp(0.0, 1.0),
        }
    }

    pub fn success_prob(&self) -> f64 {
        self.q
    }

    /// `P(Δ = n) = q (1−q)^(n−1)`, zero for `n = 0`.
    pub fn pmf(&self, n: u32) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.q * (1.0 - self.q).powi((n - 1) as i32)
    }

    pub fn mean(&self) -> MeanAge {
        if self.q > 0.0 {
            MeanAge::Finite(1.0 / self.q)
        } else {
            MeanAge::Unbounded
        }
    }

    /// `P(Δ > c) = (1−q)^c`.
    pub fn violation(&self, c: u32) -> f64 {
        (1.0 - self.q).powi(c as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub constraint: u32,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoiMetrics {
    pub q_aoi: f64,
    pub avg_aoi: MeanAge,
    pub violations: Vec<Violation>,
}

impl AoiMetrics {
    pub fn distribution(&self) -> GeometricAge {
        GeometricAge::new(self.q_aoi)
    }
}

pub fn aoi_metrics(q_aoi: f64, constraints: &[u32]) -> AoiMetrics {
    let dist = GeometricAge::new(q_aoi);
    AoiMetrics {
        q_aoi: dist.success_prob(),
        avg_aoi: dist.mean(),
        violations: constraints
            .iter()
            .map(|&c| Violation {
                constraint: c,
                prob: dist.violation(c),
            })
            .collect(),
    }
}
