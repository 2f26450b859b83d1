//! Head-of-line waiting-time chain of the deadline node.
//!
//! State 0 means the node holds no packet eligible for transmission. State
//! `n ∈ 1..=D` means the head-of-line packet is in its `n`-th transmission
//! opportunity. A packet in state `D` leaves the queue at the end of the slot
//! whatever happens: delivered with probability `q_d`, lost otherwise.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot size below which the steady-state system counts as singular.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DeadlineChain {
    pub matrix: DMatrix<f64>,
    pub stationary: Vec<f64>,
}

impl DeadlineChain {
    pub fn new(deadline: u32, lambda: f64, q_d: f64) -> Result<Self> {
        let matrix = build_deadline_matrix(deadline, lambda, q_d)?;
        let stationary = if lambda == 0.0 {
            let mut pi = vec![0.0; matrix.nrows()];
            pi[0] = 1.0;
            pi
        } else {
            steady_state(&matrix)?
        };
        Ok(DeadlineChain { matrix, stationary })
    }

    pub fn metrics(&self, q_d: f64) -> DeadlineMetrics {
        deadline_metrics(&self.stationary, q_d)
    }
}

fn check_probability(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must lie in [0, 1], got {v}")))
    }
}

/// The `(D+1)×(D+1)` transition matrix of the waiting-time chain.
pub fn build_deadline_matrix(deadline: u32, lambda: f64, q_d: f64) -> Result<DMatrix<f64>> {
    if deadline < 1 {
        return Err(Error::invalid("deadline", "must be >= 1"));
    }
    check_probability("lambda", lambda)?;
    check_probability("q_d", q_d)?;
    let d = deadline as usize;
    let idle = 1.0 - lambda;
    let mut m = DMatrix::zeros(d + 1, d + 1);

    m[(0, 0)] = idle;
    m[(0, 1)] = lambda;
    for n in 1..=d {
        // The last state releases its packet unconditionally.
        let leave = if n == d { 1.0 } else { q_d };
        m[(n, 0)] = leave * idle.powi(n as i32);
        for target in 1..=n {
            m[(n, target)] = leave * lambda * idle.powi((n - target) as i32);
        }
        if n < d {
            m[(n, n + 1)] = 1.0 - q_d;
        }
    }
    Ok(m)
}

/// Solves `π P = π`, `Σ π = 1` by a dense LU solve of `(Pᵀ − I)` with its last
/// equation replaced by the normalization.
pub fn steady_state(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::invalid(
            "matrix",
            format!("must be square and non-empty, got {}x{}", n, matrix.ncols()),
        ));
    }
    let mut a = matrix.transpose() - DMatrix::identity(n, n);
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;

    let lu = a.lu();
    let pivots = lu.u().diagonal();
    let largest = pivots.amax();
    let smallest = pivots.iter().fold(f64::INFINITY, |acc, p| acc.min(p.abs()));
    if smallest.is_nan() || smallest <= PIVOT_TOLERANCE * largest {
        return Err(Error::DegenerateChain(format!(
            "balance equations are rank deficient (pivot ratio {:e}); \
             the chain has more than one closed class",
            smallest / largest
        )));
    }
    let x = lu
        .solve(&b)
        .ok_or_else(|| Error::DegenerateChain("LU solve failed".into()))?;

    // Round-off can leave entries a hair below zero.
    let mut pi: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

/// Loss and occupancy figures read off the stationary vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeadlineMetrics {
    /// Probability that a slot ends with a packet lost to its deadline,
    /// `π_D (1 − q_d)`.
    pub plp: f64,
    /// Probability that a slot starts with an eligible head-of-line packet,
    /// `1 − π_0`.
    pub p_queue_nonempty: f64,
}

pub fn deadline_metrics(stationary: &[f64], q_d: f64) -> DeadlineMetrics {
    let last = stationary.last().copied().unwrap_or(0.0);
    let first = stationary.first().copied().unwrap_or(1.0);
    DeadlineMetrics {
        plp: (last * (1.0 - q_d)).clamp(0.0, 1.0),
        p_queue_nonempty: (1.0 - first).clamp(0.0, 1.0),
    }
}

/// `‖πP − π‖_∞`.
pub fn stationary_residual(matrix: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let row = DVector::from_column_slice(pi).transpose();
    let image = &row * matrix;
    image
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent route: iterate `π ← πP` from the uniform vector.
    fn power_iteration(m: &DMatrix<f64>, iters: usize) -> Vec<f64> {
        let n = m.nrows();
        let mut pi = DVector::from_element(n, 1.0 / n as f64).transpose();
        for _ in 0..iters {
            pi = &pi * m;
        }
        pi.iter().copied().collect()
    }

    #[test]
    fn d1_matrix_and_stationary() {
        let m = build_deadline_matrix(1, 0.3, 0.8).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.7, 0.3, 0.7, 0.3]);
        assert_eq!(m, expected);
        let pi = steady_state(&m).unwrap();
        assert!((pi[0] - 0.7).abs() < 1e-14 && (pi[1] - 0.3).abs() < 1e-14);
        let metrics = deadline_metrics(&pi, 0.8);
        assert!((metrics.plp - 0.3 * 0.2).abs() < 1e-14);
    }

    #[test]
    fn d0_is_rejected() {
        assert!(build_deadline_matrix(0, 0.5, 0.5).is_err());
        assert!(build_deadline_matrix(3, 1.5, 0.5).is_err());
        assert!(build_deadline_matrix(3, 0.5, -0.1).is_err());
    }

    #[test]
    fn identical_rows_give_that_row() {
        let r = [0.1, 0.2, 0.3, 0.4];
        let m = DMatrix::from_fn(4, 4, |_, j| r[j]);
        let pi = steady_state(&m).unwrap();
        for (a, b) in pi.iter().zip(r) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn lambda_zero_absorbs_in_empty_state() {
        for q in [0.0, 0.4, 1.0] {
            let chain = DeadlineChain::new(4, 0.0, q).unwrap();
            assert_eq!(chain.stationary, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
            let m = chain.metrics(q);
            assert_eq!(m.plp, 0.0);
            assert_eq!(m.p_queue_nonempty, 0.0);
            // The generic solver agrees.
            let pi = steady_state(&chain.matrix).unwrap();
            assert!((pi[0] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn perfect_delivery_never_loses() {
        for d in 1..6 {
            for lambda in [0.2, 0.9] {
                let chain = DeadlineChain::new(d, lambda, 1.0).unwrap();
                assert!(chain.metrics(1.0).plp.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn multiple_closed_classes_are_reported() {
        // λ = 1 and q_d = 1: every state n >= 1 is absorbing.
        let m = build_deadline_matrix(3, 1.0, 1.0).unwrap();
        assert!(matches!(steady_state(&m), Err(Error::DegenerateChain(_))));
    }

    #[test]
    fn lambda_one_is_solved_normally() {
        let chain = DeadlineChain::new(4, 1.0, 0.3).unwrap();
        assert!(chain.stationary[0].abs() < 1e-15);
        assert!(stationary_residual(&chain.matrix, &chain.stationary) < 1e-10);
    }

    #[test]
    fn agrees_with_power_iteration() {
        for (d, lambda, q) in [(3, 0.7, 0.3), (5, 0.5, 0.6), (12, 0.9, 0.1), (1, 0.2, 0.2)] {
            let m = build_deadline_matrix(d, lambda, q).unwrap();
            let direct = steady_state(&m).unwrap();
            let iterated = power_iteration(&m, 20_000);
            for (a, b) in direct.iter().zip(&iterated) {
                assert!((a - b).abs() < 1e-10, "D={d}: {direct:?} vs {iterated:?}");
            }
        }
    }

    #[test]
    fn plp_nonincreasing_in_q_d() {
        for d in [1, 2, 3, 5, 8] {
            for lambda in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let mut prev = f64::INFINITY;
                for step in 0..=50 {
                    let q = step as f64 / 50.0;
                    let plp = DeadlineChain::new(d, lambda, q).unwrap().metrics(q).plp;
                    assert!(plp <= prev + 1e-12, "D={d} λ={lambda} q={q}");
                    prev = plp;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rows_are_stochastic(d in 1u32..=50, lambda in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            let m = build_deadline_matrix(d, lambda, q).unwrap();
            for row in m.row_iter() {
                prop_assert!((row.sum() - 1.0).abs() <= 1e-12);
                prop_assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }

        #[test]
        fn stationary_solves_balance(d in 1u32..=20, lambda in 0.01f64..0.99, q in 0.0f64..0.99) {
            let chain = DeadlineChain::new(d, lambda, q).unwrap();
            prop_assert!(stationary_residual(&chain.matrix, &chain.stationary) <= 1e-10);
            prop_assert!((chain.stationary.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
}
