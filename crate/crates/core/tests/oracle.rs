//! Success rates against frozen reference values and against a brute-force
//! enumeration of every transmit pattern.

use aoiplp::analytic::SuccessRates;
use aoiplp::ScenarioConfig;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn scenario(gamma_db: f64, p1: f64, p2: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::baseline();
    cfg.radio.capture_threshold_db = gamma_db;
    cfg.access.p1 = p1;
    cfg.access.p2 = p2;
    cfg
}

#[test]
fn frozen_reference_values() {
    let cases = [
        (
            0.0,
            0.6,
            0.6,
            0.22513372242050966,
            0.24008463409171432,
            0.07123390242281635,
            0.12004231704585716,
        ),
        (
            2.0,
            0.5,
            0.5,
            0.16347245208579061,
            0.23119074154549754,
            0.04860232210970563,
            0.08943918542544407,
        ),
    ];
    for (gamma, p1, p2, qd, qs0, qs1, qs1_literal) in cases {
        let cfg = scenario(gamma, p1, p2);
        let r = SuccessRates::evaluate(&cfg).unwrap();
        assert!(close(r.q_d, qd, 1e-12), "q_d {} vs {qd}", r.q_d);
        assert!(r.q_s0.iter().all(|q| close(*q, qs0, 1e-12)));
        assert!(r.q_s1.iter().all(|q| close(*q, qs1, 1e-12)));

        let mut literal = cfg.clone();
        literal.literal_psk = true;
        let r = SuccessRates::evaluate(&literal).unwrap();
        assert!(r.q_s1.iter().all(|q| close(*q, qs1_literal, 1e-12)));
    }
    let r = SuccessRates::evaluate(&scenario(0.0, 1.0, 0.6)).unwrap();
    assert!(close(r.q_d, 0.3752228707008494, 1e-12));
}

struct Brute {
    signal: Vec<f64>,
    deadline: f64,
    gamma: f64,
    noise: f64,
}

impl Brute {
    fn new(cfg: &ScenarioConfig) -> Self {
        let mw = |dbm: f64| 10f64.powf(dbm / 10.0);
        let alpha = cfg.radio.path_loss_exponent;
        Brute {
            signal: cfg
                .geometry
                .aoi_distances_m
                .iter()
                .map(|d| mw(cfg.radio.aoi_tx_power_dbm) * d.powf(-alpha))
                .collect(),
            deadline: mw(cfg.radio.deadline_tx_power_dbm)
                * cfg.geometry.deadline_distance_m.powf(-alpha),
            gamma: 10f64.powf(cfg.radio.capture_threshold_db / 10.0),
            noise: mw(cfg.radio.noise_power_dbm),
        }
    }

    fn capture(&self, s: f64, interferers: &[f64]) -> f64 {
        let mut p = (-self.gamma * self.noise / s).exp();
        for j in interferers {
            p /= 1.0 + self.gamma * j / s;
        }
        p
    }

    /// Sums over every on/off pattern of the AoI nodes except `skip`.
    fn average(&self, p2: f64, skip: Option<usize>, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let n = self.signal.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if skip.is_some_and(|s| mask & (1 << s) != 0) {
                continue;
            }
            let mut weight = 1.0;
            let mut on = Vec::new();
            for i in 0..n {
                if Some(i) == skip {
                    continue;
                }
                if mask & (1 << i) != 0 {
                    weight *= p2;
                    on.push(self.signal[i]);
                } else {
                    weight *= 1.0 - p2;
                }
            }
            total += weight * f(&on);
        }
        total
    }

    fn q_d(&self, p1: f64, p2: f64) -> f64 {
        p1 * self.average(p2, None, |on| self.capture(self.deadline, on))
    }

    fn q_s(&self, p2: f64, node: usize) -> (f64, f64) {
        let s = self.signal[node];
        let idle = self.average(p2, Some(node), |on| self.capture(s, on));
        let busy = self.average(p2, Some(node), |on| {
            let mut with = on.to_vec();
            with.push(self.deadline);
            self.capture(s, &with)
        });
        (idle, busy)
    }
}

fn check_against_brute(cfg: &ScenarioConfig) {
    let r = SuccessRates::evaluate(cfg).unwrap();
    let b = Brute::new(cfg);
    let (p1, p2) = (cfg.access.p1, cfg.access.p2);
    assert!(
        close(r.q_d, b.q_d(p1, p2), 1e-12),
        "q_d {} vs {}",
        r.q_d,
        b.q_d(p1, p2)
    );
    for i in 0..cfg.aoi_node_count() {
        let (idle, busy) = b.q_s(p2, i);
        assert!(
            close(r.q_s0[i], idle, 1e-12),
            "q_s0[{i}] {} vs {idle}",
            r.q_s0[i]
        );
        assert!(
            close(r.q_s1[i], busy, 1e-12),
            "q_s1[{i}] {} vs {busy}",
            r.q_s1[i]
        );
    }
}

#[test]
fn homogeneous_matches_enumeration() {
    for gamma in [-2.0, 0.0, 2.0, 6.0] {
        for (p1, p2) in [(0.2, 0.8), (0.6, 0.6), (1.0, 0.3)] {
            check_against_brute(&scenario(gamma, p1, p2));
        }
    }
}

#[test]
fn heterogeneous_matches_enumeration() {
    let mut cfg = scenario(3.0, 0.7, 0.45);
    cfg.radio.path_loss_exponent = 3.5;
    cfg.radio.aoi_tx_power_dbm = 7.0;
    cfg.geometry.deadline_distance_m = 45.0;
    cfg.geometry.aoi_distances_m = vec![20.0, 35.0, 50.0, 65.0, 35.0, 80.0];
    check_against_brute(&cfg);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_geometries_match_enumeration(
        distances in prop::collection::vec(5.0f64..120.0, 0..7),
        deadline_distance in 5.0f64..120.0,
        gamma_db in -6.0f64..8.0,
        alpha in 2.0f64..4.5,
        noise_dbm in -110.0f64..-60.0,
        p1 in 0.0f64..=1.0,
        p2 in 0.0f64..=1.0,
    ) {
        let mut cfg = scenario(gamma_db, p1, p2);
        cfg.radio.path_loss_exponent = alpha;
        cfg.radio.noise_power_dbm = noise_dbm;
        cfg.geometry.deadline_distance_m = deadline_distance;
        cfg.geometry.aoi_distances_m = distances;
        check_against_brute(&cfg);
    }
}
