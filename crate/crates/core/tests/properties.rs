use std::sync::OnceLock;

use chronon_core::analysis::compute_tau;
use chronon_core::config::RunConfig;
use chronon_core::models::front_mix;
use chronon_core::propagate::Propagator;
use chronon_core::stats::{sample_detection, two_proportion_test, TrialBatch};
use chronon_core::wavefunction::prob_in_region;
use chronon_core::{
    build_hamiltonian, FrontDirection, Grid, Phase, QuenchScenario, ResponseModel, Wavefunction,
    WellConfig,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn base() -> &'static QuenchScenario {
    static S: OnceLock<QuenchScenario> = OnceLock::new();
    S.get_or_init(|| {
        let well = WellConfig::reference();
        let grid = Grid::around_well(&well, 512, 2.0).unwrap();
        QuenchScenario::new(&grid, well, 1, ResponseModel::Instantaneous, 1.0).unwrap()
    })
}

fn packet(grid: Grid, center: f64, sigma: f64, k: f64) -> Wavefunction {
    let mut psi = Wavefunction::from_fn(grid, 0.0, |x| {
        let g = (-(x - center).powi(2) / (4.0 * sigma * sigma)).exp();
        Complex64::from_polar(g, k * x)
    });
    psi.normalize().unwrap();
    psi
}

/// Node indices farther than `r` from `x_a`.
fn outside(grid: &Grid, x_a: f64, r: f64) -> Vec<usize> {
    (0..grid.n_points())
        .filter(|&i| (grid.x(i) - x_a).abs() > r)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn propagation_preserves_norm_and_energy(
        v0 in 20.0..500.0f64,
        v1 in 20.0..500.0f64,
        center in 0.2..0.8f64,
        sigma in 0.05..0.2f64,
        k in -20.0..20.0f64,
    ) {
        let well = WellConfig { v0, v1, ..WellConfig::reference() };
        let grid = Grid::around_well(&well, 400, 2.0).unwrap();
        let h = build_hamiltonian(&grid, &well, Phase::Post).unwrap();
        let prop = Propagator::new(&h, 1e-4).unwrap();
        let mut psi = packet(grid, center, sigma, k);
        let e0 = h.expectation(&psi);
        let n0 = psi.norm_sqr();
        let mut amps = psi.amplitudes().to_vec();
        let mut scratch = Vec::new();
        for _ in 0..10_000 {
            prop.step_in_place(&mut amps, &mut scratch);
        }
        psi = Wavefunction::new(grid, amps, 1.0).unwrap();
        prop_assert!((psi.norm_sqr() - n0).abs() <= 1e-6);
        prop_assert!((h.expectation(&psi) - e0).abs() <= 1e-8 * e0.abs());
    }
}

proptest! {
    #[test]
    fn region_probability_is_additive_and_monotone(
        a in -1.5..1.0f64,
        w1 in 0.0..1.0f64,
        w2 in 0.0..1.0f64,
    ) {
        let psi = base().psi1();
        let (b, c) = (a + w1, a + w1 + w2);
        let pab = prob_in_region(psi, a, b).unwrap();
        let pbc = prob_in_region(psi, b, c).unwrap();
        let pac = prob_in_region(psi, a, c).unwrap();
        prop_assert!((pab + pbc - pac).abs() < 1e-12);
        prop_assert!(pac >= pab && pac >= pbc);
    }

    #[test]
    fn front_is_psi0_outside_the_light_cone(
        v in 0.05..1.0f64,
        dt in 0.0..3.0f64,
        rightward in any::<bool>(),
    ) {
        let direction = if rightward { FrontDirection::Rightward } else { FrontDirection::Bidirectional };
        let s = base().with_model(ResponseModel::Front { v, direction }).unwrap();
        let t = s.well().t1 + dt;
        let psi = s.state_at(t).unwrap();
        for i in outside(s.grid(), s.well().x_a, s.c_sim() * dt) {
            prop_assert_eq!(psi.amplitudes()[i], s.psi0().amplitudes()[i]);
        }
    }

    #[test]
    fn perturbation_is_psi0_outside_the_light_cone_and_normalized(
        epsilon in 0.0..0.3f64,
        growth in 0.1..1.0f64,
        dt in 0.0..1.0f64,
    ) {
        let model = ResponseModel::LocalPerturbation { epsilon, growth_speed: growth, d_max: None };
        let s = base().with_model(model).unwrap();
        let psi = s.state_at(s.well().t1 + dt).unwrap();
        for i in outside(s.grid(), s.well().x_a, s.c_sim() * dt) {
            prop_assert_eq!(psi.amplitudes()[i], s.psi0().amplitudes()[i]);
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn delay_is_psi0_until_the_jump_and_normalized(v in 0.3..1.0f64, frac in 0.0..1.6f64) {
        let model = ResponseModel::DiscreteDelay { v, l_prime: 1.0, jump_offset: 0.0 };
        let s = base().with_model(model).unwrap();
        let tau = s.tau().unwrap();
        let psi = s.state_at(s.well().t1 + frac * tau).unwrap();
        if frac < 1.0 {
            prop_assert_eq!(psi.amplitudes(), s.psi0().amplitudes());
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn front_settles_after_full_coverage(extra_a in 0.0..5.0f64, extra_b in 0.0..5.0f64) {
        let s = base();
        let g = s.grid();
        let cover = (g.x_max() - s.well().x_a).max(s.well().x_a - g.x_min());
        let a = front_mix(s.psi0(), s.psi1(), 0.0, 1.0, cover + extra_a, FrontDirection::Bidirectional).unwrap();
        let b = front_mix(s.psi0(), s.psi1(), 0.0, 1.0, cover + extra_b, FrontDirection::Bidirectional).unwrap();
        prop_assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn tau_grows_with_distance(l in 0.01..10.0f64, extra in 0.0..10.0f64, v in 0.01..2.0f64) {
        prop_assert!(compute_tau(l + extra, v).unwrap() >= compute_tau(l, v).unwrap());
    }

    #[test]
    fn z_test_is_antisymmetric(pa in 0.01..0.99f64, pb in 0.01..0.99f64, seed in any::<u64>()) {
        let a = sample_detection(pa, 2_000, seed, 1).unwrap();
        let b = sample_detection(pb, 2_000, seed, 2).unwrap();
        let ab = two_proportion_test(&a, &b, 0.01).unwrap();
        let ba = two_proportion_test(&b, &a, 0.01).unwrap();
        prop_assert_eq!(ab.z_statistic, -ba.z_statistic);
        prop_assert_eq!(ab.p_value, ba.p_value);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
    }

    #[test]
    fn merging_is_associative(seed in any::<u64>(), p in 0.0..1.0f64) {
        let b: Vec<TrialBatch> = (0..3).map(|i| sample_detection(p, 100 + i, seed, i).unwrap()).collect();
        let left = b[0].merge(&b[1]).merge(&b[2]);
        let right = b[0].merge(&b[1].merge(&b[2]));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn sampling_replays(p in 0.0..1.0f64, seed in any::<u64>(), stream in any::<u64>()) {
        prop_assert_eq!(
            sample_detection(p, 500, seed, stream).unwrap(),
            sample_detection(p, 500, seed, stream).unwrap()
        );
    }

    #[test]
    fn batches_round_trip_through_json(p in 0.0..1.0f64, seed in any::<u64>()) {
        let b = sample_detection(p, 300, seed, 3).unwrap();
        let back: TrialBatch = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn env_overrides_win(seed in any::<u64>(), n in 1024usize..4096, alpha in 1e-4..0.1f64) {
        let env = [
            ("CHRONON_RUN_SEED".to_string(), seed.to_string()),
            ("CHRONON_GRID_N_POINTS".to_string(), n.to_string()),
            ("CHRONON_SCAN_ALPHA".to_string(), format!("{alpha:?}")),
        ];
        let c = RunConfig::from_toml_with_env("[run]\nseed = 1\n", env).unwrap();
        prop_assert_eq!(c.run.seed, seed);
        prop_assert_eq!(c.grid.n_points, n);
        prop_assert_eq!(c.scan.alpha, alpha);
        let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
