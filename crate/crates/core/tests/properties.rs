use proptest::prelude::*;
use sigma_core::cc::{
    cc_energy_l2_closed_form, cc_energy_mc, cc_excited_mc, minimize_alpha, CCConfig, CcIntegrator, CcState,
};
use sigma_core::eigen::low_eigenvalues;
use sigma_core::rotor::{build_rotor_hamiltonian, lowest_two_m0};
use sigma_core::sphere::{
    build_sphere_hamiltonian, o3_return_probability, sphere_ed, ReturnProbabilityOracle, ReturnTarget, SphereBasisSpec,
};
use sigma_core::{ModelParams, SparseHermitian};

fn ed_e0_per_site(p: &ModelParams) -> f64 {
    let h = build_rotor_hamiltonian(p).unwrap();
    lowest_two_m0(p, &h).unwrap().0 / p.n_sites as f64
}

#[test]
fn cc_energies_respect_the_variational_bound() {
    for (n_sites, g_sq) in [(2, 0.5), (2, 1.0), (2, 4.0), (3, 1.0)] {
        let p = ModelParams::new(n_sites, g_sq, 5).unwrap();
        let e0 = ed_e0_per_site(&p);
        let integ = CcIntegrator::new(&p, None).unwrap();
        for alpha in [0.1, 0.5, 0.9, 1.5, 3.0] {
            let mut cfg = CCConfig::new(alpha, 100_000, None);
            cfg.seed = 3;
            let e = integ.estimate(&cfg, CcState::Ground).unwrap().energy;
            assert!(e.mean >= e0 - 3.0 * e.stderr, "L={n_sites} g²={g_sq} α={alpha}: {} < {e0}", e.mean);
            if n_sites == 2 {
                assert!(cc_energy_l2_closed_form(g_sq, alpha) >= e0 - 1e-12);
            }
        }
    }
}

#[test]
fn monte_carlo_matches_closed_form_grid() {
    for g_sq in [0.5, 1.0, 4.0] {
        let p = ModelParams::new(2, g_sq, 3).unwrap();
        for alpha in [0.2, 0.5, 0.839, 1.5] {
            let mut cfg = CCConfig::new(alpha, 200_000, None);
            cfg.seed = 17;
            let e = cc_energy_mc(&p, &cfg).unwrap();
            let exact = cc_energy_l2_closed_form(g_sq, alpha);
            assert!(
                (e.mean - exact).abs() <= 3.0 * e.stderr,
                "g²={g_sq} α={alpha}: {} ± {} vs {exact}",
                e.mean,
                e.stderr
            );
        }
    }
}

#[test]
fn excited_state_lies_above_ground() {
    let p = ModelParams::new(3, 1.0, 3).unwrap();
    for alpha in [0.5, 1.5] {
        let mut cfg = CCConfig::new(alpha, 100_000, None);
        cfg.seed = 5;
        let e0 = cc_energy_mc(&p, &cfg).unwrap();
        let e1 = cc_excited_mc(&p, &cfg).unwrap();
        assert!(e1.mean >= e0.mean - 3.0 * e0.stderr.hypot(e1.stderr));
    }
}

#[test]
fn doubling_samples_shrinks_stderr() {
    let p = ModelParams::new(3, 1.0, 3).unwrap();
    let integ = CcIntegrator::new(&p, None).unwrap();
    let err = |n| {
        let mut cfg = CCConfig::new(1.0, n, None);
        cfg.seed = 21;
        integ.estimate(&cfg, CcState::Ground).unwrap().energy.stderr
    };
    let ratio = err(200_000) / err(100_000);
    assert!((ratio - 0.5f64.sqrt()).abs() <= 0.2 * 0.5f64.sqrt(), "ratio {ratio}");
}

#[test]
fn finite_cutoff_deviation_follows_a_power_law() {
    let p = ModelParams::new(2, 1.0, 3).unwrap();
    let o3 = ed_e0_per_site(&p);
    let pts: Vec<(f64, f64)> = [1.0, 3.2, 10.0]
        .iter()
        .map(|&l| {
            let e = sphere_ed(&p, &SphereBasisSpec::new(l, 1.0).unwrap()).unwrap().e0_per_site;
            (f64::ln(l), f64::ln((e - o3).abs()))
        })
        .collect();
    assert!(pts.windows(2).all(|w| w[1].1 < w[0].1));
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((-2.0..=-1.0).contains(&slope), "slope {slope}");
}

#[test]
fn sphere_hamiltonian_survives_triplet_export() {
    let p = ModelParams::new(2, 2.0, 2).unwrap();
    let h = build_sphere_hamiltonian(&p, &SphereBasisSpec::new(3.2, p.g()).unwrap()).unwrap();
    let mut buf = Vec::new();
    h.write_triplets(&mut buf).unwrap();
    let back = SparseHermitian::parse_triplets(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back.dim(), h.dim());
    let (a, b) = (low_eigenvalues(&h, 4).unwrap(), low_eigenvalues(&back, 4).unwrap());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
    }
}

#[test]
fn return_probability_starts_at_one() {
    let p = ModelParams::new(2, 1.0, 3).unwrap();
    assert_eq!(o3_return_probability(&p, &[0.0]).unwrap()[0], 1.0);
    let oracle = ReturnProbabilityOracle::new(&p, &SphereBasisSpec::new(3.2, 1.0).unwrap()).unwrap();
    let r = oracle.curve(&[0.0], &CCConfig::new(0.0, 1000, Some(3.2)), ReturnTarget::Omega).unwrap();
    assert!((r[0].mean - 1.0).abs() < 1e-12);
}

fn minimized(g_sq: f64, hi: f64) -> f64 {
    let m = minimize_alpha(|a| Ok(cc_energy_l2_closed_form(g_sq, a)), (0.0, hi), 1e-10).unwrap();
    cc_energy_l2_closed_form(g_sq, m.alpha)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn enlarging_the_bracket_never_raises_the_minimum(g_sq in 0.1f64..8.0, hi in 0.05f64..2.0, grow in 1.0f64..5.0) {
        prop_assert!(minimized(g_sq, hi * grow) <= minimized(g_sq, hi) + 1e-10);
    }

    #[test]
    fn return_probability_is_bounded(n in 200u64..3000, seed in 0u64..1000, t in 0.0f64..4.0) {
        let p = ModelParams::new(2, 1.0, 2).unwrap();
        let oracle = ReturnProbabilityOracle::new(&p, &SphereBasisSpec::new(3.2, 1.0).unwrap()).unwrap();
        let mut cfg = CCConfig::new(0.0, n, Some(3.2));
        cfg.seed = seed;
        cfg.blocks = cfg.blocks.min(n as usize);
        for target in [ReturnTarget::Omega, ReturnTarget::FockVacuum] {
            let r = oracle.curve(&[t], &cfg, target).unwrap()[0];
            prop_assert!(r.mean >= 0.0);
            prop_assert!(r.mean <= 1.0 + 3.0 * r.stderr + 1e-12);
        }
    }
}
