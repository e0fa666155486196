use proptest::prelude::*;

use crs_toolkit::experiments::default_suite;
use crs_toolkit::quadrature::Integrator;
use crs_toolkit::*;

const LOG2_E_PLUS_1_SLACK: f64 = 1e-9;

fn simplex(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn discrete_pair() -> impl Strategy<Value = PairSpec> {
    (2usize..=8)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], n),
                prop::collection::vec(0.01f64..1.0, n),
            )
        })
        .prop_filter("target needs mass", |(q, _)| q.iter().sum::<f64>() > 0.0)
        .prop_map(|(q, p)| PairSpec::discrete(&simplex(q), &simplex(p)))
}

fn family_pair() -> impl Strategy<Value = PairSpec> {
    prop_oneof![
        (0.02f64..1.0).prop_map(PairSpec::laplace),
        (-2.0f64..2.0, 0.3f64..0.99, 1u32..=4).prop_map(|(mu, s, d)| PairSpec::gaussian(mu, s, d)),
        discrete_pair(),
        (1.0f64..20.0).prop_map(|c| PairSpec::synthetic(SyntheticWidth::Rectangle { c })),
        (0.01f64..0.9).prop_map(|eps| PairSpec::synthetic(SyntheticWidth::Epsilon { eps })),
    ]
}

fn check_monotone(w: &WidthFunction, mut hs: Vec<f64>) -> std::result::Result<(), TestCaseError> {
    prop_assert_eq!(w.eval(0.0), 1.0);
    hs.sort_by(f64::total_cmp);
    let vals: Vec<f64> = hs.iter().map(|&h| w.eval(h)).collect();
    for (pair, h) in vals.windows(2).zip(hs.windows(2)) {
        prop_assert!(pair[1] <= pair[0], "w({}) = {} > w({}) = {}", h[1], pair[1], h[0], pair[0]);
    }
    prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
    if w.h_max().is_finite() {
        prop_assert_eq!(w.eval(w.h_max() * 1.000_001), 0.0);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn laplace_width_is_monotone(b in 0.02f64..1.0, hs in prop::collection::vec(0.0f64..60.0, 2..20)) {
        check_monotone(&WidthFunction::laplace(b).unwrap(), hs)?;
    }

    #[test]
    fn discrete_width_is_monotone(spec in discrete_pair(), hs in prop::collection::vec(0.0f64..10.0, 2..20)) {
        check_monotone(&width_eval(&spec).unwrap(), hs)?;
    }

    #[test]
    fn synthetic_width_is_monotone(eps in 0.005f64..0.95, hs in prop::collection::vec(0.0f64..20.0, 2..20)) {
        check_monotone(&WidthFunction::epsilon_family(eps).unwrap(), hs)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gaussian_width_is_monotone(
        mu in -2.0f64..2.0,
        sigma in 0.3f64..0.99,
        d in 1u32..=8,
        fracs in prop::collection::vec(0.0f64..1.0, 2..20),
    ) {
        let w = width_eval(&PairSpec::gaussian(mu, sigma, d)).unwrap();
        let hs = fracs.iter().map(|f| f * w.h_max()).collect();
        check_monotone(&w, hs)?;
    }

    #[test]
    fn width_has_unit_mass(spec in family_pair()) {
        let w = width_eval(&spec).unwrap();
        let tol = if matches!(spec, PairSpec::Gaussian { .. }) { 1e-6 } else { 1e-9 };
        let mass = w.integrate(|_, v| v, 0.0, None, Integrator::new(1e-10)).unwrap().value;
        prop_assert!((mass - 1.0).abs() <= tol, "{:?}: ∫w = {}", spec, mass);
    }

    #[test]
    fn q_mass_is_non_increasing(spec in family_pair(), fracs in prop::collection::vec(0.0f64..1.2, 2..12)) {
        let w = width_eval(&spec).unwrap();
        let (p0, q0) = superlevel_measures(&w, 0.0).unwrap();
        prop_assert_eq!(p0, 1.0);
        prop_assert!((q0 - 1.0).abs() <= 1e-6);
        let mut hs: Vec<f64> = fracs.iter().map(|f| f * w.h_max()).collect();
        hs.sort_by(f64::total_cmp);
        let qs: Vec<f64> = hs.iter().map(|&h| superlevel_measures(&w, h).unwrap().1).collect();
        for q in qs.windows(2) {
            prop_assert!(q[1] <= q[0] + 1e-9, "{:?}: {:?}", spec, qs);
        }
    }

    #[test]
    fn divergences_are_ordered(spec in family_pair()) {
        let kl = divergence(&spec, DivergenceKind::KL, None).unwrap().value_bits;
        let cs = divergence(&spec, DivergenceKind::CS, None).unwrap().value_bits;
        let acs = divergence(&spec, DivergenceKind::ACS, None).unwrap().value_bits;
        let tol = 1e-6;
        prop_assert!(kl <= cs + tol && cs <= acs + tol, "{:?}: {} {} {}", spec, kl, cs, acs);
        let s = kl_sandwich(kl).unwrap();
        prop_assert!(cs <= s.cs_upper_bits + tol, "{:?}: D_CS {} above {}", spec, cs, s.cs_upper_bits);
    }
}

fn mc_families() -> Vec<PairSpec> {
    vec![
        PairSpec::laplace(0.3),
        PairSpec::gaussian(1.0, 0.5, 1),
        PairSpec::gaussian(0.5, 0.7, 2),
        PairSpec::discrete(&[0.1, 0.2, 0.7], &[0.3, 0.3, 0.4]),
        PairSpec::synthetic(SyntheticWidth::Epsilon { eps: 0.1 }),
        PairSpec::synthetic(SyntheticWidth::OptimalCs { alpha: 0.5 }),
    ]
}

#[test]
fn monte_carlo_width_matches_analytic() {
    let n = 100_000;
    for (f, spec) in mc_families().iter().enumerate() {
        let pair = make_pair(spec).unwrap();
        let w = width_eval(spec).unwrap();
        let top = if w.h_max().is_finite() { w.h_max() } else { 10.0 };
        for i in 0..20 {
            let h = top * (i as f64 + 0.5) / 20.0;
            let mut rng = stream(17, (f * 100 + i) as u64);
            let (est, _) = width_mc_estimate(&pair, h, n, &mut rng).unwrap();
            let truth = w.eval(h);
            let sd = (truth * (1.0 - truth) / n as f64).sqrt();
            assert!((est - truth).abs() <= 4.0 * sd + 1e-12, "{spec:?} at h = {h}: {est} vs {truth}");
        }
    }
}

#[test]
fn radon_nikodym_normalization() {
    let n = 100_000;
    for (f, spec) in mc_families().iter().enumerate() {
        let pair = make_pair(spec).unwrap();
        let mut rng = stream(29, f as u64);
        let r: Vec<f64> = sample_proposal(&pair, &mut rng, n)
            .unwrap()
            .iter()
            .map(|x| pair.log_ratio(x).unwrap().exp())
            .collect();
        let mean = r.iter().sum::<f64>() / n as f64;
        let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() <= 3.0 * se, "{spec:?}: E[r] = {mean} ± {se}");
    }
}

#[test]
fn synthetic_monte_carlo_at_random_points() {
    let n = 100_000;
    let spec = PairSpec::synthetic(SyntheticWidth::Table {
        h: vec![0.0, 0.4, 1.2, 2.2],
        w: vec![1.0, 0.5, 0.2, 0.0],
    });
    let pair = make_pair(&spec).unwrap();
    let w = width_eval(&spec).unwrap();
    let mut pick = stream(5, 0);
    for i in 0..10 {
        let h: f64 = rand::Rng::random_range(&mut pick, 0.0..2.5);
        let (est, _) = width_mc_estimate(&pair, h, n, &mut stream(5, i + 1)).unwrap();
        let truth = w.eval(h);
        let sd = (truth * (1.0 - truth) / n as f64).sqrt();
        assert!((est - truth).abs() <= 4.0 * sd + 1e-12, "h = {h}: {est} vs {truth}");
    }
}

#[test]
fn equality_case_rectangles() {
    for c in [1.0, 2.0, 4.0, 10.0] {
        let spec = PairSpec::synthetic(SyntheticWidth::Rectangle { c });
        let w = width_eval(&spec).unwrap();
        assert_eq!(w.total_mass(), 1.0);
        let kl = divergence(&spec, DivergenceKind::KL, None).unwrap().value_bits;
        let cs = divergence(&spec, DivergenceKind::CS, None).unwrap().value_bits;
        let want = f64::log2(c);
        assert!((kl - want).abs() < 1e-12 && (cs - want).abs() < 1e-12, "c = {c}: {kl} {cs}");
    }
}

#[test]
fn optimal_families_are_extremal() {
    let pairs: Vec<(f64, f64, f64)> = default_suite()
        .iter()
        .chain(&mc_families())
        .map(|spec| {
            let v = |k| divergence(spec, k, None).unwrap().value_bits;
            (v(DivergenceKind::KL), v(DivergenceKind::CS), v(DivergenceKind::ACS))
        })
        .collect();
    let tol = 1e-6;
    let (mut cs_checks, mut acs_checks) = (0, 0);
    for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let best = optimal_family_values(OptimalFamily::Cs { alpha }).unwrap();
        for &(kl, cs, _) in &pairs {
            if kl <= best.kl_bits {
                cs_checks += 1;
                assert!(cs <= best.divergence_bits + tol, "α = {alpha}: {cs} > {}", best.divergence_bits);
            }
        }
    }
    for alpha in [1.5, 2.0, 3.0, 5.0, 10.0] {
        let best = optimal_family_values(OptimalFamily::Acs { alpha }).unwrap();
        for &(kl, _, acs) in &pairs {
            if kl <= best.kl_bits {
                acs_checks += 1;
                assert!(acs <= best.divergence_bits + tol, "α = {alpha}: {acs} > {}", best.divergence_bits);
            }
        }
    }
    assert!(cs_checks > 10 && acs_checks > 10, "{cs_checks} {acs_checks}");
}

#[test]
fn grs_bounds_hold_on_random_discrete_pairs() {
    let mut rng = stream(77, 0);
    for _ in 0..100 {
        let n = rand::Rng::random_range(&mut rng, 2..=10);
        let raw = |rng: &mut rand_chacha::ChaCha20Rng| simplex((0..n).map(|_| rand::Rng::random::<f64>(rng) + 0.01).collect());
        let spec = PairSpec::discrete(&raw(&mut rng), &raw(&mut rng));
        let w = width_eval(&spec).unwrap();
        let index = grs_index_distribution(&w, 1e-12).unwrap();
        let cs = divergence(&spec, DivergenceKind::CS, None).unwrap().value_bits;
        let acs = divergence(&spec, DivergenceKind::ACS, None).unwrap().value_bits;
        let (lo, hi) = index.entropy_interval();
        assert!(hi >= cs - 1e-9, "{spec:?}: H ≤ {hi} < D_CS {cs}");
        assert!(lo <= cs + divergences::log2_e_plus_1() + LOG2_E_PLUS_1_SLACK, "{spec:?}");
        assert!(lo <= acs + 1.0 + 1e-9, "{spec:?}");
        let bound = w.h_max() * (1.0 - 1e-9);
        assert!(index.mean_index + index.mean_tail_bound >= bound, "{spec:?}");
    }
}

#[test]
fn refining_eps_stop_is_stable() {
    for spec in [
        PairSpec::laplace(0.5),
        PairSpec::laplace(0.25),
        PairSpec::gaussian(1.0, 0.5, 1),
        PairSpec::synthetic(SyntheticWidth::Epsilon { eps: 0.1 }),
    ] {
        let w = width_eval(&spec).unwrap();
        let coarse = grs_index_distribution(&w, 1e-9).unwrap();
        let fine = grs_index_distribution(&w, 1e-10).unwrap();
        let change = (fine.entropy_bits - coarse.entropy_bits).abs();
        assert!(
            change <= coarse.entropy_tail_bound_bits,
            "{spec:?}: change {change} ≥ tail bound {}",
            coarse.entropy_tail_bound_bits
        );
    }
}
