use margin_complexity::dist::{self, sample_points, CoordinateLaw, DistributionSpec, LabelModel};
use margin_complexity::linalg::smallest_gram_eigenvalue;
use margin_complexity::randmat::{
    empirical_beta, estimate_shatter_prob, m_underline, smallest_eigenvalues, trial_seed,
    wilson_interval, write_estimates_csv,
};
use proptest::prelude::*;

#[test]
fn smallest_eigenvalue_is_pathwise_non_increasing() {
    for (d, m_max) in [(40, 30), (10, 15)] {
        let spec = dist::isotropic_gaussian(d, 1.0).unwrap();
        for t in 0..50 {
            let seed = trial_seed(99, t);
            let full = sample_points(&spec, m_max, seed).unwrap();
            let mut prev = f64::INFINITY;
            for m in 1..=m_max {
                // nested draw equals the prefix of the larger one
                let x = sample_points(&spec, m, seed).unwrap();
                assert_eq!(x, full.prefix(m));
                let lam = smallest_gram_eigenvalue(x.matrix());
                assert!(
                    lam <= prev,
                    "d={d} trial {t}: λ_{m} = {lam} > λ_{} = {prev}",
                    m - 1
                );
                if m > d {
                    assert_eq!(lam, 0.0);
                }
                prev = lam;
            }
        }
    }
}

#[test]
fn estimated_probability_is_non_increasing_in_m() {
    let spec = dist::isotropic_gaussian(100, 1.0).unwrap();
    let r = m_underline(&spec, 1.0, 100, 100, 3, None).unwrap();
    for pair in r.estimates.windows(2) {
        assert!(pair[1].prob <= pair[0].prob);
    }
    assert_eq!(r.m_underline, r.first_failing_m / 2);
    assert_eq!(r.grid, (1..=r.first_failing_m).collect::<Vec<_>>());
    assert!(r.estimates.last().unwrap().prob < 0.5);
    assert!(r.estimates[..r.estimates.len() - 1]
        .iter()
        .all(|e| e.prob >= 0.5));
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let spec = dist::bernoulli(30).unwrap();
    let csv = |workers| {
        let e = estimate_shatter_prob(&spec, 0.8, 12, 64, 5, workers).unwrap();
        let mut buf = Vec::new();
        write_estimates_csv(&mut buf, &[e]).unwrap();
        buf
    };
    let base = csv(None);
    assert_eq!(base, csv(Some(1)));
    assert_eq!(base, csv(Some(4)));
    assert_eq!(
        smallest_eigenvalues(&spec, 7, 16, 2, Some(1)).unwrap(),
        smallest_eigenvalues(&spec, 7, 16, 2, Some(3)).unwrap()
    );
}

/// For gaussian data with `Σ ≤ I` and trace `L`, some `β̂ ≥ 0.05` keeps
/// `P[λ_m ≥ m] ≥ 0.9` for every `m ≤ β̂ L`.
#[test]
fn empirical_beta_spot_check() {
    let specs = [
        dist::isotropic_gaussian(100, 1.0).unwrap(),
        dist::isotropic_gaussian(400, 1.0).unwrap(),
        // trace 100 spread over 200 coordinates of variance 1/2
        DistributionSpec::iid(
            CoordinateLaw::Gaussian,
            200,
            0.5,
            LabelModel::Coin { p: 0.5 },
        )
        .unwrap(),
    ];
    for spec in &specs {
        let r = empirical_beta(spec, 0.9, 100, 21, None).unwrap();
        assert!(r.beta_hat >= 0.05, "trace {}: β̂ = {}", r.trace, r.beta_hat);
        assert!(r.estimates[..r.m_max_ok].iter().all(|e| e.prob >= 0.9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wilson_interval_brackets_estimate(trials in 1usize..500, frac in 0.0f64..=1.0) {
        let s = ((trials as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(s, trials);
        let p = s as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn estimate_is_reproducible(seed in any::<u64>(), m in 1usize..8) {
        let spec = dist::isotropic_gaussian(8, 1.0).unwrap();
        let a = estimate_shatter_prob(&spec, 0.5, m, 10, seed, None).unwrap();
        let b = estimate_shatter_prob(&spec, 0.5, m, 10, seed, Some(2)).unwrap();
        prop_assert_eq!(a, b);
    }
}
