use margin_complexity::dist::{self, CoordinateLaw, DistributionSpec, LabelModel};
use margin_complexity::learner::{
    adversarial_minimizer, learning_curve, margin_error_minimize, margin_loss, misclassification,
    write_curve_csv, ErmMode, LearnerKind,
};
use margin_complexity::optim::{solve_min_norm_ineq, ConstraintSystem};
use margin_complexity::shatter::{shatter_at_origin, ShatterOptions};
use margin_complexity::{LabeledSample, SampleMatrix};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn labeled_strategy(max_m: usize, max_d: usize) -> impl Strategy<Value = LabeledSample> {
    (1..=max_m, 1..=max_d).prop_flat_map(|(m, d)| {
        (
            prop::collection::vec(-2.0f64..2.0, m * d),
            prop::collection::vec(prop::bool::ANY, m),
        )
            .prop_map(move |(v, l)| {
                let x = SampleMatrix::new(DMatrix::from_vec(m, d, v)).unwrap();
                LabeledSample::new(x, l.into_iter().map(|b| if b { 1 } else { -1 }).collect())
                    .unwrap()
            })
    })
}

/// Largest number of points whose margin constraints are jointly feasible in
/// the unit ball, over all `2^m` subsets.
fn max_satisfiable(s: &LabeledSample, gamma: f64) -> usize {
    let m = s.m();
    let mut best = 0;
    for mask in 1u32..1 << m {
        let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        if idx.len() <= best {
            continue;
        }
        let mut a = s.points().matrix().select_rows(&idx);
        for (r, &i) in idx.iter().enumerate() {
            a.row_mut(r).scale_mut(f64::from(s.labels()[i]));
        }
        let cs = ConstraintSystem::new(a, DVector::from_element(idx.len(), gamma)).unwrap();
        let sol = solve_min_norm_ineq(&cs).unwrap();
        if sol.is_optimal() && sol.objective <= 1.0 + 1e-9 {
            best = idx.len();
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_mode_is_optimal(s in labeled_strategy(8, 3), gamma in 0.1f64..1.5) {
        let out = margin_error_minimize(&s, gamma, ErmMode::Exact).unwrap();
        prop_assert!(out.optimality_certified);
        prop_assert!(out.w_vector().norm() <= 1.0 + 1e-12);
        prop_assert_eq!(out.train_margin_loss, margin_loss(&s, &out.w_vector(), gamma));
        let satisfied = ((1.0 - out.train_margin_loss) * s.m() as f64).round() as usize;
        prop_assert_eq!(satisfied, max_satisfiable(&s, gamma));
    }

    #[test]
    fn heuristic_never_beats_exact(s in labeled_strategy(10, 4), gamma in 0.1f64..1.5) {
        let exact = margin_error_minimize(&s, gamma, ErmMode::Exact).unwrap();
        let heur = margin_error_minimize(&s, gamma, ErmMode::Heuristic).unwrap();
        prop_assert!(!heur.optimality_certified);
        prop_assert!(heur.w_vector().norm() <= 1.0 + 1e-12);
        prop_assert!(heur.train_margin_loss >= exact.train_margin_loss);
    }

    #[test]
    fn margin_loss_grows_with_gamma(s in labeled_strategy(12, 5), w in prop::collection::vec(-1.0f64..1.0, 5), g1 in 0.0f64..2.0, dg in 0.0f64..2.0) {
        let w = DVector::from_iterator(s.dim(), w.into_iter().take(s.dim()));
        prop_assert!(margin_loss(&s, &w, g1 + 1e-3) <= margin_loss(&s, &w, g1 + 1e-3 + dg));
    }

    #[test]
    fn adversarial_construction_is_exact(
        v in prop::collection::vec(-1.0f64..1.0, 8 * 12),
        labels in prop::collection::vec(prop::bool::ANY, 8),
        split in 1usize..7,
        gamma in 0.05f64..0.4,
    ) {
        let x = SampleMatrix::new(DMatrix::from_vec(8, 12, v)).unwrap();
        prop_assume!(shatter_at_origin(&x, gamma).unwrap().shattered);
        let y: Vec<i8> = labels.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let idx_train: Vec<usize> = (0..split).collect();
        let idx_test: Vec<usize> = (split..8).collect();
        let train = LabeledSample::new(x.select_rows(&idx_train), y[..split].to_vec()).unwrap();
        let test = LabeledSample::new(x.select_rows(&idx_test), y[split..].to_vec()).unwrap();
        let w = adversarial_minimizer(&train, test.points(), test.labels(), gamma, ShatterOptions::default()).unwrap();
        prop_assert!(w.norm() <= 1.0 + 1e-12);
        prop_assert_eq!(margin_loss(&train, &w, gamma), 0.0);
        prop_assert_eq!(misclassification(&test, &w), 1.0);
    }
}

fn curve_csv(
    spec: &DistributionSpec,
    kind: LearnerKind,
    grid: &[usize],
    trials: usize,
    workers: Option<usize>,
) -> Vec<u8> {
    let c = learning_curve(spec, 0.5, grid, trials, kind, 31, workers).unwrap();
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, &c).unwrap();
    buf
}

#[test]
fn learning_curves_are_reproducible_across_worker_counts() {
    let spec = dist::gaussian_mixture(12, 2.0).unwrap();
    for kind in [
        LearnerKind::ErmExact,
        LearnerKind::ErmHeuristic,
        LearnerKind::Generative,
    ] {
        let a = curve_csv(&spec, kind, &[4, 8], 12, None);
        assert_eq!(a, curve_csv(&spec, kind, &[4, 8], 12, Some(1)), "{kind}");
        assert_eq!(a, curve_csv(&spec, kind, &[4, 8], 12, Some(3)), "{kind}");
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("m,mean_test_error,std_error,trials,learner_kind,gamma,seed\n4,"));
    }
}

#[test]
fn coin_labels_cannot_be_learned() {
    let spec = DistributionSpec::iid(
        CoordinateLaw::Gaussian,
        60,
        1.0,
        LabelModel::Coin { p: 0.5 },
    )
    .unwrap();
    for kind in [
        LearnerKind::ErmExact,
        LearnerKind::ErmHeuristic,
        LearnerKind::Adversarial,
        LearnerKind::Generative,
    ] {
        let c = learning_curve(&spec, 0.1, &[8], 200, kind, 3, None).unwrap();
        let e = &c.entries[0];
        assert!(
            (e.mean_test_error - 0.5).abs() <= 2.0 * e.std_error,
            "{kind}: {} ± {}",
            e.mean_test_error,
            e.std_error
        );
        assert!(c.optimal_margin_loss.is_none());
    }
}

#[test]
fn halfspace_erm_curve_decreases() {
    let spec = dist::isotropic_gaussian(5, 1.0).unwrap();
    let c = learning_curve(
        &spec,
        0.1,
        &[2, 4, 8, 16],
        100,
        LearnerKind::ErmExact,
        9,
        None,
    )
    .unwrap();
    for pair in c.entries.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        assert!(
            b.mean_test_error <= a.mean_test_error + 2.0 * a.std_error.max(b.std_error),
            "{a:?} -> {b:?}"
        );
    }
    assert!(c
        .entries
        .iter()
        .all(|e| (0.0..=1.0).contains(&e.mean_test_error)));
    assert!(c.optimal_margin_loss.is_some());
}

#[test]
fn adversarial_curve_requires_shattering() {
    // 2m = 8 points in 3 dimensions can never be shattered at the origin
    let spec = dist::isotropic_gaussian(3, 1.0).unwrap();
    let err = learning_curve(&spec, 0.1, &[4], 2, LearnerKind::Adversarial, 0, None).unwrap_err();
    assert!(err.to_string().contains("m = 4"), "{err}");
}
