use std::collections::BTreeMap;

use gaussym::fields::builtin_field;
use gaussym::gaussian::equal_measure_grid;
use gaussym::rearrange::{lebesgue_rearrangement, rearrange_cells};
use gaussym::verify::{
    check_interval_bound, check_reformulated, Analysis, CheckOptions, IntervalUnion,
};
use proptest::prelude::*;

fn is_nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cell_rearrangement_is_a_sorted_permutation(values in prop::collection::vec(-5.0f64..5.0, 1..200)) {
        let p = rearrange_cells(&values).unwrap();
        prop_assert!(is_nonincreasing(p.values()));
        let mut expected = values.clone();
        expected.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(p.values(), &expected[..]);
        let knots = p.knots();
        prop_assert_eq!(knots[0], 0.0);
        prop_assert_eq!(*knots.last().unwrap(), 1.0);
    }

    #[test]
    fn lebesgue_rearrangement_ignores_order(
        raw in prop::collection::vec((0.1f64..1.0, -3.0f64..3.0), 1..40),
        rotation in 0usize..40,
    ) {
        let total: f64 = raw.iter().map(|(w, _)| w).sum();
        let samples: Vec<(f64, f64)> = raw.iter().map(|&(w, v)| (w / total, v)).collect();
        let renormalised: f64 = samples.iter().map(|(w, _)| w).sum();
        prop_assume!((renormalised - 1.0).abs() <= 1e-12);
        let mut shuffled = samples.clone();
        shuffled.reverse();
        let k = rotation % shuffled.len();
        shuffled.rotate_left(k);
        let a = lebesgue_rearrangement(&samples).unwrap();
        let b = lebesgue_rearrangement(&shuffled).unwrap();
        prop_assert!(is_nonincreasing(a.values()));
        for t in [0.1, 0.33, 0.5, 0.9, 1.0] {
            prop_assert!((a.integral_to(t) - b.integral_to(t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn verdict_matches_violation(c in 0.2f64..3.0, dim in 1usize..3, n in 16usize..200) {
        let mut params = BTreeMap::new();
        params.insert("c".to_string(), c);
        let f = builtin_field("gaussian_bump", &params, dim).unwrap();
        let grid = equal_measure_grid(dim, n).unwrap();
        let a = Analysis::new(&f, &grid, 256).unwrap();
        let r = check_reformulated(&a, &CheckOptions::default());
        prop_assert_eq!(r.pass, r.max_violation <= r.tolerance);
        prop_assert_eq!(r.lhs_curve.len(), 256);
        prop_assert_eq!(r.rhs_curve.len(), 256);
        prop_assert!(is_nonincreasing(a.rearrangement().values()));
        prop_assert!(is_nonincreasing(a.gradient_rearrangement().values()));

        // E = (0, 1) is the total-integral comparison
        let full = check_interval_bound(&a, &IntervalUnion::new(vec![(0.0, 1.0)]).unwrap(), &CheckOptions::default());
        let (l, rr) = (full.lhs_curve.last().unwrap(), full.rhs_curve.last().unwrap());
        prop_assert!((l - r.lhs_curve.last().unwrap()).abs() <= 1e-12 * (1.0 + l.abs()));
        prop_assert!((rr - r.rhs_curve.last().unwrap()).abs() <= 1e-12 * (1.0 + rr.abs()));
    }
}
