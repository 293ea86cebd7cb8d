use std::collections::HashSet;

use groundtrack::association::{chi2_cdf, p_of_d, solve_assignment, stage1_score, stage2_score, AssocModelProbs, ScoreMatrix};
use groundtrack::image_filter::{biou, iou};
use groundtrack::BBox;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = (Vec<Vec<f64>>, f64)> {
    (1usize..8, 1usize..8)
        .prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(0.0f64..1.0, m), n))
        .prop_flat_map(|rows| (Just(rows), 0.0f64..0.8))
}

proptest! {
    #[test]
    fn assignment_is_a_gated_matching((rows, gate) in matrix()) {
        let pairs = solve_assignment(&ScoreMatrix::from_rows(&rows, gate));
        let mut seen_r = HashSet::new();
        let mut seen_c = HashSet::new();
        for &(i, j) in &pairs {
            prop_assert!(seen_r.insert(i) && seen_c.insert(j));
            prop_assert!(rows[i][j] >= gate);
        }
    }

    #[test]
    fn chi2_cdf_is_monotone(a in 0.0f64..200.0, b in 0.0f64..200.0, k in 1u32..40) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (fl, fh) = (chi2_cdf(lo, k), chi2_cdf(hi, k));
        prop_assert!((0.0..=1.0).contains(&fl) && fl <= fh + 1e-15);
    }

    #[test]
    fn p_of_d_is_a_probability(d in -50.0f64..500.0) {
        let p = p_of_d(d, 24);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn biou_properties(
        a in (0.0f64..500.0, 0.0f64..500.0, 1.0f64..200.0, 1.0f64..200.0),
        c in (0.0f64..500.0, 0.0f64..500.0, 1.0f64..200.0, 1.0f64..200.0),
        s in 0.0f64..1.0,
    ) {
        let a = BBox::from_ltwh(a.0, a.1, a.2, a.3);
        let c = BBox::from_ltwh(c.0, c.1, c.2, c.3);
        let v = biou(&a, &c, s);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((v - biou(&c, &a, s)).abs() < 1e-12);
        prop_assert!((biou(&a, &a, s) - 1.0).abs() < 1e-12);
        if iou(&a, &c) > 0.0 {
            prop_assert!(v > 0.0);
        }
    }
}

#[test]
fn empty_and_degenerate_matrices() {
    assert!(solve_assignment(&ScoreMatrix::from_rows(&[], 0.1)).is_empty());
    assert!(solve_assignment(&ScoreMatrix::from_rows(&[vec![0.05, 0.09]], 0.1)).is_empty());
    assert_eq!(solve_assignment(&ScoreMatrix::from_rows(&[vec![0.5], vec![0.9]], 0.1)), vec![(1, 0)]);
}

#[test]
fn assignment_prefers_total_score() {
    // greedy would take (0,0)=0.9 and leave 0.1; the optimum is 0.8 + 0.8
    let rows = vec![vec![0.9, 0.8], vec![0.8, 0.1]];
    assert_eq!(solve_assignment(&ScoreMatrix::from_rows(&rows, 0.0)), vec![(0, 1), (1, 0)]);
}

#[test]
fn chi2_known_values() {
    assert!((chi2_cdf(5.991_464_547_107_979, 2) - 0.95).abs() < 1e-12);
    assert!((chi2_cdf(36.415_028_501_807_3, 24) - 0.95).abs() < 1e-9);
    assert_eq!(chi2_cdf(0.0, 24), 0.0);
}

#[test]
fn score_examples() {
    assert!((stage1_score(0.5, 0.8, 0.9) - 0.36).abs() < 1e-12);
    let mu = AssocModelProbs::new(0.25, 0.75);
    assert!((stage2_score(&mu, 0.4, 0.8, 0.5) - (0.25 * 0.8 + 0.75 * 0.4) * 0.5).abs() < 1e-12);
}
