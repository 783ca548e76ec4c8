use checkers_core::bounds::*;
use checkers_core::sequences::lucas;
use checkers_core::{FieldElement, GameParams};
use proptest::prelude::*;

#[test]
fn sandwich_grid() {
    for k in 2..=5 {
        for d in 1..=4 {
            for m in 2..=500u64 {
                let r = BoundsReport::compute(GameParams::new(m, k, d).unwrap()).unwrap();
                assert!(r.lower <= r.achieved && r.achieved <= r.upper, "k={k} d={d} m={m}");
                assert!(r.upper - r.lower <= 1, "k={k} d={d} m={m}");
            }
        }
    }
}

#[test]
fn lucas_points_stop_short() {
    let ms: Vec<u64> = (1..=15).map(|j| u64::try_from(lucas(2 * j)).unwrap()).collect();
    let gaps = scan_gap(2, 2, ms.iter().copied()).unwrap();
    let found: Vec<u64> = gaps.iter().map(|g| g.m).collect();
    assert_eq!(found, ms);
}

proptest! {
    #[test]
    fn row1_cap_is_the_exact_floor(m in 1u64..=1_000_000, k in 2usize..=7) {
        let r = row1_cap(m, k).unwrap();
        let gap = &FieldElement::phi(k) - &FieldElement::one(k);
        let m_el = FieldElement::from_integer(k, m);
        prop_assert_eq!((&m_el - &gap.scale_int(r)).sign(), 1);
        prop_assert_eq!((&m_el - &gap.scale_int(r + 1)).sign(), -1);
    }

    #[test]
    fn sandwich_for_large_m(m in 2u64..=1_000_000_000, k in 2usize..=6, d in 1usize..=5) {
        let r = BoundsReport::compute(GameParams::new(m, k, d).unwrap()).unwrap();
        prop_assert!(r.lower <= r.achieved && r.achieved <= r.upper);
        prop_assert!(r.upper - r.lower <= 1);
    }

    #[test]
    fn golden_case_collapses(m in 1u64..=1_000_000, d in 1usize..=5) {
        let p = GameParams::new(m, 2, d).unwrap();
        let (t, _) = FieldElement::from_integer(2, m).floor_log_phi().unwrap();
        let up = upper_bound_row(p).unwrap();
        prop_assert_eq!(up.raw, t + 3 * d as i64 - 1);
        prop_assert_eq!(lower_bound_row_formula(p).unwrap(), t + 3 * d as i64 - 2);
    }

    #[test]
    fn single_square_lower_within_cap(m in 1u64..=10_000, k in 2usize..=4, d in 1usize..=3) {
        let (lower, cap) = single_square_caps(GameParams::new(m, k, d).unwrap()).unwrap();
        prop_assert!(lower <= cap);
    }
}
