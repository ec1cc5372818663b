mod support;

use samkit::bounds::{
    cover_dichotomy_count, enumerate_dichotomies, in_general_position, log_growth_cover,
};

fn closed_form(n: u64, d: u64) -> u64 {
    let g = log_growth_cover(n, d).unwrap();
    g.count().round() as u64
}

#[test]
fn small_counts_by_hand() {
    assert_eq!(closed_form(3, 2), 6);
    assert_eq!(closed_form(4, 2), 8);
    assert_eq!(closed_form(4, 3), 14);
    assert_eq!(closed_form(5, 5), 32);
}

#[test]
fn log_space_is_exact_for_small_arguments() {
    for n in 1..=40u64 {
        for d in 1..=12u64 {
            let exact = cover_dichotomy_count(n, d).unwrap() as f64;
            let g = log_growth_cover(n, d).unwrap();
            assert!((g.count() / exact - 1.0).abs() < 1e-12, "n={n} d={d}");
        }
    }
}

#[test]
fn closed_form_matches_enumeration() {
    for n in 1..=8usize {
        for d in 1..=4usize {
            for set in 0..10u64 {
                let points = support::gaussian(n, d, 1000 * n as u64 + 10 * d as u64 + set);
                assert!(in_general_position(points.view(), true));
                let found = enumerate_dichotomies(points.view(), true).unwrap();
                assert!(found.general_position);
                assert_eq!(
                    found.count,
                    closed_form(n as u64, d as u64),
                    "n={n} d={d} set={set}"
                );
            }
        }
    }
}

#[test]
fn affine_class_counts_as_one_extra_dimension() {
    for n in 2..=7usize {
        for d in 1..=3usize {
            let points = support::gaussian(n, d, 77 + (n * 10 + d) as u64);
            let found = enumerate_dichotomies(points.view(), false).unwrap();
            assert_eq!(
                found.count,
                closed_form(n as u64, d as u64 + 1),
                "n={n} d={d}"
            );
        }
    }
}
