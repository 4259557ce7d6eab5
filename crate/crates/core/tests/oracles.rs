//! Independent checks of the analytic miss-probability model.

use tracesample::dataset::ClassHistogram;
use tracesample::metrics::{expected_missing_series, miss_probability_analytic, monte_carlo_missing};

fn eight_class_200() -> ClassHistogram {
    let counts = [90u64, 50, 25, 15, 10, 5, 3, 2];
    assert_eq!(counts.iter().sum::<u64>(), 200);
    ClassHistogram::new(
        counts
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("C{i}"), *c))
            .collect(),
    )
    .unwrap()
}

#[test]
fn monte_carlo_agrees_with_analytic() {
    let h = eight_class_200();
    for with_replacement in [false, true] {
        for n in [1u64, 5, 10, 20, 40, 80, 150] {
            let analytic = miss_probability_analytic(&h, n, with_replacement).unwrap().expected_missing;
            let mc = monte_carlo_missing(&h, n, with_replacement, 10_000, 77).unwrap();
            let diff = (mc.mean() - analytic).abs();
            let se = mc.std_error().max(1e-9);
            assert!(
                diff <= 3.0 * se || diff < 1e-12,
                "n={n} wr={with_replacement}: mc {} vs analytic {analytic} (se {se})",
                mc.mean()
            );
        }
    }
}

#[test]
fn with_replacement_oracle_matches_power() {
    let h = eight_class_200();
    let t = miss_probability_analytic(&h, 30, true).unwrap();
    for row in &t.rows {
        let direct = (1.0 - row.source_count as f64 / 200.0).powi(30);
        assert!((row.miss_probability - direct).abs() < 1e-12);
    }
}

#[test]
fn expected_missing_decreases_with_n() {
    let h = eight_class_200();
    let ns: Vec<u64> = (0..=200).collect();
    let s = expected_missing_series(&h, &ns, false).unwrap();
    assert_eq!(s[0].1, 8.0);
    assert_eq!(s[200].1, 0.0);
    assert!(s.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
}
