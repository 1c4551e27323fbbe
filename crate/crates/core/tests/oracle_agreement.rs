use graded_posets::genfun::{count_table, CountKind};
use graded_posets::oracle::{brute_counts, decomposition_sweep, oracle_table};
use num_bigint::BigInt;

#[test]
fn oracle_matches_generating_functions_through_six() {
    let reports: Vec<_> = (0..=6).map(|n| brute_counts(n).unwrap()).collect();
    for kind in [CountKind::Strong, CountKind::Weak, CountKind::StrongByHeight, CountKind::WeakByHeight, CountKind::Semiorder] {
        let exact = count_table(kind, 6).unwrap();
        let brute = oracle_table(kind, &reports);
        for row in &brute.table.counts {
            let expected = exact.get(row.n, row.k).cloned().unwrap_or_default();
            assert_eq!(row.count, expected, "{kind} n={} k={:?}", row.n, row.k);
        }
        let nonzero = exact.counts.iter().filter(|r| r.count != BigInt::from(0)).count();
        assert_eq!(brute.table.counts.iter().filter(|r| r.count != BigInt::from(0)).count(), nonzero, "{kind}");
    }
    assert!(reports.iter().all(|r| r.criterion_disagreements == 0));
    assert_eq!(reports[6].total_posets, 130023);
}

#[test]
fn sweeps_have_no_failures() {
    let five = decomposition_sweep(5).unwrap();
    assert_eq!((five.checked, five.failures), (2551, 0));
    let six = decomposition_sweep(6).unwrap();
    assert_eq!((six.checked, six.failures), (41343, 0));
    assert!(six.pattern_checked > 0);
    assert_eq!(six.strong_checked, 22383);
}
