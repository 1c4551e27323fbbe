//! Exhaustive ground truth: every labeled poset on `[n]` and every bipartite
//! graph on `[m] ⊎ [n]`.
//!
//! Posets are generated by inserting element `n - 1` into each poset on
//! `[n - 1]`: pick a down-closed set `D` and an up-closed set `U` with every
//! element of `D` below every element of `U`, and put `D < n - 1 < U`. Each
//! labeled poset arises exactly once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exchange::write_poset;
use crate::genfun::{CountKind, CountRow, CountTable, QuarkFamilyFlags};
use crate::poset::{bit, bits, full_mask, Poset, RankedPoset};
use crate::series::{binomial, factorial, Bounds, TruncatedSeries};
use crate::structure::{
    avoids_via_word, decompose_ordinal_with_labels, is_sum_indecomposable, ordinal_sum, quark_decompose_in, trim, BType,
    LegalityMode, TrimmedPoset,
};

/// Largest `n` accepted by the poset enumerator.
pub const MAX_POSET_N: usize = 7;
/// Largest `m·n` accepted by the bipartite enumerator.
pub const MAX_BIPARTITE_EDGES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("n = {n} is outside 0..={max}")]
    OutOfRange { n: usize, max: usize },
    #[error("{m}×{n} bipartite graphs exceed {MAX_BIPARTITE_EDGES} possible edges")]
    TooManyEdges { m: usize, n: usize },
    #[error("{stage} failed for poset {poset}: {detail}")]
    SweepFailure { stage: &'static str, poset: String, detail: String },
}

fn check_n(n: usize, max: usize) -> Result<(), OracleError> {
    if n > max {
        return Err(OracleError::OutOfRange { n, max });
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct Rows {
    k: usize,
    up: [u64; MAX_POSET_N],
    down: [u64; MAX_POSET_N],
}

impl Rows {
    fn empty() -> Self {
        Rows { k: 0, up: [0; MAX_POSET_N], down: [0; MAX_POSET_N] }
    }

    fn to_poset(&self) -> Poset {
        Poset::from_rows_unchecked(self.k, self.up[..self.k].to_vec(), self.down[..self.k].to_vec())
    }

    /// Every one-element extension, in a fixed order.
    fn extensions(&self, mut f: impl FnMut(Rows)) {
        let k = self.k;
        let all = full_mask(k);
        let mut d = 0u64;
        loop {
            if bits(d).all(|x| self.down[x] & !d == 0) {
                let allowed = bits(d).fold(all, |acc, x| acc & self.up[x]);
                let mut u = allowed;
                loop {
                    if bits(u).all(|y| self.up[y] & !u == 0) {
                        let mut next = *self;
                        next.k = k + 1;
                        next.up[k] = u;
                        next.down[k] = d;
                        for x in bits(d) {
                            next.up[x] |= bit(k);
                        }
                        for y in bits(u) {
                            next.down[y] |= bit(k);
                        }
                        f(next);
                    }
                    if u == 0 {
                        break;
                    }
                    u = (u - 1) & allowed;
                }
            }
            if d == all {
                break;
            }
            d += 1;
        }
    }

    fn walk(&self, n: usize, visit: &mut impl FnMut(&Poset)) {
        if self.k == n {
            visit(&self.to_poset());
            return;
        }
        self.extensions(|next| next.walk(n, visit));
    }

    fn frontier(depth: usize) -> Vec<Rows> {
        let mut level = vec![Rows::empty()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for r in &level {
                r.extensions(|e| next.push(e));
            }
            level = next;
        }
        level
    }
}

/// Visits every labeled poset on `[n]` once, in a deterministic order, and
/// returns how many were visited.
pub fn enumerate_posets(n: usize, mut visitor: impl FnMut(&Poset)) -> Result<u64, OracleError> {
    check_n(n, MAX_POSET_N)?;
    let mut count = 0u64;
    Rows::empty().walk(n, &mut |p| {
        count += 1;
        visitor(p)
    });
    Ok(count)
}

/// Folds over every labeled poset on `[n]` in parallel. Subtrees below a
/// fixed depth are folded independently and merged with `reduce`, so the
/// result does not depend on scheduling when `reduce` is associative and
/// commutative.
pub fn fold_posets<T, I, F, R>(n: usize, parallel: bool, init: I, fold: F, reduce: R) -> Result<T, OracleError>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &Poset) + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    check_n(n, MAX_POSET_N)?;
    let roots = Rows::frontier(n.min(3));
    let run = |r: &Rows| {
        let mut acc = init();
        r.walk(n, &mut |p| fold(&mut acc, p));
        acc
    };
    Ok(if parallel {
        roots.par_iter().map(run).reduce(&init, &reduce)
    } else {
        roots.iter().map(run).fold(init(), &reduce)
    })
}

/// Exhaustive tallies for one `n`. Height-indexed vectors have `n + 1`
/// entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub total_posets: u64,
    pub weakly_graded: u64,
    pub strongly_graded: u64,
    pub weak_avoiding: Vec<u64>,
    pub strong_avoiding: Vec<u64>,
    pub semiorder_strong: Vec<u64>,
    /// Weakly graded posets on which pattern search, the distant-pair
    /// criterion and the rank-distance-two criterion do not all agree.
    pub criterion_disagreements: u64,
}

impl OracleReport {
    fn empty(n: usize) -> Self {
        OracleReport {
            n,
            total_posets: 0,
            weakly_graded: 0,
            strongly_graded: 0,
            weak_avoiding: vec![0; n + 1],
            strong_avoiding: vec![0; n + 1],
            semiorder_strong: vec![0; n + 1],
            criterion_disagreements: 0,
        }
    }

    fn add(&mut self, p: &Poset) {
        self.total_posets += 1;
        let Some(r) = RankedPoset::from_poset(p.clone()) else { return };
        self.weakly_graded += 1;
        let h = r.height();
        let strong = r.is_strongly_graded();
        let avoids = !p.contains_3plus1();
        if avoids != r.distant_avoidance_check() || avoids != r.local_avoidance_check() {
            self.criterion_disagreements += 1;
        }
        if strong {
            self.strongly_graded += 1;
        }
        if avoids {
            self.weak_avoiding[h] += 1;
            if strong {
                self.strong_avoiding[h] += 1;
                if !p.contains_2plus2() {
                    self.semiorder_strong[h] += 1;
                }
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.total_posets += other.total_posets;
        self.weakly_graded += other.weakly_graded;
        self.strongly_graded += other.strongly_graded;
        self.criterion_disagreements += other.criterion_disagreements;
        for (a, b) in [
            (&mut self.weak_avoiding, &other.weak_avoiding),
            (&mut self.strong_avoiding, &other.strong_avoiding),
            (&mut self.semiorder_strong, &other.semiorder_strong),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }

    pub fn weak_avoiding_total(&self) -> u64 {
        self.weak_avoiding.iter().sum()
    }

    pub fn strong_avoiding_total(&self) -> u64 {
        self.strong_avoiding.iter().sum()
    }

    pub fn semiorder_total(&self) -> u64 {
        self.semiorder_strong.iter().sum()
    }

    /// Rows for `kind` in the layout of [`CountTable`].
    pub fn rows(&self, kind: CountKind) -> Vec<CountRow> {
        let by_height = |v: &[u64]| -> Vec<CountRow> {
            (0..=self.n)
                .filter(|&k| (k == 0) == (self.n == 0))
                .map(|k| CountRow { n: self.n, k: Some(k), count: BigInt::from(v[k]) })
                .collect()
        };
        let total = |c: u64| vec![CountRow { n: self.n, k: None, count: BigInt::from(c) }];
        match kind {
            CountKind::Strong => total(self.strong_avoiding_total()),
            CountKind::Weak => total(self.weak_avoiding_total()),
            CountKind::Semiorder => total(self.semiorder_total()),
            CountKind::StrongByHeight => by_height(&self.strong_avoiding),
            CountKind::WeakByHeight => by_height(&self.weak_avoiding),
        }
    }
}

/// A count table produced by exhaustion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleTable {
    pub source: &'static str,
    #[serde(flatten)]
    pub table: CountTable,
}

/// Tables of `kind` assembled from reports for consecutive `n`.
pub fn oracle_table(kind: CountKind, reports: &[OracleReport]) -> OracleTable {
    let counts = reports.iter().flat_map(|r| r.rows(kind)).collect();
    OracleTable { source: "oracle", table: CountTable { kind, counts } }
}

pub fn brute_counts(n: usize) -> Result<OracleReport, OracleError> {
    brute_counts_with(n, true)
}

pub fn brute_counts_with(n: usize, parallel: bool) -> Result<OracleReport, OracleError> {
    fold_posets(n, parallel, || OracleReport::empty(n), |acc, p| acc.add(p), OracleReport::merge)
}

/// Number of bipartite graphs on `[m] ⊎ [n]` accepted by `flags`.
pub fn enumerate_bipartite(m: usize, n: usize, flags: QuarkFamilyFlags) -> Result<u64, OracleError> {
    if m * n > MAX_BIPARTITE_EDGES {
        return Err(OracleError::TooManyEdges { m, n });
    }
    if m == 0 || n == 0 {
        return Ok(0);
    }
    let row_full = full_mask(n);
    let mut count = 0u64;
    for g in 0u64..(1u64 << (m * n)) {
        let mut col_or = 0u64;
        let mut col_and = row_full;
        let (mut bottom_all, mut bottom_iso) = (false, false);
        for i in 0..m {
            let row = (g >> (i * n)) & row_full;
            bottom_all |= row == row_full;
            bottom_iso |= row == 0;
            col_or |= row;
            col_and &= row;
        }
        if flags.accepts(bottom_all, col_and != 0, bottom_iso, col_or != row_full) {
            count += 1;
        }
    }
    Ok(count)
}

/// `Σ_{m+n=k} C(k, m) |B(m, n)| / k!` for each `k ≤ bounds.x`, by brute force.
pub fn brute_f_series(b: BType, bounds: Bounds) -> Result<TruncatedSeries, OracleError> {
    let flags = QuarkFamilyFlags::of_type(b);
    let mut s = TruncatedSeries::zero(bounds);
    for total in 2..=bounds.x {
        let mut c = BigRational::zero();
        for m in 1..total {
            let count = enumerate_bipartite(m, total - m, flags)?;
            c += BigRational::new(BigInt::from(count) * binomial(total, m), factorial(total));
        }
        s.set_coeff(total, 0, 0, c).expect("within bounds");
    }
    Ok(s)
}

/// Outcome of [`decomposition_sweep`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub n: usize,
    /// Weakly graded (3+1)-avoiding posets round-tripped.
    pub checked: u64,
    /// Of those, strongly graded ones also round-tripped in strong mode.
    pub strong_checked: u64,
    /// Sum-indecomposable summands decomposed into quarks.
    pub summands_checked: u64,
    /// Vigilant posets containing 3+1 whose decomposition round-trips; each
    /// must carry an illegal word.
    pub pattern_checked: u64,
    pub failures: u64,
}

impl SweepReport {
    fn merge(mut self, o: Self) -> Self {
        self.checked += o.checked;
        self.strong_checked += o.strong_checked;
        self.summands_checked += o.summands_checked;
        self.pattern_checked += o.pattern_checked;
        self.failures += o.failures;
        self
    }
}

fn fail(stage: &'static str, p: &Poset, detail: impl ToString) -> OracleError {
    OracleError::SweepFailure { stage, poset: write_poset(p), detail: detail.to_string() }
}

/// Decomposes each summand in `mode`s chosen by position and rebuilds it.
/// Returns `Ok(None)` when some summand has no quark decomposition, and
/// otherwise whether every word is legal.
fn summands_round_trip(
    p: &Poset,
    parts: &[(TrimmedPoset, Vec<u32>)],
    strong: bool,
    summands: &mut u64,
) -> Result<Option<bool>, OracleError> {
    let mut legal = true;
    for (i, (part, _)) in parts.iter().enumerate() {
        if !is_sum_indecomposable(part) {
            return Err(fail("ordinal decomposition", p, "summand is not sum-indecomposable"));
        }
        if part.height() < 2 {
            if part.labels() != [None] {
                return Err(fail("ordinal decomposition", p, "height-one summand is not a lone placeholder"));
            }
            continue;
        }
        let mode = if strong { LegalityMode::Strong } else { LegalityMode::for_summand(i, parts.len()) };
        let Ok(d) = quark_decompose_in(part, mode) else { return Ok(None) };
        let rebuilt = d.recompose().map_err(|e| fail("quark recomposition", p, e))?;
        if &rebuilt != part {
            return Ok(None);
        }
        *summands += 1;
        legal &= avoids_via_word(part, mode).map_err(|e| fail("word", p, e))?;
    }
    Ok(Some(legal))
}

fn sweep_one(acc: &mut SweepReport, p: &Poset) -> Result<(), OracleError> {
    let Some(r) = RankedPoset::from_poset(p.clone()) else { return Ok(()) };
    let avoids = !p.contains_3plus1();
    if !r.is_vigilant() {
        if avoids {
            return Err(fail("vigilance", p, "avoiding poset is not vigilant"));
        }
        return Ok(());
    }
    let t = trim(&r).map_err(|e| fail("trim", p, e))?;
    if !t.is_trimmed() {
        return Err(fail("trim", p, "result is not trimmed"));
    }
    if t.poset().contains_3plus1() == avoids {
        return Err(fail("trim", p, "trimming changed avoidance"));
    }
    let parts = decompose_ordinal_with_labels(&t);
    let rebuilt = parts.iter().fold(TrimmedPoset::empty(), |acc, (s, _)| ordinal_sum(&acc, s));
    let map: Vec<u32> = parts.iter().flat_map(|(_, m)| m.iter().copied()).collect();
    let rebuilt = rebuilt.relabeled(&map).map_err(|e| fail("ordinal recomposition", p, e))?;
    if rebuilt != t {
        return Err(fail("ordinal recomposition", p, "rebuilt poset differs"));
    }
    let mut summands = 0;
    let outcome = summands_round_trip(p, &parts, false, &mut summands)?;
    if avoids {
        match outcome {
            None => return Err(fail("quark decomposition", p, "summand does not round-trip")),
            Some(false) => return Err(fail("word", p, "avoiding poset has an illegal word")),
            Some(true) => {}
        }
        acc.checked += 1;
        acc.summands_checked += summands;
        if r.is_strongly_graded() {
            match summands_round_trip(p, &parts, true, &mut 0)? {
                Some(true) => acc.strong_checked += 1,
                None => return Err(fail("strong quark decomposition", p, "summand does not round-trip")),
                Some(false) => return Err(fail("strong word", p, "avoiding poset has an illegal word")),
            }
        }
    } else if let Some(legal) = outcome {
        if legal {
            return Err(fail("word", p, "poset containing 3+1 has only legal words"));
        }
        acc.pattern_checked += 1;
    }
    Ok(())
}

/// Round-trips every weakly graded (3+1)-avoiding poset on `[n]` through
/// trimming, ordinal decomposition and quark decomposition, and checks that
/// word legality agrees with pattern search. Stops at the first failure.
pub fn decomposition_sweep(n: usize) -> Result<SweepReport, OracleError> {
    check_n(n, 6)?;
    let report = fold_posets(
        n,
        true,
        || Ok(SweepReport { n, ..SweepReport::default() }),
        |acc: &mut Result<SweepReport, OracleError>, p| {
            if let Ok(a) = acc {
                if let Err(e) = sweep_one(a, p) {
                    *acc = Err(e);
                }
            }
        },
        |a, b| Ok(a?.merge(b?)),
    )??;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::Constraint;
    use std::collections::HashSet;

    #[test]
    fn small_poset_counts() {
        let counts: Vec<u64> = (0..=5).map(|n| enumerate_posets(n, |_| {}).unwrap()).collect();
        assert_eq!(counts, vec![1, 1, 3, 19, 219, 4231]);
        assert!(enumerate_posets(8, |_| {}).is_err());
    }

    #[test]
    fn enumeration_has_no_duplicates_and_valid_orders() {
        let mut seen = HashSet::new();
        enumerate_posets(4, |p| {
            assert!(crate::poset::validate(&p.to_matrix()));
            assert!(seen.insert(p.to_matrix()));
        })
        .unwrap();
        assert_eq!(seen.len(), 219);
        // Filtering all relation matrices on four points gives the same set.
        let mut filtered = HashSet::new();
        for mask in 0u32..(1 << 16) {
            let m: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| mask >> (4 * i + j) & 1 == 1).collect()).collect();
            if crate::poset::validate(&m) {
                filtered.insert(m);
            }
        }
        assert_eq!(filtered, seen);
    }

    #[test]
    fn parallel_fold_matches_serial() {
        assert_eq!(brute_counts_with(5, true).unwrap(), brute_counts_with(5, false).unwrap());
    }

    #[test]
    fn reports() {
        let r = brute_counts(4).unwrap();
        assert_eq!(r.weak_avoiding_total(), 195);
        assert_eq!(r.strong_avoiding_total(), 111);
        assert_eq!(r.strong_avoiding, vec![0, 1, 50, 36, 24]);
        assert_eq!(r.criterion_disagreements, 0);
        let empty = brute_counts(0).unwrap();
        assert_eq!(empty.weak_avoiding, vec![1]);
        let json = serde_json::to_value(oracle_table(CountKind::Strong, &[empty, r])).unwrap();
        assert_eq!(json["source"], "oracle");
        assert_eq!(json["kind"], "strong");
        assert_eq!(json["counts"][1]["count"], "111");
    }

    #[test]
    fn bipartite_examples() {
        assert_eq!(enumerate_bipartite(2, 2, QuarkFamilyFlags::ALL).unwrap(), 16);
        assert_eq!(enumerate_bipartite(2, 2, QuarkFamilyFlags::MIDDLE).unwrap(), 7);
        assert_eq!(enumerate_bipartite(1, 1, QuarkFamilyFlags::of_type(BType::OO)).unwrap(), 1);
        let top_full = QuarkFamilyFlags { top_all_seeing: Constraint::Required, ..QuarkFamilyFlags::ALL };
        // Some column full in a 1×2 graph: three of four graphs.
        assert_eq!(enumerate_bipartite(1, 2, top_full).unwrap(), 3);
        assert!(enumerate_bipartite(5, 5, QuarkFamilyFlags::ALL).is_err());
    }

    #[test]
    fn small_sweeps() {
        for (n, expected) in [(0, 1), (1, 1), (2, 3), (3, 19), (4, 195)] {
            let s = decomposition_sweep(n).unwrap();
            assert_eq!((s.checked, s.failures), (expected, 0), "n = {n}");
        }
    }
}
