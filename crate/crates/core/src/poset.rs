//! Finite labeled posets, rank functions and the local (3+1) criteria.
//!
//! Elements are stored 0-based; the exchange format and all user-facing
//! output use labels `1..=n`. Relations are kept as one bitmask row per
//! element, which caps a single poset at [`MAX_ELEMENTS`] elements.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Largest element count representable by the bitmask rows.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset has {0} elements, at most {MAX_ELEMENTS} are supported")]
    TooLarge(usize),
    #[error("relation matrix is not square ({rows} rows, row {row} has {len} entries)")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("element {0} is out of range")]
    OutOfRange(usize),
    #[error("relation is not a strict partial order: {0}")]
    NotAnOrder(&'static str),
    #[error("rank assignment has {got} entries for {expected} elements")]
    RankLength { expected: usize, got: usize },
    #[error("cover {lower} < {upper} does not raise the rank by one")]
    RankStep { lower: usize, upper: usize },
}

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// Pure predicate on an explicit relation matrix: `matrix[a][b]` means `a < b`.
///
/// True iff the matrix is square and the relation is irreflexive,
/// antisymmetric and transitive.
pub fn validate(matrix: &[Vec<bool>]) -> bool {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return false;
    }
    for a in 0..n {
        if matrix[a][a] {
            return false;
        }
        for b in 0..n {
            if !matrix[a][b] {
                continue;
            }
            if matrix[b][a] {
                return false;
            }
            for c in 0..n {
                if matrix[b][c] && !matrix[a][c] {
                    return false;
                }
            }
        }
    }
    true
}

/// A strict partial order on `n` elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    // up[a] has bit b set iff a < b
    up: Vec<u64>,
    // down[b] has bit a set iff a < b
    down: Vec<u64>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<(usize, usize)> = self.relations().map(|(a, b)| (a + 1, b + 1)).collect();
        f.debug_struct("Poset").field("n", &self.n).field("lt", &pairs).finish()
    }
}

impl Poset {
    pub fn empty() -> Self {
        Poset::antichain(0)
    }

    pub fn antichain(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS);
        Poset { n, up: vec![0; n], down: vec![0; n] }
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS);
        let up = (0..n).map(|a| full_mask(n) & !full_mask(a + 1)).collect();
        let down = (0..n).map(full_mask).collect();
        Poset { n, up, down }
    }

    /// Builds a poset from 0-based pairs `(a, b)` meaning `a < b`, taking the
    /// transitive closure first.
    pub fn from_relations(n: usize, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooLarge(n));
        }
        let mut up = vec![0u64; n];
        for &(a, b) in pairs {
            if a >= n {
                return Err(PosetError::OutOfRange(a));
            }
            if b >= n {
                return Err(PosetError::OutOfRange(b));
            }
            up[a] |= bit(b);
        }
        Self::from_closed_rows(n, transitive_closure(up))
    }

    /// Builds a poset from an explicit relation matrix without closing it.
    pub fn from_matrix(matrix: &[Vec<bool>]) -> Result<Self, PosetError> {
        let n = matrix.len();
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooLarge(n));
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(PosetError::NotSquare { rows: n, row, len: r.len() });
            }
        }
        let up = matrix
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &x)| x).fold(0u64, |m, (b, _)| m | bit(b)))
            .collect();
        Self::from_closed_rows(n, up)
    }

    /// Rows must already be transitively closed; they are validated here.
    pub(crate) fn from_closed_rows(n: usize, up: Vec<u64>) -> Result<Self, PosetError> {
        debug_assert_eq!(up.len(), n);
        let mut down = vec![0u64; n];
        for a in 0..n {
            if up[a] & bit(a) != 0 {
                return Err(PosetError::NotAnOrder("reflexive pair"));
            }
            if up[a] & !full_mask(n) != 0 {
                return Err(PosetError::OutOfRange(a));
            }
            for b in bits(up[a]) {
                down[b] |= bit(a);
            }
        }
        for a in 0..n {
            if up[a] & down[a] != 0 {
                return Err(PosetError::NotAnOrder("antisymmetry violated"));
            }
            for b in bits(up[a]) {
                if up[b] & !up[a] != 0 {
                    return Err(PosetError::NotAnOrder("transitivity violated"));
                }
            }
        }
        Ok(Poset { n, up, down })
    }

    pub(crate) fn from_rows_unchecked(n: usize, up: Vec<u64>, down: Vec<u64>) -> Self {
        debug_assert!(Self::from_closed_rows(n, up.clone()).is_ok());
        Poset { n, up, down }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.up[a] & bit(b) != 0
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        a == b || self.lt(a, b) || self.lt(b, a)
    }

    /// Elements strictly above `a`.
    pub fn up_mask(&self, a: usize) -> u64 {
        self.up[a]
    }

    /// Elements strictly below `a`.
    pub fn down_mask(&self, a: usize) -> u64 {
        self.down[a]
    }

    /// Elements comparable to `a`, including `a` itself.
    pub fn comparable_mask(&self, a: usize) -> u64 {
        self.up[a] | self.down[a] | bit(a)
    }

    pub fn relations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| bits(self.up[a]).map(move |b| (a, b)))
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.lt(a, b)).collect()).collect()
    }

    pub fn minimal_mask(&self) -> u64 {
        (0..self.n).filter(|&a| self.down[a] == 0).fold(0, |m, a| m | bit(a))
    }

    pub fn maximal_mask(&self) -> u64 {
        (0..self.n).filter(|&a| self.up[a] == 0).fold(0, |m, a| m | bit(a))
    }

    /// Cover rows: bit `b` of entry `a` is set iff `a` is covered by `b`.
    pub fn cover_rows(&self) -> Vec<u64> {
        (0..self.n)
            .map(|a| {
                let above = self.up[a];
                // b covers a iff nothing strictly between them
                bits(above).filter(|&b| above & self.down[b] == 0).fold(0, |m, b| m | bit(b))
            })
            .collect()
    }

    /// Cover relation as an `n x n` boolean matrix.
    pub fn covers(&self) -> Vec<Vec<bool>> {
        let rows = self.cover_rows();
        (0..self.n).map(|a| (0..self.n).map(|b| rows[a] & bit(b) != 0).collect()).collect()
    }

    /// Number of elements in a longest chain.
    pub fn longest_chain(&self) -> usize {
        if self.n == 0 {
            return 0;
        }
        // Longest chain ending at each element, processed by increasing down-set size.
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&a| self.down[a].count_ones());
        let mut len = vec![1usize; self.n];
        for &b in &order {
            for a in bits(self.down[b]) {
                len[b] = len[b].max(len[a] + 1);
            }
        }
        len.into_iter().max().unwrap_or(0)
    }

    /// Search for `x < y < z` and `w` incomparable to all three.
    pub fn contains_3plus1(&self) -> bool {
        self.find_3plus1().is_some()
    }

    /// Returns a witness `(x, y, z, w)` of a copy of 3+1, if any.
    pub fn find_3plus1(&self) -> Option<(usize, usize, usize, usize)> {
        if self.n < 4 {
            return None;
        }
        let all = full_mask(self.n);
        for y in 0..self.n {
            for x in bits(self.down[y]) {
                for z in bits(self.up[y]) {
                    let seen = self.comparable_mask(x) | self.comparable_mask(y) | self.comparable_mask(z);
                    let free = all & !seen;
                    if free != 0 {
                        return Some((x, y, z, free.trailing_zeros() as usize));
                    }
                }
            }
        }
        None
    }

    /// Two disjoint 2-chains with no comparabilities between them.
    pub fn contains_2plus2(&self) -> bool {
        for a in 0..self.n {
            for b in bits(self.up[a]) {
                let seen = self.comparable_mask(a) | self.comparable_mask(b);
                for c in 0..self.n {
                    if seen & bit(c) != 0 {
                        continue;
                    }
                    if self.up[c] & !seen != 0 {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Connected components of the comparability graph, as element masks.
    pub fn components(&self) -> Vec<u64> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen & bit(start) != 0 {
                continue;
            }
            let mut comp = bit(start);
            let mut frontier = bit(start);
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.up[v] | self.down[v];
                }
                frontier = next & !comp;
                comp |= next;
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    /// The unique rank function, or `None` when the poset is not weakly graded.
    pub fn rank_function(&self) -> Option<RankedPoset> {
        RankedPoset::from_poset(self.clone())
    }

    /// Sub-poset induced by `elements`, in the given order.
    pub fn induced(&self, elements: &[usize]) -> Poset {
        let k = elements.len();
        let mut up = vec![0u64; k];
        let mut down = vec![0u64; k];
        for (i, &a) in elements.iter().enumerate() {
            for (j, &b) in elements.iter().enumerate() {
                if self.lt(a, b) {
                    up[i] |= bit(j);
                    down[j] |= bit(i);
                }
            }
        }
        Poset::from_rows_unchecked(k, up, down)
    }
}

pub(crate) fn transitive_closure(mut up: Vec<u64>) -> Vec<u64> {
    let n = up.len();
    // Warshall over bit rows.
    for k in 0..n {
        let row_k = up[k];
        for row in up.iter_mut() {
            if *row & bit(k) != 0 {
                *row |= row_k;
            }
        }
    }
    up
}

/// Seeing class of a vertex in a ranked poset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum SeeingClass {
    UpSeeing,
    DownSeeing,
    AllSeeing,
    NoneSeeing,
}

impl SeeingClass {
    pub fn from_flags(up: bool, down: bool) -> Self {
        match (up, down) {
            (true, true) => SeeingClass::AllSeeing,
            (true, false) => SeeingClass::UpSeeing,
            (false, true) => SeeingClass::DownSeeing,
            (false, false) => SeeingClass::NoneSeeing,
        }
    }

    pub fn is_up(self) -> bool {
        matches!(self, SeeingClass::UpSeeing | SeeingClass::AllSeeing)
    }

    pub fn is_down(self) -> bool {
        matches!(self, SeeingClass::DownSeeing | SeeingClass::AllSeeing)
    }
}

impl fmt::Display for SeeingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SeeingClass::UpSeeing => "up-seeing",
            SeeingClass::DownSeeing => "down-seeing",
            SeeingClass::AllSeeing => "all-seeing",
            SeeingClass::NoneSeeing => "none-seeing",
        };
        f.write_str(s)
    }
}

/// A poset together with a rank assignment in which every cover raises the
/// rank by exactly one.
///
/// Values produced by [`RankedPoset::from_poset`] also have rank 0 as the
/// minimum of every comparability component. Summands cut out of a larger
/// poset keep the ranks they had there, so that second condition is checked
/// separately by [`RankedPoset::has_component_minimum_zero`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankedPoset {
    poset: Poset,
    rank: Vec<usize>,
    cover_up: Vec<u64>,
    cover_down: Vec<u64>,
}

impl RankedPoset {
    /// Solves the cover constraints component by component.
    pub fn from_poset(poset: Poset) -> Option<Self> {
        let n = poset.len();
        let cover_up = poset.cover_rows();
        let mut cover_down = vec![0u64; n];
        for a in 0..n {
            for b in bits(cover_up[a]) {
                cover_down[b] |= bit(a);
            }
        }
        let mut rank: Vec<i64> = vec![0; n];
        let mut assigned = 0u64;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if assigned & bit(start) != 0 {
                continue;
            }
            assigned |= bit(start);
            rank[start] = 0;
            let mut comp = vec![start];
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                let rv = rank[v];
                let steps = bits(cover_up[v]).map(|w| (w, rv + 1)).chain(bits(cover_down[v]).map(|w| (w, rv - 1)));
                for (w, r) in steps {
                    if assigned & bit(w) != 0 {
                        if rank[w] != r {
                            return None;
                        }
                    } else {
                        assigned |= bit(w);
                        rank[w] = r;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            let lowest = comp.iter().map(|&v| rank[v]).min().unwrap_or(0);
            for &v in &comp {
                rank[v] -= lowest;
            }
        }
        let rank = rank.into_iter().map(|r| r as usize).collect();
        Some(RankedPoset { poset, rank, cover_up, cover_down })
    }

    /// Attaches an explicit rank assignment; only the cover-step condition is
    /// enforced.
    pub fn with_ranks(poset: Poset, rank: Vec<usize>) -> Result<Self, PosetError> {
        let n = poset.len();
        if rank.len() != n {
            return Err(PosetError::RankLength { expected: n, got: rank.len() });
        }
        let cover_up = poset.cover_rows();
        let mut cover_down = vec![0u64; n];
        for a in 0..n {
            for b in bits(cover_up[a]) {
                if rank[b] != rank[a] + 1 {
                    return Err(PosetError::RankStep { lower: a, upper: b });
                }
                cover_down[b] |= bit(a);
            }
        }
        Ok(RankedPoset { poset, rank, cover_up, cover_down })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn into_poset(self) -> Poset {
        self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn max_rank(&self) -> Option<usize> {
        self.rank.iter().copied().max()
    }

    /// `P(r)` as an element mask.
    pub fn rank_set(&self, r: usize) -> u64 {
        self.rank.iter().enumerate().filter(|(_, &x)| x == r).fold(0, |m, (v, _)| m | bit(v))
    }

    pub fn rank_sets(&self) -> Vec<u64> {
        let mut sets = vec![0u64; self.height()];
        for (v, &r) in self.rank.iter().enumerate() {
            sets[r] |= bit(v);
        }
        sets
    }

    pub fn covered_by(&self, v: usize) -> u64 {
        self.cover_up[v]
    }

    pub fn covering(&self, v: usize) -> u64 {
        self.cover_down[v]
    }

    /// Both defining conditions of a rank function, re-checked from scratch.
    pub fn is_valid_rank_function(&self) -> bool {
        let steps_ok = (0..self.len()).all(|a| bits(self.cover_up[a]).all(|b| self.rank[b] == self.rank[a] + 1));
        steps_ok && self.has_component_minimum_zero()
    }

    pub fn has_component_minimum_zero(&self) -> bool {
        self.poset.components().into_iter().all(|c| bits(c).map(|v| self.rank[v]).min() == Some(0))
    }

    /// `1 + max rank`, or 0 for the empty poset.
    pub fn height(&self) -> usize {
        self.max_rank().map_or(0, |r| r + 1)
    }

    pub fn is_strongly_graded(&self) -> bool {
        let same_rank = |mask: u64| {
            let mut it = bits(mask).map(|v| self.rank[v]);
            match it.next() {
                None => true,
                Some(r) => it.all(|x| x == r),
            }
        };
        same_rank(self.poset.minimal_mask()) && same_rank(self.poset.maximal_mask())
    }

    /// Every vertex one rank up covers `v` (vacuous at the top rank).
    pub fn is_up_seeing(&self, v: usize) -> bool {
        let above = self.rank_set(self.rank[v] + 1);
        above & !self.cover_up[v] == 0
    }

    /// `v` covers every vertex one rank down (vacuous at rank 0).
    pub fn is_down_seeing(&self, v: usize) -> bool {
        match self.rank[v] {
            0 => true,
            r => self.rank_set(r - 1) & !self.cover_down[v] == 0,
        }
    }

    pub fn seeing_class(&self, v: usize) -> SeeingClass {
        SeeingClass::from_flags(self.is_up_seeing(v), self.is_down_seeing(v))
    }

    pub fn is_all_seeing(&self, v: usize) -> bool {
        self.is_up_seeing(v) && self.is_down_seeing(v)
    }

    pub fn is_vigilant(&self) -> bool {
        (0..self.len()).all(|v| self.seeing_class(v) != SeeingClass::NoneSeeing)
    }

    /// Every pair whose ranks differ by at least `min_gap` is comparable.
    pub fn distant_pairs_comparable(&self, min_gap: usize, exact: bool) -> bool {
        let n = self.len();
        (0..n).all(|v| {
            (0..n).all(|w| {
                let gap_ok = if exact {
                    self.rank[w] == self.rank[v] + min_gap
                } else {
                    self.rank[w] >= self.rank[v] + min_gap
                };
                !gap_ok || self.poset.lt(v, w)
            })
        })
    }

    /// Vigilant, and every pair at rank distance exactly 2 is comparable.
    pub fn local_avoidance_check(&self) -> bool {
        self.is_vigilant() && self.distant_pairs_comparable(2, true)
    }

    /// Vigilant, and every pair at rank distance at least 2 is comparable.
    pub fn distant_avoidance_check(&self) -> bool {
        self.is_vigilant() && self.distant_pairs_comparable(2, false)
    }
}
