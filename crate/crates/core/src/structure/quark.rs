use std::fmt;

use serde::Serialize;

use super::word::LegalityMode;
use super::{StructureError, TrimmedPoset};
use crate::poset::{bit, bits, full_mask, transitive_closure, Poset, RankedPoset};

/// Two-level bipartite graph: `m` bottom vertices, `n` top vertices, and
/// `rows[i]` the set of top vertices adjacent to bottom vertex `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quark {
    m: usize,
    n: usize,
    rows: Vec<u64>,
}

impl fmt::Debug for Quark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quark {}x{} [", self.m, self.n)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            for j in 0..self.n {
                f.write_str(if r & bit(j) != 0 { "1" } else { "0" })?;
            }
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QuarkRole {
    Bottom,
    Middle,
    Top,
}

impl fmt::Display for QuarkRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuarkRole::Bottom => "bottom",
            QuarkRole::Middle => "middle",
            QuarkRole::Top => "top",
        })
    }
}

/// Isolated-vertex profile of a middle quark. The first symbol describes the
/// top side, the second the bottom side; `O` means some vertex on that side
/// is isolated, `X` means none is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BType {
    OO,
    OX,
    XO,
    XX,
}

impl BType {
    pub const ALL: [BType; 4] = [BType::OO, BType::OX, BType::XO, BType::XX];

    pub fn new(top_isolated: bool, bottom_isolated: bool) -> Self {
        match (top_isolated, bottom_isolated) {
            (true, true) => BType::OO,
            (true, false) => BType::OX,
            (false, true) => BType::XO,
            (false, false) => BType::XX,
        }
    }

    pub fn top_isolated(self) -> bool {
        matches!(self, BType::OO | BType::OX)
    }

    pub fn bottom_isolated(self) -> bool {
        matches!(self, BType::OO | BType::XO)
    }

    /// Position in the transfer matrix.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |iso: bool| if iso { "o" } else { "x" };
        write!(f, "B^{}_{}", sym(self.top_isolated()), sym(self.bottom_isolated()))
    }
}

/// How two consecutive quarks meet: stuck directly, or glued through an
/// extra all-seeing vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Join {
    S,
    G,
}

impl fmt::Display for Join {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Join::S => "S",
            Join::G => "G",
        })
    }
}

impl Quark {
    pub fn new(m: usize, n: usize, adj: &[Vec<bool>]) -> Result<Self, StructureError> {
        if adj.len() != m || adj.iter().any(|r| r.len() != n) {
            return Err(StructureError::QuarkShape { m, n, got: adj.len() });
        }
        let rows = adj.iter().map(|r| r.iter().enumerate().filter(|(_, &e)| e).fold(0u64, |acc, (j, _)| acc | bit(j))).collect();
        Self::from_rows(m, n, rows)
    }

    pub fn from_rows(m: usize, n: usize, rows: Vec<u64>) -> Result<Self, StructureError> {
        if m == 0 || n == 0 {
            return Err(StructureError::EmptySide { m, n });
        }
        if rows.len() != m || n > 64 || rows.iter().any(|r| r & !full_mask(n) != 0) {
            return Err(StructureError::QuarkShape { m, n, got: rows.len() });
        }
        let q = Quark { m, n, rows };
        if q.bottom_all_seeing_mask() != 0 && q.top_all_seeing_mask() != 0 {
            return Err(StructureError::AllSeeingBothSides);
        }
        Ok(q)
    }

    pub fn bottom_len(&self) -> usize {
        self.m
    }

    pub fn top_len(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i] & bit(j) != 0
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.m).map(|i| (0..self.n).map(|j| self.has_edge(i, j)).collect()).collect()
    }

    fn column(&self, j: usize) -> u64 {
        (0..self.m).filter(|&i| self.has_edge(i, j)).fold(0, |acc, i| acc | bit(i))
    }

    pub fn bottom_all_seeing_mask(&self) -> u64 {
        let full = full_mask(self.n);
        (0..self.m).filter(|&i| self.rows[i] == full).fold(0, |acc, i| acc | bit(i))
    }

    pub fn top_all_seeing_mask(&self) -> u64 {
        let full = full_mask(self.m);
        (0..self.n).filter(|&j| self.column(j) == full).fold(0, |acc, j| acc | bit(j))
    }

    pub fn bottom_isolated_mask(&self) -> u64 {
        (0..self.m).filter(|&i| self.rows[i] == 0).fold(0, |acc, i| acc | bit(i))
    }

    pub fn top_isolated_mask(&self) -> u64 {
        (0..self.n).filter(|&j| self.column(j) == 0).fold(0, |acc, j| acc | bit(j))
    }

    pub fn is_middle(&self) -> bool {
        self.bottom_all_seeing_mask() == 0 && self.top_all_seeing_mask() == 0
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom_all_seeing_mask().count_ones() <= 1 && self.top_all_seeing_mask() == 0 && self.top_isolated_mask() == 0
    }

    pub fn is_top(&self) -> bool {
        self.top_all_seeing_mask().count_ones() <= 1 && self.bottom_all_seeing_mask() == 0 && self.bottom_isolated_mask() == 0
    }

    pub fn has_role(&self, role: QuarkRole) -> bool {
        match role {
            QuarkRole::Bottom => self.is_bottom(),
            QuarkRole::Middle => self.is_middle(),
            QuarkRole::Top => self.is_top(),
        }
    }

    pub fn roles(&self) -> Vec<QuarkRole> {
        [QuarkRole::Bottom, QuarkRole::Middle, QuarkRole::Top].into_iter().filter(|&r| self.has_role(r)).collect()
    }

    /// Removes the all-seeing vertices (they sit on one side at most).
    pub fn stripped(&self) -> Result<Quark, StructureError> {
        let bottom_drop = self.bottom_all_seeing_mask();
        let top_drop = self.top_all_seeing_mask();
        let keep_b: Vec<usize> = (0..self.m).filter(|&i| bottom_drop & bit(i) == 0).collect();
        let keep_t: Vec<usize> = (0..self.n).filter(|&j| top_drop & bit(j) == 0).collect();
        if keep_b.is_empty() || keep_t.is_empty() {
            return Err(StructureError::EmptySide { m: keep_b.len(), n: keep_t.len() });
        }
        let rows = keep_b
            .iter()
            .map(|&i| keep_t.iter().enumerate().filter(|(_, &j)| self.has_edge(i, j)).fold(0u64, |acc, (k, _)| acc | bit(k)))
            .collect();
        Quark::from_rows(keep_b.len(), keep_t.len(), rows)
    }

    /// Type of the quark left after stripping all-seeing vertices.
    pub fn quark_type(&self) -> Result<BType, StructureError> {
        let q = self.stripped()?;
        Ok(BType::new(q.top_isolated_mask() != 0, q.bottom_isolated_mask() != 0))
    }
}

/// Output of [`quark_decompose`]: the quarks, the joins `α_1..α_k`
/// between them, the boundary joins `α_0` and `α_{k+1}`, and the label each
/// quark vertex had in the decomposed poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarkDecomposition {
    pub quarks: Vec<Quark>,
    pub joins: Vec<Join>,
    pub boundary: (Join, Join),
    pub labels: Vec<(Vec<Option<u32>>, Vec<Option<u32>>)>,
}

impl QuarkDecomposition {
    /// Rebuilds the poset with the recorded labels.
    pub fn recompose(&self) -> Result<TrimmedPoset, StructureError> {
        let labels = &self.labels;
        if self.quarks.len() == 1 {
            let q = &self.quarks[0];
            return assemble(
                &self.quarks,
                &[self.boundary.0, self.boundary.1],
                |qi, side, v| if side == 0 { labels[qi].0[v] } else { labels[qi].1[v] },
                q.m + q.n,
            );
        }
        let mut alphas = vec![Join::S];
        alphas.extend_from_slice(&self.joins);
        alphas.push(Join::S);
        let total = self.quarks.iter().map(|q| q.m + q.n).sum();
        assemble(&self.quarks, &alphas, |qi, side, v| if side == 0 { labels[qi].0[v] } else { labels[qi].1[v] }, total)
    }
}

/// Builds the layered poset. `alphas` has one entry per rank; a `G` adds an
/// extra unlabeled all-seeing vertex on that rank.
fn assemble(
    quarks: &[Quark],
    alphas: &[Join],
    label: impl Fn(usize, usize, usize) -> Option<u32>,
    labeled_hint: usize,
) -> Result<TrimmedPoset, StructureError> {
    let k = quarks.len() - 1;
    debug_assert_eq!(alphas.len(), k + 2);
    let mut ranks = Vec::with_capacity(labeled_hint + alphas.len());
    let mut labels = Vec::with_capacity(ranks.capacity());
    // Vertex masks for each quark side, and for each rank.
    let mut sides = vec![[0u64; 2]; k + 1];
    let mut rank_sets = vec![0u64; k + 2];
    let mut push = |rank: usize, l: Option<u32>, ranks: &mut Vec<usize>, labels: &mut Vec<Option<u32>>| {
        let v = ranks.len();
        ranks.push(rank);
        labels.push(l);
        rank_sets[rank] |= bit(v);
        v
    };
    let mut index = vec![(Vec::new(), Vec::new()); k + 1];
    for (i, q) in quarks.iter().enumerate() {
        for b in 0..q.m {
            let v = push(i, label(i, 0, b), &mut ranks, &mut labels);
            sides[i][0] |= bit(v);
            index[i].0.push(v);
        }
        for t in 0..q.n {
            let v = push(i + 1, label(i, 1, t), &mut ranks, &mut labels);
            sides[i][1] |= bit(v);
            index[i].1.push(v);
        }
    }
    let mut glued = Vec::new();
    for (r, a) in alphas.iter().enumerate() {
        if *a == Join::G {
            glued.push(push(r, None, &mut ranks, &mut labels));
        }
    }
    let total = ranks.len();
    if total > crate::poset::MAX_ELEMENTS {
        return Err(crate::poset::PosetError::TooLarge(total).into());
    }
    let mut up = vec![0u64; total];
    for (i, q) in quarks.iter().enumerate() {
        for b in 0..q.m {
            let v = index[i].0[b];
            for t in bits(q.rows[b]) {
                up[v] |= bit(index[i].1[t]);
            }
        }
    }
    for i in 0..k {
        for j in 0..2 {
            for v in bits(sides[i][j]) {
                up[v] |= sides[i + 1][j];
            }
        }
        if i + 2 <= k {
            for v in bits(sides[i][1]) {
                up[v] |= sides[i + 2][0];
            }
        }
    }
    for &g in &glued {
        let r = ranks[g];
        if r + 1 < rank_sets.len() {
            up[g] |= rank_sets[r + 1];
        }
        if r > 0 {
            for v in bits(rank_sets[r - 1]) {
                up[v] |= bit(g);
            }
        }
    }
    let poset = Poset::from_closed_rows(total, transitive_closure(up))?;
    let ranked = RankedPoset::with_ranks(poset, ranks)?;
    TrimmedPoset::new(ranked, labels)
}

fn check_roles(mode: LegalityMode, q0: &Quark, qs: &[Quark]) -> Result<(), StructureError> {
    let k = qs.len();
    let all = std::iter::once(q0).chain(qs.iter());
    for (i, q) in all.enumerate() {
        let ok = if i == 0 {
            q.is_bottom() || (mode.relaxes_bottom() && q.is_middle())
        } else if i == k {
            q.is_top() || (mode.relaxes_top() && q.is_middle())
        } else {
            q.is_middle()
        };
        if !ok {
            let role = match i {
                0 => QuarkRole::Bottom,
                _ if i == k => QuarkRole::Top,
                _ => QuarkRole::Middle,
            };
            return Err(StructureError::RoleViolation { index: i, role });
        }
    }
    Ok(())
}

/// Sticks and glues a bottom quark, middle quarks and a top quark.
///
/// Labels run through `Q_0(0), Q_0(1), Q_1(0), …`; the all-seeing vertices
/// of the outer ranks stay unlabeled.
pub fn compose_quarks(q0: &Quark, joins: &[Join], qs: &[Quark]) -> Result<TrimmedPoset, StructureError> {
    compose_quarks_in(LegalityMode::Strong, q0, joins, qs)
}

/// [`compose_quarks`] where the weak modes let the outer quarks be middle
/// quarks.
pub fn compose_quarks_in(mode: LegalityMode, q0: &Quark, joins: &[Join], qs: &[Quark]) -> Result<TrimmedPoset, StructureError> {
    if qs.is_empty() {
        return Err(StructureError::HeightTooSmall(2));
    }
    if joins.len() != qs.len() {
        return Err(StructureError::JoinCount { expected: qs.len(), got: joins.len() });
    }
    check_roles(mode, q0, qs)?;
    let quarks: Vec<Quark> = std::iter::once(q0.clone()).chain(qs.iter().cloned()).collect();
    let k = qs.len();
    let mut alphas = vec![Join::S];
    alphas.extend_from_slice(joins);
    alphas.push(Join::S);
    let unlabeled_bottom = quarks[0].bottom_all_seeing_mask();
    let unlabeled_top = quarks[k].top_all_seeing_mask();
    let mut offsets = Vec::with_capacity(k + 1);
    let mut next = 0u32;
    for (i, q) in quarks.iter().enumerate() {
        let b = if i == 0 { q.m as u32 - unlabeled_bottom.count_ones() } else { q.m as u32 };
        let t = if i == k { q.n as u32 - unlabeled_top.count_ones() } else { q.n as u32 };
        offsets.push((next, next + b));
        next += b + t;
    }
    let label = |qi: usize, side: usize, v: usize| -> Option<u32> {
        let (skip, base) = match (qi, side) {
            (0, 0) => (unlabeled_bottom, offsets[0].0),
            (i, 1) if i == k => (unlabeled_top, offsets[i].1),
            (i, 0) => (0, offsets[i].0),
            (i, _) => (0, offsets[i].1),
        };
        if skip & bit(v) != 0 {
            None
        } else {
            Some(base + 1 + v as u32 - (skip & full_mask(v)).count_ones())
        }
    };
    let total = quarks.iter().map(|q| q.m + q.n).sum();
    assemble(&quarks, &alphas, label, total)
}

/// A height-two poset: a middle quark plus optional placeholders on each
/// rank.
pub fn height_two(q: &Quark, bottom_all_seeing: bool, top_all_seeing: bool) -> Result<TrimmedPoset, StructureError> {
    if !q.is_middle() {
        return Err(StructureError::RoleViolation { index: 0, role: QuarkRole::Middle });
    }
    let alpha = |g: bool| if g { Join::G } else { Join::S };
    let m = q.m as u32;
    assemble(
        std::slice::from_ref(q),
        &[alpha(bottom_all_seeing), alpha(top_all_seeing)],
        |_, side, v| Some(if side == 0 { v as u32 + 1 } else { m + v as u32 + 1 }),
        q.m + q.n,
    )
}

/// Splits a sum-indecomposable poset of height at least 3 into quarks.
pub fn quark_decompose(t: &TrimmedPoset) -> Result<QuarkDecomposition, StructureError> {
    quark_decompose_in(t, LegalityMode::Strong)
}

/// Decomposes heights of at least 2; height two yields one middle quark and
/// boundary joins recording the placeholders. Roles are checked for `mode`
/// when the height is at least 3.
pub fn quark_decompose_in(t: &TrimmedPoset, mode: LegalityMode) -> Result<QuarkDecomposition, StructureError> {
    let h = t.height();
    let r = t.ranked();
    if h < 2 {
        return Err(StructureError::HeightTooSmall(h));
    }
    if !super::is_sum_indecomposable(t) {
        return Err(StructureError::NotSumIndecomposable);
    }
    let sets = r.rank_sets();
    let placeholder = |rank: usize| bits(sets[rank]).find(|&v| t.labels()[v].is_none());
    let join = |rank: usize| if placeholder(rank).is_some() { Join::G } else { Join::S };
    let boundary = (join(0), join(h - 1));
    let side_quark = |bottom: Vec<usize>, top: Vec<usize>| -> Result<(Quark, (Vec<Option<u32>>, Vec<Option<u32>>)), StructureError> {
        let rows = bottom
            .iter()
            .map(|&b| top.iter().enumerate().filter(|(_, &w)| t.poset().lt(b, w)).fold(0u64, |acc, (j, _)| acc | bit(j)))
            .collect();
        let q = Quark::from_rows(bottom.len(), top.len(), rows)?;
        let labels = (bottom.iter().map(|&v| t.labels()[v]).collect(), top.iter().map(|&v| t.labels()[v]).collect());
        Ok((q, labels))
    };
    if h == 2 {
        let bottom: Vec<usize> = bits(sets[0]).filter(|&v| t.labels()[v].is_some()).collect();
        let top: Vec<usize> = bits(sets[1]).filter(|&v| t.labels()[v].is_some()).collect();
        let (q, labels) = side_quark(bottom, top)?;
        if !q.is_middle() {
            return Err(StructureError::RoleViolation { index: 0, role: QuarkRole::Middle });
        }
        return Ok(QuarkDecomposition { quarks: vec![q], joins: Vec::new(), boundary, labels: vec![labels] });
    }
    let k = h - 2;
    let mut quarks = Vec::with_capacity(k + 1);
    let mut labels = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let bottom: Vec<usize> = bits(sets[i]).filter(|&v| i == 0 || !r.is_up_seeing(v)).collect();
        let top: Vec<usize> = bits(sets[i + 1]).filter(|&v| i == k || !r.is_down_seeing(v)).collect();
        let (q, l) = side_quark(bottom, top)?;
        quarks.push(q);
        labels.push(l);
    }
    let joins = (1..=k).map(join).collect();
    check_roles(mode, &quarks[0], &quarks[1..])?;
    Ok(QuarkDecomposition { quarks, joins, boundary, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quark(m: usize, n: usize, edges: &[(usize, usize)]) -> Quark {
        let mut adj = vec![vec![false; n]; m];
        for &(i, j) in edges {
            adj[i][j] = true;
        }
        Quark::new(m, n, &adj).unwrap()
    }

    #[test]
    fn validity() {
        assert!(Quark::new(0, 1, &[]).is_err());
        assert_eq!(Quark::new(1, 1, &[vec![true]]), Err(StructureError::AllSeeingBothSides));
        assert!(Quark::new(2, 1, &[vec![true]]).is_err());
    }

    #[test]
    fn types() {
        assert_eq!(quark(1, 1, &[]).quark_type().unwrap(), BType::OO);
        // The bottom vertex with the edge sees the only top vertex and is
        // stripped, leaving an empty 1×1 quark.
        assert_eq!(quark(2, 1, &[(0, 0)]).quark_type().unwrap(), BType::OO);
        assert_eq!(quark(2, 2, &[(0, 0), (1, 1)]).quark_type().unwrap(), BType::XX);
        assert_eq!(quark(2, 2, &[(0, 0)]).quark_type().unwrap(), BType::OO);
        assert_eq!(quark(2, 2, &[(0, 0), (1, 0)]).quark_type().unwrap(), BType::OO);
        assert_eq!(quark(2, 3, &[(0, 0), (1, 1)]).quark_type().unwrap(), BType::OX);
        assert_eq!(quark(3, 2, &[(0, 0), (1, 1)]).quark_type().unwrap(), BType::XO);
    }

    #[test]
    fn roles() {
        let empty = quark(1, 1, &[]);
        assert_eq!(empty.roles(), vec![QuarkRole::Middle]);
        let one_up = quark(2, 1, &[(0, 0)]);
        assert_eq!(one_up.roles(), vec![QuarkRole::Bottom]);
        let ident = quark(2, 2, &[(0, 0), (1, 1)]);
        assert_eq!(ident.roles(), vec![QuarkRole::Bottom, QuarkRole::Middle, QuarkRole::Top]);
    }

    #[test]
    fn stick_two_single_edges_is_rejected() {
        // A 1×1 quark with an edge has all-seeing vertices on both sides.
        assert!(Quark::new(1, 1, &[vec![true]]).is_err());
    }

    #[test]
    fn stick_identity_quarks() {
        let q = quark(2, 2, &[(0, 0), (1, 1)]);
        let p = compose_quarks(&q, &[Join::S], &[q.clone()]).unwrap();
        assert_eq!(p.len(), 8);
        assert_eq!(p.height(), 3);
        assert_eq!(p.labeled_count(), 8);
        let keys: Vec<_> = (0..8).map(|v| (p.ranked().rank(v), p.labels()[v])).collect();
        let expected: Vec<_> = [0, 0, 1, 1, 1, 1, 2, 2].iter().zip(1..).map(|(&r, l)| (r, Some(l))).collect();
        assert_eq!(keys, expected);
        assert!(p.is_trimmed());
        let d = quark_decompose(&p).unwrap();
        assert_eq!(d.quarks, vec![q.clone(), q]);
        assert_eq!(d.joins, vec![Join::S]);
        assert_eq!(d.recompose().unwrap(), p);
    }

    #[test]
    fn glue_adds_placeholder() {
        let q = quark(2, 2, &[(0, 0), (1, 1)]);
        let p = compose_quarks(&q, &[Join::G], &[q.clone()]).unwrap();
        assert_eq!(p.len(), 9);
        assert_eq!(p.placeholder_count(), 1);
        assert!(p.has_placeholder_at(1));
        assert!(p.is_trimmed());
        assert!(!p.poset().contains_3plus1());
    }

    #[test]
    fn height_two_constructor() {
        let p = height_two(&quark(1, 1, &[]), true, true).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.is_trimmed());
        assert!(super::super::is_sum_indecomposable(&p));
        assert!(height_two(&quark(2, 1, &[(0, 0)]), false, false).is_err());
        let d = quark_decompose_in(&p, LegalityMode::Strong).unwrap();
        assert_eq!(d.boundary, (Join::G, Join::G));
        assert_eq!(d.recompose().unwrap(), p);
    }
}
