//! Trimming, ordinal sums, quark decompositions and words.

mod ordinal;
mod quark;
mod trim;
mod word;

pub use ordinal::{decompose_ordinal, decompose_ordinal_with_labels, is_sum_indecomposable, ordinal_sum};
pub use quark::{
    compose_quarks, compose_quarks_in, height_two, quark_decompose, quark_decompose_in, BType, Join, Quark,
    QuarkDecomposition, QuarkRole,
};
pub use trim::{is_3plus1_avoiding_trimmed_equiv, trim};
pub use word::{avoids_via_word, is_legal, word_of, LegalityMode, Word};

use std::fmt;

use thiserror::Error;

use crate::poset::{bit, bits, transitive_closure, Poset, PosetError, RankedPoset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("poset is not vigilant (vertex {0} is neither up- nor down-seeing)")]
    NotVigilant(usize),
    #[error("labels must be a bijection onto 1..={0}")]
    BadLabels(usize),
    #[error("unlabeled vertex {0} is not all-seeing")]
    UnlabeledNotAllSeeing(usize),
    #[error("rank {0} has more than one unlabeled vertex")]
    DuplicatePlaceholder(usize),
    #[error("poset is not sum-indecomposable")]
    NotSumIndecomposable,
    #[error("height {0} is too small for this decomposition")]
    HeightTooSmall(usize),
    #[error("quark needs both sides nonempty (got {m}×{n})")]
    EmptySide { m: usize, n: usize },
    #[error("quark adjacency has {got} rows for {m} bottom vertices, or an entry outside {n} top vertices")]
    QuarkShape { m: usize, n: usize, got: usize },
    #[error("quark has all-seeing vertices on both sides")]
    AllSeeingBothSides,
    #[error("quark {index} cannot play the {role} role")]
    RoleViolation { index: usize, role: QuarkRole },
    #[error("expected {expected} joins, got {got}")]
    JoinCount { expected: usize, got: usize },
    #[error("word needs at least one quark type and one more join than types")]
    MalformedWord,
}

/// A vigilant ranked poset whose all-seeing vertices are collapsed to at
/// most one unlabeled placeholder per rank; the rest carry labels `1..=m`.
///
/// Equality ignores the internal vertex order: two values are equal when
/// the same `(rank, label)` keys carry the same relations.
#[derive(Clone)]
pub struct TrimmedPoset {
    ranked: RankedPoset,
    labels: Vec<Option<u32>>,
}

/// Vertices sorted by `(rank, label)`, placeholders first within a rank,
/// with the order relation expressed in that sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub keys: Vec<(usize, Option<u32>)>,
    pub up: Vec<u64>,
}

impl TrimmedPoset {
    /// Checks the label bijection and the placeholder conditions.
    pub fn new(ranked: RankedPoset, labels: Vec<Option<u32>>) -> Result<Self, StructureError> {
        let n = ranked.len();
        if labels.len() != n {
            return Err(PosetError::RankLength { expected: n, got: labels.len() }.into());
        }
        let m = labels.iter().flatten().count();
        let mut seen = vec![false; m];
        for l in labels.iter().flatten() {
            let idx = (*l as usize).wrapping_sub(1);
            if idx >= m || std::mem::replace(&mut seen[idx], true) {
                return Err(StructureError::BadLabels(m));
            }
        }
        let mut placeholder_ranks = Vec::new();
        for (v, l) in labels.iter().enumerate() {
            if l.is_none() {
                if !ranked.is_all_seeing(v) {
                    return Err(StructureError::UnlabeledNotAllSeeing(v));
                }
                let r = ranked.rank(v);
                if placeholder_ranks.contains(&r) {
                    return Err(StructureError::DuplicatePlaceholder(r));
                }
                placeholder_ranks.push(r);
            }
        }
        Ok(TrimmedPoset { ranked, labels })
    }

    pub(crate) fn from_parts(ranked: RankedPoset, labels: Vec<Option<u32>>) -> Self {
        debug_assert_eq!(ranked.len(), labels.len());
        TrimmedPoset { ranked, labels }
    }

    /// Builds from vertices given as `(rank, label)` plus strict relations
    /// between vertex indices; the relation is transitively closed first.
    pub fn from_vertices(vertices: &[(usize, Option<u32>)], relations: &[(usize, usize)]) -> Result<Self, StructureError> {
        let n = vertices.len();
        let mut up = vec![0u64; n];
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(PosetError::OutOfRange(a.max(b)).into());
            }
            up[a] |= bit(b);
        }
        let poset = Poset::from_closed_rows(n, transitive_closure(up))?;
        let ranked = RankedPoset::with_ranks(poset, vertices.iter().map(|v| v.0).collect())?;
        Self::new(ranked, vertices.iter().map(|v| v.1).collect())
    }

    pub fn empty() -> Self {
        TrimmedPoset::from_parts(RankedPoset::from_poset(Poset::empty()).expect("empty poset is graded"), Vec::new())
    }

    pub fn ranked(&self) -> &RankedPoset {
        &self.ranked
    }

    pub fn poset(&self) -> &Poset {
        self.ranked.poset()
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn height(&self) -> usize {
        self.ranked.height()
    }

    /// Number of labeled vertices.
    pub fn labeled_count(&self) -> usize {
        self.labels.iter().flatten().count()
    }

    /// Number of unlabeled placeholders.
    pub fn placeholder_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    /// Whether rank `r` holds a placeholder.
    pub fn has_placeholder_at(&self, r: usize) -> bool {
        self.labels.iter().enumerate().any(|(v, l)| l.is_none() && self.ranked.rank(v) == r)
    }

    /// The full trimmed condition: vigilant, no labeled all-seeing vertex.
    pub fn is_trimmed(&self) -> bool {
        self.ranked.is_vigilant()
            && self.labels.iter().enumerate().all(|(v, l)| l.is_none() == self.ranked.is_all_seeing(v))
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (self.ranked.rank(v), self.labels[v]));
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let up = order
            .iter()
            .map(|&v| bits(self.poset().up_mask(v)).fold(0u64, |m, w| m | bit(pos[w])))
            .collect();
        let keys = order.iter().map(|&v| (self.ranked.rank(v), self.labels[v])).collect();
        CanonicalForm { keys, up }
    }

    /// Replaces every label `l` by `map[l - 1]`.
    pub fn relabeled(&self, map: &[u32]) -> Result<Self, StructureError> {
        let labels = self
            .labels
            .iter()
            .map(|l| l.map(|l| map.get(l as usize - 1).copied().ok_or(StructureError::BadLabels(map.len()))).transpose())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.ranked.clone(), labels)
    }

    /// Induced piece on the ranks `lo..=hi`, ranks shifted down by `lo`,
    /// labels renumbered in order. Returns the piece and the original label
    /// of each new label.
    pub(crate) fn rank_slice(&self, lo: usize, hi: usize) -> (TrimmedPoset, Vec<u32>) {
        let keep: Vec<usize> = (0..self.len()).filter(|&v| (lo..=hi).contains(&self.ranked.rank(v))).collect();
        let poset = self.poset().induced(&keep);
        let ranks = keep.iter().map(|&v| self.ranked.rank(v) - lo).collect();
        let ranked = RankedPoset::with_ranks(poset, ranks).expect("rank slices keep unit cover steps");
        let mut kept_labels: Vec<u32> = keep.iter().filter_map(|&v| self.labels[v]).collect();
        kept_labels.sort_unstable();
        let labels = keep
            .iter()
            .map(|&v| self.labels[v].map(|l| kept_labels.binary_search(&l).expect("label present") as u32 + 1))
            .collect();
        (TrimmedPoset::from_parts(ranked, labels), kept_labels)
    }
}

impl PartialEq for TrimmedPoset {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_form() == other.canonical_form()
    }
}

impl Eq for TrimmedPoset {}

impl fmt::Debug for TrimmedPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: usize| match self.labels[v] {
            Some(l) => format!("{l}"),
            None => format!("*{}", self.ranked.rank(v)),
        };
        let mut ranks = Vec::new();
        for r in 0..self.height() {
            let names: Vec<String> = (0..self.len()).filter(|&v| self.ranked.rank(v) == r).map(name).collect();
            ranks.push(format!("[{}]", names.join(" ")));
        }
        let covers: Vec<String> = (0..self.len())
            .flat_map(|a| bits(self.ranked.covered_by(a)).map(move |b| (a, b)))
            .map(|(a, b)| format!("{}<{}", name(a), name(b)))
            .collect();
        write!(f, "Trimmed {{ ranks: {}, covers: {} }}", ranks.join(" "), covers.join(" "))
    }
}
