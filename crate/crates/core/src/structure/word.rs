use std::fmt;

use serde::Serialize;

use super::quark::{quark_decompose_in, BType, Join};
use super::{StructureError, TrimmedPoset};

/// Which boundary conditions apply when judging a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LegalityMode {
    Strong,
    /// Interior summand of a weakly graded poset; same rules as `Strong`.
    WeakInterior,
    /// Topmost summand: its last quark may have isolated bottom vertices.
    WeakTop,
    /// Bottommost summand: its first quark may have isolated top vertices.
    WeakBottom,
    /// The only summand of a weakly graded poset.
    WeakBoth,
}

impl LegalityMode {
    pub(crate) fn relaxes_bottom(self) -> bool {
        matches!(self, LegalityMode::WeakBottom | LegalityMode::WeakBoth)
    }

    pub(crate) fn relaxes_top(self) -> bool {
        matches!(self, LegalityMode::WeakTop | LegalityMode::WeakBoth)
    }

    /// Mode for summand `index` out of `count` in a weakly graded poset.
    pub fn for_summand(index: usize, count: usize) -> Self {
        match (index == 0, index + 1 == count) {
            (true, true) => LegalityMode::WeakBoth,
            (true, false) => LegalityMode::WeakBottom,
            (false, true) => LegalityMode::WeakTop,
            (false, false) => LegalityMode::WeakInterior,
        }
    }
}

/// `α_0 B_0 α_1 … B_k α_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Word {
    joins: Vec<Join>,
    types: Vec<BType>,
}

impl Word {
    pub fn new(joins: Vec<Join>, types: Vec<BType>) -> Result<Self, StructureError> {
        if types.is_empty() || joins.len() != types.len() + 1 {
            return Err(StructureError::MalformedWord);
        }
        Ok(Word { joins, types })
    }

    pub fn joins(&self) -> &[Join] {
        &self.joins
    }

    pub fn types(&self) -> &[BType] {
        &self.types
    }

    /// Number of quark types, `k + 1`.
    pub fn quark_count(&self) -> usize {
        self.types.len()
    }

    /// Number of `G` letters.
    pub fn glue_count(&self) -> usize {
        self.joins.iter().filter(|&&j| j == Join::G).count()
    }

    /// Every word with `quarks` quark types, in a fixed order.
    pub fn all(quarks: usize) -> Vec<Word> {
        if quarks == 0 {
            return Vec::new();
        }
        let join_choices = 1usize << (quarks + 1);
        let type_choices = 4usize.pow(quarks as u32);
        let mut out = Vec::with_capacity(join_choices * type_choices);
        for jc in 0..join_choices {
            let joins: Vec<Join> = (0..=quarks).map(|i| if jc >> i & 1 == 1 { Join::G } else { Join::S }).collect();
            for tc in 0..type_choices {
                let types = (0..quarks).map(|i| BType::ALL[tc / 4usize.pow(i as u32) % 4]).collect();
                out.push(Word { joins: joins.clone(), types });
            }
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.types.iter().enumerate() {
            write!(f, "{} {} ", self.joins[i], t)?;
        }
        write!(f, "{}", self.joins[self.types.len()])
    }
}

/// Checks the three forbidden patterns; weak modes drop the boundary ones.
pub fn is_legal(w: &Word, mode: LegalityMode) -> bool {
    let k = w.types.len() - 1;
    let first = w.joins[0] == Join::S && w.types[0].top_isolated();
    if first && !mode.relaxes_bottom() {
        return false;
    }
    let last = w.joins[k + 1] == Join::S && w.types[k].bottom_isolated();
    if last && !mode.relaxes_top() {
        return false;
    }
    (1..=k).all(|i| !(w.types[i - 1].bottom_isolated() && w.joins[i] == Join::S && w.types[i].top_isolated()))
}

/// The word of a sum-indecomposable poset of height at least 2.
pub fn word_of(t: &TrimmedPoset) -> Result<Word, StructureError> {
    word_of_in(t, LegalityMode::WeakBoth)
}

pub(crate) fn word_of_in(t: &TrimmedPoset, mode: LegalityMode) -> Result<Word, StructureError> {
    let d = quark_decompose_in(t, mode)?;
    let mut joins = vec![d.boundary.0];
    joins.extend_from_slice(&d.joins);
    joins.push(d.boundary.1);
    let types = d.quarks.iter().map(|q| q.quark_type()).collect::<Result<Vec<_>, _>>()?;
    Word::new(joins, types)
}

/// Avoidance read off the word; height-1 posets avoid trivially.
pub fn avoids_via_word(t: &TrimmedPoset, mode: LegalityMode) -> Result<bool, StructureError> {
    if t.height() <= 1 {
        return Ok(true);
    }
    Ok(is_legal(&word_of_in(t, mode)?, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{compose_quarks, height_two, Quark};

    fn w(joins: &[Join], types: &[BType]) -> Word {
        Word::new(joins.to_vec(), types.to_vec()).unwrap()
    }

    #[test]
    fn legality_examples() {
        use BType::*;
        use Join::*;
        assert!(is_legal(&w(&[G, G], &[XX]), LegalityMode::Strong));
        assert!(!is_legal(&w(&[S, G], &[OO]), LegalityMode::Strong));
        assert!(is_legal(&w(&[S, G], &[OO]), LegalityMode::WeakBottom));
        assert!(!is_legal(&w(&[G, S], &[OO]), LegalityMode::WeakBottom));
        assert!(is_legal(&w(&[G, S], &[OO]), LegalityMode::WeakTop));
        let interior = w(&[G, S, G], &[OO, OO]);
        for mode in [LegalityMode::Strong, LegalityMode::WeakInterior, LegalityMode::WeakTop, LegalityMode::WeakBottom, LegalityMode::WeakBoth] {
            assert!(!is_legal(&interior, mode));
        }
        assert!(is_legal(&w(&[G, G, G], &[OO, OO]), LegalityMode::Strong));
    }

    #[test]
    fn malformed_words() {
        assert!(Word::new(vec![Join::S], vec![]).is_err());
        assert!(Word::new(vec![Join::S], vec![BType::XX]).is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(Word::all(1).len(), 16);
        assert_eq!(Word::all(2).len(), 128);
        assert_eq!(Word::all(1).iter().filter(|w| is_legal(w, LegalityMode::Strong)).count(), 9);
    }

    #[test]
    fn height_two_word() {
        let q = Quark::new(2, 2, &[vec![true, false], vec![false, true]]).unwrap();
        let p = height_two(&q, true, true).unwrap();
        assert_eq!(word_of(&p).unwrap(), w(&[Join::G, Join::G], &[BType::XX]));
        assert!(avoids_via_word(&p, LegalityMode::Strong).unwrap());
    }

    #[test]
    fn sticking_isolated_vertices_creates_pattern() {
        // Bottom quark: one edge plus an isolated bottom vertex; top quark
        // dual. Sticking leaves two isolated vertices two ranks apart.
        let bottom = Quark::new(2, 1, &[vec![true], vec![false]]).unwrap();
        let top = Quark::new(1, 2, &[vec![true, false]]).unwrap();
        assert!(bottom.is_bottom() && top.is_top());
        let stuck = compose_quarks(&bottom, &[Join::S], &[top.clone()]).unwrap();
        assert!(!avoids_via_word(&stuck, LegalityMode::Strong).unwrap());
        assert!(stuck.poset().contains_3plus1());
        let glued = compose_quarks(&bottom, &[Join::G], &[top]).unwrap();
        assert!(avoids_via_word(&glued, LegalityMode::Strong).unwrap());
        assert!(!glued.poset().contains_3plus1());
    }
}
