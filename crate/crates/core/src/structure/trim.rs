use super::{StructureError, TrimmedPoset};
use crate::poset::{RankedPoset, SeeingClass};

/// Collapses the all-seeing vertices of a vigilant ranked poset.
///
/// The first all-seeing vertex of each rank stays as the unlabeled
/// placeholder; all-seeing vertices of one rank have identical relations,
/// so it does not matter which one is kept.
pub fn trim(ranked: &RankedPoset) -> Result<TrimmedPoset, StructureError> {
    let n = ranked.len();
    if let Some(v) = (0..n).find(|&v| ranked.seeing_class(v) == SeeingClass::NoneSeeing) {
        return Err(StructureError::NotVigilant(v));
    }
    let mut keep = Vec::with_capacity(n);
    let mut placeholder_ranks = Vec::new();
    for v in 0..n {
        if ranked.is_all_seeing(v) {
            let r = ranked.rank(v);
            if placeholder_ranks.contains(&r) {
                continue;
            }
            placeholder_ranks.push(r);
        }
        keep.push(v);
    }
    let poset = ranked.poset().induced(&keep);
    let ranks = keep.iter().map(|&v| ranked.rank(v)).collect();
    let trimmed = RankedPoset::with_ranks(poset, ranks)?;
    let mut next = 0u32;
    let labels = keep
        .iter()
        .map(|&v| {
            if ranked.is_all_seeing(v) {
                None
            } else {
                next += 1;
                Some(next)
            }
        })
        .collect();
    Ok(TrimmedPoset::from_parts(trimmed, labels))
}

/// `(avoidance of P, avoidance of trim(P))`; the two always agree.
pub fn is_3plus1_avoiding_trimmed_equiv(ranked: &RankedPoset) -> Result<(bool, bool), StructureError> {
    let t = trim(ranked)?;
    Ok((!ranked.poset().contains_3plus1(), !t.poset().contains_3plus1()))
}
