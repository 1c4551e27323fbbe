use super::TrimmedPoset;
use crate::poset::{bit, transitive_closure, Poset, RankedPoset};

/// Stacks `upper` on `lower`: every top-rank vertex of `lower` is covered by
/// every bottom-rank vertex of `upper`. Labels of `upper` follow those of
/// `lower`.
pub fn ordinal_sum(lower: &TrimmedPoset, upper: &TrimmedPoset) -> TrimmedPoset {
    if lower.is_empty() {
        return upper.clone();
    }
    if upper.is_empty() {
        return lower.clone();
    }
    let n1 = lower.len();
    let n = n1 + upper.len();
    let shift = lower.height();
    let top = lower.ranked().rank_set(shift - 1);
    let bottom = upper.ranked().rank_set(0) << n1;
    let mut up = Vec::with_capacity(n);
    for v in 0..n1 {
        let extra = if top & bit(v) != 0 { bottom } else { 0 };
        up.push(lower.poset().up_mask(v) | extra);
    }
    for v in 0..upper.len() {
        up.push(upper.poset().up_mask(v) << n1);
    }
    let poset = Poset::from_closed_rows(n, transitive_closure(up)).expect("ordinal sum of orders is an order");
    let ranks = lower.ranked().ranks().iter().copied().chain(upper.ranked().ranks().iter().map(|r| r + shift)).collect();
    let ranked = RankedPoset::with_ranks(poset, ranks).expect("ordinal sum keeps unit cover steps");
    let m1 = lower.labeled_count() as u32;
    let labels = lower.labels().iter().copied().chain(upper.labels().iter().map(|l| l.map(|l| l + m1))).collect();
    TrimmedPoset::from_parts(ranked, labels)
}

/// Smallest rank `i < height - 1` whose vertices are all up-seeing.
fn first_cut(t: &TrimmedPoset) -> Option<usize> {
    let h = t.height();
    let sets = t.ranked().rank_sets();
    (0..h.saturating_sub(1)).find(|&i| crate::poset::bits(sets[i]).all(|v| t.ranked().is_up_seeing(v)))
}

/// Nonempty and no interior rank set is entirely up-seeing.
pub fn is_sum_indecomposable(t: &TrimmedPoset) -> bool {
    !t.is_empty() && first_cut(t).is_none()
}

/// The maximal ordinal-sum factorisation, bottom summand first.
pub fn decompose_ordinal(t: &TrimmedPoset) -> Vec<TrimmedPoset> {
    decompose_ordinal_with_labels(t).into_iter().map(|(s, _)| s).collect()
}

/// Like [`decompose_ordinal`], also returning for each summand the original
/// label of each of its labels.
pub fn decompose_ordinal_with_labels(t: &TrimmedPoset) -> Vec<(TrimmedPoset, Vec<u32>)> {
    let mut out = Vec::new();
    let h = t.height();
    let mut base = 0;
    while base < h {
        let cut = (base..h - 1).find(|&i| {
            crate::poset::bits(t.ranked().rank_set(i)).all(|v| t.ranked().is_up_seeing(v))
        });
        let hi = cut.unwrap_or(h - 1);
        out.push(t.rank_slice(base, hi));
        base = hi + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(label: Option<u32>) -> TrimmedPoset {
        TrimmedPoset::from_vertices(&[(0, label)], &[]).unwrap()
    }

    #[test]
    fn two_points() {
        let s = ordinal_sum(&point(Some(1)), &point(Some(1)));
        let expected = TrimmedPoset::from_vertices(&[(0, Some(1)), (1, Some(2))], &[(0, 1)]).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn empty_is_identity() {
        let t = TrimmedPoset::from_vertices(&[(0, None), (1, None)], &[(0, 1)]).unwrap();
        assert_eq!(ordinal_sum(&t, &TrimmedPoset::empty()), t);
        assert_eq!(ordinal_sum(&TrimmedPoset::empty(), &t), t);
    }

    #[test]
    fn indecomposability() {
        assert!(is_sum_indecomposable(&point(None)));
        let chain = TrimmedPoset::from_vertices(&[(0, None), (1, None)], &[(0, 1)]).unwrap();
        assert!(!is_sum_indecomposable(&chain));
        assert!(!is_sum_indecomposable(&TrimmedPoset::empty()));
        let parts = decompose_ordinal(&chain);
        assert_eq!(parts, vec![point(None), point(None)]);
    }

    #[test]
    fn indecomposable_is_its_own_decomposition() {
        // Empty 1×1 quark with placeholders at both ranks.
        let t = TrimmedPoset::from_vertices(
            &[(0, Some(1)), (0, None), (1, Some(2)), (1, None)],
            &[(1, 2), (0, 3), (1, 3)],
        )
        .unwrap();
        assert!(is_sum_indecomposable(&t));
        assert_eq!(decompose_ordinal(&t), vec![t]);
    }

    #[test]
    fn labels_track_through_decomposition() {
        let t = TrimmedPoset::from_vertices(
            &[(0, Some(3)), (0, None), (1, Some(1)), (1, None), (2, Some(2))],
            &[(1, 2), (0, 3), (1, 3), (2, 4), (3, 4)],
        )
        .unwrap();
        let parts = decompose_ordinal_with_labels(&t);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1, vec![1, 3]);
        assert_eq!(parts[1].1, vec![2]);
        let rebuilt = ordinal_sum(&parts[0].0, &parts[1].0);
        let map: Vec<u32> = parts.iter().flat_map(|p| p.1.iter().copied()).collect();
        assert_eq!(rebuilt.relabeled(&map).unwrap(), t);
    }
}
