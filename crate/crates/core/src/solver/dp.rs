//! Dynamic program over box loads for tall and vertical items.
//!
//! Items of one rounded height only ever go into boxes of that height, so each
//! height class is solved on its own. A state is the vector of widths consumed in
//! the class's boxes; every item extends each state by adding its width to one
//! component. States that exceed a box width are dropped, repeated states are
//! merged.

use std::collections::{BTreeMap, HashSet};

/// A box reserved for items of exactly one rounded height.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TvBox {
    pub height: i64,
    pub width: i64,
}

/// A tall or vertical item after height rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TvItem {
    pub height: i64,
    pub width: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpOptions {
    /// Merge identical states. Turning it off only costs time.
    pub dedup: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { dedup: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DpStats {
    /// Largest state set seen after processing one item.
    pub peak_states: usize,
    /// States generated in total, before deduplication.
    pub generated: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TvAssignment {
    /// Box index per item, indexed like the input items.
    pub box_of: Vec<usize>,
    pub stats: DpStats,
}

/// One layer of a DP: the surviving states and, per state, the parent state in
/// the previous layer and the component that was increased.
pub(crate) struct Layer<S> {
    pub states: Vec<S>,
    pub back: Vec<(usize, usize)>,
}

pub fn dp_place_tall_vertical(boxes: &[TvBox], items: &[TvItem]) -> Option<TvAssignment> {
    dp_place_tall_vertical_with(boxes, items, DpOptions::default())
}

pub fn dp_place_tall_vertical_with(boxes: &[TvBox], items: &[TvItem], opts: DpOptions) -> Option<TvAssignment> {
    let mut by_height: BTreeMap<i64, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (k, b) in boxes.iter().enumerate() {
        by_height.entry(b.height).or_default().0.push(k);
    }
    for (k, it) in items.iter().enumerate() {
        by_height.entry(it.height).or_default().1.push(k);
    }
    let mut box_of = vec![usize::MAX; items.len()];
    let mut stats = DpStats::default();
    for (bx, its) in by_height.values() {
        if its.is_empty() {
            continue;
        }
        if bx.is_empty() {
            return None;
        }
        let caps: Vec<i64> = bx.iter().map(|&k| boxes[k].width).collect();
        let mut order = its.clone();
        order.sort_by(|&a, &b| items[b].width.cmp(&items[a].width).then(a.cmp(&b)));
        let widths: Vec<i64> = order.iter().map(|&k| items[k].width).collect();
        let choice = load_dp(&caps, &widths, opts, &mut stats)?;
        for (pos, &k) in order.iter().enumerate() {
            box_of[k] = bx[choice[pos]];
        }
    }
    Some(TvAssignment { box_of, stats })
}

/// One way to extend a state: add `amount` to component `comp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Move {
    pub comp: usize,
    pub amount: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("more than {0} DP states")]
pub struct CapExceeded(pub usize);

/// Runs the layered DP: item `k` must take one of `moves[k]`.
///
/// Components sharing a `sym` id are interchangeable. A move into such a
/// component is skipped when an earlier move of the same item goes into a
/// component of the same group with the same load and the same amount; this
/// removes symmetric duplicates without losing any load vector up to permutation.
/// Returns the index of the chosen move per item.
pub(crate) fn vector_dp(
    caps: &[i64],
    sym: &[usize],
    moves: &[Vec<Move>],
    dedup: bool,
    state_cap: usize,
    stats: &mut DpStats,
) -> Result<Option<Vec<usize>>, CapExceeded> {
    let mut layers: Vec<Layer<Vec<i64>>> = vec![Layer { states: vec![vec![0; caps.len()]], back: vec![(0, 0)] }];
    for ms in moves {
        let prev = layers.last().unwrap();
        let mut next = Layer { states: Vec::new(), back: Vec::new() };
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        for (si, s) in prev.states.iter().enumerate() {
            for (mi, m) in ms.iter().enumerate() {
                let b = m.comp;
                if s[b] + m.amount > caps[b] {
                    continue;
                }
                let mirrored = ms[..mi].iter().any(|e| {
                    e.amount == m.amount && sym[e.comp] == sym[b] && caps[e.comp] == caps[b] && s[e.comp] == s[b]
                });
                if mirrored {
                    continue;
                }
                stats.generated += 1;
                let mut t = s.clone();
                t[b] += m.amount;
                if dedup && !seen.insert(t.clone()) {
                    continue;
                }
                next.states.push(t);
                next.back.push((si, mi));
                if next.states.len() > state_cap {
                    return Err(CapExceeded(state_cap));
                }
            }
        }
        stats.peak_states = stats.peak_states.max(next.states.len());
        if next.states.is_empty() {
            return Ok(None);
        }
        layers.push(next);
    }
    Ok(Some(backtrack(&layers)))
}

/// Assigns `widths` to bins with capacities `caps`; returns the bin per width.
fn load_dp(caps: &[i64], widths: &[i64], opts: DpOptions, stats: &mut DpStats) -> Option<Vec<usize>> {
    let sym: Vec<usize> = vec![0; caps.len()];
    let moves: Vec<Vec<Move>> =
        widths.iter().map(|&w| (0..caps.len()).map(|comp| Move { comp, amount: w }).collect()).collect();
    vector_dp(caps, &sym, &moves, opts.dedup, usize::MAX, stats).expect("no state cap")
}

/// Follows parent pointers from the first state of the last layer.
pub(crate) fn backtrack<S>(layers: &[Layer<S>]) -> Vec<usize> {
    let mut out = vec![0; layers.len() - 1];
    let mut si = 0;
    for l in (1..layers.len()).rev() {
        let (parent, choice) = layers[l].back[si];
        out[l - 1] = choice;
        si = parent;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(h: i64, w: i64) -> TvBox {
        TvBox { height: h, width: w }
    }
    fn it(h: i64, w: i64) -> TvItem {
        TvItem { height: h, width: w }
    }

    #[test]
    fn spec_examples() {
        let boxes = [bx(4, 5), bx(4, 3)];
        let a = dp_place_tall_vertical(&boxes, &[it(4, 4), it(4, 3), it(4, 1)]).unwrap();
        let mut load = [0; 2];
        for (k, &b) in a.box_of.iter().enumerate() {
            load[b] += [4, 3, 1][k];
        }
        assert!(load[0] <= 5 && load[1] <= 3);
        assert!(dp_place_tall_vertical(&boxes, &[it(4, 4), it(4, 4)]).is_none());
        assert!(dp_place_tall_vertical(&boxes, &[]).is_some());
    }

    #[test]
    fn height_without_box_is_infeasible() {
        assert!(dp_place_tall_vertical(&[bx(4, 5)], &[it(3, 1)]).is_none());
    }

    #[test]
    fn classes_are_independent() {
        let boxes = [bx(4, 2), bx(6, 3)];
        let a = dp_place_tall_vertical(&boxes, &[it(6, 3), it(4, 1), it(4, 1)]).unwrap();
        assert_eq!(a.box_of, vec![1, 0, 0]);
    }

    #[test]
    fn dedup_keeps_verdict() {
        let boxes = [bx(2, 4), bx(2, 4), bx(2, 3)];
        let items: Vec<TvItem> = [2, 2, 2, 3, 1, 1].iter().map(|&w| it(2, w)).collect();
        let on = dp_place_tall_vertical_with(&boxes, &items, DpOptions { dedup: true });
        let off = dp_place_tall_vertical_with(&boxes, &items, DpOptions { dedup: false });
        assert_eq!(on.is_some(), off.is_some());
        assert!(on.unwrap().stats.generated <= off.unwrap().stats.generated);
    }
}
