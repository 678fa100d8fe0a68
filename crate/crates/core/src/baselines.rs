//! Shelf heuristics, the area-based two-approximation packer and the `2T` upper bound.

use std::cmp::Reverse;

use crate::model::{lower_bound, total_area, Instance, Item, Packing, Placement};
use crate::search;

/// One level of a shelf packing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shelf {
    pub y: i64,
    pub height: i64,
    pub used_width: i64,
}

/// Indices sorted by height, then width (both descending), then id.
pub fn shelf_order(items: &[Item]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let (ia, ib) = (&items[a], &items[b]);
        (Reverse(ia.height), Reverse(ia.width), &ia.id).cmp(&(Reverse(ib.height), Reverse(ib.width), &ib.id))
    });
    order
}

/// Next Fit Decreasing Height.
pub fn nfdh(instance: &Instance) -> Packing {
    let w = instance.strip_width;
    let mut shelf: Option<Shelf> = None;
    let mut top = 0;
    let mut placements = Vec::with_capacity(instance.items.len());
    for k in shelf_order(&instance.items) {
        let it = &instance.items[k];
        let cur = match shelf {
            Some(s) if s.used_width + it.width <= w => s,
            _ => Shelf { y: top, height: it.height, used_width: 0 },
        };
        placements.push(Placement::new(it.id.clone(), cur.used_width, cur.y));
        top = top.max(cur.y + cur.height);
        shelf = Some(Shelf { used_width: cur.used_width + it.width, ..cur });
    }
    Packing::new(instance, placements)
}

/// First Fit Decreasing Height: each item goes to the lowest shelf with room.
pub fn ffdh(instance: &Instance) -> Packing {
    let w = instance.strip_width;
    let mut shelves: Vec<Shelf> = Vec::new();
    let mut placements = Vec::with_capacity(instance.items.len());
    for k in shelf_order(&instance.items) {
        let it = &instance.items[k];
        let slot = shelves.iter().position(|s| s.used_width + it.width <= w);
        let s = match slot {
            Some(i) => &mut shelves[i],
            None => {
                let y = shelves.last().map_or(0, |s| s.y + s.height);
                shelves.push(Shelf { y, height: it.height, used_width: 0 });
                shelves.last_mut().unwrap()
            }
        };
        placements.push(Placement::new(it.id.clone(), s.used_width, s.y));
        s.used_width += it.width;
    }
    Packing::new(instance, placements)
}

/// Bottom-left placement on a skyline, items taken in the given order.
fn skyline_pack(items: &[Item], width: i64, order: &[usize]) -> Vec<(i64, i64)> {
    // Skyline as (x, y) breakpoints; segment i spans [x_i, x_{i+1}).
    let mut sky: Vec<(i64, i64)> = vec![(0, 0)];
    let mut pos = vec![(0, 0); items.len()];
    for &k in order {
        let w = items[k].width;
        let mut best: Option<(i64, i64)> = None;
        for s in 0..sky.len() {
            let x = sky[s].0;
            if x + w > width {
                break;
            }
            let mut y = 0;
            for &(sx, sy) in &sky[s..] {
                if sx >= x + w {
                    break;
                }
                y = y.max(sy);
            }
            if best.is_none_or(|(bx, by)| (y, x) < (by, bx)) {
                best = Some((x, y));
            }
        }
        let (x, y) = best.expect("item wider than strip");
        pos[k] = (x, y);
        let top = y + items[k].height;
        let end = x + w;
        let tail_y = sky.iter().rev().find(|p| p.0 <= end).map(|p| p.1).unwrap();
        let mut next: Vec<(i64, i64)> = sky.iter().copied().filter(|p| p.0 < x).collect();
        next.push((x, top));
        if end < width && !sky.iter().any(|p| p.0 == end) {
            next.push((end, tail_y));
        }
        next.extend(sky.iter().copied().filter(|p| p.0 >= end));
        next.dedup_by(|b, a| a.1 == b.1);
        sky = next;
    }
    pos
}

fn pack_from_positions(instance: &Instance, pos: &[(i64, i64)], rotated: bool) -> Packing {
    let placements = instance
        .items
        .iter()
        .zip(pos)
        .map(|(it, &(x, y))| Placement { item_id: it.id.clone(), x, y, rotated })
        .collect();
    Packing::new(instance, placements)
}

/// Which of the three inequalities of the area-based packing guarantee fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteinbergCondition {
    /// `w_max ≤ W`
    Width,
    /// `h_max ≤ H`
    Height,
    /// `2·area ≤ W·H − (2·w_max − W)₊·(2·h_max − H)₊`
    Area,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SteinbergError {
    #[error("infeasible: {0:?} condition violated")]
    Infeasible(SteinbergCondition),
    #[error("search for a packing exhausted its budget")]
    SearchExhausted,
}

/// Returns the first violated inequality, if any.
pub fn steinberg_condition(items: &[Item], width: i64, height: i64) -> Option<SteinbergCondition> {
    let a = items.iter().map(|i| i.width).max().unwrap_or(0);
    let b = items.iter().map(|i| i.height).max().unwrap_or(0);
    if a > width {
        return Some(SteinbergCondition::Width);
    }
    if b > height {
        return Some(SteinbergCondition::Height);
    }
    let slack = (2 * a - width).max(0) * (2 * b - height).max(0);
    if 2 * total_area(items) > width * height - slack {
        return Some(SteinbergCondition::Area);
    }
    None
}

const STEINBERG_BUDGET: u64 = 20_000_000;

/// Packs into `W × target_height` whenever the three area conditions hold.
///
/// Constructive heuristics are tried first, in both orientations of the box; the
/// exhaustive search of [`search::fit_in_box`] settles whatever they miss. A single
/// item that fits the box is always accepted.
pub fn steinberg(instance: &Instance, target_height: i64) -> Result<Packing, SteinbergError> {
    if let [only] = instance.items.as_slice() {
        // A lone item that fits is packed at the origin even though the area
        // inequality cannot hold for it when it fills more than half the box.
        if only.width <= instance.strip_width && only.height <= target_height {
            return Ok(Packing::new(instance, vec![Placement::new(only.id.clone(), 0, 0)]));
        }
    }
    if let Some(c) = steinberg_condition(&instance.items, instance.strip_width, target_height) {
        return Err(SteinbergError::Infeasible(c));
    }
    if instance.items.is_empty() {
        return Ok(Packing::empty());
    }
    for p in [nfdh(instance), ffdh(instance)] {
        if p.height <= target_height {
            return Ok(p);
        }
    }
    let orders = skyline_orders(&instance.items);
    for order in &orders {
        let pos = skyline_pack(&instance.items, instance.strip_width, order);
        let p = pack_from_positions(instance, &pos, false);
        if p.height <= target_height {
            return Ok(p);
        }
    }
    // The same heuristics on the transposed box: columns instead of rows.
    let transposed: Vec<Item> = instance
        .items
        .iter()
        .map(|i| Item::new(i.id.clone(), i.height, i.width))
        .collect();
    for order in &skyline_orders(&transposed) {
        let pos = skyline_pack(&transposed, target_height, order);
        let fits = pos.iter().zip(&transposed).all(|(&(_, y), t)| y + t.height <= instance.strip_width);
        if fits {
            let back: Vec<(i64, i64)> = pos.iter().map(|&(x, y)| (y, x)).collect();
            return Ok(pack_from_positions(instance, &back, false));
        }
    }
    match search::pack_in_box(instance, target_height, false, STEINBERG_BUDGET) {
        Ok(Some(p)) => Ok(p),
        Ok(None) | Err(_) => Err(SteinbergError::SearchExhausted),
    }
}

fn skyline_orders(items: &[Item]) -> Vec<Vec<usize>> {
    let idx: Vec<usize> = (0..items.len()).collect();
    let by = |key: &dyn Fn(&Item) -> (i64, i64)| {
        let mut o = idx.clone();
        o.sort_by_key(|&k| (Reverse(key(&items[k])), k));
        o
    };
    vec![
        by(&|i| (i.height, i.width)),
        by(&|i| (i.width, i.height)),
        by(&|i| (i.area(), i.height)),
        by(&|i| (i.width.max(i.height), i.area())),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("upper bound packer failed: {0}")]
pub struct UpperBoundError(pub SteinbergError);

/// A packing of height at most `2·lower_bound`, together with the box height used.
pub fn upper_bound_pack(instance: &Instance) -> Result<(Packing, i64), UpperBoundError> {
    let lb = lower_bound(instance);
    let mut h = 2 * lb;
    if steinberg_condition(&instance.items, instance.strip_width, h) == Some(SteinbergCondition::Area) {
        h += 1;
    }
    let p = steinberg(instance, h).map_err(UpperBoundError)?;
    Ok((p, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_packing;

    fn ys(inst: &Instance, p: &Packing) -> Vec<(String, i64, i64)> {
        let mut v: Vec<_> = p.placements.iter().map(|q| (q.item_id.clone(), q.x, q.y)).collect();
        v.sort();
        let _ = inst;
        v
    }

    #[test]
    fn nfdh_examples() {
        assert_eq!(nfdh(&Instance::from_dims(10, &[(10, 3)])).height, 3);
        let inst = Instance::from_dims(10, &[(5, 4), (5, 4), (6, 2), (4, 2)]);
        let p = nfdh(&inst);
        assert_eq!(p.height, 6);
        assert_eq!(
            ys(&inst, &p),
            vec![
                ("0".into(), 0, 0),
                ("1".into(), 5, 0),
                ("2".into(), 0, 4),
                ("3".into(), 6, 4)
            ]
        );
        assert_eq!(nfdh(&Instance::from_dims(10, &[(7, 2), (7, 2)])).height, 4);
    }

    #[test]
    fn ffdh_examples() {
        assert_eq!(ffdh(&Instance::from_dims(10, &[(7, 2), (7, 2)])).height, 4);
        let inst = Instance::from_dims(10, &[(7, 2), (3, 2), (7, 2)]);
        let p = ffdh(&inst);
        assert_eq!(p.height, 4);
        assert!(validate_packing(&inst, &p, false).is_valid());
        assert_eq!(ffdh(&Instance::from_dims(10, &[(10, 1); 3])).height, 3);
    }

    #[test]
    fn ffdh_reuses_lower_shelves() {
        // NFDH closes the first shelf when the 6-wide item arrives; FFDH returns to it.
        let inst = Instance::from_dims(10, &[(6, 3), (6, 2), (4, 1)]);
        assert_eq!(nfdh(&inst).height, 5);
        assert_eq!(ffdh(&inst).height, 5);
        let inst = Instance::from_dims(10, &[(6, 3), (6, 2), (3, 2), (4, 1)]);
        let p = ffdh(&inst);
        assert!(validate_packing(&inst, &p, false).is_valid());
        assert_eq!(p.height, 5);
    }

    #[test]
    fn steinberg_examples() {
        let one = Instance::from_dims(4, &[(4, 4)]);
        let p = steinberg(&one, 4).unwrap();
        assert_eq!(p.placements[0], Placement::new("0", 0, 0));
        let four = Instance::from_dims(4, &[(2, 2); 4]);
        assert_eq!(steinberg(&four, 4), Err(SteinbergError::Infeasible(SteinbergCondition::Area)));
        let two = Instance::from_dims(4, &[(2, 2); 2]);
        let p = steinberg(&two, 4).unwrap();
        assert!(validate_packing(&two, &p, false).is_valid());
        assert!(p.height <= 4);
    }

    #[test]
    fn steinberg_names_the_failed_condition() {
        let inst = Instance::from_dims(4, &[(3, 5)]);
        assert_eq!(steinberg(&inst, 4), Err(SteinbergError::Infeasible(SteinbergCondition::Height)));
        assert_eq!(
            steinberg_condition(&inst.items, 2, 10),
            Some(SteinbergCondition::Width)
        );
        // One 3×3 item in 4×4: the correction term (2·3−4)·(2·3−4) = 4 bites.
        let big = Instance::from_dims(4, &[(3, 3), (1, 1)]);
        assert_eq!(steinberg(&big, 4), Err(SteinbergError::Infeasible(SteinbergCondition::Area)));
    }

    #[test]
    fn upper_bound_examples() {
        for (inst, cap) in [
            (Instance::from_dims(10, &[(10, 5)]), 10),
            (Instance::from_dims(10, &[(5, 4); 4]), 16),
            (Instance::from_dims(2, &[(1, 3), (1, 1)]), 6),
        ] {
            let (p, h) = upper_bound_pack(&inst).unwrap();
            assert!(validate_packing(&inst, &p, false).is_valid());
            assert!(p.height <= cap && h <= cap);
        }
        let (p, _) = upper_bound_pack(&Instance::from_dims(10, &[(10, 5)])).unwrap();
        assert_eq!(p.height, 5);
    }
}
