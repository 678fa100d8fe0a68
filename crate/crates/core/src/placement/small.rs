//! Small items into leftover empty boxes, medium items into a box on top.

use super::PlacedItem;
use crate::baselines::{nfdh, shelf_order, steinberg, steinberg_condition, upper_bound_pack};
use crate::model::{total_area, Instance, Item, Rect};
use crate::rational::{ceil_i64, qi, qpow, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallPlacement {
    /// Items placed inside the empty boxes, in global coordinates.
    pub placements: Vec<PlacedItem>,
    /// Items that did not fit, packed into a full-width box; relative coordinates.
    pub overflow_items: Vec<PlacedItem>,
    pub overflow_height: i64,
    /// `⌈2ε⁶T⌉`, the intended overflow box height.
    pub overflow_cap: i64,
    /// False when the leftovers did not meet the packing guarantee at `overflow_cap`
    /// and had to be packed higher.
    pub overflow_within_cap: bool,
    /// Boxes that were kept (wide and tall enough).
    pub used_boxes: Vec<Rect>,
    /// Per used box, the area left unfilled after NFDH closed it.
    pub waste: Vec<i64>,
}

/// Fills each box with NFDH, continuing the global height-sorted list from box to
/// box. Boxes narrower than `μW` or lower than `μT` are ignored.
pub fn place_small(
    empty_boxes: &[Rect],
    items: &[Item],
    mu: &Q,
    epsilon: &Q,
    strip_width: i64,
    t: i64,
) -> SmallPlacement {
    let (mw, mt) = (mu * qi(strip_width), mu * qi(t));
    let used_boxes: Vec<Rect> = empty_boxes
        .iter()
        .copied()
        .filter(|b| qi(b.w) >= mw && qi(b.h) >= mt)
        .collect();
    let order = shelf_order(items);
    let mut next = 0;
    let mut placements = Vec::new();
    let mut waste = Vec::new();
    for b in &used_boxes {
        let mut filled = 0;
        let mut shelf_y = 0;
        let mut shelf_h = 0;
        let mut used_w = 0;
        while next < order.len() {
            let it = &items[order[next]];
            if it.width > b.w {
                break;
            }
            if used_w + it.width > b.w || shelf_h == 0 {
                let y = shelf_y + shelf_h;
                if y + it.height > b.h {
                    break;
                }
                shelf_y = y;
                shelf_h = it.height;
                used_w = 0;
            }
            placements.push(PlacedItem { id: it.id.clone(), x: b.x + used_w, y: b.y + shelf_y });
            used_w += it.width;
            filled += it.area();
            next += 1;
        }
        waste.push(b.area() - filled);
    }
    let rest: Vec<Item> = order[next..].iter().map(|&k| items[k].clone()).collect();
    let overflow_cap = ceil_i64(&(qi(2) * qpow(epsilon, 6) * qi(t)));
    let inst = Instance::new(strip_width, rest);
    let (pack, within) = if inst.items.is_empty() {
        (crate::model::Packing::empty(), true)
    } else if steinberg_condition(&inst.items, strip_width, overflow_cap).is_none() {
        match steinberg(&inst, overflow_cap) {
            Ok(p) => (p, true),
            Err(_) => (nfdh(&inst), false),
        }
    } else {
        let p = upper_bound_pack(&inst).map(|(p, _)| p).unwrap_or_else(|_| nfdh(&inst));
        (p, false)
    };
    SmallPlacement {
        placements,
        overflow_items: pack.placements.iter().map(|p| PlacedItem { id: p.item_id.clone(), x: p.x, y: p.y }).collect(),
        overflow_height: pack.height,
        overflow_cap,
        overflow_within_cap: within,
        used_boxes,
        waste,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MediumPlacement {
    /// Relative to the box's lower-left corner.
    pub placements: Vec<PlacedItem>,
    pub height: i64,
    /// `2·area/W + h_max` as an exact rational.
    pub bound: Q,
}

/// NFDH on the medium items.
pub fn place_medium(items: &[Item], strip_width: i64) -> MediumPlacement {
    let inst = Instance::new(strip_width, items.to_vec());
    let p = nfdh(&inst);
    let bound = qi(2 * total_area(items)) / qi(strip_width) + qi(inst.max_height());
    MediumPlacement {
        placements: p.placements.iter().map(|q| PlacedItem { id: q.item_id.clone(), x: q.x, y: q.y }).collect(),
        height: p.height,
        bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn nothing_to_place() {
        let r = place_small(&[Rect::new(0, 0, 10, 10)], &[], &q(1, 10), &q(1, 2), 10, 10);
        assert!(r.placements.is_empty() && r.overflow_items.is_empty());
        assert_eq!(r.overflow_height, 0);
    }

    #[test]
    fn one_shelf_exactly() {
        let items: Vec<Item> = (0..5).map(|i| Item::new(i.to_string(), 2, 1)).collect();
        let r = place_small(&[Rect::new(3, 7, 10, 1)], &items, &q(1, 10), &q(1, 2), 20, 10);
        assert_eq!(r.placements.len(), 5);
        assert!(r.overflow_items.is_empty());
        assert_eq!(r.waste, vec![0]);
    }

    #[test]
    fn thin_boxes_are_ignored() {
        let items = vec![Item::new("a", 1, 1)];
        let r = place_small(&[Rect::new(0, 0, 1, 50)], &items, &q(1, 10), &q(1, 2), 20, 10);
        assert!(r.used_boxes.is_empty());
        assert_eq!(r.overflow_items.len(), 1);
    }

    #[test]
    fn medium_examples() {
        assert_eq!(place_medium(&[], 10).height, 0);
        assert_eq!(place_medium(&[Item::new("a", 3, 4)], 10).height, 4);
    }
}
