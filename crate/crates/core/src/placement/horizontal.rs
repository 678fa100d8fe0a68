//! Placement of horizontal items: linear grouping of the width-sorted stack, then a
//! width-configuration LP per box.

use std::collections::VecDeque;

use super::config::{solve_config_lp, ConfigBox, ConfigSolution, LpError, DEFAULT_UNIVERSE_CAP};
use super::PlacedItem;
use crate::baselines::nfdh;
use crate::model::{Instance, Item, Rect};
use crate::rational::{ceil_i64, floor_i64, qi, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalPlacement {
    /// Items placed inside the boxes, in global coordinates.
    pub placements: Vec<PlacedItem>,
    /// Items packed into the box of full strip width that goes on top of everything;
    /// coordinates are relative to that box.
    pub top_items: Vec<PlacedItem>,
    pub top_height: i64,
    pub empty_boxes: Vec<Rect>,
    pub solution: ConfigSolution,
    /// Group height `h_G`.
    pub group_height: i64,
    /// Distinct rounded widths fed to the LP.
    pub widths: Vec<i64>,
    /// Area of the rounded items that went through the LP.
    pub rounded_area: i64,
}

/// Result of cutting the width-sorted stack into groups of height `h_G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouping {
    pub group_height: i64,
    /// `(item index, rounded width)` for items that go through the LP.
    pub rounded: Vec<(usize, i64)>,
    /// The widest group and every item straddling a group border.
    pub diverted: Vec<usize>,
}

/// Sorts by width (descending), stacks, and cuts the stack every `h_G = ⌈εδ²·h(𝓗)⌉`.
///
/// Group 0 and the items straddling a cut are diverted. Each other group is rounded
/// up to the width found at its lower cut, which is at most the width of every item
/// of the group below it.
pub fn group_items(items: &[Item], epsilon: &Q, delta: &Q) -> Grouping {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        (items[b].width, items[b].height, &items[a].id).cmp(&(items[a].width, items[a].height, &items[b].id))
    });
    let total: i64 = items.iter().map(|i| i.height).sum();
    if total == 0 {
        return Grouping { group_height: 0, rounded: Vec::new(), diverted: Vec::new() };
    }
    let hg = ceil_i64(&(epsilon * delta * delta * qi(total))).max(1);
    let mut starts = Vec::with_capacity(order.len());
    let mut s = 0;
    for &k in &order {
        starts.push(s);
        s += items[k].height;
    }
    // Width of the item covering stack height `c`.
    let width_at = |c: i64| -> i64 {
        let pos = starts.partition_point(|&st| st <= c) - 1;
        items[order[pos]].width
    };
    let mut rounded = Vec::new();
    let mut diverted = Vec::new();
    for (pos, &k) in order.iter().enumerate() {
        let (lo, hi) = (starts[pos], starts[pos] + items[k].height);
        let g = lo / hg;
        let straddles = hi > (g + 1) * hg;
        if g == 0 || straddles {
            diverted.push(k);
        } else {
            rounded.push((k, width_at(g * hg)));
        }
    }
    Grouping { group_height: hg, rounded, diverted }
}

pub fn place_horizontal(
    boxes: &[Rect],
    items: &[Item],
    epsilon: &Q,
    delta: &Q,
    strip_width: i64,
) -> Result<HorizontalPlacement, LpError> {
    let grouping = group_items(items, epsilon, delta);
    let mut widths: Vec<i64> = grouping.rounded.iter().map(|&(_, w)| w).collect();
    widths.sort_unstable_by(|a, b| b.cmp(a));
    widths.dedup();
    let demands: Vec<Q> = widths
        .iter()
        .map(|&w| qi(grouping.rounded.iter().filter(|r| r.1 == w).map(|r| items[r.0].height).sum()))
        .collect();
    let rounded_area: i64 = grouping.rounded.iter().map(|&(k, w)| w * items[k].height).sum();
    let cboxes: Vec<ConfigBox> = boxes.iter().map(|b| ConfigBox { capacity: b.w, extent: b.h }).collect();
    let solution = solve_config_lp(&cboxes, &widths, &demands, DEFAULT_UNIVERSE_CAP)?;

    let mut queues: Vec<VecDeque<usize>> = widths
        .iter()
        .map(|&w| grouping.rounded.iter().filter(|r| r.1 == w).map(|r| r.0).collect())
        .collect();
    let mut y_off = vec![0i64; solution.entries.len()];
    let mut used = vec![0i64; boxes.len()];
    for (k, e) in solution.entries.iter().enumerate() {
        y_off[k] = used[e.box_index];
        used[e.box_index] += floor_i64(&e.extent);
    }
    let mut placements = Vec::new();
    let mut top: Vec<usize> = grouping.diverted.clone();
    for (c, &w) in widths.iter().enumerate() {
        for (k, e) in solution.entries.iter().enumerate() {
            let b = boxes[e.box_index];
            let slot_x: i64 = widths.iter().take(c).zip(&e.config.counts).map(|(&w2, &n)| w2 * n as i64).sum();
            for s in 0..e.config.counts[c] as i64 {
                let mut acc = 0i64;
                while qi(acc) < e.extent {
                    let Some(it) = queues[c].pop_front() else { break };
                    if qi(acc + items[it].height) > e.extent {
                        top.push(it);
                        break;
                    }
                    placements.push(PlacedItem {
                        id: items[it].id.clone(),
                        x: b.x + slot_x + s * w,
                        y: b.y + y_off[k] + acc,
                    });
                    acc += items[it].height;
                }
            }
        }
        debug_assert!(queues[c].is_empty());
    }

    let top_inst = Instance::new(strip_width, top.iter().map(|&k| items[k].clone()).collect());
    let top_pack = nfdh(&top_inst);
    let top_items = top_pack
        .placements
        .iter()
        .map(|p| PlacedItem { id: p.item_id.clone(), x: p.x, y: p.y })
        .collect();

    let mut empty_boxes = Vec::new();
    for (k, e) in solution.entries.iter().enumerate() {
        let b = boxes[e.box_index];
        let h = floor_i64(&e.extent);
        let wc = e.config.total(&widths);
        if h > 0 && b.w > wc {
            empty_boxes.push(Rect::new(b.x + wc, b.y + y_off[k], b.w - wc, h));
        }
    }
    for (bi, b) in boxes.iter().enumerate() {
        if b.h > used[bi] {
            empty_boxes.push(Rect::new(b.x, b.y + used[bi], b.w, b.h - used[bi]));
        }
    }
    Ok(HorizontalPlacement {
        placements,
        top_items,
        top_height: top_pack.height,
        empty_boxes,
        solution,
        group_height: grouping.group_height,
        widths,
        rounded_area,
    })
}
