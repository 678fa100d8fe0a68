//! Integral placement of vertical items into boxes via the height-configuration LP.

use std::collections::VecDeque;

use super::config::{solve_config_lp, ConfigBox, ConfigSolution, LpError, DEFAULT_UNIVERSE_CAP};
use super::{ExtraBox, PlacedItem};
use crate::model::{Item, Rect};
use crate::rational::{floor_i64, qi, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerticalPlacement {
    pub placements: Vec<PlacedItem>,
    /// Boxes for items cut off at configuration borders, not yet positioned.
    pub extra_boxes: Vec<ExtraBox>,
    pub empty_boxes: Vec<Rect>,
    pub solution: ConfigSolution,
    /// Distinct item heights, the LP classes.
    pub classes: Vec<i64>,
}

/// Places vertical items into `boxes`.
///
/// Each box is cut into columns, one per configuration of the LP solution, with
/// the configuration's height slots stacked inside. Items fill a slot left to
/// right until one crosses the slot's right border; that item is set aside.
/// The set-aside items of one configuration are stacked into boxes of height
/// `quarter`, and any item crossing such a box's top gets a box of its own.
pub fn place_vertical(boxes: &[Rect], items: &[Item], quarter: i64) -> Result<VerticalPlacement, LpError> {
    let mut classes: Vec<i64> = items.iter().map(|i| i.height).collect();
    classes.sort_unstable();
    classes.dedup();
    let demands: Vec<Q> = classes
        .iter()
        .map(|&h| qi(items.iter().filter(|i| i.height == h).map(|i| i.width).sum()))
        .collect();
    let cboxes: Vec<ConfigBox> = boxes.iter().map(|b| ConfigBox { capacity: b.h, extent: b.w }).collect();
    let solution = solve_config_lp(&cboxes, &classes, &demands, DEFAULT_UNIVERSE_CAP)?;

    let mut queues: Vec<VecDeque<&Item>> = classes
        .iter()
        .map(|&h| {
            let mut v: Vec<&Item> = items.iter().filter(|i| i.height == h).collect();
            v.sort_by(|a, b| b.width.cmp(&a.width).then_with(|| a.id.cmp(&b.id)));
            v.into_iter().collect()
        })
        .collect();

    // Column origin of every entry, from floored widths.
    let mut x_off = vec![0i64; solution.entries.len()];
    let mut used = vec![0i64; boxes.len()];
    for (k, e) in solution.entries.iter().enumerate() {
        x_off[k] = used[e.box_index];
        used[e.box_index] += floor_i64(&e.extent);
    }

    let mut placements = Vec::new();
    let mut overflow: Vec<Vec<&Item>> = vec![Vec::new(); solution.entries.len()];
    for (c, &h) in classes.iter().enumerate() {
        for (k, e) in solution.entries.iter().enumerate() {
            let b = boxes[e.box_index];
            let mut slot_y = 0;
            for (c2, &h2) in classes.iter().enumerate().take(c) {
                slot_y += e.config.counts[c2] as i64 * h2;
            }
            for s in 0..e.config.counts[c] as i64 {
                let mut acc = 0i64;
                while qi(acc) < e.extent {
                    let Some(it) = queues[c].pop_front() else { break };
                    if qi(acc + it.width) > e.extent {
                        overflow[k].push(it);
                        break;
                    }
                    placements.push(PlacedItem {
                        id: it.id.clone(),
                        x: b.x + x_off[k] + acc,
                        y: b.y + slot_y + s * h,
                    });
                    acc += it.width;
                }
            }
        }
        debug_assert!(queues[c].is_empty(), "slots cover the class demand");
    }

    let mut extra_boxes = Vec::new();
    for list in overflow {
        extra_boxes.extend(stack_overflow(&list, quarter));
    }

    let mut empty_boxes = Vec::new();
    for (k, e) in solution.entries.iter().enumerate() {
        let b = boxes[e.box_index];
        let w = floor_i64(&e.extent);
        let hc = e.config.total(&classes);
        if w > 0 && b.h > hc {
            empty_boxes.push(Rect::new(b.x + x_off[k], b.y + hc, w, b.h - hc));
        }
    }
    for (bi, b) in boxes.iter().enumerate() {
        if b.w > used[bi] {
            empty_boxes.push(Rect::new(b.x + used[bi], b.y, b.w - used[bi], b.h));
        }
    }
    Ok(VerticalPlacement { placements, extra_boxes, empty_boxes, solution, classes })
}

/// Four stacking boxes of height `quarter`; an item crossing a stacking box's top
/// is moved into a box of its own.
fn stack_overflow(items: &[&Item], quarter: i64) -> Vec<ExtraBox> {
    let mut out = Vec::new();
    let mut cur = ExtraBox::default();
    let mut acc = 0;
    for it in items {
        if acc + it.height > quarter {
            out.push(ExtraBox::single(it));
            if !cur.items.is_empty() {
                cur.height = quarter;
                out.push(std::mem::take(&mut cur));
            }
            acc = 0;
            continue;
        }
        cur.items.push(PlacedItem { id: it.id.clone(), x: 0, y: acc });
        cur.width = cur.width.max(it.width);
        acc += it.height;
    }
    if !cur.items.is_empty() {
        cur.height = quarter;
        out.push(cur);
    }
    out
}
