//! Cutting a packing into typed boxes, and the checker for such partitions.
//!
//! The checker is the authority. The construction is a guillotine sweep: a
//! region is split along a line that crosses no item, or failing that along a
//! vertical line crossing only tall and vertical items or a horizontal grid
//! line crossing only horizontal items, until every region holds one class.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use super::{BoxArea, BoxKind};
use crate::classify::{classify_dims, ItemClass, Params};
use crate::model::{validate_packing, Instance, Packing, Rect};
use crate::rational::{qi, Q};

/// Boxes covering `[0, W) × [0, height)`, with horizontal borders on multiples of `pitch`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxPartition {
    pub strip_width: i64,
    pub height: i64,
    /// `εδT`; may be fractional, in which case only its integral multiples are usable.
    pub pitch: Q,
    pub boxes: Vec<BoxArea>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    Overlap(usize, usize),
    OutOfRegion(usize),
    OffGrid(usize),
    /// An item of a class the box may not hold.
    WrongKind { item: String, box_index: usize },
    /// Parts of the item lie outside every box of its kind.
    NotCovered(String),
    /// A large-item box that does not hold exactly one large or medium-vertical item.
    LargeCount { box_index: usize, count: usize },
    /// A large or medium-vertical item not inside its box.
    LargeCut(String),
    /// A horizontal item crossing a vertical border of a horizontal box.
    CrossesVertical { item: String, box_index: usize },
    /// A tall or vertical item crossing a horizontal border of a tall box.
    CrossesHorizontal { item: String, box_index: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartitionReport {
    pub violations: Vec<PartitionViolation>,
}

impl PartitionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("packing is invalid: {0}")]
    InvalidPacking(String),
    #[error("no partition found: {0}")]
    ConstructionFailed(String),
    #[error("{boxes} boxes exceed the cap of {cap}")]
    CapExceeded { boxes: usize, cap: usize },
}

fn class_kind(c: ItemClass) -> Option<BoxKind> {
    match c {
        ItemClass::Large | ItemClass::MediumVertical => Some(BoxKind::LargeItem),
        ItemClass::Horizontal => Some(BoxKind::Horizontal),
        ItemClass::Tall | ItemClass::Vertical => Some(BoxKind::TallVertical),
        ItemClass::Small | ItemClass::Medium => None,
    }
}

/// The box kinds an item of kind `k` may sit in.
fn hosts(k: BoxKind, b: BoxKind) -> bool {
    match k {
        BoxKind::TallVertical => matches!(b, BoxKind::TallVertical | BoxKind::TallSub | BoxKind::VerticalSub),
        _ => k == b,
    }
}

/// Integer step of the usable grid lines: the numerator of the reduced pitch.
pub fn grid_step(pitch: &Q) -> i64 {
    pitch.numer().to_i64().unwrap_or(1).max(1)
}

fn on_grid(y: i64, pitch: &Q) -> bool {
    (qi(y) / pitch).is_integer()
}

struct Classified {
    id: String,
    rect: Rect,
    kind: Option<BoxKind>,
}

fn classified(instance: &Instance, packing: &Packing, p: &Params) -> Vec<Classified> {
    packing
        .rects(instance)
        .into_iter()
        .map(|(id, r)| Classified { id, rect: r, kind: class_kind(classify_dims(r.w, r.h, p, instance.strip_width)) })
        .collect()
}

fn inter(a: &Rect, b: &Rect) -> i64 {
    let w = a.right().min(b.right()) - a.x.max(b.x);
    let h = a.top().min(b.top()) - a.y.max(b.y);
    if w > 0 && h > 0 {
        w * h
    } else {
        0
    }
}

/// Checks the four partition conditions plus disjointness and grid alignment.
/// Small and medium items are ignored.
pub fn check_partition(instance: &Instance, packing: &Packing, p: &Params, part: &BoxPartition) -> PartitionReport {
    let mut v = Vec::new();
    let region = Rect::new(0, 0, part.strip_width, part.height);
    for (i, b) in part.boxes.iter().enumerate() {
        if b.rect.w <= 0 || b.rect.h <= 0 || !region.contains(&b.rect) {
            v.push(PartitionViolation::OutOfRegion(i));
        }
        if !on_grid(b.rect.y, &part.pitch) || !on_grid(b.rect.top(), &part.pitch) {
            v.push(PartitionViolation::OffGrid(i));
        }
        for (j, c) in part.boxes.iter().enumerate().skip(i + 1) {
            if b.rect.overlaps(&c.rect) {
                v.push(PartitionViolation::Overlap(i, j));
            }
        }
    }
    let items = classified(instance, packing, p);
    let mut large_count = vec![0usize; part.boxes.len()];
    for it in &items {
        let Some(kind) = it.kind else { continue };
        let mut covered = 0;
        for (i, b) in part.boxes.iter().enumerate() {
            if !b.rect.overlaps(&it.rect) {
                continue;
            }
            if !hosts(kind, b.kind) {
                v.push(PartitionViolation::WrongKind { item: it.id.clone(), box_index: i });
                continue;
            }
            covered += inter(&b.rect, &it.rect);
            match kind {
                BoxKind::LargeItem => {
                    large_count[i] += 1;
                    if !b.rect.contains(&it.rect) {
                        v.push(PartitionViolation::LargeCut(it.id.clone()));
                    }
                }
                BoxKind::Horizontal if it.rect.x < b.rect.x || it.rect.right() > b.rect.right() => {
                    v.push(PartitionViolation::CrossesVertical { item: it.id.clone(), box_index: i });
                }
                BoxKind::TallVertical if it.rect.y < b.rect.y || it.rect.top() > b.rect.top() => {
                    v.push(PartitionViolation::CrossesHorizontal { item: it.id.clone(), box_index: i });
                }
                _ => {}
            }
        }
        if covered != it.rect.area() {
            v.push(PartitionViolation::NotCovered(it.id.clone()));
        }
    }
    for (i, b) in part.boxes.iter().enumerate() {
        if b.kind == BoxKind::LargeItem && large_count[i] != 1 {
            v.push(PartitionViolation::LargeCount { box_index: i, count: large_count[i] });
        }
    }
    PartitionReport { violations: v }
}

/// Best-effort construction of a partition whose boxes number at most `cap`.
pub fn partition_into_boxes(
    instance: &Instance,
    packing: &Packing,
    p: &Params,
    cap: usize,
) -> Result<BoxPartition, PartitionError> {
    let report = validate_packing(instance, packing, true);
    if let Some(v) = report.violations.first() {
        return Err(PartitionError::InvalidPacking(v.to_string()));
    }
    let pitch = &p.epsilon * &p.delta * qi(p.t);
    let g = grid_step(&pitch);
    let top = packing.rects(instance).iter().map(|(_, r)| r.top()).max().unwrap_or(0);
    let height = ((top + g - 1) / g).max(1) * g;
    let items: Vec<Classified> = classified(instance, packing, p).into_iter().filter(|c| c.kind.is_some()).collect();
    let mut boxes = Vec::new();
    let mut stack = vec![Rect::new(0, 0, instance.strip_width, height)];
    while let Some(r) = stack.pop() {
        let inside: Vec<&Classified> = items.iter().filter(|c| c.rect.overlaps(&r)).collect();
        if let Some(kind) = pure(&inside) {
            boxes.push(BoxArea::new(kind, r));
            continue;
        }
        let Some((a, b)) = split(&r, &inside, g) else {
            return Err(PartitionError::ConstructionFailed(format!(
                "region {}x{} at ({}, {}) mixes classes and has no admissible cut",
                r.w, r.h, r.x, r.y
            )));
        };
        stack.push(b);
        stack.push(a);
    }
    let boxes = merge(boxes);
    if boxes.len() > cap {
        return Err(PartitionError::CapExceeded { boxes: boxes.len(), cap });
    }
    let part = BoxPartition { strip_width: instance.strip_width, height, pitch, boxes };
    let report = check_partition(instance, packing, p, &part);
    if !report.is_valid() {
        return Err(PartitionError::ConstructionFailed(format!("{:?}", report.violations[0])));
    }
    Ok(part)
}

fn pure(inside: &[&Classified]) -> Option<BoxKind> {
    let kinds: BTreeSet<BoxKind> = inside.iter().filter_map(|c| c.kind).collect();
    match kinds.len() {
        0 => Some(BoxKind::SmallEmpty),
        1 => {
            let k = *kinds.iter().next().unwrap();
            (k != BoxKind::LargeItem || inside.len() == 1).then_some(k)
        }
        _ => None,
    }
}

fn split(r: &Rect, inside: &[&Classified], g: i64) -> Option<(Rect, Rect)> {
    let ys: BTreeSet<i64> = inside
        .iter()
        .flat_map(|c| [c.rect.y, c.rect.top()])
        .map(|y| y.div_euclid(g) * g)
        .chain(inside.iter().map(|c| (c.rect.top() + g - 1).div_euclid(g) * g))
        .filter(|&y| y > r.y && y < r.top())
        .collect();
    let xs: BTreeSet<i64> =
        inside.iter().flat_map(|c| [c.rect.x, c.rect.right()]).filter(|&x| x > r.x && x < r.right()).collect();
    let crossing_y = |y: i64| inside.iter().filter(move |c| c.rect.y < y && y < c.rect.top());
    let crossing_x = |x: i64| inside.iter().filter(move |c| c.rect.x < x && x < c.rect.right());
    let cut_y = |y: i64| (Rect::new(r.x, r.y, r.w, y - r.y), Rect::new(r.x, y, r.w, r.top() - y));
    let cut_x = |x: i64| (Rect::new(r.x, r.y, x - r.x, r.h), Rect::new(x, r.y, r.right() - x, r.h));
    if let Some(&y) = ys.iter().find(|&&y| crossing_y(y).next().is_none()) {
        return Some(cut_y(y));
    }
    if let Some(&x) = xs.iter().find(|&&x| crossing_x(x).next().is_none()) {
        return Some(cut_x(x));
    }
    if let Some(&x) = xs.iter().find(|&&x| crossing_x(x).all(|c| c.kind == Some(BoxKind::TallVertical))) {
        return Some(cut_x(x));
    }
    ys.iter()
        .find(|&&y| crossing_y(y).all(|c| c.kind == Some(BoxKind::Horizontal)))
        .map(|&y| cut_y(y))
}

/// Joins boxes of the same kind that share a full side. Large-item boxes are
/// left alone since each must keep exactly one item.
fn merge(mut boxes: Vec<BoxArea>) -> Vec<BoxArea> {
    loop {
        let mut joined = None;
        'outer: for i in 0..boxes.len() {
            for j in 0..boxes.len() {
                let (a, b) = (&boxes[i], &boxes[j]);
                if i == j || a.kind != b.kind || a.kind == BoxKind::LargeItem {
                    continue;
                }
                let (ra, rb) = (a.rect, b.rect);
                if ra.right() == rb.x && ra.y == rb.y && ra.h == rb.h {
                    joined = Some((i, j, Rect::new(ra.x, ra.y, ra.w + rb.w, ra.h)));
                    break 'outer;
                }
                if ra.top() == rb.y && ra.x == rb.x && ra.w == rb.w {
                    joined = Some((i, j, Rect::new(ra.x, ra.y, ra.w, ra.h + rb.h)));
                    break 'outer;
                }
            }
        }
        let Some((i, j, r)) = joined else { break };
        boxes[i].rect = r;
        boxes.remove(j);
    }
    boxes.sort_by_key(|b| (b.rect.y, b.rect.x));
    boxes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::FSpec;
    use crate::model::Placement;
    use crate::rational::q;

    fn params() -> Params {
        // εδT = 1/4 · 1/16 · 64 = 1.
        Params::new(q(1, 4), q(1, 16), q(1, 64), 64, FSpec::LINEAR).unwrap()
    }

    fn packed(w: i64, items: &[(i64, i64, i64, i64)]) -> (Instance, Packing) {
        let dims: Vec<(i64, i64)> = items.iter().map(|&(_, _, w, h)| (w, h)).collect();
        let inst = Instance::from_dims(w, &dims);
        let pl = items.iter().enumerate().map(|(k, &(x, y, _, _))| Placement::new(k.to_string(), x, y)).collect();
        let p = Packing::new(&inst, pl);
        (inst, p)
    }

    #[test]
    fn single_tall_box() {
        let (inst, p) = packed(64, &[(0, 0, 2, 40), (2, 0, 3, 40)]);
        let part = partition_into_boxes(&inst, &p, &params(), 16).unwrap();
        let tv: Vec<_> = part.boxes.iter().filter(|b| b.kind == BoxKind::TallVertical).collect();
        assert_eq!(tv.len(), 1);
        assert!(check_partition(&inst, &p, &params(), &part).is_valid());
    }

    #[test]
    fn single_large_item() {
        let (inst, p) = packed(64, &[(0, 0, 64, 30)]);
        let part = partition_into_boxes(&inst, &p, &params(), 16).unwrap();
        assert_eq!(part.boxes.len(), 1);
        assert_eq!(part.boxes[0].kind, BoxKind::LargeItem);
    }

    #[test]
    fn checker_rejects_tall_item_in_horizontal_box() {
        let (inst, p) = packed(64, &[(0, 0, 2, 40)]);
        let part = BoxPartition {
            strip_width: 64,
            height: 40,
            pitch: qi(1),
            boxes: vec![BoxArea::new(BoxKind::Horizontal, Rect::new(0, 0, 64, 40))],
        };
        let r = check_partition(&inst, &p, &params(), &part);
        assert!(r.violations.contains(&PartitionViolation::WrongKind { item: "0".into(), box_index: 0 }));
    }

    #[test]
    fn checker_rejects_off_grid_border() {
        let (inst, p) = packed(64, &[(0, 0, 64, 30)]);
        let part = BoxPartition {
            strip_width: 64,
            height: 32,
            pitch: qi(4),
            boxes: vec![BoxArea::new(BoxKind::LargeItem, Rect::new(0, 0, 64, 30))],
        };
        assert!(check_partition(&inst, &p, &params(), &part).violations.contains(&PartitionViolation::OffGrid(0)));
    }

    #[test]
    fn mixed_layers_partition() {
        // A horizontal item on top of two tall items and a large item beside them.
        let (inst, p) = packed(64, &[(0, 0, 3, 40), (3, 0, 3, 40), (0, 40, 30, 1), (10, 0, 40, 20)]);
        let part = partition_into_boxes(&inst, &p, &params(), 16).unwrap();
        assert!(check_partition(&inst, &p, &params(), &part).is_valid());
        let kinds: BTreeSet<BoxKind> = part.boxes.iter().map(|b| b.kind).collect();
        assert!(kinds.contains(&BoxKind::LargeItem) && kinds.contains(&BoxKind::Horizontal));
    }
}
