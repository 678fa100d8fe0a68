//! Rearranging a partitioned packing into boxes of uniform contents.
//!
//! Each tall-and-vertical box is reordered according to its height. Boxes
//! taller than `3T/4` grow by `⌈T/4⌉`; whatever sits above them moves up by the
//! same amount, together with every box it shares an item with. Slices taken out
//! of medium boxes go into extra boxes placed in free space below the height
//! limit.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    check_disjoint, check_partition, reorder_medium_box, reorder_small_box, reorder_tall_box, slice_multiset,
    BoxArea, BoxContents, BoxKind, BoxPartition, ContainerSet, ExtraSlices, Slice, TallItem,
};
use crate::classify::{classify_dims, ItemClass, Params};
use crate::model::{Instance, Packing, Rect};
use crate::rational::{floor_i64, q, qi};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureStats {
    /// Boxes rearranged by one of the box reorderings.
    pub reordered: usize,
    /// Boxes whose reordering failed; their items keep their places and get a box each.
    pub kept: usize,
    /// Boxes moved up to make room for an extension.
    pub shifted: usize,
    pub extra_boxes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredPacking {
    pub strip_width: i64,
    pub t: i64,
    /// Top of the highest box.
    pub height: i64,
    pub boxes: Vec<BoxArea>,
    /// Large, medium-vertical and horizontal items, whole.
    pub fixed: Vec<(String, Rect)>,
    pub tall: Vec<TallItem>,
    /// Vertical items cut into unit columns.
    pub slices: Vec<Slice>,
    /// Small and medium items; they are placed later and are not part of the structure.
    pub left_out: Vec<String>,
    pub stats: StructureStats,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("partition is invalid: {0}")]
    InvalidPartition(String),
    #[error("packing reaches {top}, above T = {t}")]
    TooHigh { top: i64, t: i64 },
    #[error("an extension collides with a box that was already moved")]
    ExtensionBlocked,
    #[error("no free gap of {width}x{height} for an extra box")]
    GapNotFound { width: i64, height: i64 },
    #[error("result failed verification: {0}")]
    Inconsistent(String),
}

struct Work {
    rect: Rect,
    kind: BoxKind,
    ext: i64,
    /// Items that tie this box's vertical position to others.
    members: BTreeSet<String>,
    tall: Vec<TallItem>,
    slices: Vec<Slice>,
    containers: Vec<BoxArea>,
    extra: Option<ExtraSlices>,
}

/// `⌊(5/4 + 5ε)·T⌋`, the height the structure must stay within.
pub fn structure_limit(p: &Params) -> i64 {
    floor_i64(&((q(5, 4) + qi(5) * &p.epsilon) * qi(p.t)))
}

pub fn build_structure(
    instance: &Instance,
    packing: &Packing,
    p: &Params,
    part: &BoxPartition,
) -> Result<StructuredPacking, StructureError> {
    let report = check_partition(instance, packing, p, part);
    if let Some(v) = report.violations.first() {
        return Err(StructureError::InvalidPartition(format!("{v:?}")));
    }
    let big_h = p.t;
    let rects = packing.rects(instance);
    let top = rects.iter().map(|(_, r)| r.top()).max().unwrap_or(0);
    if top > big_h {
        return Err(StructureError::TooHigh { top, t: big_h });
    }
    let delta = (big_h + 3) / 4;
    let classes: Vec<(String, Rect, ItemClass)> = rects
        .into_iter()
        .map(|(id, r)| {
            let c = classify_dims(r.w, r.h, p, instance.strip_width);
            (id, r, c)
        })
        .collect();
    let mut stats = StructureStats::default();
    let mut work = Vec::new();
    for b in &part.boxes {
        let r = b.rect;
        let inside: Vec<&(String, Rect, ItemClass)> = classes.iter().filter(|(_, ir, _)| ir.overlaps(&r)).collect();
        let mut w = Work {
            rect: r,
            kind: b.kind,
            ext: 0,
            members: BTreeSet::new(),
            tall: Vec::new(),
            slices: Vec::new(),
            containers: Vec::new(),
            extra: None,
        };
        if b.kind != BoxKind::TallVertical {
            for (id, _, c) in &inside {
                if !matches!(c, ItemClass::Small | ItemClass::Medium) {
                    w.members.insert(id.clone());
                }
            }
            work.push(w);
            continue;
        }
        let mut contents = BoxContents { width: r.w, height: r.h, tall: Vec::new(), slices: Vec::new() };
        for (id, ir, c) in &inside {
            match c {
                ItemClass::Tall => {
                    w.members.insert(id.clone());
                    contents.tall.push(TallItem::new(id.clone(), ir.x - r.x, ir.y - r.y, ir.w, ir.h));
                }
                ItemClass::Vertical => {
                    for x in ir.x.max(r.x)..ir.right().min(r.right()) {
                        contents.slices.push(Slice::new(id.clone(), x - r.x, ir.y - r.y, ir.h));
                    }
                }
                _ => {}
            }
        }
        let done = if 2 * r.h <= big_h {
            reorder_small_box(&contents, big_h).map(|o| (o, None, 0))
        } else if 4 * r.h <= 3 * big_h {
            reorder_medium_box(&contents, big_h).map(|m| (m.reorder, Some(m.extra), 0))
        } else {
            reorder_tall_box(&contents, big_h).map(|o| (o, None, delta))
        };
        match done {
            Ok((o, extra, ext)) => {
                stats.reordered += 1;
                w.ext = ext;
                w.tall = o.tall;
                w.slices = o.slices;
                w.containers = translate(&o.containers, r.x, r.y);
                w.extra = extra.filter(|e| !e.slices.is_empty());
            }
            Err(_) => {
                stats.kept += 1;
                w.containers = kept_containers(&contents, r);
                w.tall = contents.tall;
                w.slices = contents.slices;
            }
        }
        for t in &mut w.tall {
            t.x += r.x;
            t.y += r.y;
        }
        for s in &mut w.slices {
            s.x += r.x;
            s.y += r.y;
        }
        work.push(w);
    }

    let shift = settle_shifts(&work, delta)?;
    stats.shifted = shift.iter().filter(|&&s| s).count();
    let dy = |i: usize| if shift[i] { delta } else { 0 };

    let limit = structure_limit(p);
    let mut occupied: Vec<Rect> = work
        .iter()
        .enumerate()
        .map(|(i, w)| Rect::new(w.rect.x, w.rect.y + dy(i), w.rect.w, w.rect.h + w.ext))
        .collect();
    let mut boxes = Vec::new();
    let mut tall: BTreeMap<String, TallItem> = BTreeMap::new();
    let mut slices = Vec::new();
    let mut fixed = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, w) in work.iter().enumerate() {
        let d = dy(i);
        match w.kind {
            BoxKind::TallVertical => {
                for c in &w.containers {
                    boxes.push(BoxArea { rect: Rect { y: c.rect.y + d, ..c.rect }, ..c.clone() });
                }
            }
            k => boxes.push(BoxArea::new(k, Rect { y: w.rect.y + d, ..w.rect })),
        }
        for t in &w.tall {
            tall.entry(t.id.clone()).or_insert(TallItem { y: t.y + d, ..t.clone() });
        }
        slices.extend(w.slices.iter().map(|s| Slice { y: s.y + d, ..s.clone() }));
        if w.kind != BoxKind::TallVertical {
            for (id, r, c) in &classes {
                if w.members.contains(id) && !matches!(c, ItemClass::Tall | ItemClass::Vertical) && seen.insert(id.clone()) {
                    fixed.push((id.clone(), Rect { y: r.y + d, ..*r }));
                }
            }
        }
    }
    for w in &work {
        let Some(e) = &w.extra else { continue };
        let spot = find_gap(&occupied, instance.strip_width, limit, e.width, e.height)
            .ok_or(StructureError::GapNotFound { width: e.width, height: e.height })?;
        occupied.push(spot);
        boxes.push(BoxArea::new(BoxKind::ExtraVertical, spot));
        slices.extend(e.slices.iter().map(|s| Slice { x: s.x + spot.x, y: s.y + spot.y, ..s.clone() }));
        stats.extra_boxes += 1;
    }
    let left_out = classes
        .iter()
        .filter(|(_, _, c)| matches!(c, ItemClass::Small | ItemClass::Medium))
        .map(|(id, _, _)| id.clone())
        .collect();
    let height = boxes.iter().map(|b| b.rect.top()).max().unwrap_or(0);
    let sp = StructuredPacking {
        strip_width: instance.strip_width,
        t: big_h,
        height,
        boxes,
        fixed,
        tall: tall.into_values().collect(),
        slices,
        left_out,
        stats,
    };
    sp.verify(instance, packing, p).map_err(StructureError::Inconsistent)?;
    Ok(sp)
}

fn translate(c: &ContainerSet, x: i64, y: i64) -> Vec<BoxArea> {
    c.all().map(|b| BoxArea { rect: Rect { x: b.rect.x + x, y: b.rect.y + y, ..b.rect }, ..b.clone() }).collect()
}

/// One box per tall item and per vertical item, clipped to the box.
fn kept_containers(b: &BoxContents, r: Rect) -> Vec<BoxArea> {
    let mut out = Vec::new();
    for t in &b.tall {
        let x0 = t.x.max(0);
        let x1 = (t.x + t.width).min(b.width);
        out.push(BoxArea::uniform(BoxKind::TallSub, Rect::new(r.x + x0, r.y + t.y, x1 - x0, t.height), t.height));
    }
    let mut by_item: BTreeMap<(&str, i64, i64), (i64, i64)> = BTreeMap::new();
    for s in &b.slices {
        let e = by_item.entry((&s.origin, s.y, s.height)).or_insert((s.x, s.x));
        e.0 = e.0.min(s.x);
        e.1 = e.1.max(s.x);
    }
    for ((_, y, h), (x0, x1)) in by_item {
        out.push(BoxArea::uniform(BoxKind::VerticalSub, Rect::new(r.x + x0, r.y + y, x1 - x0 + 1, h), h));
    }
    out
}

/// Decides which boxes move up by `delta`.
///
/// A box moves if, where it is, it would meet an extension or a moved box, or
/// if it shares an item with a moved box. Moving a box twice is never needed
/// for a valid input; if it would be, the extension is blocked.
fn settle_shifts(work: &[Work], delta: i64) -> Result<Vec<bool>, StructureError> {
    let n = work.len();
    let mut shift = vec![false; n];
    let area = |i: usize, s: &[bool]| {
        let w = &work[i];
        Rect::new(w.rect.x, w.rect.y + if s[i] { delta } else { 0 }, w.rect.w, w.rect.h + w.ext)
    };
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || shift[j] {
                    continue;
                }
                let linked = shift[i] && !work[i].members.is_disjoint(&work[j].members);
                let (ai, aj) = (area(i, &shift), area(j, &shift));
                let blocks = ai.overlaps(&aj) && work[j].rect.y >= work[i].rect.top();
                if linked || blocks {
                    shift[j] = true;
                    changed = true;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if area(i, &shift).overlaps(&area(j, &shift)) && shift[i] == shift[j] && (shift[i] || changed)
                    && shift[i] {
                        return Err(StructureError::ExtensionBlocked);
                    }
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if area(i, &shift).overlaps(&area(j, &shift)) {
                return Err(StructureError::ExtensionBlocked);
            }
        }
    }
    Ok(shift)
}

/// Lowest, then leftmost, free `w × h` spot inside `[0, W) × [0, limit)`.
fn find_gap(occupied: &[Rect], width: i64, limit: i64, w: i64, h: i64) -> Option<Rect> {
    let xs: BTreeSet<i64> = std::iter::once(0).chain(occupied.iter().map(|r| r.right())).collect();
    let ys: BTreeSet<i64> = std::iter::once(0).chain(occupied.iter().map(|r| r.top())).collect();
    for &y in &ys {
        for &x in &xs {
            let c = Rect::new(x, y, w, h);
            if c.right() <= width && c.top() <= limit && occupied.iter().all(|o| !o.overlaps(&c)) {
                return Some(c);
            }
        }
    }
    None
}

impl StructuredPacking {
    /// Checks that nothing overlaps, every item is accounted for, and every
    /// tall item and slice lies in a box made for it.
    pub fn verify(&self, instance: &Instance, packing: &Packing, p: &Params) -> Result<(), String> {
        let mut solid = self.tall.clone();
        solid.extend(self.fixed.iter().map(|(id, r)| TallItem::new(id.clone(), r.x, r.y, r.w, r.h)));
        let limit = self.height.max(solid.iter().map(|t| t.y + t.height).max().unwrap_or(0));
        check_disjoint(self.strip_width, limit, &solid, &self.slices).map_err(|e| e.to_string())?;
        let mut want_tall = BTreeMap::new();
        let mut want_fixed = BTreeSet::new();
        let mut want_slices = Vec::new();
        for (id, r) in packing.rects(instance) {
            match classify_dims(r.w, r.h, p, instance.strip_width) {
                ItemClass::Tall => {
                    want_tall.insert(id, (r.w, r.h));
                }
                ItemClass::Vertical => want_slices.extend((r.x..r.right()).map(|x| Slice::new(id.clone(), x, r.y, r.h))),
                ItemClass::Small | ItemClass::Medium => {}
                _ => {
                    want_fixed.insert(id);
                }
            }
        }
        let got_tall: BTreeMap<String, (i64, i64)> =
            self.tall.iter().map(|t| (t.id.clone(), (t.width, t.height))).collect();
        if got_tall != want_tall {
            return Err("tall items differ from the input".into());
        }
        let got_fixed: BTreeSet<String> = self.fixed.iter().map(|(id, _)| id.clone()).collect();
        if got_fixed != want_fixed {
            return Err("large and horizontal items differ from the input".into());
        }
        if slice_multiset(&self.slices) != slice_multiset(&want_slices) {
            return Err("slices were not conserved".into());
        }
        let covered = |r: &Rect, ok: &dyn Fn(&BoxArea) -> bool| -> bool {
            let area: i64 = self
                .boxes
                .iter()
                .filter(|b| ok(b))
                .map(|b| {
                    let w = b.rect.right().min(r.right()) - b.rect.x.max(r.x);
                    let h = b.rect.top().min(r.top()) - b.rect.y.max(r.y);
                    if w > 0 && h > 0 {
                        w * h
                    } else {
                        0
                    }
                })
                .sum();
            area == r.area()
        };
        for t in &self.tall {
            let r = Rect::new(t.x, t.y, t.width, t.height);
            if !covered(&r, &|b| b.kind == BoxKind::TallSub && b.uniform_height == Some(t.height)) {
                return Err(format!("tall item {} is not inside boxes of its height", t.id));
            }
        }
        for s in &self.slices {
            let r = Rect::new(s.x, s.y, 1, s.height);
            if !covered(&r, &|b| matches!(b.kind, BoxKind::VerticalSub | BoxKind::ExtraVertical)) {
                return Err(format!("a slice of {} lies outside the vertical boxes", s.origin));
            }
        }
        for (i, a) in self.boxes.iter().enumerate() {
            if self.boxes[i + 1..].iter().any(|b| a.rect.overlaps(&b.rect)) {
                return Err(format!("box {i} overlaps another box"));
            }
        }
        Ok(())
    }

    /// The boxes in the hint format consumed by the structured solver.
    pub fn hint(&self) -> Vec<BoxArea> {
        self.boxes.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::FSpec;
    use crate::model::Placement;
    use crate::restructure::partition_into_boxes;

    fn params() -> Params {
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
    fn single_box_packings() {
        let p = params();
        let (inst, pk) = packed(64, &[(0, 0, 64, 30)]);
        let part = partition_into_boxes(&inst, &pk, &p, 64).unwrap();
        let s = build_structure(&inst, &pk, &p, &part).unwrap();
        assert_eq!(s.boxes.len(), 1);
        assert_eq!(s.height, 30);

        let (inst, pk) = packed(64, &[(0, 0, 2, 60), (2, 0, 3, 60)]);
        let part = partition_into_boxes(&inst, &pk, &p, 64).unwrap();
        let s = build_structure(&inst, &pk, &p, &part).unwrap();
        assert!(s.height <= structure_limit(&p));
        assert_eq!(s.stats.reordered, 1);
    }

    #[test]
    fn wide_tall_layer_with_items_above() {
        // Tall items in the middle of the strip, a large item on the side and
        // vertical items stacked over the tall ones.
        let p = params();
        let mut items = vec![(0, 0, 20, 40)];
        for k in 0..10 {
            items.push((20 + 3 * k, 0, 3, 34 + (k % 3) * 8));
        }
        for k in 0..12 {
            items.push((50 + k, 0, 1, 4 + (k % 4) * 4));
        }
        let (inst, pk) = packed(64, &items);
        let part = partition_into_boxes(&inst, &pk, &p, 64).unwrap();
        let s = build_structure(&inst, &pk, &p, &part).unwrap();
        assert!(s.height <= structure_limit(&p), "{}", s.height);
        s.verify(&inst, &pk, &p).unwrap();
    }

    #[test]
    fn random_grid_packings() {
        let p = params();
        let mut built = 0;
        for seed in 0..60 {
            let c = crate::gen::grid_case(seed, 64, 16, 4, 14);
            // Random packings are often not guillotine-separable by class.
            let Ok(part) = partition_into_boxes(&c.instance, &c.packing, &p, 256) else { continue };
            match build_structure(&c.instance, &c.packing, &p, &part) {
                Ok(s) => {
                    built += 1;
                    assert!(s.height <= structure_limit(&p), "seed {seed}: {}", s.height);
                }
                Err(e) => panic!("seed {seed}: {e}"),
            }
        }
        assert!(built >= 20, "{built}");
    }
}
