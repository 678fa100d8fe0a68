//! Column machinery shared by the box reorderings.
//!
//! A box is cut into slabs at every vertical border of a tall item. Inside a
//! slab each gap between tall items that holds slices becomes a pseudo item
//! which carries its slices rigidly. Pieces (tall or pseudo) are shifted
//! vertically until each touches one of a few horizontal lines; afterwards every
//! column is a stack of pieces in fixed lanes, and lanes can be permuted across
//! columns.
//!
//! Items crossing the left or right border of the box are unmovable. They and
//! the slices in their extension areas are frozen, and so are the slabs they
//! live in.

use std::collections::{BTreeMap, BTreeSet};

use super::grid::{Slice, TallItem};
use super::{BoxArea, BoxKind, ContainerSet, ReorderError};
use crate::model::Rect;

/// Horizontal reference lines of a box of height `hb` inside a packing of height `big_h`.
///
/// `a` and `top` are `hb ∓ ⌈H/4⌉`; comparisons against the exact quarter lines
/// are done on scaled integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Frame {
    pub big_h: i64,
    pub hb: i64,
    pub delta: i64,
    pub a: i64,
    pub top: i64,
    pub half: i64,
}

impl Frame {
    pub fn new(big_h: i64, hb: i64) -> Frame {
        let delta = (big_h + 3) / 4;
        Frame { big_h, hb, delta, a: hb - delta, top: hb + delta, half: hb / 2 }
    }

    pub fn crosses_quarter(&self, y: i64, h: i64) -> bool {
        4 * y < self.big_h && self.big_h < 4 * (y + h)
    }

    /// Crosses the exact line `hb − H/4`.
    pub fn crosses_a(&self, y: i64, h: i64) -> bool {
        let l = 4 * self.hb - self.big_h;
        4 * y < l && l < 4 * (y + h)
    }

    pub fn crosses_half(&self, y: i64, h: i64) -> bool {
        2 * y < self.hb && self.hb < 2 * (y + h)
    }

    fn between_half_and_a(&self, y: i64, h: i64) -> bool {
        2 * y >= self.hb && 4 * (y + h) <= 4 * self.hb - self.big_h
    }

    fn anchored(&self, y: i64, h: i64) -> bool {
        y == 0 || y == self.a || y + h == self.a || y + h == self.top
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Content {
    pub width: i64,
    pub tall: Vec<TallItem>,
    pub slices: Vec<Slice>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReorderStats {
    /// Columns next to unmovable items that were not part of the free sorting.
    pub frozen_columns: i64,
    /// Frozen zones whose lower band kept its order because no sorted order fit.
    pub unsorted_zones: usize,
    /// Floating pseudo items merged into or moved next to others.
    pub fused: usize,
}

pub(crate) struct Arranged {
    pub tall: Vec<TallItem>,
    pub slices: Vec<Slice>,
    pub containers: ContainerSet,
    pub stats: ReorderStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum What {
    Tall(usize),
    Pseudo(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Lane {
    Bottom,
    ADown,
    AUp,
    TopDown,
    Half,
    Cap,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Frozen,
    Area1,
    Area2,
    Area3,
    Middle,
}

/// Slices of a pseudo item, per column, with their offset from its bottom.
#[derive(Clone, Debug, Default)]
struct Body {
    cols: Vec<Vec<(usize, i64)>>,
    fixed: bool,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    what: What,
    y: i64,
    h: i64,
    lane: Lane,
}

struct Slab {
    x0: i64,
    w: i64,
    pieces: Vec<Piece>,
    class: Class,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Cell {
    pub lane: Lane,
    pub y: i64,
    pub h: i64,
    pub what: What,
    pub off: i64,
}

pub(crate) type Cols = Vec<Vec<Cell>>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Order {
    Desc,
    Asc,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Align {
    Left,
    Right,
}

struct Engine {
    f: Frame,
    width: i64,
    tall: Vec<TallItem>,
    fixed_tall: Vec<bool>,
    slices: Vec<Slice>,
    fixed_slice: Vec<bool>,
    bodies: Vec<Body>,
    slabs: Vec<Slab>,
    stats: ReorderStats,
}

/// Runs shifts, fusion and sorting on `content` for a box of height `f.hb`.
pub(crate) fn arrange(content: &Content, f: Frame) -> Result<Arranged, ReorderError> {
    let fixed_tall: Vec<bool> = content.tall.iter().map(|t| t.x < 0 || t.x + t.width > content.width).collect();
    for (t, &fx) in content.tall.iter().zip(&fixed_tall) {
        if fx && 4 * (t.y + t.height) > 4 * f.hb - f.big_h {
            return Err(ReorderError::BorderViolation(t.id.clone()));
        }
    }
    let mut e = Engine {
        f,
        width: content.width,
        tall: content.tall.clone(),
        fixed_tall,
        slices: content.slices.clone(),
        fixed_slice: vec![false; content.slices.len()],
        bodies: Vec::new(),
        slabs: Vec::new(),
        stats: ReorderStats::default(),
    };
    let ext = e.extensions()?;
    e.mark_fixed(&ext)?;
    e.first_shift()?;
    e.check_raw("first shift")?;
    e.build_slabs(&ext)?;
    e.check_slabs("pseudo items")?;
    e.second_shift();
    e.check_slabs("second shift")?;
    for s in 0..e.slabs.len() {
        e.settle(s)?;
    }
    e.check_slabs("fusion")?;
    e.close_frozen();
    let cols = e.sort_columns()?;
    e.finish(cols)
}

impl Engine {
    fn inside(&self, t: &TallItem) -> (i64, i64) {
        (t.x.max(0), (t.x + t.width).min(self.width))
    }

    /// Areas below and between unmovable items that stay where they are.
    fn extensions(&self) -> Result<Vec<Vec<(i64, i64)>>, ReorderError> {
        let mut ext = vec![Vec::new(); self.width as usize];
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, t) in self.tall.iter().enumerate() {
            if !self.fixed_tall[i] {
                continue;
            }
            match (t.x < 0, t.x + t.width > self.width) {
                (true, true) => return Err(ReorderError::TooManyUnmovables),
                (true, false) => left.push(i),
                _ => right.push(i),
            }
        }
        for side in [left, right] {
            let mut side = side;
            side.sort_by_key(|&i| self.tall[i].y);
            let mut add = |i: usize, lo: i64, hi: i64| {
                let (a, b) = self.inside(&self.tall[i]);
                if lo < hi {
                    for x in a..b {
                        ext[x as usize].push((lo, hi));
                    }
                }
            };
            match side.as_slice() {
                [] => {}
                [t] => add(*t, 0, self.tall[*t].y),
                [t1, t2] => {
                    let (a1, a2) = (&self.tall[*t1], &self.tall[*t2]);
                    add(*t1, 0, a1.y);
                    let w1 = self.inside(a1).1 - self.inside(a1).0;
                    let w2 = self.inside(a2).1 - self.inside(a2).0;
                    let narrow = if w1 < w2 { *t1 } else { *t2 };
                    add(narrow, a1.y + a1.height, a2.y);
                }
                _ => return Err(ReorderError::TooManyUnmovables),
            }
        }
        for (x, iv) in ext.iter_mut().enumerate() {
            iv.sort();
            for (i, t) in self.tall.iter().enumerate() {
                let covers = t.x <= x as i64 && (x as i64) < t.x + t.width;
                if covers && !self.fixed_tall[i] && iv.iter().any(|&(lo, hi)| t.y < hi && lo < t.y + t.height) {
                    return Err(ReorderError::stage("extension", format!("tall item {} lies below an unmovable", t.id)));
                }
            }
        }
        Ok(ext)
    }

    fn mark_fixed(&mut self, ext: &[Vec<(i64, i64)>]) -> Result<(), ReorderError> {
        for (k, s) in self.slices.iter().enumerate() {
            for &(lo, hi) in &ext[s.x as usize] {
                if s.y >= lo && s.y + s.height <= hi {
                    self.fixed_slice[k] = true;
                } else if s.y < hi && lo < s.y + s.height {
                    return Err(ReorderError::stage("extension", format!("slice of {} crosses an extension", s.origin)));
                }
            }
        }
        Ok(())
    }

    /// Items crossing `H/4` drop to the bottom, items crossing `hb − H/4` rise to
    /// `hb`; what was below or above them moves the other way.
    fn first_shift(&mut self) -> Result<(), ReorderError> {
        let w = self.width as usize;
        let mut col_b: Vec<Option<usize>> = vec![None; w];
        let mut col_t: Vec<Option<usize>> = vec![None; w];
        let mut col_tall: Vec<Vec<usize>> = vec![Vec::new(); w];
        for (i, t) in self.tall.iter().enumerate() {
            let (a, b) = self.inside(t);
            for x in a..b {
                col_tall[x as usize].push(i);
            }
            if self.fixed_tall[i] {
                continue;
            }
            let target = if self.f.crosses_quarter(t.y, t.height) {
                &mut col_b
            } else if self.f.crosses_a(t.y, t.height) {
                &mut col_t
            } else {
                continue;
            };
            for x in a..b {
                target[x as usize] = Some(i);
            }
        }
        let err = |d: String| ReorderError::stage("first shift", d);
        for x in 0..w {
            for &j in &col_tall[x] {
                let tj = &self.tall[j];
                if let Some(b) = col_b[x] {
                    if j != b && tj.y < self.tall[b].y {
                        return Err(err(format!("{} lies below {}", tj.id, self.tall[b].id)));
                    }
                }
                if let Some(t) = col_t[x] {
                    if j != t && tj.y >= self.tall[t].y + self.tall[t].height {
                        return Err(err(format!("{} lies above {}", tj.id, self.tall[t].id)));
                    }
                }
            }
        }
        for (k, s) in self.slices.iter_mut().enumerate() {
            let x = s.x as usize;
            let mut dy = 0;
            if let Some(b) = col_b[x] {
                if s.y < self.tall[b].y {
                    dy += self.tall[b].height;
                }
            }
            if let Some(t) = col_t[x] {
                if s.y >= self.tall[t].y + self.tall[t].height {
                    dy -= self.tall[t].height;
                }
            }
            if dy != 0 {
                if self.fixed_slice[k] {
                    return Err(err(format!("frozen slice of {} would move", s.origin)));
                }
                s.y += dy;
            }
        }
        for (i, t) in self.tall.iter_mut().enumerate() {
            if self.fixed_tall[i] {
                continue;
            }
            if self.f.crosses_quarter(t.y, t.height) {
                t.y = 0;
            } else if self.f.crosses_a(t.y, t.height) {
                t.y = self.f.hb - t.height;
            }
        }
        Ok(())
    }

    fn check_raw(&self, stage: &'static str) -> Result<(), ReorderError> {
        let mut cols: Vec<Vec<(i64, i64)>> = vec![Vec::new(); self.width as usize];
        for t in &self.tall {
            let (a, b) = self.inside(t);
            for x in a..b {
                cols[x as usize].push((t.y, t.y + t.height));
            }
        }
        for s in &self.slices {
            cols[s.x as usize].push((s.y, s.y + s.height));
        }
        for (x, iv) in cols.iter_mut().enumerate() {
            iv.sort();
            if iv.iter().any(|&(lo, hi)| lo < 0 || hi > self.f.top) || iv.windows(2).any(|p| p[1].0 < p[0].1) {
                return Err(ReorderError::stage(stage, format!("overlap in column {x}")));
            }
        }
        Ok(())
    }

    fn build_slabs(&mut self, ext: &[Vec<(i64, i64)>]) -> Result<(), ReorderError> {
        let mut borders: BTreeSet<i64> = [0, self.width].into_iter().collect();
        for t in &self.tall {
            let (a, b) = self.inside(t);
            borders.insert(a);
            borders.insert(b);
        }
        let w = self.width as usize;
        let mut col_slices: Vec<Vec<usize>> = vec![Vec::new(); w];
        for (k, s) in self.slices.iter().enumerate() {
            col_slices[s.x as usize].push(k);
        }
        let borders: Vec<i64> = borders.into_iter().collect();
        let err = |d: String| ReorderError::stage("pseudo items", d);
        for win in borders.windows(2) {
            let (x0, x1) = (win[0], win[1]);
            let sw = x1 - x0;
            if (x0..x1).any(|x| ext[x as usize] != ext[x0 as usize]) {
                return Err(err(format!("extension is not uniform at x = {x0}")));
            }
            let mut pieces = Vec::new();
            let mut occupied = Vec::new();
            for (i, t) in self.tall.iter().enumerate() {
                if t.x <= x0 && x0 < t.x + t.width {
                    pieces.push(Piece { what: What::Tall(i), y: t.y, h: t.height, lane: Lane::Fixed });
                    occupied.push((t.y, t.y + t.height));
                }
            }
            for &(lo, hi) in &ext[x0 as usize] {
                occupied.push((lo, hi));
                let body = self.gather(x0, sw, lo, hi, &col_slices, true);
                if body.cols.iter().any(|c| !c.is_empty()) {
                    pieces.push(Piece { what: What::Pseudo(self.bodies.len()), y: lo, h: hi - lo, lane: Lane::Fixed });
                    self.bodies.push(body);
                }
            }
            occupied.sort();
            let mut gaps = Vec::new();
            let mut cur = 0;
            for &(lo, hi) in &occupied {
                if lo > cur {
                    gaps.push((cur, lo));
                }
                cur = cur.max(hi);
            }
            if cur < self.f.hb {
                gaps.push((cur, self.f.hb));
            }
            let mut placed = 0;
            for (lo, hi) in gaps {
                let body = self.gather(x0, sw, lo, hi, &col_slices, false);
                let n: usize = body.cols.iter().map(Vec::len).sum();
                if n > 0 {
                    placed += n;
                    pieces.push(Piece { what: What::Pseudo(self.bodies.len()), y: lo, h: hi - lo, lane: Lane::Fixed });
                    self.bodies.push(body);
                }
            }
            let movable = (x0..x1).flat_map(|x| &col_slices[x as usize]).filter(|&&k| !self.fixed_slice[k]).count();
            if placed != movable {
                return Err(err(format!("a slice at x ∈ [{x0}, {x1}) overlaps a tall item")));
            }
            self.slabs.push(Slab { x0, w: sw, pieces, class: Class::Middle });
        }
        Ok(())
    }

    fn gather(&self, x0: i64, w: i64, lo: i64, hi: i64, col_slices: &[Vec<usize>], fixed: bool) -> Body {
        let mut cols = vec![Vec::new(); w as usize];
        for j in 0..w {
            for &k in &col_slices[(x0 + j) as usize] {
                let s = &self.slices[k];
                if self.fixed_slice[k] == fixed && s.y >= lo && s.y + s.height <= hi {
                    cols[j as usize].push((k, s.y - lo));
                }
            }
        }
        Body { cols, fixed }
    }

    fn is_fixed(&self, p: &Piece) -> bool {
        match p.what {
            What::Tall(i) => self.fixed_tall[i],
            What::Pseudo(b) => self.bodies[b].fixed,
        }
    }

    fn check_slabs(&self, stage: &'static str) -> Result<(), ReorderError> {
        for s in &self.slabs {
            let mut iv: Vec<(i64, i64)> = s.pieces.iter().map(|p| (p.y, p.y + p.h)).collect();
            iv.sort();
            if iv.iter().any(|&(lo, hi)| lo < 0 || hi > self.f.top) || iv.windows(2).any(|p| p[1].0 < p[0].1) {
                return Err(ReorderError::stage(stage, format!("overlap in slab at x = {}", s.x0)));
            }
        }
        Ok(())
    }

    /// Lifts items crossing `hb − H/4` by `⌈H/4⌉` and pulls items around `hb/2`
    /// up against the line `a`.
    fn second_shift(&mut self) {
        let f = self.f;
        let target = |y: i64, h: i64, pseudo: bool| -> i64 {
            if f.crosses_a(y, h) && !f.crosses_quarter(y, h) {
                y + f.delta
            } else if pseudo && f.between_half_and_a(y, h) {
                f.a
            } else if f.crosses_half(y, h) && !f.crosses_quarter(y, h) && !f.crosses_a(y, h) {
                f.a - h
            } else {
                y
            }
        };
        for (i, t) in self.tall.iter_mut().enumerate() {
            if !self.fixed_tall[i] {
                t.y = target(t.y, t.height, false);
            }
        }
        for s in 0..self.slabs.len() {
            for k in 0..self.slabs[s].pieces.len() {
                let p = self.slabs[s].pieces[k];
                let y = match p.what {
                    What::Tall(i) => self.tall[i].y,
                    What::Pseudo(b) if !self.bodies[b].fixed => target(p.y, p.h, true),
                    What::Pseudo(_) => p.y,
                };
                self.slabs[s].pieces[k].y = y;
            }
        }
    }

    fn new_body(&mut self, w: i64, parts: &[(Piece, i64)]) -> usize {
        let mut cols = vec![Vec::new(); w as usize];
        for (p, off) in parts {
            if let What::Pseudo(b) = p.what {
                for (j, c) in self.bodies[b].cols.iter().enumerate() {
                    cols[j].extend(c.iter().map(|&(k, o)| (k, o + off)));
                }
            }
        }
        self.bodies.push(Body { cols, fixed: false });
        self.bodies.len() - 1
    }

    /// Anchors every piece of a slab to a line and labels its lane.
    fn settle(&mut self, s: usize) -> Result<(), ReorderError> {
        let f = self.f;
        let slab_x = self.slabs[s].x0;
        let w = self.slabs[s].w;
        let err = |d: &str| ReorderError::stage("fusion", format!("{d} in slab at x = {slab_x}"));
        let pieces = self.slabs[s].pieces.clone();
        let has_fixed = pieces.iter().any(|p| self.is_fixed(p));
        for p in &pieces {
            if matches!(p.what, What::Tall(_)) && !self.is_fixed(p) && !f.anchored(p.y, p.h) {
                return Err(err("tall item touches no line"));
            }
        }
        let movable = |p: &Piece| !self.is_fixed(p);
        if !has_fixed {
            if let Some(bi) = pieces.iter().position(|p| p.y == 0 && p.y + p.h > f.a) {
                let bottom = pieces[bi];
                let mut others: Vec<Piece> =
                    pieces.iter().enumerate().filter(|&(k, _)| k != bi).map(|(_, p)| *p).collect();
                if others.iter().any(|p| matches!(p.what, What::Tall(_))) {
                    return Err(err("tall item above a bottom item crossing a"));
                }
                others.sort_by_key(|p| p.y);
                let cap_h = f.hb - bottom.h;
                let total: i64 = others.iter().map(|p| p.h).sum();
                if total > cap_h {
                    return Err(err("no room above a bottom item crossing a"));
                }
                let mut out = vec![Piece { lane: Lane::Bottom, ..bottom }];
                if cap_h > 0 && (matches!(bottom.what, What::Tall(_)) || !others.is_empty()) {
                    let mut parts = Vec::new();
                    let mut off = 0;
                    for p in &others {
                        parts.push((*p, off));
                        off += p.h;
                    }
                    let b = self.new_body(w, &parts);
                    out.push(Piece { what: What::Pseudo(b), y: bottom.h, h: cap_h, lane: Lane::Cap });
                }
                self.slabs[s].pieces = out;
                self.slabs[s].class = Class::Area1;
                return Ok(());
            }
            if let Some(ti) = pieces.iter().position(|p| p.y + p.h == f.top && p.y < f.a) {
                let top = pieces[ti];
                let mut out = vec![Piece { lane: Lane::TopDown, ..top }];
                let mut stack = Vec::new();
                for (k, p) in pieces.iter().enumerate() {
                    if k == ti {
                        continue;
                    }
                    if p.y == 0 {
                        if p.h > f.half {
                            return Err(err("bottom item too high below a top item crossing a"));
                        }
                        out.push(Piece { lane: Lane::Bottom, ..*p });
                    } else if matches!(p.what, What::Tall(_)) {
                        return Err(err("tall item between bottom and a top item crossing a"));
                    } else {
                        stack.push(*p);
                    }
                }
                stack.sort_by_key(|p| p.y);
                let total: i64 = stack.iter().map(|p| p.h).sum();
                if f.half + total > top.y {
                    return Err(err("no room below a top item crossing a"));
                }
                if !stack.is_empty() {
                    let mut parts = Vec::new();
                    let mut off = 0;
                    for p in &stack {
                        parts.push((*p, off));
                        off += p.h;
                    }
                    self.stats.fused += stack.len().saturating_sub(1);
                    let b = self.new_body(w, &parts);
                    out.push(Piece { what: What::Pseudo(b), y: f.half, h: total, lane: Lane::Half });
                }
                self.slabs[s].pieces = out;
                self.slabs[s].class = Class::Area2;
                return Ok(());
            }
        }
        // Generic case: move or fuse floating pseudo items.
        let mut fixed_or_anchored = Vec::new();
        let mut floating = Vec::new();
        for p in &pieces {
            if movable(p) && !f.anchored(p.y, p.h) {
                floating.push(Slot::of(p, false));
            } else {
                fixed_or_anchored.push(Slot::of(p, !movable(p)));
            }
        }
        floating.sort_by_key(|sl| sl.y);
        self.stats.fused += floating.len();
        let mut state: Vec<Slot> = fixed_or_anchored;
        if !place_floating(&f, &mut state, &floating, 0, !has_fixed) {
            return Err(err("cannot anchor a floating pseudo item"));
        }
        let mut out = Vec::new();
        for sl in state {
            let what = if sl.parts.len() == 1 && sl.parts[0].1 == 0 {
                sl.parts[0].0.what
            } else {
                What::Pseudo(self.new_body(w, &sl.parts))
            };
            let lane = if sl.fixed {
                Lane::Fixed
            } else if sl.y == 0 {
                Lane::Bottom
            } else if sl.y + sl.h == f.top {
                Lane::TopDown
            } else if sl.y == f.a {
                Lane::AUp
            } else {
                Lane::ADown
            };
            out.push(Piece { what, y: sl.y, h: sl.h, lane });
        }
        let bottom_top = out.iter().filter(|p| p.lane == Lane::Bottom).map(|p| p.h).max().unwrap_or(0);
        self.slabs[s].class = if has_fixed {
            Class::Frozen
        } else if bottom_top > f.half {
            Class::Area3
        } else {
            Class::Middle
        };
        self.slabs[s].pieces = out;
        Ok(())
    }

    /// Adds to the frozen slabs every slab of a movable tall item that shares a
    /// slab with them, so that moving free columns never splits a tall item.
    /// Frozen slabs stay a prefix and a suffix of the box.
    fn close_frozen(&mut self) {
        loop {
            let mut grow = BTreeSet::new();
            for slab in &self.slabs {
                if slab.class != Class::Frozen {
                    continue;
                }
                for p in &slab.pieces {
                    if let What::Tall(i) = p.what {
                        if !self.fixed_tall[i] {
                            grow.insert(i);
                        }
                    }
                }
            }
            let mut changed = false;
            for slab in &mut self.slabs {
                if slab.class != Class::Frozen && slab.pieces.iter().any(|p| matches!(p.what, What::Tall(i) if grow.contains(&i)))
                {
                    slab.class = Class::Frozen;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn tall_inside_width(&self) -> Vec<i64> {
        self.tall
            .iter()
            .map(|t| {
                let (a, b) = self.inside(t);
                b - a
            })
            .collect()
    }

    fn sort_columns(&mut self) -> Result<Cols, ReorderError> {
        let f = self.f;
        let w = self.width as usize;
        let mut cols: Cols = vec![Vec::new(); w];
        let mut class = vec![Class::Middle; w];
        for slab in &self.slabs {
            for j in 0..slab.w {
                let x = (slab.x0 + j) as usize;
                class[x] = slab.class;
                for p in &slab.pieces {
                    let off = match p.what {
                        What::Tall(i) => slab.x0 + j - self.tall[i].x.max(0),
                        What::Pseudo(_) => j,
                    };
                    cols[x].push(Cell { lane: p.lane, y: p.y, h: p.h, what: p.what, off });
                }
            }
        }
        check_cols(&cols, &f).map_err(|d| ReorderError::stage("columns", d))?;
        self.stats.frozen_columns = class.iter().filter(|&&c| c == Class::Frozen).count() as i64;

        // Whole free columns go to their areas: 2 | middle | 3 | 1.
        let free: Vec<usize> = (0..w).filter(|&x| class[x] != Class::Frozen).collect();
        let by = |c: Class| -> Vec<usize> { free.iter().copied().filter(|&x| class[x] == c).collect() };
        let mut area1 = by(Class::Area1);
        area1.sort_by_key(|&x| {
            let b = cols[x].iter().find(|c| c.lane == Lane::Bottom).expect("area 1 column has a bottom item");
            (std::cmp::Reverse(b.h), b.what, b.off)
        });
        let order: Vec<usize> =
            [by(Class::Area2), by(Class::Middle), by(Class::Area3), area1].into_iter().flatten().collect();
        let old = cols.clone();
        let old_class = class.clone();
        for (k, &x) in free.iter().enumerate() {
            cols[x] = old[order[k]].clone();
            class[x] = old_class[order[k]];
        }
        let pos = |cs: &[Class]| -> Vec<usize> { (0..w).filter(|&x| cs.contains(&class[x])).collect() };
        let widths = self.tall_inside_width();
        let must = |ok: bool, cols: &Cols, stage: &'static str| -> Result<(), ReorderError> {
            if !ok {
                return Err(ReorderError::stage(stage, "a tall item cannot be kept in one piece"));
            }
            check_cols(cols, &f).map_err(|d| ReorderError::stage(stage, d))
        };

        let a2 = pos(&[Class::Area2]);
        let ok = sort_lane(&mut cols, &a2, Lane::TopDown, Order::Desc, Align::Left, &f, &widths)
            && sort_lane(&mut cols, &a2, Lane::Half, Order::Asc, Align::Right, &f, &widths);
        must(ok, &cols, "area 2")?;

        let lower = pos(&[Class::Area2, Class::Middle]);
        let mid = pos(&[Class::Middle]);
        let ok = sort_lane(&mut cols, &lower, Lane::Bottom, Order::Desc, Align::Left, &f, &widths)
            && sort_lane(&mut cols, &mid, Lane::ADown, Order::Asc, Align::Right, &f, &widths);
        must(ok, &cols, "lower band")?;

        let a3 = pos(&[Class::Area3]);
        let ok = sort_lane(&mut cols, &a3, Lane::Bottom, Order::Asc, Align::Right, &f, &widths);
        must(ok, &cols, "area 3")?;

        // Upper band [a, top]: columns without anything crossing a, minus those
        // of tall items that also reach into such columns. Sorting one order
        // over all of them may fail where they are not adjacent; sorting each
        // run of adjacent columns on its own cannot fail.
        let mut clean: Vec<bool> = (0..w)
            .map(|x| {
                class[x] != Class::Area1
                    && class[x] != Class::Area2
                    && cols[x].iter().all(|c| {
                        !(c.y < f.a && f.a < c.y + c.h)
                            && c.lane != Lane::Cap
                            && c.lane != Lane::Half
                            && !(c.lane == Lane::Fixed && c.y + c.h > f.a)
                    })
            })
            .collect();
        loop {
            let mut bad = BTreeSet::new();
            for x in (0..w).filter(|&x| !clean[x]) {
                for c in &cols[x] {
                    if let (What::Tall(i), Lane::AUp | Lane::TopDown) = (c.what, c.lane) {
                        bad.insert(i);
                    }
                }
            }
            let mut changed = false;
            for x in 0..w {
                if clean[x] && cols[x].iter().any(|c| matches!(c.what, What::Tall(i) if bad.contains(&i))) {
                    clean[x] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let upper: Vec<usize> = (0..w).filter(|&x| clean[x]).collect();
        let mut c = cols.clone();
        let ok = sort_lane(&mut c, &upper, Lane::AUp, Order::Asc, Align::Right, &f, &widths)
            && sort_lane(&mut c, &upper, Lane::TopDown, Order::Desc, Align::Left, &f, &widths)
            && check_cols(&c, &f).is_ok();
        if ok {
            cols = c;
        } else {
            for seg in upper.chunk_by(|a, b| a + 1 == *b) {
                let ok = sort_lane(&mut cols, seg, Lane::AUp, Order::Asc, Align::Right, &f, &widths)
                    && sort_lane(&mut cols, seg, Lane::TopDown, Order::Desc, Align::Left, &f, &widths);
                must(ok, &cols, "upper band")?;
            }
        }

        // Frozen zones: try sorted orders of the lower band around the fixed items.
        let mut x = 0;
        while x < w {
            if class[x] != Class::Frozen {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && class[x] == Class::Frozen {
                x += 1;
            }
            let zone: Vec<usize> = (start..x).collect();
            let mut best: Option<(usize, Cols)> = None;
            let modes = [
                (Order::Desc, Align::Left),
                (Order::Asc, Align::Right),
                (Order::Desc, Align::Right),
                (Order::Asc, Align::Left),
            ];
            for &(bo, ba) in &modes {
                for &(to, ta) in &modes {
                    let mut c = cols.clone();
                    let ok = sort_lane(&mut c, &zone, Lane::Bottom, bo, ba, &f, &widths)
                        && sort_lane(&mut c, &zone, Lane::ADown, to, ta, &f, &widths)
                        && check_cols(&c, &f).is_ok();
                    if ok {
                        let n = count_runs(&c[start..x]);
                        if best.as_ref().is_none_or(|(m, _)| n < *m) {
                            best = Some((n, c));
                        }
                    }
                }
            }
            match best {
                Some((_, c)) => cols = c,
                None => self.stats.unsorted_zones += 1,
            }
        }
        Ok(cols)
    }

    fn finish(self, cols: Cols) -> Result<Arranged, ReorderError> {
        let f = self.f;
        let err = |d: String| ReorderError::stage("result", d);
        let mut where_tall: BTreeMap<usize, Vec<(i64, i64, i64)>> = BTreeMap::new();
        let mut slices: Vec<Option<Slice>> = vec![None; self.slices.len()];
        for (x, col) in cols.iter().enumerate() {
            for c in col {
                match c.what {
                    What::Tall(i) => where_tall.entry(i).or_default().push((x as i64, c.off, c.y)),
                    What::Pseudo(b) => {
                        for &(k, o) in &self.bodies[b].cols[c.off as usize] {
                            if slices[k].is_some() {
                                return Err(err(format!("slice of {} placed twice", self.slices[k].origin)));
                            }
                            slices[k] = Some(Slice { x: x as i64, y: c.y + o, ..self.slices[k].clone() });
                        }
                    }
                }
            }
        }
        let widths = self.tall_inside_width();
        let mut tall = self.tall.clone();
        for (i, t) in tall.iter_mut().enumerate() {
            let cells = where_tall.get(&i).map(Vec::as_slice).unwrap_or(&[]);
            if cells.len() as i64 != widths[i] {
                return Err(err(format!("tall item {} lost columns", t.id)));
            }
            let Some(&(x0, off0, y0)) = cells.first() else { continue };
            let left = x0 - off0;
            if cells.iter().any(|&(x, off, y)| x - off != left || y != y0) {
                return Err(err(format!("tall item {} is split", t.id)));
            }
            if self.fixed_tall[i] {
                if left != t.x.max(0) || y0 != t.y {
                    return Err(err(format!("unmovable item {} moved", t.id)));
                }
            } else {
                t.x = left;
                t.y = y0;
            }
        }
        let slices: Vec<Slice> = slices
            .into_iter()
            .enumerate()
            .map(|(k, s)| s.ok_or_else(|| err(format!("slice of {} lost", self.slices[k].origin))))
            .collect::<Result<_, _>>()?;
        let containers = containers(&cols, f.top);
        Ok(Arranged { tall, slices, containers, stats: self.stats })
    }
}

/// A box with no room above it: every tall item sits at the bottom or the top
/// of its column and the rest of the column becomes one pseudo item.
pub(crate) struct Plain {
    pub arranged: Arranged,
    /// Slices taken out from between two tall items, per removed column.
    pub removed: Vec<Vec<Slice>>,
}

/// At most one tall item per slab; it drops to the bottom.
pub(crate) fn arrange_small(content: &Content, big_h: i64, hb: i64) -> Result<Plain, ReorderError> {
    arrange_plain(content, big_h, hb, 1)
}

/// At most two tall items per slab; one goes to the bottom and one to the top.
/// Slices between two tall items are removed.
pub(crate) fn arrange_medium(content: &Content, big_h: i64, hb: i64) -> Result<Plain, ReorderError> {
    arrange_plain(content, big_h, hb, 2)
}

fn arrange_plain(content: &Content, big_h: i64, hb: i64, per_slab: usize) -> Result<Plain, ReorderError> {
    let f = Frame { big_h, hb, delta: 0, a: hb, top: hb, half: hb / 2 };
    for t in &content.tall {
        if t.x < 0 || t.x + t.width > content.width {
            return Err(ReorderError::BorderViolation(t.id.clone()));
        }
    }
    let mut e = Engine {
        f,
        width: content.width,
        tall: content.tall.clone(),
        fixed_tall: vec![false; content.tall.len()],
        slices: content.slices.clone(),
        fixed_slice: vec![false; content.slices.len()],
        bodies: Vec::new(),
        slabs: Vec::new(),
        stats: ReorderStats::default(),
    };
    let w = e.width as usize;
    let mut borders: BTreeSet<i64> = [0, e.width].into_iter().collect();
    for t in &e.tall {
        borders.insert(t.x);
        borders.insert(t.x + t.width);
    }
    let borders: Vec<i64> = borders.into_iter().collect();
    let mut col_slices: Vec<Vec<usize>> = vec![Vec::new(); w];
    for (k, s) in e.slices.iter().enumerate() {
        col_slices[s.x as usize].push(k);
    }
    let slab_tall: Vec<Vec<usize>> = borders
        .windows(2)
        .map(|win| {
            let mut ts: Vec<usize> =
                (0..e.tall.len()).filter(|&i| e.tall[i].x <= win[0] && win[0] < e.tall[i].x + e.tall[i].width).collect();
            ts.sort_by_key(|&i| e.tall[i].y);
            ts
        })
        .collect();
    for (win, ts) in borders.windows(2).zip(&slab_tall) {
        if ts.len() > per_slab {
            return Err(ReorderError::Crowded(win[0]));
        }
    }
    // Items sharing a column must end at opposite ends. Two items never share a
    // column with a third, so the sharing graph is a forest.
    let n = e.tall.len();
    let mut adj = vec![Vec::new(); n];
    for ts in &slab_tall {
        if let [i, j] = ts.as_slice() {
            adj[*i].push(*j);
            adj[*j].push(*i);
        }
    }
    let mut up: Vec<Option<bool>> = vec![None; n];
    for root in 0..n {
        if up[root].is_some() {
            continue;
        }
        up[root] = Some(false);
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                match up[j] {
                    None => {
                        up[j] = Some(!up[i].unwrap());
                        stack.push(j);
                    }
                    Some(u) if u == up[i].unwrap() => {
                        return Err(ReorderError::stage("medium box", "tall items cannot be split into bottom and top"));
                    }
                    _ => {}
                }
            }
        }
    }
    for (i, t) in e.tall.iter_mut().enumerate() {
        t.y = if up[i] == Some(true) { hb - t.height } else { 0 };
    }
    let mut cols: Cols = vec![Vec::new(); w];
    let mut removed = Vec::new();
    let mut gone = vec![false; e.slices.len()];
    for (win, ts) in borders.windows(2).zip(&slab_tall) {
        let (x0, sw) = (win[0], win[1] - win[0]);
        let (mut lo, mut hi) = (0, hb);
        for &i in ts {
            let cell = Cell { lane: Lane::Bottom, y: e.tall[i].y, h: e.tall[i].height, what: What::Tall(i), off: 0 };
            if e.tall[i].y == 0 {
                lo = e.tall[i].height;
            } else {
                hi = e.tall[i].y;
            }
            let lane = if e.tall[i].y == 0 { Lane::Bottom } else { Lane::TopDown };
            for j in 0..sw {
                let x = x0 + j;
                cols[x as usize].push(Cell { lane, off: x - e.tall[i].x, ..cell });
            }
        }
        if lo > hi {
            return Err(ReorderError::Crowded(x0));
        }
        let mut body = Body { cols: vec![Vec::new(); sw as usize], fixed: false };
        for j in 0..sw {
            let mut ks = col_slices[(x0 + j) as usize].clone();
            ks.sort_by_key(|&k| e.slices[k].y);
            let mut off = 0;
            for k in ks {
                body.cols[j as usize].push((k, off));
                off += e.slices[k].height;
            }
            if off > hi - lo {
                return Err(ReorderError::stage("plain box", format!("column {} overflows", x0 + j)));
            }
        }
        let empty = body.cols.iter().all(Vec::is_empty);
        if ts.len() == 2 {
            for c in &body.cols {
                for &(k, _) in c {
                    gone[k] = true;
                }
                removed.push(c.iter().map(|&(k, _)| e.slices[k].clone()).collect::<Vec<_>>());
            }
            continue;
        }
        if (empty && ts.is_empty()) || hi == lo {
            continue;
        }
        let (lane, y) = match ts.first() {
            Some(&i) if e.tall[i].y == 0 => (Lane::TopDown, lo),
            _ => (Lane::Bottom, 0),
        };
        let b = e.bodies.len();
        e.bodies.push(body);
        for j in 0..sw {
            cols[(x0 + j) as usize].push(Cell { lane, y, h: hi - lo, what: What::Pseudo(b), off: j });
        }
    }
    check_cols(&cols, &f).map_err(|d| ReorderError::stage("plain box", d))?;
    let widths: Vec<i64> = e.tall.iter().map(|t| t.width).collect();
    let all: Vec<usize> = (0..w).collect();
    let ok = sort_lane(&mut cols, &all, Lane::Bottom, Order::Desc, Align::Left, &f, &widths)
        && sort_lane(&mut cols, &all, Lane::TopDown, Order::Asc, Align::Right, &f, &widths);
    if !ok {
        return Err(ReorderError::stage("plain box", "a tall item cannot be kept in one piece"));
    }
    check_cols(&cols, &f).map_err(|d| ReorderError::stage("plain box", d))?;
    // Removed slices are handed back separately; drop them from the bookkeeping.
    let keep: Vec<usize> = (0..e.slices.len()).filter(|&k| !gone[k]).collect();
    let mut renumber = vec![usize::MAX; e.slices.len()];
    for (n, &k) in keep.iter().enumerate() {
        renumber[k] = n;
    }
    for b in &mut e.bodies {
        for c in &mut b.cols {
            for part in c.iter_mut() {
                part.0 = renumber[part.0];
            }
        }
    }
    e.slices = keep.iter().map(|&k| e.slices[k].clone()).collect();
    e.fixed_slice = vec![false; e.slices.len()];
    let arranged = e.finish(cols)?;
    Ok(Plain { arranged, removed })
}

/// A piece during fusion: the pieces it is made of, with offsets.
#[derive(Clone, Debug)]
struct Slot {
    y: i64,
    h: i64,
    tall: bool,
    fixed: bool,
    parts: Vec<(Piece, i64)>,
}

impl Slot {
    fn of(p: &Piece, fixed: bool) -> Slot {
        Slot { y: p.y, h: p.h, tall: matches!(p.what, What::Tall(_)), fixed, parts: vec![(*p, 0)] }
    }

    fn movable_pseudo(&self) -> bool {
        !self.tall && !self.fixed
    }
}

fn slot_ok(f: &Frame, state: &[Slot], k: usize) -> bool {
    let s = &state[k];
    if s.y < 0 || s.y + s.h > f.top || (s.y < f.a && f.a < s.y + s.h) {
        return false;
    }
    state.iter().enumerate().all(|(j, o)| j == k || o.y + o.h <= s.y || s.y + s.h <= o.y)
}

/// A slab whose bottom item reaches above `hb/2` must not have items hanging from `a`.
fn slab_ok(f: &Frame, state: &[Slot]) -> bool {
    let high_bottom = state.iter().any(|s| s.y == 0 && s.h > f.half);
    let hanging = state.iter().any(|s| s.y + s.h == f.a && s.y > 0);
    !(high_bottom && hanging)
}

/// Backtracking over where each floating pseudo item goes.
fn place_floating(f: &Frame, state: &mut Vec<Slot>, floating: &[Slot], k: usize, check_shape: bool) -> bool {
    if k == floating.len() {
        return !check_shape || slab_ok(f, state);
    }
    let fl = &floating[k];
    let hf = fl.h;
    let find = |state: &Vec<Slot>, pred: &dyn Fn(&Slot) -> bool| state.iter().position(|s| s.movable_pseudo() && pred(s));
    let mut tries: Vec<Vec<Slot>> = Vec::new();
    let fuse_above = |state: &Vec<Slot>, j: usize| {
        let mut st = state.clone();
        let off = st[j].h;
        st[j].parts.extend(fl.parts.iter().map(|&(p, o)| (p, o + off)));
        st[j].h += hf;
        (st, j)
    };
    let fuse_below = |state: &Vec<Slot>, j: usize| {
        let mut st = state.clone();
        for part in &mut st[j].parts {
            part.1 += hf;
        }
        let mut parts = fl.parts.clone();
        parts.extend(st[j].parts.iter().cloned());
        st[j].parts = parts;
        st[j].y -= hf;
        st[j].h += hf;
        (st, j)
    };
    let place = |state: &Vec<Slot>, y: i64| {
        let mut st = state.clone();
        st.push(Slot { y, ..fl.clone() });
        let j = st.len() - 1;
        (st, j)
    };
    let mut cands = Vec::new();
    if let Some(j) = find(state, &|s| s.y == f.a) {
        cands.push(fuse_above(state, j));
    }
    cands.push(place(state, f.a));
    if let Some(j) = find(state, &|s| s.y + s.h == f.top) {
        cands.push(fuse_below(state, j));
    }
    if let Some(j) = find(state, &|s| s.y == 0) {
        cands.push(fuse_above(state, j));
    }
    if let Some(j) = find(state, &|s| s.y + s.h == f.a) {
        cands.push(fuse_below(state, j));
    }
    cands.push(place(state, f.top - hf));
    cands.push(place(state, f.a - hf));
    cands.push(place(state, 0));
    if !check_shape {
        // Next to unmovable items a piece may have nowhere to go; it then stays
        // where it is and is treated like the unmovable items.
        let mut st = state.clone();
        st.push(Slot { fixed: true, ..fl.clone() });
        let j = st.len() - 1;
        cands.push((st, j));
    }
    for (st, j) in cands {
        if slot_ok(f, &st, j) {
            tries.push(st);
        }
    }
    for mut st in tries {
        if place_floating(f, &mut st, floating, k + 1, check_shape) {
            *state = st;
            return true;
        }
    }
    false
}

pub(crate) fn check_cols(cols: &Cols, f: &Frame) -> Result<(), String> {
    for (x, col) in cols.iter().enumerate() {
        let mut iv: Vec<(i64, i64)> = col.iter().map(|c| (c.y, c.y + c.h)).collect();
        iv.sort();
        if iv.iter().any(|&(lo, hi)| lo < 0 || hi > f.top) || iv.windows(2).any(|p| p[1].0 < p[0].1) {
            return Err(format!("overlap in column {x}"));
        }
    }
    Ok(())
}

/// Sorts the cells of `lane` over the columns `pos` and lays them out again,
/// keeping each tall item contiguous. Returns false if that is impossible.
pub(crate) fn sort_lane(cols: &mut Cols, pos: &[usize], lane: Lane, order: Order, align: Align, f: &Frame, widths: &[i64]) -> bool {
    let mut cells = Vec::new();
    for &x in pos {
        if let Some(k) = cols[x].iter().position(|c| c.lane == lane) {
            cells.push(cols[x].remove(k));
        }
    }
    let mut count: BTreeMap<usize, i64> = BTreeMap::new();
    for c in &cells {
        if let What::Tall(i) = c.what {
            *count.entry(i).or_insert(0) += 1;
        }
    }
    if count.iter().any(|(&i, &n)| n != widths[i]) {
        return false;
    }
    match order {
        Order::Desc => cells.sort_by_key(|c| (std::cmp::Reverse(c.h), c.what, c.off)),
        Order::Asc => cells.sort_by_key(|c| (c.h, c.what, c.off)),
    }
    let mut groups: Vec<Vec<Cell>> = Vec::new();
    for c in cells {
        match groups.last_mut() {
            Some(g) if matches!(c.what, What::Tall(_)) && g[0].what == c.what => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    let (line, up) = match lane {
        Lane::Bottom => (0, true),
        Lane::AUp => (f.a, true),
        Lane::Half => (f.half, true),
        Lane::TopDown => (f.top, false),
        Lane::ADown => (f.a, false),
        Lane::Cap | Lane::Fixed => unreachable!("lane is not sorted"),
    };
    let run = |p: usize, len: usize| (1..len).all(|k| pos[p + k] == pos[p] + k);
    let put = |cols: &mut Cols, p: usize, g: &[Cell]| {
        for (k, c) in g.iter().enumerate() {
            let y = if up { line } else { line - c.h };
            cols[pos[p + k]].push(Cell { y, ..*c });
        }
    };
    match align {
        Align::Left => {
            let mut p = 0;
            for g in &groups {
                loop {
                    if p + g.len() > pos.len() {
                        return false;
                    }
                    if run(p, g.len()) {
                        break;
                    }
                    p += 1;
                }
                put(cols, p, g);
                p += g.len();
            }
        }
        Align::Right => {
            let mut end = pos.len();
            for g in groups.iter().rev() {
                loop {
                    if end < g.len() {
                        return false;
                    }
                    if run(end - g.len(), g.len()) {
                        break;
                    }
                    end -= 1;
                }
                put(cols, end - g.len(), g);
                end -= g.len();
            }
        }
    }
    true
}

type RunKey = (bool, i64, i64);

fn col_keys(col: &[Cell]) -> BTreeSet<RunKey> {
    col.iter().map(|c| (matches!(c.what, What::Tall(_)), c.y, c.h)).collect()
}

/// Maximal runs of adjacent columns holding a piece with the same kind and extent.
fn runs(cols: &[Vec<Cell>]) -> Vec<(RunKey, usize, usize)> {
    let mut open: BTreeMap<RunKey, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for x in 0..=cols.len() {
        let keys = if x < cols.len() { col_keys(&cols[x]) } else { BTreeSet::new() };
        let closing: Vec<RunKey> = open.keys().filter(|k| !keys.contains(k)).copied().collect();
        for k in closing {
            let start = open.remove(&k).unwrap();
            out.push((k, start, x));
        }
        for k in keys {
            open.entry(k).or_insert(x);
        }
    }
    out.sort_by_key(|&((t, y, h), s, e)| (!t, s, y, e, h));
    out
}

pub(crate) fn count_runs(cols: &[Vec<Cell>]) -> usize {
    runs(cols).len()
}

pub(crate) fn containers(cols: &Cols, height: i64) -> ContainerSet {
    let mut set = ContainerSet { height, ..Default::default() };
    for ((tall, y, h), s, e) in runs(cols) {
        let rect = Rect::new(s as i64, y, (e - s) as i64, h);
        if tall {
            set.tall_containers.push(BoxArea::uniform(BoxKind::TallSub, rect, h));
        } else {
            set.sliced_containers.push(BoxArea::uniform(BoxKind::VerticalSub, rect, h));
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_lines() {
        let f = Frame::new(10, 10);
        assert_eq!((f.delta, f.a, f.top, f.half), (3, 7, 13, 5));
        // The exact line is 7.5.
        assert!(f.crosses_a(7, 1));
        assert!(!f.crosses_a(6, 1));
        assert!(f.crosses_quarter(2, 1));
        assert!(!f.crosses_quarter(3, 4));
    }

    #[test]
    fn runs_merge_equal_neighbours() {
        let c = |y, h| Cell { lane: Lane::Bottom, y, h, what: What::Pseudo(0), off: 0 };
        let cols = vec![vec![c(0, 2)], vec![c(0, 2)], vec![c(0, 3)], vec![]];
        let r = runs(&cols);
        assert_eq!(r.len(), 2);
    }
}
