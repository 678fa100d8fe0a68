//! Seeded instance generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{FSpec, Params};
use crate::model::{Instance, Item, Packing, Placement, Rect};
use crate::rational::q;
use crate::restructure::{BoxArea, BoxContents, BoxKind, Slice, TallItem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` items with sides drawn uniformly from `1..=width` and `1..=max_height`.
pub fn uniform(seed: u64, n: usize, width: i64, max_height: i64) -> Instance {
    let mut r = rng(seed);
    let items = (0..n)
        .map(|k| Item::new(k.to_string(), r.gen_range(1..=width), r.gen_range(1..=max_height.max(1))))
        .collect();
    Instance::new(width, items)
}

/// Mostly narrow, tall items with a few flat ones mixed in.
pub fn tall_heavy(seed: u64, n: usize, width: i64, max_height: i64) -> Instance {
    let mut r = rng(seed);
    let max_height = max_height.max(4);
    let items = (0..n)
        .map(|k| {
            if r.gen_bool(0.75) {
                let w = r.gen_range(1..=(width / 4).max(1));
                Item::new(k.to_string(), w, r.gen_range(max_height / 2..=max_height))
            } else {
                Item::new(k.to_string(), r.gen_range(1..=width), r.gen_range(1..=(max_height / 8).max(1)))
            }
        })
        .collect();
    Instance::new(width, items)
}

/// A packing of height `lines · step` in which items taller than a quarter of
/// the height sit on the grid; the rest of the area is filled with flat items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCase {
    pub instance: Instance,
    pub packing: Packing,
    pub height: i64,
    pub lines: i64,
}

pub fn grid_case(seed: u64, width: i64, lines: i64, step: i64, max_tall: usize) -> GridCase {
    let mut r = rng(seed);
    let h = lines * step;
    let mut occ = vec![vec![false; h as usize]; width as usize];
    let free = |occ: &Vec<Vec<bool>>, x: i64, y: i64, w: i64, hh: i64| {
        (x..x + w).all(|c| (y..y + hh).all(|v| !occ[c as usize][v as usize]))
    };
    let fill = |occ: &mut Vec<Vec<bool>>, x: i64, y: i64, w: i64, hh: i64| {
        for c in x..x + w {
            for v in y..y + hh {
                occ[c as usize][v as usize] = true;
            }
        }
    };
    let mut items = Vec::new();
    let mut placements = Vec::new();
    let min_k = lines / 4 + 1;
    let mut tries = 0;
    while items.len() < max_tall && tries < 40 * max_tall.max(1) {
        tries += 1;
        if min_k > lines {
            break;
        }
        let k = r.gen_range(min_k..=lines);
        let th = k * step;
        let w = r.gen_range(1..=(width / 3).max(1));
        let x = r.gen_range(0..=width - w);
        let y = r.gen_range(0..=lines - k) * step;
        if free(&occ, x, y, w, th) {
            fill(&mut occ, x, y, w, th);
            let id = format!("t{}", items.len());
            items.push(Item::new(id.clone(), w, th));
            placements.push(Placement::new(id, x, y));
        }
    }
    let flat_max = (h / 4).max(1);
    let mut n_flat = 0;
    for _ in 0..(width * lines * 2) {
        let w = r.gen_range(1..=(width / 4).max(1));
        let fh = r.gen_range(1..=flat_max);
        if w > width || fh > h {
            continue;
        }
        let x = r.gen_range(0..=width - w);
        let y = r.gen_range(0..=h - fh);
        if free(&occ, x, y, w, fh) {
            fill(&mut occ, x, y, w, fh);
            let id = format!("f{n_flat}");
            n_flat += 1;
            items.push(Item::new(id.clone(), w, fh));
            placements.push(Placement::new(id, x, y));
        }
    }
    let instance = Instance::new(width, items);
    let packing = Packing::new(&instance, placements);
    GridCase { instance, packing, height: h, lines }
}

/// Contents of a box of height `box_lines · step` inside a grid packing of
/// height `lines · step`.
///
/// Up to `unmovable` tall items per side reach past the box's left or right
/// border; they end at or below `h(B) − H/4`. Every third attempt uses the
/// smallest tall height, so columns with three tall items stacked are common
/// in boxes taller than `3H/4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxCase {
    pub contents: BoxContents,
    pub big_h: i64,
    pub lines: i64,
}

pub fn box_case(seed: u64, width: i64, lines: i64, step: i64, box_lines: i64, unmovable: usize, max_tall: usize) -> BoxCase {
    let mut r = rng(seed);
    let big_h = lines * step;
    let hb = box_lines * step;
    let mut occ = vec![vec![false; hb as usize]; width as usize];
    let put = |occ: &mut Vec<Vec<bool>>, x: i64, y: i64, w: i64, h: i64| {
        let (x0, x1) = (x.max(0), (x + w).min(width));
        if (x0..x1).any(|c| (y..y + h).any(|v| occ[c as usize][v as usize])) {
            return false;
        }
        for c in x0..x1 {
            for v in y..y + h {
                occ[c as usize][v as usize] = true;
            }
        }
        true
    };
    let min_k = lines / 4 + 1;
    let mut tall = Vec::new();
    // Highest grid line an unmovable item may reach: 4·top ≤ 4·hb − H.
    let border_top = (4 * hb - big_h).div_euclid(4 * step);
    for left in [true, false] {
        let mut y = 0;
        for _ in 0..unmovable {
            if min_k > lines || y + min_k > border_top {
                break;
            }
            let k = r.gen_range(min_k..=(border_top - y).min(lines));
            let w = r.gen_range(2..=(width / 3).max(2));
            let inside = r.gen_range(1..w);
            let x = if left { inside - w } else { width - inside };
            let gap = r.gen_range(0..=(border_top - y - k).min(1));
            if put(&mut occ, x, (y + gap) * step, w, k * step) {
                tall.push(TallItem::new(format!("u{}", tall.len()), x, (y + gap) * step, w, k * step));
            }
            y += gap + k;
        }
    }
    let mut tries = 0;
    while tall.len() < max_tall && tries < 40 * max_tall.max(1) && min_k <= box_lines {
        tries += 1;
        let k = if tries % 3 == 0 { min_k } else { r.gen_range(min_k..=box_lines) };
        let w = r.gen_range(1..=(width / 3).max(1));
        let x = r.gen_range(0..=width - w);
        let y = r.gen_range(0..=box_lines - k) * step;
        if put(&mut occ, x, y, w, k * step) {
            tall.push(TallItem::new(format!("t{}", tall.len()), x, y, w, k * step));
        }
    }
    let mut slices = Vec::new();
    let flat_max = (big_h / 4).min(hb).max(1);
    for n in 0..(width * box_lines * 2) {
        let w = r.gen_range(1..=(width / 4).max(1));
        let h = r.gen_range(1..=flat_max);
        let x = r.gen_range(0..=width - w);
        let y = r.gen_range(0..=hb - h);
        if put(&mut occ, x, y, w, h) {
            slices.extend((x..x + w).map(|c| Slice::new(format!("f{n}"), c, y, h)));
        }
    }
    BoxCase { contents: BoxContents { width, height: hb, tall, slices }, big_h, lines }
}

/// An instance together with a packing of height at most `params.t` and the
/// boxes that structure it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredCase {
    pub instance: Instance,
    pub packing: Packing,
    pub params: Params,
    pub boxes: Vec<BoxArea>,
}

#[derive(Default)]
struct CaseBuilder {
    items: Vec<Item>,
    placements: Vec<Placement>,
    boxes: Vec<BoxArea>,
}

impl CaseBuilder {
    fn item(&mut self, prefix: &str, x: i64, y: i64, w: i64, h: i64) {
        let id = format!("{prefix}{}", self.items.len());
        self.items.push(Item::new(id.clone(), w, h));
        self.placements.push(Placement::new(id, x, y));
    }

    fn finish(self, width: i64, params: Params) -> StructuredCase {
        let instance = Instance::new(width, self.items);
        let packing = Packing::new(&instance, self.placements);
        StructuredCase { instance, packing, params, boxes: self.boxes }
    }
}

/// Splits `total` into parts between `lo` and `hi`; the last part may be smaller than `lo`.
fn split(r: &mut ChaCha8Rng, total: i64, lo: i64, hi: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut left = total;
    while left > 0 {
        let p = if left <= hi { left } else { r.gen_range(lo..=hi.min(left)) };
        out.push(p);
        left -= p;
    }
    out
}

/// A strip of width 64 and height guess `T = 64` with `ε = 1/4`, `δ = 1/16`,
/// `μ = 1/64`, built from columns of boxes.
///
/// With these thresholds tall items are at most 3 wide and at least 32 high,
/// vertical items are 1 wide and lower than 32, horizontal items are 1 high and
/// at least 4 wide, small items are `1 × 1`. Tall and vertical heights are
/// already rounded.
pub fn structured_case(seed: u64) -> StructuredCase {
    let (width, t) = (64, 64);
    let params = Params::new(q(1, 4), q(1, 16), q(1, 64), t, FSpec::LINEAR).expect("valid parameters");
    let mut r = rng(seed);
    let mut b = CaseBuilder::default();
    let mut x = 0;
    while x < width {
        let left = width - x;
        let kind = if left < 4 { 3 } else { r.gen_range(0..4) };
        match kind {
            0 => {
                let cw = r.gen_range(4..=10.min(left));
                let mut y = 0;
                while t - y >= 5 && (y == 0 || r.gen_bool(0.6)) {
                    let h = r.gen_range(5..=t - y);
                    b.item("l", x, y, r.gen_range(4..=cw), h);
                    b.boxes.push(BoxArea::new(BoxKind::LargeItem, Rect::new(x, y, cw, h)));
                    y += h;
                }
                if y < t {
                    b.boxes.push(BoxArea::new(BoxKind::SmallEmpty, Rect::new(x, y, cw, t - y)));
                }
                x += cw;
            }
            1 => {
                let cw = r.gen_range(2..=8.min(left));
                let th = 4 * r.gen_range(8..=16);
                let mut cx = x;
                for w in split(&mut r, cw, 1, 3) {
                    b.item("t", cx, 0, w, th);
                    cx += w;
                }
                b.boxes.push(BoxArea::uniform(BoxKind::TallSub, Rect::new(x, 0, cw, th), th));
                if t - th >= 4 {
                    let classes: Vec<i64> = (0..r.gen_range(1..=3))
                        .map(|_| if r.gen_bool(0.5) { r.gen_range(4..16) } else { 4 * r.gen_range(4..8) })
                        .filter(|&h| h <= t - th)
                        .collect();
                    for c in x..x + cw {
                        let mut y = th;
                        for &h in classes.iter().cycle().take(8) {
                            if y + h <= t && r.gen_bool(0.8) {
                                b.item("v", c, y, 1, h);
                                y += h;
                            }
                        }
                    }
                    b.boxes.push(BoxArea::new(BoxKind::VerticalSub, Rect::new(x, th, cw, t - th)));
                }
                x += cw;
            }
            2 => {
                let cw = r.gen_range(4..=16.min(left));
                let bh = r.gen_range(2..=12);
                for y in 0..bh {
                    let mut cx = x;
                    for w in split(&mut r, cw, 4, cw) {
                        if w >= 4 && r.gen_bool(0.85) {
                            b.item("h", cx, y, w, 1);
                        }
                        cx += w;
                    }
                }
                b.boxes.push(BoxArea::new(BoxKind::Horizontal, Rect::new(x, 0, cw, bh)));
                b.boxes.push(BoxArea::new(BoxKind::SmallEmpty, Rect::new(x, bh, cw, t - bh)));
                let mut y = bh;
                while y + 3 <= t && r.gen_bool(0.5) {
                    b.item("m", x, y, 2 + r.gen_range(0..2), 2);
                    y += 3;
                }
                for _ in 0..cw {
                    let (sx, sy) = (r.gen_range(x..x + cw), r.gen_range(y..t));
                    if !b.placements.iter().any(|p| p.x == sx && p.y == sy && p.item_id.starts_with('s')) {
                        b.item("s", sx, sy, 1, 1);
                    }
                }
                x += cw;
            }
            _ => {
                let cw = r.gen_range(1..=4.min(left));
                b.boxes.push(BoxArea::new(BoxKind::SmallEmpty, Rect::new(x, 0, cw, t)));
                for _ in 0..r.gen_range(0..=2 * cw) {
                    let (sx, sy) = (r.gen_range(x..x + cw), r.gen_range(0..t));
                    if !b.placements.iter().any(|p| p.x == sx && p.y == sy) {
                        b.item("s", sx, sy, 1, 1);
                    }
                }
                x += cw;
            }
        }
    }
    b.finish(width, params)
}

/// A handful of large items stacked in columns of a strip of width 8, small
/// enough for the exact oracle. `T = 8`, `ε = δ = 1/4`.
pub fn tiny_structured_case(seed: u64) -> StructuredCase {
    let (width, t) = (8, 8);
    let params = Params::new(q(1, 4), q(1, 4), q(1, 16), t, FSpec::LINEAR).expect("valid parameters");
    let mut r = rng(seed);
    let mut b = CaseBuilder::default();
    let mut x = 0;
    while width - x >= 2 && b.items.len() < 5 {
        let cw = r.gen_range(2..=4.min(width - x));
        let mut y = 0;
        while t - y >= 3 && b.items.len() < 5 && (y == 0 || r.gen_bool(0.5)) {
            let h = r.gen_range(3..=t - y);
            b.item("l", x, y, r.gen_range(2..=cw), h);
            b.boxes.push(BoxArea::new(BoxKind::LargeItem, Rect::new(x, y, cw, h)));
            y += h;
        }
        x += cw;
    }
    b.finish(width, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_packing;

    #[test]
    fn deterministic() {
        assert_eq!(uniform(7, 10, 20, 9), uniform(7, 10, 20, 9));
        assert_eq!(grid_case(3, 12, 8, 2, 6), grid_case(3, 12, 8, 2, 6));
    }

    #[test]
    fn grid_case_is_valid() {
        for seed in 0..20 {
            let c = grid_case(seed, 16, 12, 2, 10);
            assert!(validate_packing(&c.instance, &c.packing, false).is_valid());
            assert!(c.packing.height <= c.height);
        }
    }

    #[test]
    fn structured_cases_are_valid() {
        for seed in 0..40 {
            for c in [structured_case(seed), tiny_structured_case(seed)] {
                assert!(validate_packing(&c.instance, &c.packing, false).is_valid(), "seed {seed}");
                assert!(c.packing.height <= c.params.t);
                for (i, a) in c.boxes.iter().enumerate() {
                    assert!(c.boxes[i + 1..].iter().all(|o| !o.rect.overlaps(&a.rect)));
                }
                for (_, r) in c.packing.rects(&c.instance) {
                    let covered: i64 = c.boxes.iter().map(|b| overlap_area(&b.rect, &r)).sum();
                    assert_eq!(covered, r.area(), "seed {seed}");
                }
            }
        }
    }

    fn overlap_area(a: &Rect, b: &Rect) -> i64 {
        let w = a.right().min(b.right()) - a.x.max(b.x);
        let h = a.top().min(b.top()) - a.y.max(b.y);
        if w > 0 && h > 0 {
            w * h
        } else {
            0
        }
    }
}
