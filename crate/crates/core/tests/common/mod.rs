//! Independent reference implementations used by the integration tests. They
//! restate each rule from its definition and share no code with the library
//! beyond the data types.
#![allow(dead_code)]

use std::collections::BTreeMap;

use strip_forge::rational::{q, qi, Q};
use strip_forge::{Instance, Packing};

/// Item dimensions as placed.
pub fn placed_dims(inst: &Instance, id: &str, rotated: bool) -> Option<(i64, i64)> {
    let it = inst.items.iter().find(|i| i.id == id)?;
    Some(if rotated { (it.height, it.width) } else { (it.width, it.height) })
}

/// Geometry only: every item exactly once, inside `[0, W] × [0, ∞)`, rotated
/// only when allowed, no two interiors intersecting.
pub fn geometry_ok(inst: &Instance, p: &Packing, allow_rotation: bool) -> bool {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut rects = Vec::new();
    for pl in &p.placements {
        *seen.entry(pl.item_id.as_str()).or_default() += 1;
        if pl.rotated && !allow_rotation {
            return false;
        }
        let Some((w, h)) = placed_dims(inst, &pl.item_id, pl.rotated) else { return false };
        if pl.x < 0 || pl.y < 0 || pl.x + w > inst.strip_width {
            return false;
        }
        rects.push((pl.x, pl.y, w, h));
    }
    if seen.len() != inst.items.len() || seen.values().any(|&c| c != 1) {
        return false;
    }
    for a in 0..rects.len() {
        for b in a + 1..rects.len() {
            let (x1, y1, w1, h1) = rects[a];
            let (x2, y2, w2, h2) = rects[b];
            if x1 < x2 + w2 && x2 < x1 + w1 && y1 < y2 + h2 && y2 < y1 + h1 {
                return false;
            }
        }
    }
    true
}

/// Highest top edge of the placements.
pub fn top_of(inst: &Instance, p: &Packing) -> i64 {
    p.placements
        .iter()
        .filter_map(|pl| placed_dims(inst, &pl.item_id, pl.rotated).map(|(_, h)| pl.y + h))
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Large,
    Tall,
    Vertical,
    MediumVertical,
    Horizontal,
    Small,
    Medium,
}

#[derive(Clone, Debug)]
pub struct Thresholds {
    pub epsilon: Q,
    pub delta: Q,
    pub mu: Q,
    pub t: i64,
    pub w: i64,
}

impl Thresholds {
    /// Classes by their defining inequalities, first match wins.
    pub fn class(&self, w: i64, h: i64) -> Class {
        let (wq, hq, tq, sw) = (qi(w), qi(h), qi(self.t), qi(self.w));
        let tall_line = (q(1, 4) + &self.epsilon) * &tq;
        let (dt, dw) = (&self.delta * &tq, &self.delta * &sw);
        let (mt, mw) = (&self.mu * &tq, &self.mu * &sw);
        let et = &self.epsilon * &tq;
        if hq > dt && wq >= dw {
            Class::Large
        } else if hq >= tall_line && wq < dw {
            Class::Tall
        } else if hq >= dt && hq < tall_line && wq <= mw {
            Class::Vertical
        } else if hq >= et && hq < tall_line && wq > mw && wq <= dw {
            Class::MediumVertical
        } else if hq <= mt && wq >= dw {
            Class::Horizontal
        } else if hq <= mt && wq <= mw {
            Class::Small
        } else {
            Class::Medium
        }
    }

    pub fn medium_area(&self, inst: &Instance) -> i64 {
        inst.items
            .iter()
            .filter(|i| matches!(self.class(i.width, i.height), Class::Medium | Class::MediumVertical))
            .map(|i| i.width * i.height)
            .sum()
    }
}

/// `h` rounded up to a multiple of `ε^{l+1}T`, where `ε^l T ≤ h < ε^{l−1}T`.
pub fn rounded(h: i64, epsilon: &Q, t: i64) -> Option<Q> {
    if h < 1 || h > t {
        return None;
    }
    let hq = qi(h);
    let mut lower = qi(t);
    while hq < lower {
        lower *= epsilon;
    }
    let pitch = lower * epsilon;
    let k = (&hq / &pitch).ceil();
    Some(k * pitch)
}

pub fn rounded_int(h: i64, epsilon: &Q, t: i64) -> Option<i64> {
    rounded(h, epsilon, t).map(|r| strip_forge::rational::ceil_i64(&r))
}

/// Smallest height of a `W`-wide box holding every item, found by trying every
/// cell for every item. Intended for a handful of tiny items.
pub fn grid_optimum(inst: &Instance, allow_rotation: bool) -> Option<i64> {
    let w = inst.strip_width;
    let dims: Vec<Vec<(i64, i64)>> = inst
        .items
        .iter()
        .map(|i| {
            let mut v = vec![(i.width, i.height)];
            if allow_rotation && i.width != i.height {
                v.push((i.height, i.width));
            }
            v.retain(|&(a, _)| a <= w);
            v
        })
        .collect();
    if dims.iter().any(Vec::is_empty) {
        return None;
    }
    let stack: i64 = dims.iter().map(|d| d.iter().map(|x| x.1).min().unwrap()).sum();
    let area: i64 = inst.items.iter().map(|i| i.width * i.height).sum();
    let tallest = dims.iter().map(|d| d.iter().map(|x| x.1).min().unwrap()).max().unwrap_or(0);
    let lb = ((area + w - 1) / w).max(tallest);
    (lb..=stack.max(lb)).find(|&h| fits_grid(&dims, w, h))
}

fn fits_grid(dims: &[Vec<(i64, i64)>], w: i64, h: i64) -> bool {
    struct S<'a> {
        dims: &'a [Vec<(i64, i64)>],
        w: i64,
        h: i64,
        grid: Vec<bool>,
        /// Cell index of each placed item, to order copies of the same item.
        at: Vec<i64>,
    }
    fn set(s: &mut S<'_>, x: i64, y: i64, a: i64, b: i64, v: bool) {
        for r in y..y + b {
            for c in x..x + a {
                s.grid[(r * s.w + c) as usize] = v;
            }
        }
    }
    fn rec(s: &mut S<'_>, k: usize) -> bool {
        if k == s.dims.len() {
            return true;
        }
        // Copies of an item are placed at increasing cells.
        let from = if k > 0 && s.dims[k] == s.dims[k - 1] { s.at[k - 1] + 1 } else { 0 };
        for &(a, b) in &s.dims[k].clone() {
            if b > s.h {
                continue;
            }
            for y in 0..=s.h - b {
                for x in 0..=s.w - a {
                    let cell = y * s.w + x;
                    if cell < from {
                        continue;
                    }
                    let free = (y..y + b).all(|r| (x..x + a).all(|c| !s.grid[(r * s.w + c) as usize]));
                    if !free {
                        continue;
                    }
                    set(s, x, y, a, b, true);
                    s.at[k] = cell;
                    if rec(s, k + 1) {
                        return true;
                    }
                    set(s, x, y, a, b, false);
                }
            }
        }
        false
    }
    let mut sorted = dims.to_vec();
    sorted.sort();
    let mut s = S { dims: &sorted, w, h, grid: vec![false; (w * h) as usize], at: vec![0; dims.len()] };
    rec(&mut s, 0)
}

/// Whether items with per-item option lists `(component, amount)` can each take
/// one option without any component exceeding its capacity.
pub fn assignable(caps: &[i64], options: &[Vec<(usize, i64)>]) -> bool {
    fn rec(k: usize, caps: &mut Vec<i64>, options: &[Vec<(usize, i64)>]) -> bool {
        if k == options.len() {
            return true;
        }
        for &(c, a) in &options[k] {
            if caps[c] >= a {
                caps[c] -= a;
                let ok = rec(k + 1, caps, options);
                caps[c] += a;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    rec(0, &mut caps.to_vec(), options)
}

/// Loads of the chosen options stay within the capacities.
pub fn loads_fit(caps: &[i64], chosen: &[(usize, i64)]) -> bool {
    let mut load = vec![0i64; caps.len()];
    for &(c, a) in chosen {
        load[c] += a;
    }
    load.iter().zip(caps).all(|(l, c)| l <= c)
}
