//! Packings whose tall items sit on a horizontal grid and whose other items are
//! cut into unit-width slices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{validate_packing, Instance, Packing, Rect, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TallItem {
    pub id: String,
    pub x: i64,
    pub y: i64,
    pub width: i64,
    pub height: i64,
}

impl TallItem {
    pub fn new(id: impl Into<String>, x: i64, y: i64, width: i64, height: i64) -> Self {
        TallItem { id: id.into(), x, y, width, height }
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.width, self.height)
    }
}

/// A unit-width piece of a non-tall item.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slice {
    pub origin: String,
    pub x: i64,
    pub y: i64,
    pub height: i64,
}

impl Slice {
    pub fn new(origin: impl Into<String>, x: i64, y: i64, height: i64) -> Self {
        Slice { origin: origin.into(), x, y, height }
    }
}

/// Tall items on the `H/N` grid plus sliced stock.
///
/// `height` is the packing height `H` the grid refers to; a reordered packing
/// may reach above it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPacking {
    pub strip_width: i64,
    pub height: i64,
    pub lines: i64,
    pub tall: Vec<TallItem>,
    pub slices: Vec<Slice>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("{lines} grid lines do not divide height {height}")]
    BadGrid { height: i64, lines: i64 },
    #[error("tall item {0} is not aligned to the grid")]
    Alignment(String),
    #[error("item {0} leaves the area")]
    OutOfRange(String),
    #[error("{0} and {1} overlap")]
    Overlap(String, String),
    #[error("item {0} is not taller than a quarter of the height")]
    NotTall(String),
    #[error("invalid packing: {0}")]
    InvalidPacking(String),
}

/// Cuts `packing` into a grid packing of height `big_h` with `lines` lines.
///
/// Items taller than `big_h/4` stay whole and must be aligned; every other item
/// becomes one slice per column it covers.
pub fn make_grid_packing(
    instance: &Instance,
    packing: &Packing,
    big_h: i64,
    lines: i64,
) -> Result<GridPacking, GridError> {
    if lines <= 0 || big_h <= 0 || big_h % lines != 0 {
        return Err(GridError::BadGrid { height: big_h, lines });
    }
    let report = validate_packing(instance, packing, true);
    if let Some(v) = report.violations.first() {
        return Err(match v {
            Violation::Overlap(a, b) => GridError::Overlap(a.clone(), b.clone()),
            Violation::OutOfBounds(a) => GridError::OutOfRange(a.clone()),
            other => GridError::InvalidPacking(other.to_string()),
        });
    }
    let g = big_h / lines;
    let mut gp = GridPacking { strip_width: instance.strip_width, height: big_h, lines, tall: Vec::new(), slices: Vec::new() };
    for (id, r) in packing.rects(instance) {
        if r.top() > big_h {
            return Err(GridError::OutOfRange(id));
        }
        if 4 * r.h > big_h {
            if r.y % g != 0 || r.h % g != 0 {
                return Err(GridError::Alignment(id));
            }
            gp.tall.push(TallItem::new(id, r.x, r.y, r.w, r.h));
        } else {
            for x in r.x..r.right() {
                gp.slices.push(Slice::new(id.clone(), x, r.y, r.h));
            }
        }
    }
    Ok(gp)
}

/// The `N` for which every tall item is aligned: `H / gcd(H, all tall y and h)`.
pub fn default_lines(instance: &Instance, packing: &Packing, big_h: i64) -> i64 {
    let mut g = big_h;
    for (_, r) in packing.rects(instance) {
        if 4 * r.h > big_h {
            g = num_integer::gcd(g, num_integer::gcd(r.y, r.h));
        }
    }
    if g == 0 {
        1
    } else {
        big_h / g
    }
}

impl GridPacking {
    pub fn grid_step(&self) -> i64 {
        self.height / self.lines
    }

    /// Highest occupied point.
    pub fn top(&self) -> i64 {
        let t = self.tall.iter().map(|t| t.y + t.height);
        let s = self.slices.iter().map(|s| s.y + s.height);
        t.chain(s).max().unwrap_or(0)
    }

    /// Count of `(origin, height)` slices; reorderings must preserve it.
    pub fn slice_multiset(&self) -> BTreeMap<(String, i64), usize> {
        slice_multiset(&self.slices)
    }

    /// Checks alignment, tallness and that nothing overlaps or leaves
    /// `[0, W] × [0, limit]`.
    pub fn check(&self, limit: i64) -> Result<(), GridError> {
        if self.lines <= 0 || self.height % self.lines != 0 {
            return Err(GridError::BadGrid { height: self.height, lines: self.lines });
        }
        let g = self.grid_step();
        for t in &self.tall {
            if 4 * t.height <= self.height {
                return Err(GridError::NotTall(t.id.clone()));
            }
            if t.y % g != 0 || t.height % g != 0 {
                return Err(GridError::Alignment(t.id.clone()));
            }
        }
        check_disjoint(self.strip_width, limit, &self.tall, &self.slices)
    }
}

pub fn slice_multiset(slices: &[Slice]) -> BTreeMap<(String, i64), usize> {
    let mut m = BTreeMap::new();
    for s in slices {
        *m.entry((s.origin.clone(), s.height)).or_insert(0) += 1;
    }
    m
}

/// Column-wise overlap check for tall items and slices inside `[0, w] × [0, limit]`.
pub fn check_disjoint(width: i64, limit: i64, tall: &[TallItem], slices: &[Slice]) -> Result<(), GridError> {
    let mut cols: BTreeMap<i64, Vec<(i64, i64, &str)>> = BTreeMap::new();
    for t in tall {
        if t.x < 0 || t.x + t.width > width || t.y < 0 || t.y + t.height > limit || t.width <= 0 || t.height <= 0 {
            return Err(GridError::OutOfRange(t.id.clone()));
        }
        for x in t.x..t.x + t.width {
            cols.entry(x).or_default().push((t.y, t.y + t.height, &t.id));
        }
    }
    for s in slices {
        if s.x < 0 || s.x >= width || s.y < 0 || s.y + s.height > limit || s.height <= 0 {
            return Err(GridError::OutOfRange(s.origin.clone()));
        }
        cols.entry(s.x).or_default().push((s.y, s.y + s.height, &s.origin));
    }
    for iv in cols.values_mut() {
        iv.sort();
        for w in iv.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(GridError::Overlap(w[0].2.to_string(), w[1].2.to_string()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Placement;

    #[test]
    fn cuts_and_keeps() {
        let inst = Instance::from_dims(4, &[(2, 6), (2, 2)]);
        let p = Packing::new(&inst, vec![Placement::new("0", 0, 0), Placement::new("1", 2, 4)]);
        let gp = make_grid_packing(&inst, &p, 8, 4).unwrap();
        assert_eq!(gp.tall, vec![TallItem::new("0", 0, 0, 2, 6)]);
        assert_eq!(gp.slices.len(), 2);
        gp.check(8).unwrap();
    }

    #[test]
    fn misaligned_tall_item() {
        let inst = Instance::from_dims(4, &[(2, 3)]);
        let p = Packing::new(&inst, vec![Placement::new("0", 0, 1)]);
        assert_eq!(make_grid_packing(&inst, &p, 8, 4), Err(GridError::Alignment("0".into())));
        assert_eq!(default_lines(&inst, &p, 8), 8);
        assert!(make_grid_packing(&inst, &p, 8, 8).is_ok());
    }

    #[test]
    fn lines_must_divide() {
        let inst = Instance::from_dims(4, &[(2, 3)]);
        let p = Packing::new(&inst, vec![Placement::new("0", 0, 0)]);
        assert!(matches!(make_grid_packing(&inst, &p, 8, 3), Err(GridError::BadGrid { .. })));
    }

    #[test]
    fn overlap_is_found() {
        let t = [TallItem::new("a", 0, 0, 2, 5)];
        let s = [Slice::new("b", 1, 4, 1)];
        assert!(matches!(check_disjoint(4, 8, &t, &s), Err(GridError::Overlap(..))));
    }
}
