//! Instances, packings and the feasibility validator.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// An axis-parallel rectangle to be packed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub width: i64,
    pub height: i64,
}

impl Item {
    pub fn new(id: impl Into<String>, width: i64, height: i64) -> Self {
        Item { id: id.into(), width, height }
    }

    pub fn area(&self) -> i64 {
        self.width * self.height
    }

    /// Width and height after an optional quarter turn.
    pub fn dims(&self, rotated: bool) -> (i64, i64) {
        if rotated {
            (self.height, self.width)
        } else {
            (self.width, self.height)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub strip_width: i64,
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("strip width must be positive")]
    NonPositiveWidth,
    #[error("item {0} has a non-positive side")]
    NonPositiveSide(String),
    #[error("item {0} is wider than the strip")]
    TooWide(String),
    #[error("duplicate item id {0}")]
    DuplicateId(String),
}

impl Instance {
    pub fn new(strip_width: i64, items: Vec<Item>) -> Self {
        Instance { strip_width, items }
    }

    /// Builds an instance from bare `(width, height)` pairs with ids `"0"`, `"1"`, ...
    pub fn from_dims(strip_width: i64, dims: &[(i64, i64)]) -> Self {
        let items = dims
            .iter()
            .enumerate()
            .map(|(i, &(w, h))| Item::new(i.to_string(), w, h))
            .collect();
        Instance { strip_width, items }
    }

    pub fn check(&self) -> Result<(), InstanceError> {
        if self.strip_width < 1 {
            return Err(InstanceError::NonPositiveWidth);
        }
        let mut seen = HashSet::new();
        for it in &self.items {
            if it.width < 1 || it.height < 1 {
                return Err(InstanceError::NonPositiveSide(it.id.clone()));
            }
            if it.width > self.strip_width {
                return Err(InstanceError::TooWide(it.id.clone()));
            }
            if !seen.insert(it.id.as_str()) {
                return Err(InstanceError::DuplicateId(it.id.clone()));
            }
        }
        Ok(())
    }

    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|it| it.id == id)
    }

    pub fn max_height(&self) -> i64 {
        self.items.iter().map(|i| i.height).max().unwrap_or(0)
    }

    pub fn max_width(&self) -> i64 {
        self.items.iter().map(|i| i.width).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub item_id: String,
    pub x: i64,
    pub y: i64,
    pub rotated: bool,
}

impl Placement {
    pub fn new(item_id: impl Into<String>, x: i64, y: i64) -> Self {
        Placement { item_id: item_id.into(), x, y, rotated: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub placements: Vec<Placement>,
    pub height: i64,
}

impl Packing {
    /// Wraps placements and computes the cached height from the instance.
    pub fn new(instance: &Instance, placements: Vec<Placement>) -> Self {
        let mut p = Packing { placements, height: 0 };
        p.height = packing_height(instance, &p);
        p
    }

    pub fn empty() -> Self {
        Packing { placements: Vec::new(), height: 0 }
    }

    /// Placed rectangles in placement order; unknown ids are skipped.
    pub fn rects(&self, instance: &Instance) -> Vec<(String, Rect)> {
        let index = id_index(instance);
        self.placements
            .iter()
            .filter_map(|p| {
                index.get(p.item_id.as_str()).map(|&k| {
                    let (w, h) = instance.items[k].dims(p.rotated);
                    (p.item_id.clone(), Rect::new(p.x, p.y, w, h))
                })
            })
            .collect()
    }

    /// Shifts every placement vertically.
    pub fn shifted(&self, dy: i64) -> Packing {
        let placements = self
            .placements
            .iter()
            .map(|p| Placement { y: p.y + dy, ..p.clone() })
            .collect();
        Packing { placements, height: self.height + dy }
    }
}

/// Half-open integer rectangle `[x, x+w) × [y, y+h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub const fn new(x: i64, y: i64, w: i64, h: i64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    pub fn top(&self) -> i64 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w * self.h
    }

    /// True when the open interiors intersect.
    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x < o.right() && o.x < self.right() && self.y < o.top() && o.y < self.top()
    }

    pub fn contains(&self, o: &Rect) -> bool {
        o.x >= self.x && o.y >= self.y && o.right() <= self.right() && o.top() <= self.top()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Violation {
    Overlap(String, String),
    OutOfBounds(String),
    Missing(String),
    Duplicate(String),
    HeightMismatch { cached: i64, actual: i64 },
    UnknownItem(String),
    RotationNotAllowed(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap(a, b) => write!(f, "items {a} and {b} overlap"),
            Violation::OutOfBounds(a) => write!(f, "item {a} leaves the strip"),
            Violation::Missing(a) => write!(f, "item {a} is not placed"),
            Violation::Duplicate(a) => write!(f, "item {a} is placed more than once"),
            Violation::HeightMismatch { cached, actual } => {
                write!(f, "cached height {cached} differs from actual height {actual}")
            }
            Violation::UnknownItem(a) => write!(f, "placement refers to unknown item {a}"),
            Violation::RotationNotAllowed(a) => write!(f, "item {a} is rotated but rotation is off"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn id_index(instance: &Instance) -> HashMap<&str, usize> {
    instance
        .items
        .iter()
        .enumerate()
        .map(|(k, it)| (it.id.as_str(), k))
        .collect()
}

/// Checks a packing against an instance and lists every violation found.
pub fn validate_packing(instance: &Instance, packing: &Packing, allow_rotation: bool) -> ValidationReport {
    let index = id_index(instance);
    let mut violations = Vec::new();
    let mut seen = vec![false; instance.items.len()];
    let mut rects: Vec<(usize, Rect)> = Vec::with_capacity(packing.placements.len());

    for p in &packing.placements {
        let Some(&k) = index.get(p.item_id.as_str()) else {
            violations.push(Violation::UnknownItem(p.item_id.clone()));
            continue;
        };
        if seen[k] {
            violations.push(Violation::Duplicate(p.item_id.clone()));
            continue;
        }
        seen[k] = true;
        if p.rotated && !allow_rotation {
            violations.push(Violation::RotationNotAllowed(p.item_id.clone()));
        }
        let (w, h) = instance.items[k].dims(p.rotated);
        let r = Rect::new(p.x, p.y, w, h);
        if r.x < 0 || r.y < 0 || r.right() > instance.strip_width {
            violations.push(Violation::OutOfBounds(p.item_id.clone()));
        }
        rects.push((k, r));
    }
    for (k, it) in instance.items.iter().enumerate() {
        if !seen[k] {
            violations.push(Violation::Missing(it.id.clone()));
        }
    }

    // Sweep over x: only pairs whose x-ranges intersect are compared.
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by_key(|&i| rects[i].1.x);
    for a in 0..order.len() {
        let (ka, ra) = rects[order[a]];
        for &j in &order[a + 1..] {
            let (kb, rb) = rects[j];
            if rb.x >= ra.right() {
                break;
            }
            if ra.overlaps(&rb) {
                let (i1, i2) = if ka < kb { (ka, kb) } else { (kb, ka) };
                violations.push(Violation::Overlap(
                    instance.items[i1].id.clone(),
                    instance.items[i2].id.clone(),
                ));
            }
        }
    }

    let actual = rects.iter().map(|(_, r)| r.top()).max().unwrap_or(0);
    if actual != packing.height {
        violations.push(Violation::HeightMismatch { cached: packing.height, actual });
    }
    ValidationReport { violations }
}

/// Maximum of `y + effective height` over all placements; 0 when empty.
pub fn packing_height(instance: &Instance, packing: &Packing) -> i64 {
    packing
        .rects(instance)
        .iter()
        .map(|(_, r)| r.top())
        .max()
        .unwrap_or(0)
}

pub fn total_area(items: &[Item]) -> i64 {
    items.iter().map(Item::area).sum()
}

/// `max(⌈area/W⌉, max height)`, or 0 for an empty instance.
pub fn lower_bound(instance: &Instance) -> i64 {
    if instance.items.is_empty() {
        return 0;
    }
    let area = total_area(&instance.items);
    let by_area = (area + instance.strip_width - 1) / instance.strip_width;
    by_area.max(instance.max_height())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pack(inst: &Instance, pos: &[(i64, i64)]) -> Packing {
        let pl = inst
            .items
            .iter()
            .zip(pos)
            .map(|(it, &(x, y))| Placement::new(it.id.clone(), x, y))
            .collect();
        Packing::new(inst, pl)
    }

    #[test]
    fn single_full_width_item_is_valid() {
        let inst = Instance::from_dims(10, &[(10, 5)]);
        let p = pack(&inst, &[(0, 0)]);
        assert_eq!(p.height, 5);
        assert!(validate_packing(&inst, &p, false).is_valid());
    }

    #[test]
    fn identical_placements_overlap() {
        let inst = Instance::from_dims(10, &[(5, 5), (5, 5)]);
        let r = validate_packing(&inst, &pack(&inst, &[(0, 0), (0, 0)]), false);
        assert_eq!(r.violations, vec![Violation::Overlap("0".into(), "1".into())]);
    }

    #[test]
    fn shared_edges_are_allowed() {
        let inst = Instance::from_dims(10, &[(5, 5), (5, 5), (10, 1)]);
        let r = validate_packing(&inst, &pack(&inst, &[(0, 0), (5, 0), (0, 5)]), false);
        assert!(r.is_valid(), "{:?}", r);
    }

    #[test]
    fn out_of_bounds_is_reported() {
        let inst = Instance::from_dims(10, &[(6, 1)]);
        let r = validate_packing(&inst, &pack(&inst, &[(5, 0)]), false);
        assert_eq!(r.violations, vec![Violation::OutOfBounds("0".into())]);
    }

    #[test]
    fn missing_duplicate_and_height_mismatch() {
        let inst = Instance::from_dims(10, &[(1, 1), (1, 1)]);
        let p = Packing {
            placements: vec![Placement::new("0", 0, 0), Placement::new("0", 3, 0)],
            height: 2,
        };
        let r = validate_packing(&inst, &p, false);
        assert!(r.violations.contains(&Violation::Duplicate("0".into())));
        assert!(r.violations.contains(&Violation::Missing("1".into())));
        assert!(r.violations.contains(&Violation::HeightMismatch { cached: 2, actual: 1 }));
    }

    #[test]
    fn rotation_needs_the_flag() {
        let inst = Instance::from_dims(3, &[(1, 3)]);
        let mut p = pack(&inst, &[(0, 0)]);
        p.placements[0].rotated = true;
        p.height = 1;
        assert!(validate_packing(&inst, &p, true).is_valid());
        assert_eq!(
            validate_packing(&inst, &p, false).violations,
            vec![Violation::RotationNotAllowed("0".into())]
        );
    }

    #[test]
    fn heights_and_areas() {
        let inst = Instance::from_dims(10, &[(1, 7), (1, 4), (1, 2)]);
        assert_eq!(packing_height(&inst, &Packing::empty()), 0);
        let p = pack(&inst, &[(0, 3), (1, 0), (1, 4)]);
        assert_eq!(p.height, 10);
        assert_eq!(total_area(&[]), 0);
        assert_eq!(total_area(&[Item::new("a", 3, 4)]), 12);
        assert_eq!(total_area(&[Item::new("a", 3, 4), Item::new("b", 2, 5)]), 22);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound(&Instance::from_dims(10, &[(10, 5)])), 5);
        assert_eq!(lower_bound(&Instance::from_dims(10, &[(5, 4); 4])), 8);
        assert_eq!(lower_bound(&Instance::from_dims(2, &[(1, 3), (1, 1)])), 3);
        assert_eq!(lower_bound(&Instance::from_dims(2, &[])), 0);
    }

    #[test]
    fn instance_check() {
        assert!(Instance::from_dims(4, &[(4, 1)]).check().is_ok());
        assert_eq!(
            Instance::from_dims(4, &[(5, 1)]).check(),
            Err(InstanceError::TooWide("0".into()))
        );
        let dup = Instance::new(4, vec![Item::new("a", 1, 1), Item::new("a", 1, 1)]);
        assert_eq!(dup.check(), Err(InstanceError::DuplicateId("a".into())));
    }
}
