//! The structured pipeline: classify, fill the boxes of a structure guess class by
//! class, and stack whatever is left on top.
//!
//! A guess comes from a hint, from a capped exhaustive search over box shapes, or
//! from a class-by-class shelf heuristic. The result is never worse than the
//! `2·lower_bound` packing, which is returned whenever it is lower or the
//! structured path fails.

use std::collections::BTreeMap;

use super::dp::{dp_place_tall_vertical, TvBox, TvItem};
use super::dual::{dual_approx_search, DualOutcome};
use super::rotations::rounded_class_height;
use crate::baselines::{ffdh, nfdh, upper_bound_pack};
use crate::classify::{classify, find_delta_mu, FSpec, ItemClass, Params};
use crate::model::{lower_bound, validate_packing, Instance, Item, Packing, Placement, Rect};
use crate::placement::{place_horizontal, place_medium, place_small, place_vertical, ExtraBox, PlacedItem};
use crate::rational::{ceil_i64, floor_i64, q, qi, Q};
use crate::restructure::{BoxArea, BoxKind};
use crate::search::{fit_in_box, Spots};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Hint,
    Exhaustive,
    Heuristic,
}

/// A structure supplied from outside, in instance units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HintSpec {
    pub params: Params,
    pub boxes: Vec<BoxArea>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExhaustiveCaps {
    pub max_boxes: usize,
    pub max_width: i64,
    pub max_items: usize,
    /// Node budget for each box search.
    pub budget: u64,
}

impl Default for ExhaustiveCaps {
    fn default() -> Self {
        ExhaustiveCaps { max_boxes: 4, max_width: 16, max_items: 8, budget: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Mode {
    Hint(HintSpec),
    Exhaustive(ExhaustiveCaps),
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Structured(Provenance),
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredResult {
    pub packing: Packing,
    pub source: Source,
    /// The height guess the structure was built for, if any succeeded.
    pub t: Option<i64>,
    /// `ε' = min(1/4, 1/⌈10/ε⌉)`, or the hint's ε in hint mode.
    pub epsilon: Q,
    /// Height of the structured packing before comparing with the fallback.
    pub structured_height: Option<i64>,
    pub fallback_height: i64,
    pub notes: Vec<String>,
}

impl StructuredResult {
    pub fn height(&self) -> i64 {
        self.packing.height
    }

    /// `(5/4 + 10ε')·T` for the guess that was used.
    pub fn bound(&self) -> Option<Q> {
        self.t.map(|t| (q(5, 4) + qi(10) * &self.epsilon) * qi(t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("empty or invalid instance: {0}")]
    Instance(String),
    #[error("hint is not a valid structure: {0}")]
    InvalidHint(String),
    #[error("instance exceeds the exhaustive caps: {0}")]
    CapExceeded(String),
    #[error("fallback packing failed: {0}")]
    Fallback(String),
}

pub fn normalize_epsilon(epsilon: &Q) -> Q {
    let k = ceil_i64(&(qi(10) / epsilon)).max(1);
    q(1, k).min(q(1, 4))
}

pub fn solve_structured(instance: &Instance, epsilon: &Q, mode: &Mode) -> Result<StructuredResult, SolveError> {
    instance.check().map_err(|e| SolveError::Instance(e.to_string()))?;
    if instance.items.is_empty() {
        return Err(SolveError::Instance("no items".into()));
    }
    let (fallback, _) = upper_bound_pack(instance).map_err(|e| SolveError::Fallback(e.to_string()))?;
    let mut notes = Vec::new();
    let (eps, attempt) = match mode {
        Mode::Hint(h) => {
            check_hint(instance, h)?;
            let r = fill_boxes(instance, &h.params, &h.boxes).map(|p| (h.params.t, p));
            (h.params.epsilon.clone(), r.map(|x| (Provenance::Hint, x)))
        }
        Mode::Exhaustive(caps) => {
            let eps = normalize_epsilon(epsilon);
            if instance.strip_width > caps.max_width || instance.items.len() > caps.max_items {
                return Err(SolveError::CapExceeded(format!(
                    "W = {}, n = {} (caps {}, {})",
                    instance.strip_width,
                    instance.items.len(),
                    caps.max_width,
                    caps.max_items
                )));
            }
            let lb = lower_bound(instance);
            let r = match dual_approx_search(lb..=2 * lb, |t| exhaustive_probe(instance, &eps, t, caps)) {
                DualOutcome::Found { value, probes, .. } => {
                    notes.push(format!("probes={probes}"));
                    Ok(value)
                }
                DualOutcome::Exhausted { probes } => Err(format!("no guess accepted after {probes} probes")),
            };
            (eps, r.map(|x| (Provenance::Exhaustive, x)))
        }
        Mode::Heuristic => {
            let eps = normalize_epsilon(epsilon);
            let t = lower_bound(instance);
            let r = params_for(instance, &eps, t).and_then(|p| shelf_by_class(instance, &p)).map(|pk| (t, pk));
            (eps, r.map(|x| (Provenance::Heuristic, x)))
        }
    };
    let mut out = StructuredResult {
        packing: fallback.clone(),
        source: Source::Fallback,
        t: None,
        epsilon: eps,
        structured_height: None,
        fallback_height: fallback.height,
        notes,
    };
    match attempt {
        Ok((prov, (t, packing))) => {
            let report = validate_packing(instance, &packing, false);
            if !report.is_valid() {
                out.notes.push(format!("structured packing rejected: {:?}", report.violations.first()));
                return Ok(out);
            }
            out.t = Some(t);
            out.structured_height = Some(packing.height);
            if packing.height <= fallback.height {
                out.packing = packing;
                out.source = Source::Structured(prov);
            }
        }
        Err(e) => out.notes.push(e),
    }
    Ok(out)
}

fn params_for(instance: &Instance, eps: &Q, t: i64) -> Result<Params, String> {
    let dm = find_delta_mu(instance, eps, FSpec::LINEAR, t).map_err(|e| e.to_string())?;
    Params::new(eps.clone(), dm.delta, dm.mu, t, FSpec::LINEAR).map_err(|e| e.to_string())
}

/// The height limit of a structure, `⌈(5/4 + 5ε)·T⌉`.
pub fn structure_height(p: &Params) -> i64 {
    ceil_i64(&((q(5, 4) + qi(5) * &p.epsilon) * qi(p.t)))
}

fn check_hint(instance: &Instance, h: &HintSpec) -> Result<(), SolveError> {
    let top = structure_height(&h.params);
    let pitch = &h.params.epsilon * &h.params.delta * qi(h.params.t);
    let on_grid = |v: i64| {
        let r = qi(v) / &pitch;
        r.is_integer()
    };
    for (k, b) in h.boxes.iter().enumerate() {
        let r = b.rect;
        if r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.right() > instance.strip_width || r.top() > top {
            return Err(SolveError::InvalidHint(format!("box {k} leaves the {}x{top} region", instance.strip_width)));
        }
        if !on_grid(r.y) || !on_grid(r.top()) {
            return Err(SolveError::InvalidHint(format!("box {k} is off the horizontal grid")));
        }
        if let Some(j) = h.boxes[k + 1..].iter().position(|o| o.rect.overlaps(&r)) {
            return Err(SolveError::InvalidHint(format!("boxes {k} and {} overlap", k + 1 + j)));
        }
    }
    Ok(())
}

/// Assigns large items to large boxes, one each, by augmenting paths.
fn match_large(items: &[&Item], boxes: &[Rect]) -> Option<Vec<usize>> {
    fn augment(i: usize, items: &[&Item], boxes: &[Rect], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for (b, r) in boxes.iter().enumerate() {
            if seen[b] || items[i].width > r.w || items[i].height > r.h {
                continue;
            }
            seen[b] = true;
            if owner[b].is_none_or(|o| augment(o, items, boxes, seen, owner)) {
                owner[b] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; boxes.len()];
    for i in 0..items.len() {
        let mut seen = vec![false; boxes.len()];
        if !augment(i, items, boxes, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut box_of = vec![0; items.len()];
    for (b, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            box_of[*i] = b;
        }
    }
    Some(box_of)
}

/// Packs the instance into the boxes of a structure and stacks the rest above.
pub fn fill_boxes(instance: &Instance, p: &Params, boxes: &[BoxArea]) -> Result<Packing, String> {
    let w = instance.strip_width;
    let mut by_class: BTreeMap<ItemClass, Vec<&Item>> = BTreeMap::new();
    for it in &instance.items {
        by_class.entry(classify(it, p, w)).or_default().push(it);
    }
    let class = |c: ItemClass| by_class.get(&c).cloned().unwrap_or_default();
    let rects = |k: &[BoxKind]| boxes.iter().filter(|b| k.contains(&b.kind)).map(|b| b.rect).collect::<Vec<_>>();
    let mut placed: Vec<PlacedItem> = Vec::new();
    let mut empty: Vec<Rect> = rects(&[BoxKind::SmallEmpty]);

    // Large and medium-vertical items, one per box.
    let mut large = class(ItemClass::Large);
    large.extend(class(ItemClass::MediumVertical));
    let lboxes = rects(&[BoxKind::LargeItem]);
    let box_of = match_large(&large, &lboxes).ok_or("large items do not match the large boxes")?;
    let mut used = vec![false; lboxes.len()];
    for (it, &b) in large.iter().zip(&box_of) {
        let r = lboxes[b];
        used[b] = true;
        placed.push(PlacedItem { id: it.id.clone(), x: r.x, y: r.y });
        empty.push(Rect::new(r.x + it.width, r.y, r.w - it.width, r.h));
        empty.push(Rect::new(r.x, r.y + it.height, it.width, r.h - it.height));
    }
    empty.extend(lboxes.iter().zip(&used).filter(|(_, u)| !**u).map(|(r, _)| *r));

    // Tall items side by side in boxes of their rounded height.
    let tall = class(ItemClass::Tall);
    let tboxes: Vec<(Rect, i64)> = boxes
        .iter()
        .filter(|b| b.kind == BoxKind::TallSub)
        .map(|b| (b.rect, rounded_class_height(b.uniform_height.unwrap_or(b.rect.h), p).unwrap_or(b.rect.h)))
        .collect();
    let tv_items: Vec<TvItem> = tall
        .iter()
        .map(|it| TvItem { height: rounded_class_height(it.height, p).unwrap_or(it.height), width: it.width })
        .collect();
    let tv_boxes: Vec<TvBox> = tboxes.iter().map(|&(r, h)| TvBox { height: h, width: r.w }).collect();
    let assignment = dp_place_tall_vertical(&tv_boxes, &tv_items).ok_or("tall items do not fit their boxes")?;
    let mut fill = vec![0i64; tboxes.len()];
    for (it, &b) in tall.iter().zip(&assignment.box_of) {
        let r = tboxes[b].0;
        placed.push(PlacedItem { id: it.id.clone(), x: r.x + fill[b], y: r.y });
        fill[b] += it.width;
    }
    for (&(r, _), &f) in tboxes.iter().zip(&fill) {
        empty.push(Rect::new(r.x + f, r.y, r.w - f, r.h));
    }

    // Vertical items through the height-configuration LP, with rounded heights.
    let vertical: Vec<Item> = class(ItemClass::Vertical)
        .into_iter()
        .map(|it| Item::new(it.id.clone(), it.width, rounded_class_height(it.height, p).unwrap_or(it.height)))
        .collect();
    let mut extras: Vec<ExtraBox> = Vec::new();
    let vboxes = rects(&[BoxKind::VerticalSub, BoxKind::ExtraVertical]);
    if vertical.is_empty() {
        empty.extend(vboxes);
    } else {
        let quarter = floor_i64(&(p.big_h() / qi(4)));
        let v = place_vertical(&vboxes, &vertical, quarter).map_err(|e| format!("vertical items: {e}"))?;
        placed.extend(v.placements);
        extras.extend(v.extra_boxes);
        empty.extend(v.empty_boxes);
    }

    // Horizontal items through the width-configuration LP.
    let horizontal: Vec<Item> = class(ItemClass::Horizontal).into_iter().cloned().collect();
    let hboxes = rects(&[BoxKind::Horizontal]);
    let mut bands: Vec<(i64, Vec<PlacedItem>)> = Vec::new();
    if horizontal.is_empty() {
        empty.extend(hboxes);
    } else {
        let h = place_horizontal(&hboxes, &horizontal, &p.epsilon, &p.delta, w)
            .map_err(|e| format!("horizontal items: {e}"))?;
        placed.extend(h.placements);
        empty.extend(h.empty_boxes);
        bands.push((h.top_height, h.top_items));
    }

    // Small items into the empty space, medium items on top.
    empty.retain(|r| r.w > 0 && r.h > 0);
    let small: Vec<Item> = class(ItemClass::Small).into_iter().cloned().collect();
    if !small.is_empty() {
        let s = place_small(&empty, &small, &p.mu, &p.epsilon, w, p.t);
        placed.extend(s.placements);
        bands.push((s.overflow_height, s.overflow_items));
    }
    let medium: Vec<Item> = class(ItemClass::Medium).into_iter().cloned().collect();
    if !medium.is_empty() {
        let m = place_medium(&medium, w);
        bands.push((m.height, m.placements));
    }

    let heights: BTreeMap<&str, i64> = instance.items.iter().map(|it| (it.id.as_str(), it.height)).collect();
    let mut top = boxes.iter().map(|b| b.rect.top()).max().unwrap_or(0);
    top = top.max(placed.iter().map(|pi| pi.y + heights[pi.id.as_str()]).max().unwrap_or(0));
    let (band, band_h) = shelve_extras(&extras, w)?;
    bands.insert(0, (band_h, band));
    for (h, items) in bands {
        placed.extend(items.into_iter().map(|pi| PlacedItem { y: pi.y + top, ..pi }));
        top += h;
    }
    let placements = placed.into_iter().map(|pi| Placement::new(pi.id, pi.x, pi.y)).collect();
    Ok(Packing::new(instance, placements))
}

/// Shelf-packs extra boxes by decreasing height; returns their items and the band height.
fn shelve_extras(extras: &[ExtraBox], strip_width: i64) -> Result<(Vec<PlacedItem>, i64), String> {
    let mut order: Vec<&ExtraBox> = extras.iter().filter(|e| !e.items.is_empty()).collect();
    order.sort_by(|a, b| b.height.cmp(&a.height).then(b.width.cmp(&a.width)));
    let (mut x, mut y, mut shelf) = (0, 0, 0);
    let mut out = Vec::new();
    for e in order {
        if e.width > strip_width {
            return Err("extra box wider than the strip".into());
        }
        if x + e.width > strip_width {
            y += shelf;
            x = 0;
            shelf = 0;
        }
        if shelf == 0 {
            shelf = e.height;
        }
        out.extend(e.items.iter().map(|pi| PlacedItem { id: pi.id.clone(), x: pi.x + x, y: pi.y + y }));
        x += e.width;
    }
    Ok((out, y + shelf))
}

/// Item groups that share a box: each large item alone, tall items by rounded
/// height, and one group each for the remaining classes.
fn class_groups(instance: &Instance, p: &Params) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<(u8, i64), Vec<usize>> = BTreeMap::new();
    for (k, it) in instance.items.iter().enumerate() {
        let key = match classify(it, p, instance.strip_width) {
            ItemClass::Large | ItemClass::MediumVertical => (0, k as i64),
            ItemClass::Tall => (1, rounded_class_height(it.height, p).unwrap_or(it.height)),
            ItemClass::Vertical => (2, 0),
            ItemClass::Horizontal => (3, 0),
            ItemClass::Small | ItemClass::Medium => (4, 0),
        };
        groups.entry(key).or_default().push(k);
    }
    groups.into_values().collect()
}

/// Guesses one box per class group and positions the boxes, both by exhaustive
/// search within the caps.
fn exhaustive_probe(instance: &Instance, eps: &Q, t: i64, caps: &ExhaustiveCaps) -> Option<(i64, Packing)> {
    let p = params_for(instance, eps, t).ok()?;
    let groups = class_groups(instance, &p);
    if groups.len() > caps.max_boxes {
        return None;
    }
    let limit = structure_height(&p);
    let w = instance.strip_width;
    // Pareto-minimal box shapes per group, with the fitted item positions.
    let mut shapes: Vec<Vec<(i64, i64, Spots)>> = Vec::new();
    for g in &groups {
        let dims: Vec<(i64, i64)> = g.iter().map(|&k| (instance.items[k].width, instance.items[k].height)).collect();
        let area: i64 = dims.iter().map(|d| d.0 * d.1).sum();
        let max_w = dims.iter().map(|d| d.0).max().unwrap_or(1);
        let max_h = dims.iter().map(|d| d.1).max().unwrap_or(1);
        let mut opts: Vec<(i64, i64, Spots)> = Vec::new();
        for bw in max_w..=w {
            let mut bh = ((area + bw - 1) / bw).max(max_h);
            while bh <= limit && opts.last().is_none_or(|o| bh < o.1) {
                if let Ok(Some(pos)) = fit_in_box(&dims, bw, bh, false, caps.budget) {
                    opts.push((bw, bh, pos));
                    break;
                }
                bh += 1;
            }
        }
        if opts.is_empty() {
            return None;
        }
        shapes.push(opts);
    }
    let mut choice = vec![0usize; groups.len()];
    loop {
        let dims: Vec<(i64, i64)> = choice.iter().zip(&shapes).map(|(&c, s)| (s[c].0, s[c].1)).collect();
        if let Ok(Some(corners)) = fit_in_box(&dims, w, limit, false, caps.budget) {
            let mut placements = Vec::new();
            for ((g, (&c, s)), &(bx, by, _)) in groups.iter().zip(choice.iter().zip(&shapes)).zip(&corners) {
                for (&k, &(x, y, _)) in g.iter().zip(&s[c].2) {
                    placements.push(Placement::new(instance.items[k].id.clone(), bx + x, by + y));
                }
            }
            return Some((t, Packing::new(instance, placements)));
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return None;
            }
            choice[i] += 1;
            if choice[i] < shapes[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// One shelf band per class group, stacked by decreasing group height.
fn shelf_by_class(instance: &Instance, p: &Params) -> Result<Packing, String> {
    let mut bands: Vec<Packing> = Vec::new();
    let mut members: Vec<Instance> = Vec::new();
    let mut larges: Vec<Item> = Vec::new();
    for g in class_groups(instance, p) {
        let items: Vec<Item> = g.iter().map(|&k| instance.items[k].clone()).collect();
        if g.len() == 1 && matches!(classify(&items[0], p, instance.strip_width), ItemClass::Large | ItemClass::MediumVertical) {
            larges.extend(items);
            continue;
        }
        let sub = Instance::new(instance.strip_width, items);
        bands.push(ffdh(&sub));
        members.push(sub);
    }
    if !larges.is_empty() {
        let sub = Instance::new(instance.strip_width, larges);
        bands.push(nfdh(&sub));
        members.push(sub);
    }
    let mut y = 0;
    let mut placements = Vec::new();
    for b in bands {
        placements.extend(b.placements.iter().map(|pl| Placement { y: pl.y + y, ..pl.clone() }));
        y += b.height;
    }
    Ok(Packing::new(instance, placements))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_normalization() {
        assert_eq!(normalize_epsilon(&q(1, 2)), q(1, 20));
        assert_eq!(normalize_epsilon(&qi(3)), q(1, 4));
        assert_eq!(normalize_epsilon(&qi(1)), q(1, 10));
        assert_eq!(normalize_epsilon(&q(3, 10)), q(1, 34));
    }

    #[test]
    fn single_full_width_item() {
        let inst = Instance::from_dims(10, &[(10, 7)]);
        for mode in [Mode::Heuristic, Mode::Exhaustive(ExhaustiveCaps::default())] {
            let r = solve_structured(&inst, &qi(1), &mode).unwrap();
            assert_eq!(r.height(), 7, "{mode:?}");
        }
        let p = Params::new(q(1, 4), q(1, 4), q(1, 16), 8, FSpec::LINEAR).unwrap();
        let hint = HintSpec { params: p, boxes: vec![BoxArea::new(BoxKind::LargeItem, Rect::new(0, 0, 10, 7))] };
        let r = solve_structured(&inst, &qi(1), &Mode::Hint(hint)).unwrap();
        assert_eq!(r.height(), 7);
        assert_eq!(r.source, Source::Structured(Provenance::Hint));
    }

    #[test]
    fn exhaustive_is_never_below_optimum() {
        use crate::solver::{exact_oracle, OracleLimits};
        for seed in 0..25 {
            let inst = crate::gen::uniform(seed, 2 + seed as usize % 5, 6 + seed as i64 % 7, 6);
            let r = solve_structured(&inst, &qi(1), &Mode::Exhaustive(ExhaustiveCaps::default())).unwrap();
            assert!(validate_packing(&inst, &r.packing, false).is_valid());
            let (opt, _) = exact_oracle(&inst, OracleLimits::default(), false).unwrap();
            assert!(r.height() >= opt);
            assert!(r.height() <= r.fallback_height);
        }
    }

    #[test]
    fn hint_is_checked() {
        let inst = Instance::from_dims(10, &[(10, 7)]);
        let p = Params::new(q(1, 4), q(1, 4), q(1, 16), 8, FSpec::LINEAR).unwrap();
        let boxes = vec![
            BoxArea::new(BoxKind::LargeItem, Rect::new(0, 0, 10, 7)),
            BoxArea::new(BoxKind::SmallEmpty, Rect::new(5, 5, 5, 4)),
        ];
        let e = solve_structured(&inst, &qi(1), &Mode::Hint(HintSpec { params: p.clone(), boxes })).unwrap_err();
        assert!(matches!(e, SolveError::InvalidHint(_)), "{e}");
        let boxes = vec![BoxArea::new(BoxKind::LargeItem, Rect::new(0, 0, 11, 7))];
        assert!(solve_structured(&inst, &qi(1), &Mode::Hint(HintSpec { params: p, boxes })).is_err());
    }

    #[test]
    fn wrong_hint_falls_back() {
        let inst = Instance::from_dims(10, &[(10, 7), (6, 6)]);
        let p = Params::new(q(1, 4), q(1, 4), q(1, 16), 8, FSpec::LINEAR).unwrap();
        let boxes = vec![BoxArea::new(BoxKind::LargeItem, Rect::new(0, 0, 10, 7))];
        let r = solve_structured(&inst, &qi(1), &Mode::Hint(HintSpec { params: p, boxes })).unwrap();
        assert_eq!(r.source, Source::Fallback);
        assert!(validate_packing(&inst, &r.packing, false).is_valid());
    }

    #[test]
    fn generated_hints() {
        for seed in 0..30 {
            let c = crate::gen::structured_case(seed);
            let hint = HintSpec { params: c.params.clone(), boxes: c.boxes.clone() };
            let r = solve_structured(&c.instance, &q(1, 4), &Mode::Hint(hint)).unwrap();
            assert!(validate_packing(&c.instance, &r.packing, false).is_valid());
            let h = r.structured_height.unwrap_or_else(|| panic!("seed {seed}: {:?}", r.notes));
            assert!(qi(h) <= r.bound().unwrap(), "seed {seed}: {h}");
            assert!(r.height() <= h.min(r.fallback_height));
        }
    }

    #[test]
    fn restructured_packings_as_hints() {
        use crate::restructure::{build_structure, partition_into_boxes};
        let mut used = 0;
        for seed in 0..30 {
            let c = crate::gen::structured_case(seed);
            let Ok(part) = partition_into_boxes(&c.instance, &c.packing, &c.params, 512) else { continue };
            let s = match build_structure(&c.instance, &c.packing, &c.params, &part) {
                Ok(s) => s,
                Err(e) => panic!("seed {seed}: {e}"),
            };
            let hint = HintSpec { params: c.params.clone(), boxes: s.hint() };
            let r = solve_structured(&c.instance, &q(1, 4), &Mode::Hint(hint)).unwrap();
            assert!(validate_packing(&c.instance, &r.packing, false).is_valid());
            let h = r.structured_height.unwrap_or_else(|| panic!("seed {seed}: {:?}", r.notes));
            assert!(qi(h) <= r.bound().unwrap());
            used += 1;
        }
        assert!(used >= 20, "{used}");
    }
}
