//! Reordering a whole grid packing and reordering single boxes of it.

use super::engine::{arrange, arrange_medium, arrange_small, Arranged, Content, Frame, ReorderStats};
use super::grid::{check_disjoint, slice_multiset, GridError, GridPacking, Slice, TallItem};
use super::{ContainerSet, ReorderError};

#[derive(Clone, Debug)]
pub struct SimpleReorder {
    /// The rearranged packing; it reaches up to `H + ⌈H/4⌉` and its tall items
    /// may be off the grid.
    pub packing: GridPacking,
    pub containers: ContainerSet,
    pub stats: ReorderStats,
}

/// Rearranges a grid packing of height `H` into at most `3N/2` containers for
/// tall items and `9N/4 + 1` for slices, using height `H + ⌈H/4⌉`.
pub fn simple_reorder(gp: &GridPacking) -> Result<SimpleReorder, ReorderError> {
    gp.check(gp.height)?;
    let f = Frame::new(gp.height, gp.height);
    let content = Content { width: gp.strip_width, tall: gp.tall.clone(), slices: gp.slices.clone() };
    let out = arrange(&content, f)?;
    // Shifts by ⌈H/4⌉ need not keep items on the grid, so only disjointness is
    // checked here.
    let packing = GridPacking { tall: out.tall, slices: out.slices, ..gp.clone() };
    check_disjoint(packing.strip_width, f.top, &packing.tall, &packing.slices)?;
    if packing.slice_multiset() != gp.slice_multiset() {
        return Err(ReorderError::stage("result", "slices were not conserved"));
    }
    Ok(SimpleReorder { packing, containers: out.containers, stats: out.stats })
}

/// What lies inside one box, relative to its lower left corner.
///
/// Tall items reaching past the left or right side are the box's unmovable
/// items; only their part inside the box is rearranged around.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxContents {
    pub width: i64,
    pub height: i64,
    pub tall: Vec<TallItem>,
    pub slices: Vec<Slice>,
}

impl BoxContents {
    fn clipped(&self) -> Vec<TallItem> {
        self.tall
            .iter()
            .map(|t| {
                let x = t.x.max(0);
                TallItem { x, width: (t.x + t.width).min(self.width) - x, ..t.clone() }
            })
            .collect()
    }

    fn check(&self, big_h: i64) -> Result<(), ReorderError> {
        for t in &self.tall {
            if 4 * t.height <= big_h {
                return Err(GridError::NotTall(t.id.clone()).into());
            }
            if t.x + t.width <= 0 || t.x >= self.width {
                return Err(GridError::OutOfRange(t.id.clone()).into());
            }
        }
        check_disjoint(self.width, self.height, &self.clipped(), &self.slices)?;
        Ok(())
    }

    fn content(&self) -> Content {
        Content { width: self.width, tall: self.tall.clone(), slices: self.slices.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct BoxReorder {
    /// Tall items in box coordinates; unmovable items keep their position.
    pub tall: Vec<TallItem>,
    pub slices: Vec<Slice>,
    pub containers: ContainerSet,
    pub stats: ReorderStats,
}

fn finish(b: &BoxContents, out: Arranged, limit: i64) -> Result<BoxReorder, ReorderError> {
    let moved = BoxContents { tall: out.tall, slices: out.slices, height: limit, ..b.clone() };
    check_disjoint(moved.width, limit, &moved.clipped(), &moved.slices)?;
    Ok(BoxReorder { tall: moved.tall, slices: moved.slices, containers: out.containers, stats: out.stats })
}

/// Reorders a box of height above `3H/4` into one of height `h(B) + ⌈H/4⌉`.
///
/// At most two items may cross each side, and none of them may reach above
/// `h(B) − H/4`.
pub fn reorder_tall_box(b: &BoxContents, big_h: i64) -> Result<BoxReorder, ReorderError> {
    if 4 * b.height <= 3 * big_h || b.height > big_h {
        return Err(ReorderError::HeightOutOfRange { hb: b.height, big_h });
    }
    b.check(big_h)?;
    let f = Frame::new(big_h, b.height);
    let out = arrange(&b.content(), f)?;
    let r = finish(b, out, f.top)?;
    if slice_multiset(&r.slices) != slice_multiset(&b.slices) {
        return Err(ReorderError::stage("result", "slices were not conserved"));
    }
    Ok(r)
}

/// Reorders a box of height at most `H/2` in place: each tall item drops to the
/// bottom and columns are sorted by its height.
pub fn reorder_small_box(b: &BoxContents, big_h: i64) -> Result<BoxReorder, ReorderError> {
    if 2 * b.height > big_h {
        return Err(ReorderError::HeightOutOfRange { hb: b.height, big_h });
    }
    b.check(big_h)?;
    let out = arrange_small(&b.content(), big_h, b.height)?;
    let r = finish(b, out.arranged, b.height)?;
    if slice_multiset(&r.slices) != slice_multiset(&b.slices) {
        return Err(ReorderError::stage("result", "slices were not conserved"));
    }
    Ok(r)
}

/// Slices moved out of a box, stacked first-fit decreasing into unit columns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtraSlices {
    pub width: i64,
    pub height: i64,
    pub slices: Vec<Slice>,
}

#[derive(Clone, Debug)]
pub struct MediumReorder {
    pub reorder: BoxReorder,
    pub extra: ExtraSlices,
    /// Width of the columns whose middle slices were moved out.
    pub removed_width: i64,
}

/// Reorders a box of height in `(H/2, 3H/4]` in place.
///
/// Where two tall items share a column one goes to the bottom and one to the
/// top, and the slices between them move to an extra box of height `⌊H/4⌋`.
pub fn reorder_medium_box(b: &BoxContents, big_h: i64) -> Result<MediumReorder, ReorderError> {
    if 2 * b.height <= big_h || 4 * b.height > 3 * big_h {
        return Err(ReorderError::HeightOutOfRange { hb: b.height, big_h });
    }
    b.check(big_h)?;
    let out = arrange_medium(&b.content(), big_h, b.height)?;
    let removed_width = out.removed.len() as i64;
    let extra = stack_extra(out.removed, big_h / 4);
    let r = finish(b, out.arranged, b.height)?;
    check_disjoint(extra.width, extra.height, &[], &extra.slices)?;
    let mut all = r.slices.clone();
    all.extend(extra.slices.iter().cloned());
    if slice_multiset(&all) != slice_multiset(&b.slices) {
        return Err(ReorderError::stage("result", "slices were not conserved"));
    }
    Ok(MediumReorder { reorder: r, extra, removed_width })
}

fn stack_extra(removed: Vec<Vec<Slice>>, cap: i64) -> ExtraSlices {
    let mut all: Vec<Slice> = removed.into_iter().flatten().collect();
    all.sort_by(|a, b| b.height.cmp(&a.height).then_with(|| a.cmp(b)));
    let mut loads: Vec<i64> = Vec::new();
    let mut slices = Vec::with_capacity(all.len());
    for s in all {
        let bin = match loads.iter().position(|&l| l + s.height <= cap) {
            Some(k) => k,
            None => {
                loads.push(0);
                loads.len() - 1
            }
        };
        slices.push(Slice { x: bin as i64, y: loads[bin], ..s });
        loads[bin] += slices.last().unwrap().height;
    }
    ExtraSlices { width: loads.len() as i64, height: cap, slices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restructure::grid::make_grid_packing;
    use crate::model::{Instance, Packing, Placement};

    fn gp(w: i64, h: i64, n: i64, items: &[(i64, i64, i64, i64)]) -> GridPacking {
        let dims: Vec<(i64, i64)> = items.iter().map(|&(_, _, w, h)| (w, h)).collect();
        let inst = Instance::from_dims(w, &dims);
        let pl = items.iter().enumerate().map(|(k, &(x, y, _, _))| Placement::new(k.to_string(), x, y)).collect();
        make_grid_packing(&inst, &Packing::new(&inst, pl), h, n).unwrap()
    }

    #[test]
    fn first_shift_example() {
        // One tall item crossing H/4 with a slice below it: the item drops to
        // the bottom and the slice ends up on top of it.
        let g = gp(4, 8, 8, &[(0, 1, 4, 6), (0, 0, 4, 1)]);
        let r = simple_reorder(&g).unwrap();
        assert_eq!(r.packing.tall[0].y, 0);
        assert!(r.packing.slices.iter().all(|s| s.y >= 6));
        assert_eq!(r.packing.slice_multiset(), g.slice_multiset());
    }

    #[test]
    fn only_slices() {
        let g = gp(4, 8, 4, &[(0, 0, 4, 2), (0, 2, 3, 2), (0, 4, 1, 1)]);
        let r = simple_reorder(&g).unwrap();
        assert!(r.containers.tall_containers.is_empty());
        assert!(r.packing.top() <= 10);
    }

    #[test]
    fn spec_bounds_small_case() {
        // H = 16, N = 8.
        let g = gp(
            6,
            16,
            8,
            &[(0, 2, 2, 12), (2, 0, 2, 6), (2, 8, 2, 8), (4, 4, 2, 8), (4, 0, 2, 2), (0, 0, 2, 2), (4, 12, 1, 2)],
        );
        let r = simple_reorder(&g).unwrap();
        assert!(r.containers.tall_containers.len() as i64 * 2 <= 3 * 8);
        assert!(r.containers.sliced_containers.len() as i64 * 4 <= 9 * 8 + 4);
        assert!(r.packing.top() <= 20);
    }

    /// Tall containers the counting argument allows for any `N`: one per line
    /// an item of each grid height can touch.
    fn tall_bound(n: i64) -> i64 {
        (1..=n).filter(|&k| 4 * k > n).map(|k| if 4 * k > 3 * n { 1 } else if 2 * k > n { 2 } else { 3 }).sum()
    }

    #[test]
    fn tall_bound_matches_three_halves() {
        for n in [4, 8, 12, 16, 20] {
            assert_eq!(tall_bound(n), 3 * n / 2);
        }
        assert_eq!(tall_bound(7), 12);
    }

    #[test]
    fn random_grid_packings() {
        for seed in 0..300 {
            let lines = 4 + (seed % 17) as i64;
            let step = 1 + (seed % 3) as i64;
            let c = crate::gen::grid_case(seed, 8 + (seed % 25) as i64, lines, step, 30);
            let g = make_grid_packing(&c.instance, &c.packing, c.height, lines).unwrap();
            let r = simple_reorder(&g).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            let big_h = c.height;
            let (tall, sliced) = (r.containers.tall_containers.len() as i64, r.containers.sliced_containers.len() as i64);
            assert!(r.packing.top() <= (5 * big_h + 3) / 4, "seed {seed}");
            assert!(tall <= tall_bound(lines), "seed {seed}: {tall} tall");
            if lines % 4 == 0 {
                assert!(4 * sliced <= 9 * lines + 4, "seed {seed}: {sliced} sliced");
            }
        }
    }

    #[test]
    fn random_tall_boxes() {
        for seed in 0..200 {
            let lines = 4 + (seed % 17) as i64;
            let box_lines = lines - (seed % 3) as i64;
            if 4 * box_lines <= 3 * lines {
                continue;
            }
            let c = crate::gen::box_case(seed, 6 + (seed % 20) as i64, lines, 1 + (seed % 2) as i64, box_lines, 2, 30);
            let b = &c.contents;
            let r = reorder_tall_box(b, c.big_h).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            let n = c.lines;
            assert!(4 * r.containers.tall_containers.len() as i64 <= 8 * n * n + 15 * n + 32, "seed {seed}");
            assert!(4 * r.containers.sliced_containers.len() as i64 <= 16 * n * n + 31 * n + 20, "seed {seed}");
            assert!(4 * (r.containers.height - b.height) <= c.big_h + 3, "seed {seed}");
            for t in b.tall.iter().filter(|t| t.x < 0 || t.x + t.width > b.width) {
                assert!(r.tall.contains(t), "seed {seed}: {} moved", t.id);
            }
        }
    }

    #[test]
    fn random_small_and_medium_boxes() {
        for seed in 0..200 {
            let lines = 4 + (seed % 13) as i64;
            let step = 1 + (seed % 2) as i64;
            let small = (seed % 2 == 0).then_some(lines / 2).filter(|&l| l > 0);
            let medium = (lines / 2 + 1..=3 * lines / 4).last();
            if let Some(bl) = small {
                let c = crate::gen::box_case(seed, 5 + (seed % 20) as i64, lines, step, bl, 0, 20);
                reorder_small_box(&c.contents, c.big_h).unwrap_or_else(|e| panic!("small seed {seed}: {e}"));
            }
            if let Some(bl) = medium {
                let c = crate::gen::box_case(seed, 5 + (seed % 20) as i64, lines, step, bl, 0, 20);
                let m = reorder_medium_box(&c.contents, c.big_h).unwrap_or_else(|e| panic!("medium seed {seed}: {e}"));
                assert!(m.extra.width <= m.removed_width, "seed {seed}");
            }
        }
    }

    #[test]
    fn small_box_sorts_columns() {
        let b = BoxContents {
            width: 4,
            height: 8,
            tall: vec![TallItem::new("a", 0, 3, 1, 5), TallItem::new("b", 2, 0, 2, 6)],
            slices: vec![Slice::new("s", 0, 0, 2), Slice::new("s2", 1, 1, 4)],
        };
        let r = reorder_small_box(&b, 16).unwrap();
        let a = r.tall.iter().find(|t| t.id == "a").unwrap();
        let bb = r.tall.iter().find(|t| t.id == "b").unwrap();
        assert_eq!((a.y, bb.y), (0, 0));
        assert!(bb.x < a.x, "taller item first");
    }

    #[test]
    fn medium_box_moves_middle_slices_out() {
        let b = BoxContents {
            width: 2,
            height: 12,
            tall: vec![TallItem::new("a", 0, 0, 2, 5), TallItem::new("b", 0, 7, 2, 5)],
            slices: vec![Slice::new("s", 0, 5, 2), Slice::new("s", 1, 5, 2)],
        };
        let r = reorder_medium_box(&b, 16).unwrap();
        assert_eq!(r.removed_width, 2);
        assert_eq!(r.extra.slices.len(), 2);
        assert_eq!(r.extra.height, 4);
        assert_eq!(r.extra.width, 1);
        assert!(r.reorder.slices.is_empty());
    }

    #[test]
    fn tall_box_with_unmovable() {
        // Box of height 14 in a packing of height 16; "u" reaches in from the left.
        let b = BoxContents {
            width: 6,
            height: 14,
            tall: vec![TallItem::new("u", -2, 2, 4, 6), TallItem::new("t", 3, 1, 2, 8)],
            slices: vec![Slice::new("s", 0, 0, 2), Slice::new("r", 5, 3, 2), Slice::new("q", 2, 10, 2)],
        };
        let r = reorder_tall_box(&b, 16).unwrap();
        let u = r.tall.iter().find(|t| t.id == "u").unwrap();
        assert_eq!((u.x, u.y), (-2, 2));
        assert!(r.containers.height <= 18);
    }

    #[test]
    fn border_violation() {
        let b = BoxContents {
            width: 6,
            height: 14,
            tall: vec![TallItem::new("u", -2, 6, 4, 6)],
            slices: vec![],
        };
        assert_eq!(reorder_tall_box(&b, 16).unwrap_err(), ReorderError::BorderViolation("u".into()));
    }

    #[test]
    fn height_ranges() {
        let b = BoxContents { width: 2, height: 10, tall: vec![], slices: vec![] };
        assert!(matches!(reorder_tall_box(&b, 16), Err(ReorderError::HeightOutOfRange { .. })));
        assert!(matches!(reorder_small_box(&b, 16), Err(ReorderError::HeightOutOfRange { .. })));
        assert!(reorder_medium_box(&b, 16).is_ok());
    }
}
