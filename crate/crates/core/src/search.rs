//! Exhaustive feasibility search for packing rectangles into a `W × H` box.
//!
//! The search fills the grid cell by cell in row-major order. At the first free
//! cell it either anchors an unplaced rectangle with its lower-left corner there or
//! declares the cell wasted. Every packing can be reached this way, so a `None`
//! answer is a proof of infeasibility (as long as the node budget was not hit).

use crate::model::{Instance, Packing, Placement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("search node budget of {0} exhausted")]
pub struct BudgetExceeded(pub u64);

struct Grid {
    w: usize,
    h: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Grid {
    fn new(w: usize, h: usize) -> Self {
        let words = w.div_ceil(64);
        Grid { w, h, words, bits: vec![0; words * h] }
    }

    fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.words + x / 64] >> (x % 64) & 1 == 1
    }

    fn set_row(&mut self, y: usize, x0: usize, x1: usize, on: bool) {
        for x in x0..x1 {
            let idx = y * self.words + x / 64;
            if on {
                self.bits[idx] |= 1 << (x % 64);
            } else {
                self.bits[idx] &= !(1 << (x % 64));
            }
        }
    }

    fn free(&self, x: usize, y: usize, w: usize, h: usize) -> bool {
        if x + w > self.w || y + h > self.h {
            return false;
        }
        (y..y + h).all(|yy| (x..x + w).all(|xx| !self.get(xx, yy)))
    }

    fn fill(&mut self, x: usize, y: usize, w: usize, h: usize, on: bool) {
        for yy in y..y + h {
            self.set_row(yy, x, x + w, on);
        }
    }

    fn run_from(&self, x: usize, y: usize) -> usize {
        let mut r = 0;
        while x + r < self.w && !self.get(x + r, y) {
            r += 1;
        }
        r
    }
}

struct Kind {
    w: usize,
    h: usize,
    members: Vec<usize>,
    used: usize,
}

struct Search<'a> {
    grid: Grid,
    kinds: Vec<Kind>,
    rotate: bool,
    waste_left: i64,
    nodes: u64,
    budget: u64,
    out: &'a mut Vec<(usize, usize, usize, bool)>,
}

impl Search<'_> {
    fn first_free(&self, from: usize) -> Option<usize> {
        (from..self.grid.w * self.grid.h).find(|&c| !self.grid.get(c % self.grid.w, c / self.grid.w))
    }

    fn min_width_left(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| k.used < k.members.len())
            .map(|k| if self.rotate { k.w.min(k.h) } else { k.w })
            .min()
            .unwrap_or(usize::MAX)
    }

    fn go(&mut self, from: usize, left: usize) -> Result<bool, BudgetExceeded> {
        if left == 0 {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExceeded(self.budget));
        }
        let Some(cell) = self.first_free(from) else { return Ok(false) };
        let (x, y) = (cell % self.grid.w, cell / self.grid.w);
        let run = self.grid.run_from(x, y);
        if self.min_width_left() > run {
            // Nothing fits here: the whole run is waste.
            let need = run as i64;
            if self.waste_left < need {
                return Ok(false);
            }
            self.waste_left -= need;
            self.grid.set_row(y, x, x + run, true);
            let r = self.go(cell + run, left);
            self.grid.set_row(y, x, x + run, false);
            self.waste_left += need;
            return r;
        }
        for k in 0..self.kinds.len() {
            if self.kinds[k].used == self.kinds[k].members.len() {
                continue;
            }
            let (kw, kh) = (self.kinds[k].w, self.kinds[k].h);
            let orients: &[bool] = if self.rotate && kw != kh { &[false, true] } else { &[false] };
            for &rot in orients {
                let (w, h) = if rot { (kh, kw) } else { (kw, kh) };
                if w > run || !self.grid.free(x, y, w, h) {
                    continue;
                }
                self.grid.fill(x, y, w, h, true);
                let member = self.kinds[k].members[self.kinds[k].used];
                self.kinds[k].used += 1;
                self.out.push((member, x, y, rot));
                if self.go(cell + w, left - 1)? {
                    return Ok(true);
                }
                self.out.pop();
                self.kinds[k].used -= 1;
                self.grid.fill(x, y, w, h, false);
            }
        }
        if self.waste_left > 0 {
            self.waste_left -= 1;
            self.grid.set_row(y, x, x + 1, true);
            let r = self.go(cell + 1, left);
            self.grid.set_row(y, x, x + 1, false);
            self.waste_left += 1;
            return r;
        }
        Ok(false)
    }
}

/// Lower-left corner and rotation flag per item.
pub type Spots = Vec<(i64, i64, bool)>;

/// Decides whether `dims` fit into a `width × height` box.
///
/// Returns lower-left corners and rotation flags indexed like `dims`.
pub fn fit_in_box(
    dims: &[(i64, i64)],
    width: i64,
    height: i64,
    allow_rotation: bool,
    budget: u64,
) -> Result<Option<Spots>, BudgetExceeded> {
    if dims.is_empty() {
        return Ok(Some(Vec::new()));
    }
    if width <= 0 || height <= 0 {
        return Ok(None);
    }
    let area: i64 = dims.iter().map(|&(w, h)| w * h).sum();
    if area > width * height {
        return Ok(None);
    }
    for &(w, h) in dims {
        let upright = w <= width && h <= height;
        let turned = allow_rotation && h <= width && w <= height;
        if !upright && !turned {
            return Ok(None);
        }
    }
    let mut kinds: Vec<Kind> = Vec::new();
    for (i, &(w, h)) in dims.iter().enumerate() {
        let key = if allow_rotation && h > w { (h as usize, w as usize) } else { (w as usize, h as usize) };
        match kinds.iter_mut().find(|k| (k.w, k.h) == key) {
            Some(k) => k.members.push(i),
            None => kinds.push(Kind { w: key.0, h: key.1, members: vec![i], used: 0 }),
        }
    }
    kinds.sort_by_key(|k| std::cmp::Reverse((k.w * k.h, k.h, k.w)));
    let mut out = Vec::with_capacity(dims.len());
    let mut s = Search {
        grid: Grid::new(width as usize, height as usize),
        kinds,
        rotate: allow_rotation,
        waste_left: width * height - area,
        nodes: 0,
        budget,
        out: &mut out,
    };
    if !s.go(0, dims.len())? {
        return Ok(None);
    }
    let mut res = vec![(0, 0, false); dims.len()];
    for (member, x, y, rot) in out {
        let (w, h) = dims[member];
        // Kinds were normalised to landscape when rotation is on.
        let stored_rot = allow_rotation && h > w;
        res[member] = (x as i64, y as i64, rot != stored_rot);
    }
    Ok(Some(res))
}

/// Runs [`fit_in_box`] on an instance and wraps the answer as a packing.
pub fn pack_in_box(
    instance: &Instance,
    height: i64,
    allow_rotation: bool,
    budget: u64,
) -> Result<Option<Packing>, BudgetExceeded> {
    let dims: Vec<(i64, i64)> = instance.items.iter().map(|i| (i.width, i.height)).collect();
    let Some(pos) = fit_in_box(&dims, instance.strip_width, height, allow_rotation, budget)? else {
        return Ok(None);
    };
    let placements = instance
        .items
        .iter()
        .zip(pos)
        .map(|(it, (x, y, rotated))| Placement { item_id: it.id.clone(), x, y, rotated })
        .collect();
    Ok(Some(Packing::new(instance, placements)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_packing;

    #[test]
    fn tight_square_fits() {
        let inst = Instance::from_dims(4, &[(2, 2); 4]);
        let p = pack_in_box(&inst, 4, false, 1_000_000).unwrap().unwrap();
        assert!(validate_packing(&inst, &p, false).is_valid());
        assert_eq!(pack_in_box(&inst, 3, false, 1_000_000).unwrap(), None);
    }

    #[test]
    fn rotation_is_used_when_needed() {
        let inst = Instance::from_dims(3, &[(2, 2), (2, 1)]);
        assert_eq!(pack_in_box(&inst, 2, false, 1_000_000).unwrap(), None);
        let p = pack_in_box(&inst, 2, true, 1_000_000).unwrap().unwrap();
        assert!(validate_packing(&inst, &p, true).is_valid());
        assert_eq!(p.height, 2);
    }

    #[test]
    fn budget_is_reported() {
        let dims = vec![(3, 2), (2, 3), (3, 3), (1, 4), (4, 1), (2, 2), (1, 1)];
        assert!(fit_in_box(&dims, 6, 6, true, 2).is_err());
    }
}
