//! The load DP when items may be turned by 90 degrees.
//!
//! The class of an item depends on its orientation, so the DP decides both. Per
//! orientation the admissible moves are:
//!
//! * tall or vertical: add the width to a box whose height is the rounded height;
//! * horizontal: add the height to the stack of any guessed width at least as wide;
//! * small: add the area to `a_s`;
//! * medium: add the area to `a_m`.
//!
//! Large and medium-vertical orientations are never admissible: those items are
//! guessed and positioned individually before the DP runs.

use super::dp::{vector_dp, CapExceeded, DpStats, Move, TvBox};
use crate::classify::{classify_dims, round_height, ItemClass, Params};
use crate::model::Item;
use crate::rational::{ceil_i64, floor_i64, qi};

#[derive(Clone, Debug)]
pub struct RotationProblem<'a> {
    pub items: &'a [Item],
    pub params: &'a Params,
    pub strip_width: i64,
    pub tv_boxes: &'a [TvBox],
    /// Guessed rounded widths for horizontal items.
    pub group_widths: &'a [i64],
    /// Bound on the stack height of every guessed width.
    pub group_cap: i64,
    /// Total area of the boxes reserved for small items.
    pub small_cap: i64,
    /// Bound on the medium area; see [`medium_cap`].
    pub medium_cap: i64,
    pub state_cap: usize,
}

/// Where an item ends up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    TvBox(usize),
    Group(usize),
    Small,
    Medium,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RotChoice {
    pub rotated: bool,
    pub slot: Slot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotAssignment {
    pub choices: Vec<RotChoice>,
    pub stats: DpStats,
}

/// `⌊f(ε)·W·T⌋`.
pub fn medium_cap(params: &Params, strip_width: i64) -> i64 {
    floor_i64(&(params.f_value() * qi(strip_width) * qi(params.t)))
}

/// Integral box height for a tall or vertical item of height `h`.
pub fn rounded_class_height(h: i64, params: &Params) -> Option<i64> {
    round_height(h, &params.epsilon, params.t).map(|(r, _, _)| ceil_i64(&r))
}

pub fn dp_rotations(problem: &RotationProblem<'_>) -> Result<Option<RotAssignment>, CapExceeded> {
    let nb = problem.tv_boxes.len();
    let ng = problem.group_widths.len();
    let mut caps: Vec<i64> = problem.tv_boxes.iter().map(|b| b.width).collect();
    caps.extend(std::iter::repeat_n(problem.group_cap, ng));
    caps.push(problem.small_cap);
    caps.push(problem.medium_cap);
    // Boxes of equal height and width are interchangeable; everything else is unique.
    let mut sym: Vec<usize> = (0..caps.len()).collect();
    for a in 0..nb {
        for b in 0..a {
            if problem.tv_boxes[a] == problem.tv_boxes[b] {
                sym[a] = sym[b];
                break;
            }
        }
    }
    let mut moves = Vec::with_capacity(problem.items.len());
    let mut labels = Vec::with_capacity(problem.items.len());
    for it in problem.items {
        let mut ms = Vec::new();
        let mut ls = Vec::new();
        let orients: &[bool] = if it.width == it.height { &[false] } else { &[false, true] };
        for &rotated in orients {
            let (w, h) = it.dims(rotated);
            if w > problem.strip_width {
                continue;
            }
            match classify_dims(w, h, problem.params, problem.strip_width) {
                ItemClass::Tall | ItemClass::Vertical => {
                    let Some(rh) = rounded_class_height(h, problem.params) else { continue };
                    for (b, bx) in problem.tv_boxes.iter().enumerate() {
                        if bx.height == rh {
                            ms.push(Move { comp: b, amount: w });
                            ls.push(RotChoice { rotated, slot: Slot::TvBox(b) });
                        }
                    }
                }
                ItemClass::Horizontal => {
                    for (g, &gw) in problem.group_widths.iter().enumerate() {
                        if gw >= w {
                            ms.push(Move { comp: nb + g, amount: h });
                            ls.push(RotChoice { rotated, slot: Slot::Group(g) });
                        }
                    }
                }
                ItemClass::Small => {
                    ms.push(Move { comp: nb + ng, amount: w * h });
                    ls.push(RotChoice { rotated, slot: Slot::Small });
                }
                ItemClass::Medium => {
                    ms.push(Move { comp: nb + ng + 1, amount: w * h });
                    ls.push(RotChoice { rotated, slot: Slot::Medium });
                }
                ItemClass::Large | ItemClass::MediumVertical => {}
            }
        }
        moves.push(ms);
        labels.push(ls);
    }
    let mut stats = DpStats::default();
    let Some(pick) = vector_dp(&caps, &sym, &moves, true, problem.state_cap, &mut stats)? else {
        return Ok(None);
    };
    let choices = pick.iter().zip(&labels).map(|(&m, ls)| ls[m]).collect();
    Ok(Some(RotAssignment { choices, stats }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::FSpec;
    use crate::rational::q;

    fn params() -> Params {
        // ε = 1/4, δ = 1/4, μ = 1/16 at T = 64: tall from h ≥ 32, horizontal h ≤ 4.
        Params::new(q(1, 4), q(1, 4), q(1, 16), 64, FSpec::LINEAR).unwrap()
    }

    fn problem<'a>(items: &'a [Item], p: &'a Params, boxes: &'a [TvBox], groups: &'a [i64]) -> RotationProblem<'a> {
        RotationProblem {
            items,
            params: p,
            strip_width: 64,
            tv_boxes: boxes,
            group_widths: groups,
            group_cap: 8,
            small_cap: 0,
            medium_cap: 0,
            state_cap: 100_000,
        }
    }

    #[test]
    fn tall_or_horizontal_picks_horizontal() {
        let p = params();
        // Upright 4 × 40 is tall; turned it is 40 × 4, horizontal.
        let items = [Item::new("a", 4, 40)];
        let r = dp_rotations(&problem(&items, &p, &[], &[40])).unwrap().unwrap();
        assert_eq!(r.choices, vec![RotChoice { rotated: true, slot: Slot::Group(0) }]);
    }

    #[test]
    fn second_box_makes_room() {
        let p = params();
        let rh = rounded_class_height(40, &p).unwrap();
        let boxes = [TvBox { height: rh, width: 15 }];
        let items = [Item::new("a", 15, 40), Item::new("b", 15, 40)];
        assert!(dp_rotations(&problem(&items, &p, &boxes, &[])).unwrap().is_none());
        let boxes = [TvBox { height: rh, width: 15 }, TvBox { height: rh, width: 15 }];
        assert!(dp_rotations(&problem(&items, &p, &boxes, &[])).unwrap().is_some());
    }

    #[test]
    fn no_room_anywhere() {
        let p = params();
        let items = [Item::new("a", 4, 40)];
        assert!(dp_rotations(&problem(&items, &p, &[], &[30])).unwrap().is_none());
    }
}
