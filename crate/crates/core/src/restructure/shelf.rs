//! Sorting a band in which every item touches its bottom or its top border.
//!
//! If nothing crosses the band and nothing is fixed, sorting the bottom items by
//! decreasing height from the left and the top items by increasing height
//! towards the right never creates an overlap: at every level the columns a
//! bottom item reaches and the columns a top item reaches are a prefix and a
//! suffix whose widths did not change. Fixed items break that argument, so with
//! fixed items several sorted orders are tried and the first valid one with the
//! fewest containers wins; if none is valid the band is left as it was.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::engine::{check_cols, containers, count_runs, sort_lane, Align, Cell, Cols, Frame, Lane, Order, What};
use super::BoxArea;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShelfSide {
    Bottom,
    Top,
}

/// An item of a band. Pseudo items may be cut into columns; tall items may not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShelfItem {
    pub id: String,
    pub x: i64,
    pub y: i64,
    pub width: i64,
    pub height: i64,
    #[serde(default)]
    pub pseudo: bool,
    #[serde(default)]
    pub fixed: bool,
}

impl ShelfItem {
    pub fn tall(id: impl Into<String>, x: i64, y: i64, width: i64, height: i64) -> Self {
        ShelfItem { id: id.into(), x, y, width, height, pseudo: false, fixed: false }
    }

    pub fn pseudo(id: impl Into<String>, x: i64, y: i64, width: i64, height: i64) -> Self {
        ShelfItem { pseudo: true, ..Self::tall(id, x, y, width, height) }
    }

    pub fn fixed(self) -> Self {
        ShelfItem { fixed: true, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("item {0} touches neither border of the band")]
    Floating(String),
    #[error("item {0} leaves the band")]
    Outside(String),
    #[error("items {0} and {1} overlap")]
    Overlap(String, String),
    #[error("more than two fixed items on one side")]
    TooManyFixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShelfLayout {
    /// Items after sorting. A pseudo item may appear once per column run.
    pub items: Vec<ShelfItem>,
    pub containers: Vec<BoxArea>,
    /// `"sorted"`, `"kept"` or the pair of orders used around fixed items.
    pub strategy: String,
}

fn side_of(it: &ShelfItem, depth: i64) -> Result<ShelfSide, ShapeError> {
    if it.y == 0 {
        Ok(ShelfSide::Bottom)
    } else if it.y + it.height == depth {
        Ok(ShelfSide::Top)
    } else {
        Err(ShapeError::Floating(it.id.clone()))
    }
}

/// Sorts the band `[0, width) × [0, depth)`.
pub fn two_shelf_reorder(width: i64, depth: i64, items: &[ShelfItem]) -> Result<ShelfLayout, ShapeError> {
    let mut cols: Cols = vec![Vec::new(); width.max(0) as usize];
    let mut fixed_left = 0;
    let mut fixed_right = 0;
    for (i, it) in items.iter().enumerate() {
        if it.x < 0 || it.x + it.width > width || it.y < 0 || it.y + it.height > depth || it.width <= 0 || it.height <= 0 {
            return Err(ShapeError::Outside(it.id.clone()));
        }
        let lane = if it.fixed {
            if it.x == 0 {
                fixed_left += 1;
            } else if it.x + it.width == width {
                fixed_right += 1;
            }
            Lane::Fixed
        } else {
            match side_of(it, depth)? {
                ShelfSide::Bottom => Lane::Bottom,
                ShelfSide::Top => Lane::TopDown,
            }
        };
        let what = if it.pseudo { What::Pseudo(i) } else { What::Tall(i) };
        for j in 0..it.width {
            cols[(it.x + j) as usize].push(Cell { lane, y: it.y, h: it.height, what, off: j });
        }
    }
    if fixed_left > 2 || fixed_right > 2 {
        return Err(ShapeError::TooManyFixed);
    }
    let f = Frame { big_h: depth, hb: depth, delta: 0, a: depth, top: depth, half: depth / 2 };
    if check_cols(&cols, &f).is_err() {
        return Err(first_overlap(items));
    }
    let widths: Vec<i64> = items.iter().map(|it| it.width).collect();
    let all: Vec<usize> = (0..cols.len()).collect();
    let has_fixed = items.iter().any(|it| it.fixed);
    let modes = [
        (Order::Desc, Align::Left),
        (Order::Asc, Align::Right),
        (Order::Desc, Align::Right),
        (Order::Asc, Align::Left),
    ];
    let mut best: Option<(usize, Cols, String)> = None;
    for &(bo, ba) in &modes {
        for &(to, ta) in &modes {
            let mut c = cols.clone();
            let ok = sort_lane(&mut c, &all, Lane::Bottom, bo, ba, &f, &widths)
                && sort_lane(&mut c, &all, Lane::TopDown, to, ta, &f, &widths)
                && check_cols(&c, &f).is_ok();
            if !ok {
                continue;
            }
            let n = count_runs(&c);
            if best.as_ref().is_none_or(|(m, _, _)| n < *m) {
                let name = if !has_fixed && bo == Order::Desc && ba == Align::Left && to == Order::Asc && ta == Align::Right {
                    "sorted".to_string()
                } else {
                    format!("{}/{}", mode_name(bo, ba), mode_name(to, ta))
                };
                best = Some((n, c, name));
            }
            if !has_fixed {
                break;
            }
        }
        if !has_fixed && best.is_some() {
            break;
        }
    }
    let (cols, strategy) = match best {
        Some((_, c, s)) => (c, s),
        None => (cols, "kept".to_string()),
    };
    Ok(ShelfLayout { items: read_back(&cols, items), containers: containers(&cols, depth).all().cloned().collect(), strategy })
}

fn mode_name(o: Order, a: Align) -> &'static str {
    match (o, a) {
        (Order::Desc, Align::Left) => "desc-left",
        (Order::Asc, Align::Right) => "asc-right",
        (Order::Desc, Align::Right) => "desc-right",
        (Order::Asc, Align::Left) => "asc-left",
    }
}

fn first_overlap(items: &[ShelfItem]) -> ShapeError {
    for (i, a) in items.iter().enumerate() {
        for b in &items[i + 1..] {
            if a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height && b.y < a.y + a.height {
                return ShapeError::Overlap(a.id.clone(), b.id.clone());
            }
        }
    }
    ShapeError::Overlap(String::new(), String::new())
}

fn read_back(cols: &Cols, items: &[ShelfItem]) -> Vec<ShelfItem> {
    let mut tall: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
    let mut out = Vec::new();
    let mut open: BTreeMap<(usize, i64), (i64, i64)> = BTreeMap::new();
    for x in 0..=cols.len() {
        let here: Vec<&Cell> = if x < cols.len() { cols[x].iter().collect() } else { Vec::new() };
        let keys: Vec<(usize, i64)> = here
            .iter()
            .filter_map(|c| match c.what {
                What::Pseudo(i) => Some((i, c.y)),
                What::Tall(_) => None,
            })
            .collect();
        let done: Vec<(usize, i64)> = open.keys().filter(|k| !keys.contains(k)).copied().collect();
        for k in done {
            let (x0, _) = open.remove(&k).unwrap();
            let it = &items[k.0];
            out.push(ShelfItem { x: x0, y: k.1, width: x as i64 - x0, ..it.clone() });
        }
        for k in keys {
            open.entry(k).or_insert((x as i64, 0));
        }
        for c in here {
            if let What::Tall(i) = c.what {
                tall.entry(i).or_insert((x as i64 - c.off, c.y));
            }
        }
    }
    for (i, (x, y)) in tall {
        out.push(ShelfItem { x, y, ..items[i].clone() });
    }
    out.sort_by(|a, b| (a.x, a.y, &a.id).cmp(&(b.x, b.y, &b.id)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_example() {
        // Band of width 4 and depth 10: bottoms 3, 7, 5, 2 and tops 6, 2, 4, 7.
        let mut items = Vec::new();
        for (x, (b, t)) in [(3, 6), (7, 2), (5, 4), (2, 7)].iter().enumerate() {
            items.push(ShelfItem::tall(format!("b{x}"), x as i64, 0, 1, *b));
            items.push(ShelfItem::tall(format!("t{x}"), x as i64, 10 - t, 1, *t));
        }
        let l = two_shelf_reorder(4, 10, &items).unwrap();
        assert_eq!(l.strategy, "sorted");
        let mut bottoms: Vec<(i64, i64)> = l.items.iter().filter(|i| i.y == 0).map(|i| (i.x, i.height)).collect();
        bottoms.sort();
        assert_eq!(bottoms.iter().map(|b| b.1).collect::<Vec<_>>(), vec![7, 5, 3, 2]);
        let mut tops: Vec<(i64, i64)> = l.items.iter().filter(|i| i.y > 0).map(|i| (i.x, i.height)).collect();
        tops.sort();
        assert_eq!(tops.iter().map(|b| b.1).collect::<Vec<_>>(), vec![2, 4, 6, 7]);
    }

    #[test]
    fn floating_item_is_rejected() {
        let items = [ShelfItem::tall("a", 0, 1, 1, 2)];
        assert_eq!(two_shelf_reorder(2, 10, &items), Err(ShapeError::Floating("a".into())));
    }

    #[test]
    fn fixed_item_stays() {
        let items = [
            ShelfItem::tall("f", 0, 0, 1, 8).fixed(),
            ShelfItem::tall("b", 1, 0, 1, 3),
            ShelfItem::pseudo("p", 2, 0, 2, 6),
            ShelfItem::tall("t", 3, 7, 1, 3),
        ];
        let l = two_shelf_reorder(4, 10, &items).unwrap();
        let f = l.items.iter().find(|i| i.id == "f").unwrap();
        assert_eq!((f.x, f.y), (0, 0));
        assert_eq!(l.items.iter().filter(|i| i.id == "b" || i.id == "t").count(), 2);
    }
}
