//! Configuration linear programs over boxes.
//!
//! A configuration is a multiset of class sizes that fits a box's capacity
//! dimension. Variable `X_{C,B}` is the extent of configuration `C` in box `B`
//! along the other dimension.

use num_traits::Zero;

use super::lp::basic_feasible_solution;
use crate::rational::{qi, Q};

pub const DEFAULT_UNIVERSE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigBox {
    /// Dimension a configuration must fit into.
    pub capacity: i64,
    /// Total extent that the configurations of this box must cover.
    pub extent: i64,
}

/// Counts per class, indexed like the class-size list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub counts: Vec<u32>,
}

impl Configuration {
    pub fn total(&self, sizes: &[i64]) -> i64 {
        self.counts.iter().zip(sizes).map(|(&c, &s)| c as i64 * s).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigEntry {
    pub box_index: usize,
    pub config: Configuration,
    pub extent: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigSolution {
    /// Nonzero variables only.
    pub entries: Vec<ConfigEntry>,
    pub rows: usize,
    pub columns: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("configuration LP is infeasible")]
    Infeasible,
    #[error("more than {0} configurations")]
    UniverseOverflow(usize),
}

/// All configurations with `Σ count·size ≤ capacity`, including the empty one.
pub fn enumerate_configurations(sizes: &[i64], capacity: i64, cap: usize) -> Result<Vec<Configuration>, LpError> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; sizes.len()];
    fn rec(
        k: usize,
        left: i64,
        sizes: &[i64],
        cur: &mut Vec<u32>,
        out: &mut Vec<Configuration>,
        cap: usize,
    ) -> Result<(), LpError> {
        if k == sizes.len() {
            if out.len() >= cap {
                return Err(LpError::UniverseOverflow(cap));
            }
            out.push(Configuration { counts: cur.clone() });
            return Ok(());
        }
        let max = if sizes[k] > 0 { left / sizes[k] } else { 0 };
        for c in 0..=max {
            cur[k] = c as u32;
            rec(k + 1, left - c * sizes[k], sizes, cur, out, cap)?;
        }
        cur[k] = 0;
        Ok(())
    }
    rec(0, capacity.max(0), sizes, &mut cur, &mut out, cap)?;
    Ok(out)
}

/// Solves the configuration LP: per box the extents sum to the box's extent and
/// per class `Σ count·X` meets the demand exactly.
pub fn solve_config_lp(
    boxes: &[ConfigBox],
    sizes: &[i64],
    demands: &[Q],
    universe_cap: usize,
) -> Result<ConfigSolution, LpError> {
    let mut columns: Vec<(usize, Configuration)> = Vec::new();
    for (bi, b) in boxes.iter().enumerate() {
        let left = universe_cap.saturating_sub(columns.len());
        for c in enumerate_configurations(sizes, b.capacity, left).map_err(|_| LpError::UniverseOverflow(universe_cap))? {
            columns.push((bi, c));
        }
    }
    let rows = boxes.len() + sizes.len();
    let mut a = vec![vec![Q::zero(); columns.len()]; rows];
    for (j, (bi, c)) in columns.iter().enumerate() {
        a[*bi][j] = qi(1);
        for (k, &cnt) in c.counts.iter().enumerate() {
            if cnt > 0 {
                a[boxes.len() + k][j] = qi(cnt as i64);
            }
        }
    }
    let mut rhs: Vec<Q> = boxes.iter().map(|b| qi(b.extent)).collect();
    rhs.extend(demands.iter().cloned());
    let sol = basic_feasible_solution(&a, &rhs).ok_or(LpError::Infeasible)?;
    let entries = columns
        .iter()
        .zip(&sol.x)
        .filter(|(_, x)| !x.is_zero())
        .map(|((bi, c), x)| ConfigEntry { box_index: *bi, config: c.clone(), extent: x.clone() })
        .collect();
    Ok(ConfigSolution { entries, rows, columns: columns.len() })
}

impl ConfigSolution {
    /// Exact residuals of both constraint families; all zero for a correct solution.
    pub fn residuals(&self, boxes: &[ConfigBox], demands: &[Q]) -> Vec<Q> {
        let mut per_box: Vec<Q> = boxes.iter().map(|b| -qi(b.extent)).collect();
        let mut per_class: Vec<Q> = demands.iter().map(|d| -d.clone()).collect();
        for e in &self.entries {
            per_box[e.box_index] += &e.extent;
            for (k, &c) in e.config.counts.iter().enumerate() {
                per_class[k] += qi(c as i64) * &e.extent;
            }
        }
        per_box.into_iter().chain(per_class).collect()
    }

    pub fn entries_of(&self, box_index: usize) -> impl Iterator<Item = &ConfigEntry> {
        self.entries.iter().filter(move |e| e.box_index == box_index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_box_single_class() {
        let boxes = [ConfigBox { capacity: 10, extent: 2 }];
        let sol = solve_config_lp(&boxes, &[2], &[qi(10)], DEFAULT_UNIVERSE_CAP).unwrap();
        assert_eq!(sol.entries.len(), 1);
        assert_eq!(sol.entries[0].config.counts, vec![5]);
        assert_eq!(sol.entries[0].extent, qi(2));
    }

    #[test]
    fn over_demand_is_infeasible() {
        let boxes = [ConfigBox { capacity: 10, extent: 2 }];
        assert_eq!(
            solve_config_lp(&boxes, &[2], &[qi(21)], DEFAULT_UNIVERSE_CAP),
            Err(LpError::Infeasible)
        );
    }

    #[test]
    fn universe_cap_is_enforced() {
        let boxes = [ConfigBox { capacity: 100, extent: 1 }];
        assert_eq!(
            solve_config_lp(&boxes, &[1, 2, 3], &[qi(1), qi(1), qi(1)], 50),
            Err(LpError::UniverseOverflow(50))
        );
    }

    #[test]
    fn enumeration_counts() {
        // Sizes 2 and 3 into capacity 6: (0..3)x(0..2) filtered by 2a+3b ≤ 6.
        let cs = enumerate_configurations(&[2, 3], 6, 100).unwrap();
        assert_eq!(cs.len(), 7);
        assert!(cs.iter().all(|c| c.total(&[2, 3]) <= 6));
    }
}
