//! Exact optimum for small instances.
//!
//! Heights are tried upwards from a lower bound; each height is settled by the
//! complete box search, so the first feasible height is optimal.

use super::moldable::{Job, MoldError};
use crate::baselines::nfdh;
use crate::model::{total_area, Instance, Item, Packing};
use crate::search::{fit_in_box, pack_in_box};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_items: usize,
    pub max_width: i64,
    /// Bound on the heights that may be searched.
    pub max_height: i64,
    /// Node budget per searched height.
    pub budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_items: 12, max_width: 32, max_height: 96, budget: 50_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance outside oracle limits: {0}")]
    LimitExceeded(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// Smallest height any orientation allows for `it`, or `None` if it fits nowhere.
fn min_item_height(it: &Item, strip_width: i64, allow_rotation: bool) -> Option<i64> {
    let upright = (it.width <= strip_width).then_some(it.height);
    let turned = (allow_rotation && it.height <= strip_width).then_some(it.width);
    upright.into_iter().chain(turned).min()
}

/// `max(⌈area/W⌉, largest per-item minimal height)`.
pub fn oracle_lower_bound(instance: &Instance, allow_rotation: bool) -> Option<i64> {
    let w = instance.strip_width;
    let mut lb = (total_area(&instance.items) + w - 1) / w;
    for it in &instance.items {
        lb = lb.max(min_item_height(it, w, allow_rotation)?);
    }
    Some(lb)
}

/// The optimal height and a packing achieving it.
pub fn exact_oracle(
    instance: &Instance,
    limits: OracleLimits,
    allow_rotation: bool,
) -> Result<(i64, Packing), OracleError> {
    if instance.items.len() > limits.max_items {
        return Err(OracleError::LimitExceeded(format!("{} items", instance.items.len())));
    }
    if instance.strip_width > limits.max_width {
        return Err(OracleError::LimitExceeded(format!("width {}", instance.strip_width)));
    }
    if instance.items.is_empty() {
        return Ok((0, Packing::empty()));
    }
    let lb = oracle_lower_bound(instance, allow_rotation)
        .ok_or_else(|| OracleError::Invalid("an item is wider than the strip".into()))?;
    // Upright NFDH is valid whenever no item needs turning.
    let upright_ok = instance.items.iter().all(|i| i.width <= instance.strip_width);
    let ub = if upright_ok { nfdh(instance).height } else { instance.items.iter().map(|i| i.width.max(i.height)).sum() };
    for h in lb..ub {
        if h > limits.max_height {
            return Err(OracleError::LimitExceeded(format!("height {h}")));
        }
        match pack_in_box(instance, h, allow_rotation, limits.budget) {
            Ok(Some(p)) => return Ok((p.height, p)),
            Ok(None) => {}
            Err(e) => return Err(OracleError::LimitExceeded(e.to_string())),
        }
    }
    if upright_ok {
        let p = nfdh(instance);
        return Ok((p.height, p));
    }
    match pack_in_box(instance, ub, allow_rotation, limits.budget) {
        Ok(Some(p)) => Ok((p.height, p)),
        Ok(None) => Err(OracleError::Invalid("no packing at the stacking bound".into())),
        Err(e) => Err(OracleError::LimitExceeded(e.to_string())),
    }
}

/// Whether `instance` fits into height `h`, by the same complete search.
pub fn fits_height(instance: &Instance, h: i64, allow_rotation: bool, budget: u64) -> Result<bool, OracleError> {
    let dims: Vec<(i64, i64)> = instance.items.iter().map(|i| (i.width, i.height)).collect();
    fit_in_box(&dims, instance.strip_width, h, allow_rotation, budget)
        .map(|r| r.is_some())
        .map_err(|e| OracleError::LimitExceeded(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoldOptimum {
    pub makespan: i64,
    pub allotment: Vec<i64>,
    pub schedule: Packing,
}

/// Optimal contiguous schedule by trying every allotment vector.
pub fn moldable_oracle(jobs: &[Job], m: i64, limits: OracleLimits) -> Result<MoldOptimum, OracleError> {
    for j in jobs {
        j.check(m).map_err(|e: MoldError| OracleError::Invalid(e.to_string()))?;
    }
    let choices: Vec<Vec<i64>> = jobs.iter().map(|j| j.allotments.keys().copied().collect()).collect();
    let combos: usize = choices.iter().map(Vec::len).product();
    if combos > 100_000 {
        return Err(OracleError::LimitExceeded(format!("{combos} allotment vectors")));
    }
    let mut best: Option<MoldOptimum> = None;
    let mut idx = vec![0usize; jobs.len()];
    loop {
        let allotment: Vec<i64> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        let items: Vec<Item> = jobs.iter().zip(&allotment).map(|(j, &i)| j.as_item(i).unwrap()).collect();
        let inst = Instance::new(m, items);
        let lb = oracle_lower_bound(&inst, false).unwrap_or(0);
        match &best {
            None => {
                let (h, p) = exact_oracle(&inst, limits, false)?;
                best = Some(MoldOptimum { makespan: h, allotment, schedule: p });
            }
            // Only heights below the incumbent matter.
            Some(b) => {
                for h in lb..b.makespan {
                    match pack_in_box(&inst, h, false, limits.budget) {
                        Ok(Some(p)) => {
                            best = Some(MoldOptimum { makespan: p.height, allotment, schedule: p });
                            break;
                        }
                        Ok(None) => {}
                        Err(e) => return Err(OracleError::LimitExceeded(e.to_string())),
                    }
                }
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return best.ok_or_else(|| OracleError::Invalid("no jobs".into()));
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_packing;

    fn opt(w: i64, dims: &[(i64, i64)], rot: bool) -> i64 {
        let inst = Instance::from_dims(w, dims);
        let (h, p) = exact_oracle(&inst, OracleLimits::default(), rot).unwrap();
        assert!(validate_packing(&inst, &p, rot).is_valid());
        h
    }

    #[test]
    fn spec_examples() {
        assert_eq!(opt(2, &[(1, 1), (1, 1)], false), 1);
        assert_eq!(opt(2, &[(2, 1), (1, 2), (1, 2)], false), 3);
        assert_eq!(opt(3, &[(2, 2), (1, 1)], true), 2);
    }

    #[test]
    fn rotation_helps() {
        // A 1 × 3 bar lies flat in a strip of width 3.
        assert_eq!(opt(3, &[(1, 3), (2, 1)], false), 3);
        assert_eq!(opt(3, &[(1, 3), (2, 1)], true), 2);
    }

    #[test]
    fn limits_are_enforced() {
        let inst = Instance::from_dims(100, &[(1, 1)]);
        assert!(matches!(exact_oracle(&inst, OracleLimits::default(), false), Err(OracleError::LimitExceeded(_))));
    }

    #[test]
    fn moldable_two_ways() {
        // Either both jobs on one machine each (time 4) or one at a time on two (2 + 2).
        let jobs = [Job::new("a", &[(1, 4), (2, 2)]), Job::new("b", &[(1, 4), (2, 3)])];
        let o = moldable_oracle(&jobs, 2, OracleLimits::default()).unwrap();
        assert_eq!(o.makespan, 4);
    }
}
