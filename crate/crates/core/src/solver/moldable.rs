//! Contiguous moldable tasks: jobs that choose their machine count.
//!
//! A schedule on `m` machines with contiguous allotments is a strip packing of
//! width `m` in which job `j` becomes an item `i × p_j(i)` for its chosen `i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dp::{vector_dp, CapExceeded, DpStats, Move, TvBox};
use crate::baselines::{steinberg, SteinbergError};
use crate::classify::Params;
use crate::model::{Instance, Item, Packing};
use crate::rational::{ceil_i64, q, qi, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    /// Machine count → processing time.
    pub allotments: BTreeMap<i64, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MoldError {
    #[error("job {0} has no allotment")]
    NoAllotment(String),
    #[error("job {0} has an allotment outside 1..=m or a time below 1")]
    BadAllotment(String),
    #[error("no jobs")]
    Empty,
    #[error("could not build the 2τ schedule: {0}")]
    Pack(SteinbergError),
}

impl Job {
    pub fn new(id: impl Into<String>, allotments: &[(i64, i64)]) -> Self {
        Job { id: id.into(), allotments: allotments.iter().copied().collect() }
    }

    pub fn time(&self, machines: i64) -> Option<i64> {
        self.allotments.get(&machines).copied()
    }

    /// `i · p_j(i)`.
    pub fn work(&self, machines: i64) -> Option<i64> {
        self.time(machines).map(|p| p * machines)
    }

    pub fn check(&self, m: i64) -> Result<(), MoldError> {
        if self.allotments.is_empty() {
            return Err(MoldError::NoAllotment(self.id.clone()));
        }
        if self.allotments.iter().any(|(&i, &p)| i < 1 || i > m || p < 1) {
            return Err(MoldError::BadAllotment(self.id.clone()));
        }
        Ok(())
    }

    /// Whether more machines never mean a longer time or less work.
    pub fn is_monotone(&self) -> bool {
        let v: Vec<(i64, i64)> = self.allotments.iter().map(|(&i, &p)| (i, p)).collect();
        v.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 * w[1].1 >= w[0].0 * w[0].1)
    }

    /// The strip item for allotment `machines`.
    pub fn as_item(&self, machines: i64) -> Option<Item> {
        self.time(machines).map(|p| Item::new(self.id.clone(), machines, p))
    }
}

/// The fewest machines giving job `job` a processing time of at most `p`.
pub fn psi(job: &Job, p: i64) -> Option<i64> {
    job.allotments.iter().filter(|(_, &t)| t <= p).map(|(&i, _)| i).min()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoldEstimate {
    /// A lower bound on the optimal makespan.
    pub tau: i64,
    /// `2τ`, an upper bound realised by `schedule`.
    pub upper: i64,
    /// Machines per job (indexed like the input) used by `schedule`.
    pub allotment: Vec<i64>,
    pub schedule: Packing,
    /// Every job is monotone.
    pub monotone: bool,
}

/// Least total work over allotments with time at most `tau`, and the allotments.
fn min_work(jobs: &[Job], tau: i64) -> Option<(i64, Vec<i64>)> {
    let mut total = 0;
    let mut pick = Vec::with_capacity(jobs.len());
    for j in jobs {
        let (w, i) = j.allotments.iter().filter(|(_, &p)| p <= tau).map(|(&i, &p)| (i * p, i)).min()?;
        total += w;
        pick.push(i);
    }
    Some((total, pick))
}

/// Brackets the optimal makespan: `τ ≤ OPT ≤ 2τ`.
///
/// With `W(τ)` the least total work when every job finishes within `τ`,
/// `τ = min_c max(c, ⌈W(c)/m⌉)` over the distinct processing times `c`. Any
/// schedule of length `OPT` uses allotments with times at most `OPT`, so the
/// largest `c ≤ OPT` gives `max(c, W(c)/m) ≤ OPT`. Conversely the work-minimal
/// allotments at the minimising `c` have height at most `τ` and area at most `mτ`,
/// which fit into `m × 2τ`.
pub fn moldable_estimate(jobs: &[Job], m: i64) -> Result<MoldEstimate, MoldError> {
    if jobs.is_empty() {
        return Err(MoldError::Empty);
    }
    for j in jobs {
        j.check(m)?;
    }
    let mut cands: Vec<i64> = jobs.iter().flat_map(|j| j.allotments.values().copied()).collect();
    cands.sort_unstable();
    cands.dedup();
    let mut best: Option<(i64, Vec<i64>)> = None;
    for &c in &cands {
        let Some((work, pick)) = min_work(jobs, c) else { continue };
        let tau = c.max((work + m - 1) / m);
        if best.as_ref().is_none_or(|(t, _)| tau < *t) {
            best = Some((tau, pick));
        }
    }
    let (tau, allotment) = best.expect("the largest time admits every job");
    let inst = Instance::new(
        m,
        jobs.iter().zip(&allotment).map(|(j, &i)| j.as_item(i).expect("chosen allotment exists")).collect(),
    );
    let schedule = steinberg(&inst, 2 * tau).map_err(MoldError::Pack)?;
    Ok(MoldEstimate { tau, upper: 2 * tau, allotment, schedule, monotone: jobs.iter().all(Job::is_monotone) })
}

#[derive(Clone, Debug)]
pub struct MoldProblem<'a> {
    pub jobs: &'a [Job],
    /// Thresholds; `params.t` is the makespan guess.
    pub params: &'a Params,
    pub machines: i64,
    pub tv_boxes: &'a [TvBox],
    /// Guessed machine counts for horizontal jobs, ascending.
    pub group_widths: &'a [i64],
    /// Bound on every group's stack, in units of `εT/n`.
    pub group_cap: i64,
    pub small_cap: i64,
    pub medium_cap: i64,
    pub state_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoldSlot {
    Tall(usize),
    Vertical(usize),
    Group(usize),
    Small,
    Medium,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MoldChoice {
    pub machines: i64,
    pub slot: MoldSlot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoldAssignment {
    pub choices: Vec<MoldChoice>,
    pub stats: DpStats,
}

/// Thresholds shared by the DP and its callers.
#[derive(Clone, Debug)]
pub struct MoldThresholds {
    pub quarter_t: Q,
    pub delta_m: Q,
    pub mu_m: Q,
    pub delta_t: Q,
    pub mu_t: Q,
    pub eps_t: Q,
    /// `μ(1+ε)²T`
    pub small_time: Q,
    /// `δ(1+ε)²T`
    pub medium_time: Q,
    /// Horizontal stack unit `εT/n`.
    pub unit: Q,
}

impl MoldThresholds {
    pub fn new(p: &Params, machines: i64, jobs: usize) -> Self {
        let t = qi(p.t);
        let m = qi(machines);
        let grow = (qi(1) + &p.epsilon) * (qi(1) + &p.epsilon);
        MoldThresholds {
            quarter_t: q(1, 4) * &t,
            delta_m: &p.delta * &m,
            mu_m: &p.mu * &m,
            delta_t: &p.delta * &t,
            mu_t: &p.mu * &t,
            eps_t: &p.epsilon * &t,
            small_time: &p.mu * &grow * &t,
            medium_time: &p.delta * &grow * &t,
            unit: &p.epsilon * &t / qi(jobs.max(1) as i64),
        }
    }

    /// Stack contribution of a horizontal job with time `p`.
    pub fn stack_units(&self, p: i64) -> i64 {
        ceil_i64(&(qi(p) / &self.unit))
    }

    pub fn small_ok(&self, i: i64, p: i64) -> bool {
        qi(i) < self.mu_m && qi(p) < self.small_time
    }

    pub fn medium_ok(&self, i: i64, p: i64) -> bool {
        let (i, p) = (qi(i), qi(p));
        (i >= self.mu_m && i < self.delta_m && p < self.eps_t) || (p >= self.small_time && p <= self.medium_time)
    }

    /// Width limit for a box of height `hb`: tall boxes take fewer than `δm`
    /// machines, vertical boxes at most `μm`; lower boxes take nothing.
    pub fn box_width_ok(&self, hb: i64, i: i64) -> Option<bool> {
        let h = qi(hb);
        if h > self.quarter_t {
            Some(qi(i) < self.delta_m)
        } else if h > self.delta_t {
            Some(qi(i) <= self.mu_m)
        } else {
            None
        }
    }

    /// Machine interval feeding group `g`: `[⌈δm⌉, g₀]` for the first group and
    /// `[g_{k−1}, g_k]` after that.
    pub fn group_interval(&self, groups: &[i64], g: usize) -> (i64, i64) {
        let lo = if g == 0 { ceil_i64(&self.delta_m) } else { groups[g - 1] };
        (lo, groups[g])
    }
}

/// The load DP for moldable jobs.
///
/// Each job takes one of five kinds of move:
///
/// * box of height `hb > T/4`: `ψ(hb)` machines if fewer than `δm`;
/// * box of height `δT < hb ≤ T/4`: `ψ(hb)` machines if at most `μm`;
/// * horizontal group `g`: the shortest allotment in the group's machine interval,
///   if its time is at most `μT`, adding `⌈p/(εT/n)⌉` to the stack;
/// * small: the least-work allotment with fewer than `μm` machines and time below
///   `μ(1+ε)²T`, adding its work to `a_s`;
/// * medium: the least-work allotment that is medium by machines (`μm ≤ i < δm`,
///   time below `εT`) or by time (`μ(1+ε)²T ≤ p ≤ δ(1+ε)²T`), adding to `a_m`.
///
/// Each rule keeps the dominant allotment, so the verdict equals a search over
/// all allotment and slot pairs.
pub fn dp_moldable(problem: &MoldProblem<'_>) -> Result<Option<MoldAssignment>, CapExceeded> {
    let th = MoldThresholds::new(problem.params, problem.machines, problem.jobs.len());
    let nb = problem.tv_boxes.len();
    let ng = problem.group_widths.len();
    let mut caps: Vec<i64> = problem.tv_boxes.iter().map(|b| b.width).collect();
    caps.extend(std::iter::repeat_n(problem.group_cap, ng));
    caps.push(problem.small_cap);
    caps.push(problem.medium_cap);
    let mut sym: Vec<usize> = (0..caps.len()).collect();
    for a in 0..nb {
        if let Some(b) = (0..a).find(|&b| problem.tv_boxes[a] == problem.tv_boxes[b]) {
            sym[a] = sym[b];
        }
    }
    let mut moves = Vec::new();
    let mut labels = Vec::new();
    for job in problem.jobs {
        let mut ms = Vec::new();
        let mut ls = Vec::new();
        for (b, bx) in problem.tv_boxes.iter().enumerate() {
            let Some(i) = psi(job, bx.height) else { continue };
            if let Some(true) = th.box_width_ok(bx.height, i) {
                ms.push(Move { comp: b, amount: i });
                let slot = if qi(bx.height) > th.quarter_t { MoldSlot::Tall(b) } else { MoldSlot::Vertical(b) };
                ls.push(MoldChoice { machines: i, slot });
            }
        }
        for g in 0..ng {
            let (lo, hi) = th.group_interval(problem.group_widths, g);
            let best = job.allotments.range(lo..=hi).map(|(&i, &p)| (p, i)).min();
            if let Some((p, i)) = best {
                if qi(p) <= th.mu_t {
                    ms.push(Move { comp: nb + g, amount: th.stack_units(p) });
                    ls.push(MoldChoice { machines: i, slot: MoldSlot::Group(g) });
                }
            }
        }
        let least = |ok: &dyn Fn(i64, i64) -> bool| {
            job.allotments.iter().filter(|(&i, &p)| ok(i, p)).map(|(&i, &p)| (i * p, i)).min()
        };
        if let Some((w, i)) = least(&|i, p| th.small_ok(i, p)) {
            ms.push(Move { comp: nb + ng, amount: w });
            ls.push(MoldChoice { machines: i, slot: MoldSlot::Small });
        }
        if let Some((w, i)) = least(&|i, p| th.medium_ok(i, p)) {
            ms.push(Move { comp: nb + ng + 1, amount: w });
            ls.push(MoldChoice { machines: i, slot: MoldSlot::Medium });
        }
        moves.push(ms);
        labels.push(ls);
    }
    let mut stats = DpStats::default();
    let Some(pick) = vector_dp(&caps, &sym, &moves, true, problem.state_cap, &mut stats)? else {
        return Ok(None);
    };
    let choices = pick.iter().zip(&labels).map(|(&k, ls)| ls[k]).collect();
    Ok(Some(MoldAssignment { choices, stats }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::FSpec;

    #[test]
    fn psi_examples() {
        let j = Job::new("a", &[(1, 8), (2, 4), (4, 2)]);
        assert_eq!(psi(&j, 4), Some(2));
        assert_eq!(psi(&j, 8), Some(1));
        assert_eq!(psi(&j, 1), None);
        assert!(j.is_monotone());
    }

    #[test]
    fn estimate_single_job() {
        let e = moldable_estimate(&[Job::new("a", &[(1, 10)])], 4).unwrap();
        assert_eq!(e.tau, 10);
        assert_eq!(e.schedule.height, 10);
    }

    #[test]
    fn estimate_two_unit_jobs_on_one_machine() {
        let jobs = [Job::new("a", &[(1, 1)]), Job::new("b", &[(1, 1)])];
        let e = moldable_estimate(&jobs, 1).unwrap();
        assert_eq!(e.tau, 2);
        assert!(e.schedule.height <= 4);
    }

    #[test]
    fn rejects_bad_jobs() {
        assert_eq!(moldable_estimate(&[], 2), Err(MoldError::Empty));
        assert!(moldable_estimate(&[Job::new("a", &[(3, 1)])], 2).is_err());
    }

    #[test]
    fn small_only_job_lands_in_small() {
        // ε = 1/4, δ = 1/16, μ = 1/64, m = 128, T = 256: small if i < 2 and p < 6.25.
        let p = Params::new(q(1, 4), q(1, 16), q(1, 64), 256, FSpec::LINEAR).unwrap();
        let jobs = [Job::new("a", &[(1, 3)])];
        let prob = MoldProblem {
            jobs: &jobs,
            params: &p,
            machines: 128,
            tv_boxes: &[],
            group_widths: &[],
            group_cap: 0,
            small_cap: 10,
            medium_cap: 0,
            state_cap: 1000,
        };
        let r = dp_moldable(&prob).unwrap().unwrap();
        assert_eq!(r.choices, vec![MoldChoice { machines: 1, slot: MoldSlot::Small }]);
        let none = MoldProblem { small_cap: 2, ..prob };
        assert!(dp_moldable(&none).unwrap().is_none());
    }
}
