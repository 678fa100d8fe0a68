//! Binary search for the smallest height guess that a probe accepts.

use std::ops::RangeInclusive;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualOutcome<P> {
    /// `t` is the smallest accepted guess found; `value` is what the probe returned.
    Found { t: i64, value: P, probes: u32 },
    /// No guess in the range was accepted.
    Exhausted { probes: u32 },
}

impl<P> DualOutcome<P> {
    pub fn probes(&self) -> u32 {
        match self {
            DualOutcome::Found { probes, .. } | DualOutcome::Exhausted { probes } => *probes,
        }
    }
}

/// Searches `range` for the least `t` with `probe(t)` succeeding.
///
/// The value one past the range acts as an implicit success, so the search costs
/// at most `⌈log₂(len + 1)⌉` probes and still notices when nothing succeeds. For
/// a monotone probe the answer is exact; otherwise it is some accepted guess
/// whose predecessor was rejected.
pub fn dual_approx_search<P>(range: RangeInclusive<i64>, mut probe: impl FnMut(i64) -> Option<P>) -> DualOutcome<P> {
    let (mut lo, mut hi) = (*range.start(), *range.end() + 1);
    let sentinel = hi;
    let mut best: Option<P> = None;
    let mut probes = 0;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        probes += 1;
        match probe(mid) {
            Some(v) => {
                best = Some(v);
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    match best {
        Some(value) if lo < sentinel => DualOutcome::Found { t: lo, value, probes },
        _ => DualOutcome::Exhausted { probes },
    }
}

/// `⌈log₂(len)⌉ + 1`, the probe budget promised for a range of `len` guesses.
pub fn probe_budget(len: i64) -> u32 {
    let mut b = 0;
    while (1i64 << b) < len {
        b += 1;
    }
    b + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_predicate() {
        let r = dual_approx_search(4..=16, |t| (t >= 7).then_some(t));
        assert_eq!(r, DualOutcome::Found { t: 7, value: 7, probes: r.probes() });
        assert!(r.probes() <= 4);
    }

    #[test]
    fn always_and_never() {
        let r = dual_approx_search(4..=16, Some);
        assert!(matches!(r, DualOutcome::Found { t: 4, .. }));
        let r = dual_approx_search(4..=16, |_| None::<()>);
        assert!(matches!(r, DualOutcome::Exhausted { .. }));
        assert!(r.probes() <= probe_budget(13));
    }

    #[test]
    fn only_top_accepts() {
        let r = dual_approx_search(0..=9, |t| (t == 9).then_some(()));
        assert!(matches!(r, DualOutcome::Found { t: 9, .. }));
    }
}
