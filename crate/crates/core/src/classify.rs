//! Item classes, the search for the class thresholds, and height rounding.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::model::{Instance, Item};
use crate::rational::{ceil_i64, floor_i64, q, qi, qpow, reciprocal_int, Q};

/// `f(ε) = ε^exponent / divisor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FSpec {
    pub exponent: u32,
    pub divisor: u64,
}

impl FSpec {
    /// The default medium-area budget `ε^13`.
    pub const DEFAULT: FSpec = FSpec { exponent: 13, divisor: 1 };
    /// `f(ε) = ε`, small enough thresholds to work with at desk scale.
    pub const LINEAR: FSpec = FSpec { exponent: 1, divisor: 1 };
    /// `f(ε) = ε²`.
    pub const QUADRATIC: FSpec = FSpec { exponent: 2, divisor: 1 };

    pub fn value(&self, epsilon: &Q) -> Q {
        qpow(epsilon, self.exponent) / qi(self.divisor as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("1/epsilon must be an integer ≥ 2")]
    Epsilon,
    #[error("delta must be a power of epsilon not above epsilon")]
    Delta,
    #[error("mu must satisfy 0 < mu < delta")]
    Mu,
    #[error("T must be positive")]
    T,
    #[error("f(epsilon) must have an integral reciprocal")]
    F,
}

/// Thresholds governing classification and rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub epsilon: Q,
    pub delta: Q,
    pub mu: Q,
    /// Current guess for the optimal height.
    pub t: i64,
    pub f: FSpec,
    /// Number of horizontal grid lines used by the reordering bounds.
    pub n: i64,
}

impl Params {
    pub fn new(epsilon: Q, delta: Q, mu: Q, t: i64, f: FSpec) -> Result<Params, ParamError> {
        let inv = reciprocal_int(&epsilon).ok_or(ParamError::Epsilon)?;
        if inv < 2 {
            return Err(ParamError::Epsilon);
        }
        if power_of(&epsilon, &delta).is_none() {
            return Err(ParamError::Delta);
        }
        if mu <= Q::zero() || mu >= delta {
            return Err(ParamError::Mu);
        }
        if t < 1 {
            return Err(ParamError::T);
        }
        if f.divisor == 0 || reciprocal_int(&f.value(&epsilon)).is_none() {
            return Err(ParamError::F);
        }
        let n = default_grid_lines(&epsilon);
        Ok(Params { epsilon, delta, mu, t, f, n })
    }

    /// `H = (1 + 2ε)·T`.
    pub fn big_h(&self) -> Q {
        (qi(1) + qi(2) * &self.epsilon) * qi(self.t)
    }

    pub fn f_value(&self) -> Q {
        self.f.value(&self.epsilon)
    }

    /// The exponent `x` with `δ = ε^x`.
    pub fn delta_exponent(&self) -> u32 {
        power_of(&self.epsilon, &self.delta).expect("checked at construction")
    }

    pub fn with_t(&self, t: i64) -> Params {
        Params { t, ..self.clone() }
    }

    /// Human-readable notes about degenerate thresholds at this strip width.
    pub fn diagnostics(&self, strip_width: i64) -> Vec<String> {
        let mut out = Vec::new();
        if &self.mu * qi(strip_width) < Q::one() {
            out.push("mu*W < 1: the vertical and small classes are empty".to_string());
        }
        if &self.mu * qi(self.t) < Q::one() {
            out.push("mu*T < 1: the horizontal and small classes are empty".to_string());
        }
        out
    }
}

/// `⌈(1 + 3ε)/ε²⌉`, the grid used when counting containers.
pub fn default_grid_lines(epsilon: &Q) -> i64 {
    ceil_i64(&((qi(1) + qi(3) * epsilon) / (epsilon * epsilon)))
}

/// The `x ≥ 1` with `ε^x = δ`, if any.
pub fn power_of(epsilon: &Q, delta: &Q) -> Option<u32> {
    let mut p = epsilon.clone();
    for x in 1..=64 {
        if &p == delta {
            return Some(x);
        }
        if &p < delta {
            return None;
        }
        p *= epsilon;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ItemClass {
    Large,
    Tall,
    Vertical,
    MediumVertical,
    Horizontal,
    Small,
    Medium,
}

impl ItemClass {
    pub const ALL: [ItemClass; 7] = [
        ItemClass::Large,
        ItemClass::Tall,
        ItemClass::Vertical,
        ItemClass::MediumVertical,
        ItemClass::Horizontal,
        ItemClass::Small,
        ItemClass::Medium,
    ];

    /// Classes whose heights are rounded geometrically.
    pub fn is_rounded(self) -> bool {
        matches!(self, ItemClass::Large | ItemClass::Tall | ItemClass::Vertical | ItemClass::MediumVertical)
    }
}

/// Assigns an item of dimensions `w × h` to its class.
///
/// The tests are applied in declaration order so that the classes are disjoint
/// even where the defining thresholds touch.
pub fn classify_dims(w: i64, h: i64, p: &Params, strip_width: i64) -> ItemClass {
    let (w, h) = (qi(w), qi(h));
    let t = qi(p.t);
    let ww = qi(strip_width);
    let tall_from = (q(1, 4) + &p.epsilon) * &t;
    let (dt, dw) = (&p.delta * &t, &p.delta * &ww);
    let (mt, mw) = (&p.mu * &t, &p.mu * &ww);
    let et = &p.epsilon * &t;
    if h > dt && w >= dw {
        ItemClass::Large
    } else if h >= tall_from && w < dw {
        ItemClass::Tall
    } else if h >= dt && h < tall_from && w <= mw {
        ItemClass::Vertical
    } else if h >= et && h < tall_from && w > mw && w <= dw {
        ItemClass::MediumVertical
    } else if h <= mt && w >= dw {
        ItemClass::Horizontal
    } else if h <= mt && w <= mw {
        ItemClass::Small
    } else {
        ItemClass::Medium
    }
}

pub fn classify(item: &Item, p: &Params, strip_width: i64) -> ItemClass {
    classify_dims(item.width, item.height, p, strip_width)
}

/// Area of the items that are `Medium` or `MediumVertical`.
pub fn medium_area(instance: &Instance, p: &Params) -> i64 {
    instance
        .items
        .iter()
        .filter(|it| {
            matches!(
                classify(it, p, instance.strip_width),
                ItemClass::Medium | ItemClass::MediumVertical
            )
        })
        .map(Item::area)
        .sum()
}

/// Upper bound on the number of medium-vertical items implied by the area budget.
pub fn medium_vertical_count_bound(p: &Params, strip_width: i64) -> Q {
    let (w, t) = (qi(strip_width), qi(p.t));
    p.f_value() * &w * &t / (&p.epsilon * &t * &p.mu * &w)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaMu {
    pub delta: Q,
    pub mu: Q,
    /// Index `i` of the accepted pair `(σ_i, σ_{i+1})`.
    pub index: u64,
    /// `σ_i` before lowering it to a power of ε.
    pub sigma: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DeltaMuError {
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamError),
    #[error("no admissible threshold pair in the searched range")]
    Exhausted,
}

/// Largest power `ε^x ≤ v` with `x ≥ 1`.
pub fn power_floor(epsilon: &Q, v: &Q) -> Q {
    let mut p = epsilon.clone();
    while &p > v {
        p *= epsilon;
    }
    p
}

/// Searches `σ_0 = f, σ_{i+1} = σ_i²·f` for a pair `(δ, μ) = (σ_i, σ_{i+1})` whose
/// medium classes carry area at most `f·W·T`, then lowers δ to a power of ε.
pub fn find_delta_mu(instance: &Instance, epsilon: &Q, f: FSpec, t: i64) -> Result<DeltaMu, DeltaMuError> {
    let fv = f.value(epsilon);
    let inv_f = reciprocal_int(&fv).ok_or(ParamError::F)?;
    let budget = &fv * qi(instance.strip_width) * qi(t);
    let mut sigma = fv.clone();
    let limit = 2 * inv_f as u64;
    for i in 0..limit {
        let next = &sigma * &sigma * &fv;
        let p = Params::new(epsilon.clone(), power_floor(epsilon, &sigma), next.clone(), t, f)?;
        let raw = Params { delta: sigma.clone(), ..p.clone() };
        if qi(medium_area(instance, &raw)) <= budget && qi(medium_area(instance, &p)) <= budget {
            return Ok(DeltaMu { delta: p.delta, mu: next, index: i, sigma });
        }
        sigma = next;
    }
    Err(DeltaMuError::Exhausted)
}

/// An item with its geometrically rounded height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundedItem {
    pub item: Item,
    /// `k·ε^{level+1}·T`.
    pub rounded_height: Q,
    pub level: u32,
    pub multiplier: i64,
}

impl RoundedItem {
    /// The rounded height as an integer, rounding up when it is fractional.
    pub fn height_ceil(&self) -> i64 {
        ceil_i64(&self.rounded_height)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RoundError {
    #[error("item {0} is taller than T")]
    TallerThanT(String),
    #[error("item {0} is not taller than delta*T")]
    TooShort(String),
}

/// Rounds one height `δT ≤ h ≤ T` up to a multiple of `ε^{l+1}T` where `ε^l T ≤ h < ε^{l−1}T`.
pub fn round_height(h: i64, epsilon: &Q, t: i64) -> Option<(Q, u32, i64)> {
    if h > t || h < 1 {
        return None;
    }
    let hq = qi(h);
    let tq = qi(t);
    let inv = reciprocal_int(epsilon).expect("reciprocal-integral epsilon");
    let mut level = 0u32;
    let mut lower = tq.clone();
    while hq < lower {
        lower *= epsilon;
        level += 1;
    }
    let pitch = &lower * epsilon;
    let mut k = ceil_i64(&(&hq / &pitch));
    if k == inv * inv {
        // Rounded onto the next level's lower boundary.
        level -= 1;
        k = inv;
        return Some((qi(k) * &lower, level, k));
    }
    Some((qi(k) * &pitch, level, k))
}

pub fn round_tall_heights(items: &[Item], p: &Params) -> Result<Vec<RoundedItem>, RoundError> {
    let dt = &p.delta * qi(p.t);
    items
        .iter()
        .map(|it| {
            if qi(it.height) < dt {
                return Err(RoundError::TooShort(it.id.clone()));
            }
            let (r, level, k) =
                round_height(it.height, &p.epsilon, p.t).ok_or_else(|| RoundError::TallerThanT(it.id.clone()))?;
            Ok(RoundedItem { item: it.clone(), rounded_height: r, level, multiplier: k })
        })
        .collect()
}

/// How to map a packing of an arithmetically rounded instance back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleInfo {
    /// One scaled height unit in original units, `εT/n`.
    pub unit: Q,
}

impl ScaleInfo {
    pub fn identity() -> Self {
        ScaleInfo { unit: Q::one() }
    }

    /// Original coordinate of a scaled one. Flooring keeps disjoint items disjoint
    /// because every scaled height times `unit` is at least the original height.
    pub fn to_original(&self, y: i64) -> i64 {
        floor_i64(&(qi(y) * &self.unit))
    }
}

/// Rounds heights up to multiples of `εT/n` and expresses them in that unit.
pub fn arithmetic_round(instance: &Instance, epsilon: &Q, t: i64) -> (Instance, ScaleInfo) {
    let n = instance.items.len().max(1) as i64;
    let unit = epsilon * qi(t) / qi(n);
    let items = instance
        .items
        .iter()
        .map(|it| Item::new(it.id.clone(), it.width, ceil_i64(&(qi(it.height) / &unit))))
        .collect();
    (Instance::new(instance.strip_width, items), ScaleInfo { unit })
}
