//! Arithmetic of coarse distance formulas: `log⁺`, thresholds, the horoball
//! annular distance `d_A` with its proxy `H_A`, and the sums built from them
//! over synthetic projection profiles.

pub mod profile;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Result};
use crate::space::hyperbolic;
use num_complex::Complex64;

pub use profile::{Entry, EntryKind, ProjectionProfile};

/// Default short-curve constant: `log⁺(1/ε₀) = 100`.
pub const DEFAULT_EPSILON0: f64 = 3.720075976020836e-44;

/// `max(0, log a)`.
pub fn log_plus(a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(domain(format!("log⁺ needs a nonnegative argument, got {a}")));
    }
    Ok(if a <= 1.0 { 0.0 } else { a.ln() })
}

fn lp(a: f64) -> f64 {
    if a <= 1.0 {
        0.0
    } else {
        a.ln()
    }
}

/// `⌊N⌋_{M0}`: `N` when `N ≥ M0`, otherwise 0.
pub fn threshold(n: f64, m0: f64) -> f64 {
    if n >= m0 {
        n
    } else {
        0.0
    }
}

/// Smallest threshold covered by the annular comparison: `36·log⁺(1/ε₀)`.
pub fn threshold_floor(epsilon0: f64) -> f64 {
    36.0 * lp(1.0 / epsilon0)
}

/// Lengths of a curve at the two endpoints and the twisting distance between them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoroballPair {
    pub lx: f64,
    pub ly: f64,
    pub dc: f64,
    pub epsilon0: f64,
}

impl HoroballPair {
    pub fn new(lx: f64, ly: f64, dc: f64) -> Result<Self> {
        Self::with_epsilon0(lx, ly, dc, DEFAULT_EPSILON0)
    }

    pub fn with_epsilon0(lx: f64, ly: f64, dc: f64, epsilon0: f64) -> Result<Self> {
        let pair = HoroballPair { lx, ly, dc, epsilon0 };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lx > 0.0 && self.lx.is_finite() && self.ly > 0.0 && self.ly.is_finite()) {
            return Err(domain(format!("curve lengths must be positive and finite, got {} and {}", self.lx, self.ly)));
        }
        if !(self.dc >= 0.0 && self.dc.is_finite()) {
            return Err(domain(format!("twisting distance must be finite and nonnegative, got {}", self.dc)));
        }
        if !(self.epsilon0 > 0.0) {
            return Err(domain("ε₀ must be positive"));
        }
        Ok(())
    }

    /// Short at both endpoints.
    pub fn short_at_both(&self) -> bool {
        self.lx < self.epsilon0 && self.ly < self.epsilon0
    }

    /// Not short at either endpoint.
    pub fn short_at_neither(&self) -> bool {
        self.lx >= self.epsilon0 && self.ly >= self.epsilon0
    }
}

/// Hyperbolic distance between `(0, max(1, 1/l_x))` and `(d_C, max(1, 1/l_y))`.
pub fn annular_distance(h: &HoroballPair) -> Result<f64> {
    h.validate()?;
    let hx = (1.0 / h.lx).max(1.0);
    let hy = (1.0 / h.ly).max(1.0);
    Ok(hyperbolic::distance(Complex64::new(0.0, hx), Complex64::new(h.dc, hy)))
}

/// `H_A = max(log⁺ d_C, log⁺(1/l_x), log⁺(1/l_y))`.
pub fn h_combined(h: &HoroballPair) -> Result<f64> {
    h.validate()?;
    Ok(lp(h.dc).max(lp(1.0 / h.lx)).max(lp(1.0 / h.ly)))
}

/// `B = arccosh(1 + d²/2)`, the distance between two points at height 1 a
/// horizontal distance `d` apart.
pub fn twist_distance(d: f64) -> f64 {
    2.0 * (d / 2.0).asinh()
}

/// `d_S + Σ ⌊d⌋_{M0}` over every entry, annular values being `d_A`.
pub fn repackaged_distance(p: &ProjectionProfile, m0: f64) -> Result<f64> {
    let mut total = p.d_s;
    for e in &p.entries {
        total += threshold(e.value()?, m0);
    }
    Ok(total)
}

/// Distance formula with annuli split by shortness: entries short at both
/// endpoints contribute `⌊d_A⌋_{M0}`, the other annuli `⌊H_A⌋_{log M0}`.
pub fn reorganized_distance(p: &ProjectionProfile, m0: f64, epsilon0: f64) -> Result<f64> {
    if !(m0 > 0.0) {
        return Err(param(format!("threshold must be positive, got {m0}")));
    }
    let mut total = p.d_s;
    for e in &p.entries {
        total += match e.kind {
            EntryKind::NonAnnular { d } => threshold(d, m0),
            EntryKind::Annular { lx, ly, dc } => {
                let pair = HoroballPair::with_epsilon0(lx, ly, dc, epsilon0)?;
                if pair.short_at_both() {
                    threshold(annular_distance(&pair)?, m0)
                } else {
                    threshold(h_combined(&pair)?, m0.ln())
                }
            }
        };
    }
    Ok(total)
}

/// Both sides of `Σ log⁺⌊·⌋_{M0}` versus `⌊max log⁺ ·⌋_{log M0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxLogCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio_ok: bool,
}

pub fn max_log_identity_check(f: f64, g: f64, h: f64, m0: f64) -> Result<MaxLogCheck> {
    if !(m0 > 1.0) {
        return Err(param(format!("threshold must exceed 1, got {m0}")));
    }
    let lhs = log_plus(threshold(f, m0))? + log_plus(threshold(g, m0))? + log_plus(threshold(h, m0))?;
    let rhs = threshold(log_plus(f)?.max(log_plus(g)?).max(log_plus(h)?), m0.ln());
    let ratio_ok = (lhs == 0.0 && rhs == 0.0) || (lhs <= 3.0 * rhs && rhs <= 3.0 * lhs);
    Ok(MaxLogCheck { lhs, rhs, ratio_ok })
}

/// Outcome of the two-sided annular comparison for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub d_a: f64,
    pub h_a: f64,
    /// Whether the pair meets the comparison's hypotheses.
    pub applicable: bool,
    pub holds: bool,
}

/// `d_A/6 ≤ H_A ≤ 6·d_A`, applicable when neither length is below `ε₀` and
/// `max(d_A, H_A) ≥ 36·log⁺(1/ε₀)`.
pub fn annular_sandwich(h: &HoroballPair) -> Result<SandwichCheck> {
    let d_a = annular_distance(h)?;
    let h_a = h_combined(h)?;
    let applicable = h.short_at_neither() && d_a.max(h_a) >= threshold_floor(h.epsilon0);
    let holds = d_a / 6.0 <= h_a && h_a <= 6.0 * d_a;
    Ok(SandwichCheck { d_a, h_a, applicable, holds })
}

/// `log⁺ d ≤ B ≤ 4·log⁺ d` for `B = arccosh(1 + d²/2)`, applicable when
/// `B ≥ 3` or `d ≥ 3`. Returns `(applicable, holds)`.
pub fn twist_bounds(d: f64) -> Result<(bool, bool)> {
    let b = twist_distance(d);
    let l = log_plus(d)?;
    Ok((b >= 3.0 || d >= 3.0, l <= b && b <= 4.0 * l))
}

/// The three sums `Σ ⌊d_A⌋_{6M0}/6`, `Σ ⌊H_A⌋_{M0}`, `Σ 6⌊d_A⌋_{M0/6}` over
/// annular entries not short at both endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub holds: bool,
}

pub fn annular_chain(p: &ProjectionProfile, m0: f64, epsilon0: f64) -> Result<ChainCheck> {
    let (mut lower, mut middle, mut upper) = (Vec::new(), Vec::new(), Vec::new());
    for e in &p.entries {
        if let EntryKind::Annular { lx, ly, dc } = e.kind {
            let pair = HoroballPair::with_epsilon0(lx, ly, dc, epsilon0)?;
            if pair.short_at_both() {
                continue;
            }
            let d_a = annular_distance(&pair)?;
            let h_a = h_combined(&pair)?;
            lower.push(threshold(d_a, 6.0 * m0) / 6.0);
            middle.push(threshold(h_a, m0));
            upper.push(6.0 * threshold(d_a, m0 / 6.0));
        }
    }
    let (lower, middle, upper) =
        (crate::rng::pairwise_sum(&lower), crate::rng::pairwise_sum(&middle), crate::rng::pairwise_sum(&upper));
    Ok(ChainCheck { lower, middle, upper, holds: lower <= middle && middle <= upper })
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Profile with `0..=50` entries, each value and length log-uniform on
/// `[1e−3, e²⁰]`; entries are annular with probability one half.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R) -> ProjectionProfile {
    let (lo, hi) = (1e-3, 20f64.exp());
    let count = rng.random_range(0..=50);
    let entries = (0..count)
        .map(|i| {
            let kind = if rng.random_bool(0.5) {
                EntryKind::Annular {
                    lx: log_uniform(rng, lo, hi),
                    ly: log_uniform(rng, lo, hi),
                    dc: log_uniform(rng, lo, hi),
                }
            } else {
                EntryKind::NonAnnular { d: log_uniform(rng, lo, hi) }
            };
            Entry { label: format!("v{i}"), kind }
        })
        .collect();
    ProjectionProfile { d_s: log_uniform(rng, lo, hi), entries }
}
