//! Reduction to the `SL(2,ℤ)` fundamental domain and the geodesic flow on the
//! modular surface, which stands in for a moduli space with one cusp.

use num_complex::Complex64;

use super::hyperbolic::GeodesicFrame;
use crate::error::{domain, Result};

/// One generator application: `T(n): z ↦ z + n`, `S: z ↦ −1/z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModularStep {
    T(i64),
    S,
}

impl ModularStep {
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            ModularStep::T(n) => Complex64::new(z.re + n as f64, z.im),
            ModularStep::S => {
                let n2 = z.norm_sqr();
                Complex64::new(-z.re / n2, z.im / n2)
            }
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            ModularStep::T(n) => ModularStep::T(-n),
            ModularStep::S => ModularStep::S,
        }
    }
}

/// Generator sequence taking the original point to its reduced representative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionWord(pub Vec<ModularStep>);

impl ReductionWord {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Applies the same reduction to another point.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.0.iter().fold(z, |acc, step| step.apply(acc))
    }

    /// Maps a reduced point back to the original orbit representative.
    pub fn undo(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(z, |acc, step| step.inverse().apply(acc))
    }
}

const MAX_REDUCTION_STEPS: usize = 100_000;

/// Reduces `z` into `{|Re z| ≤ 1/2, |z| ≥ 1}`.
pub fn reduce(z: Complex64) -> Result<(Complex64, ReductionWord)> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(domain(format!("point {z} is not in the upper half-plane")));
    }
    let mut z = z;
    let mut word = Vec::new();
    for _ in 0..MAX_REDUCTION_STEPS {
        let shift = z.re.round();
        if shift != 0.0 {
            let step = ModularStep::T(-(shift as i64));
            z = step.apply(z);
            word.push(step);
        }
        if z.norm_sqr() < 1.0 {
            z = ModularStep::S.apply(z);
            word.push(ModularStep::S);
        } else {
            return Ok((z, ReductionWord(word)));
        }
    }
    Err(domain(format!("reduction of {z} did not terminate")))
}

/// Whether `z` lies in the closed fundamental domain (with slack `tol`).
pub fn in_fundamental_domain(z: Complex64, tol: f64) -> bool {
    z.re.abs() <= 0.5 + tol && z.norm_sqr() >= 1.0 - tol
}

/// Unit tangent vector on the modular surface, represented by a base point in
/// the fundamental domain and the point one unit further along its geodesic.
#[derive(Clone, Copy, Debug)]
pub struct ModularFlow {
    base: Complex64,
    ahead: Complex64,
}

impl ModularFlow {
    /// Starts at `base` heading towards `through`.
    pub fn new(base: Complex64, through: Complex64) -> Result<Self> {
        let frame = GeodesicFrame::through(base, through);
        let mut flow = ModularFlow { base, ahead: frame.point_at(1.0) };
        flow.renormalize()?;
        Ok(flow)
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    /// Flows forward for time `dt`.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        let frame = GeodesicFrame::through(self.base, self.ahead);
        self.base = frame.point_at(dt);
        self.ahead = frame.point_at(dt + 1.0);
        self.renormalize()
    }

    fn renormalize(&mut self) -> Result<()> {
        let (reduced, word) = reduce(self.base)?;
        self.ahead = word.apply(self.ahead);
        self.base = reduced;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::hyperbolic::distance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reduced_points_stay_put() {
        let (z, w) = reduce(c(0.0, 1.0)).unwrap();
        assert_eq!(z, c(0.0, 1.0));
        assert!(w.is_empty());
        let (z, w) = reduce(c(0.1, 10.0)).unwrap();
        assert_eq!(z, c(0.1, 10.0));
        assert!(w.is_empty());
    }

    #[test]
    fn reduction_lands_in_domain_and_undoes() {
        let z = c(2.3, 0.5);
        let (r, w) = reduce(z).unwrap();
        assert!(in_fundamental_domain(r, 1e-12));
        assert!((w.undo(r) - z).norm() < 1e-9);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(reduce(c(0.0, -1.0)).is_err());
        assert!(reduce(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn reduction_is_an_isometry_on_pairs() {
        let (z, w) = (c(3.7, 0.2), c(3.9, 0.25));
        let (rz, word) = reduce(z).unwrap();
        let rw = word.apply(w);
        assert!((distance(z, w) - distance(rz, rw)).abs() < 1e-9);
    }

    #[test]
    fn flow_keeps_unit_spacing() {
        let mut flow = ModularFlow::new(c(0.1, 1.2), c(0.8, 0.9)).unwrap();
        for _ in 0..1000 {
            flow.advance(0.1).unwrap();
            assert!(in_fundamental_domain(flow.base(), 1e-9));
            assert!((distance(flow.base, flow.ahead) - 1.0).abs() < 1e-6);
        }
    }
}
