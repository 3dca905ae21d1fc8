//! Upper half-plane geometry: isometries, distance, and geodesic frames.

use num_complex::Complex64;

/// Orientation-preserving isometry `z ↦ (az + b) / (cz + d)` with real entries
/// and positive determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Applies the map. Real and imaginary parts are formed separately so the
    /// imaginary part keeps full relative precision near the boundary.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let den_re = self.c * z.re + self.d;
        let den_im = self.c * z.im;
        let den2 = den_re * den_re + den_im * den_im;
        let num_re = self.a * z.re + self.b;
        let num_im = self.a * z.im;
        Complex64::new(
            (num_re * den_re + num_im * den_im) / den2,
            self.det() * z.im / den2,
        )
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// Rotation by `angle` about `i`, counterclockwise in the tangent plane.
    pub fn rotation_about_i(angle: f64) -> Mobius {
        let (s, c) = (0.5 * angle).sin_cos();
        Mobius::new(c, s, -s, c)
    }

    /// Affine isometry taking `x` to `i`.
    pub fn normalize_to_i(x: Complex64) -> Mobius {
        Mobius::new(1.0, -x.re, 0.0, x.im)
    }
}

/// Hyperbolic distance `arccosh(1 + |u−v|²/(2 Im u Im v))`, evaluated as
/// `2 asinh(|u−v| / (2√(Im u Im v)))` which has no cancellation near zero.
pub fn distance(u: Complex64, v: Complex64) -> f64 {
    let chord = (u - v).norm();
    if chord == 0.0 {
        return 0.0;
    }
    2.0 * (chord / (2.0 * u.im.sqrt() * v.im.sqrt())).asinh()
}

/// Reference form used to cross-check [`distance`].
pub fn distance_arccosh(u: Complex64, v: Complex64) -> f64 {
    (1.0 + (u - v).norm_sqr() / (2.0 * u.im * v.im)).acosh()
}

/// Direction angle of `w` as seen from `i`; 0 points straight up.
pub fn direction_from_i(w: Complex64) -> f64 {
    (-2.0 * w.re).atan2(w.norm_sqr() - 1.0)
}

/// An isometry carrying a geodesic onto the imaginary axis, base point to `i`.
#[derive(Clone, Copy, Debug)]
pub struct GeodesicFrame {
    to_standard: Mobius,
    from_standard: Mobius,
}

impl GeodesicFrame {
    /// Frame of the ray from `base` through `through` (must differ).
    pub fn through(base: Complex64, through: Complex64) -> Self {
        let normalize = Mobius::normalize_to_i(base);
        let psi = direction_from_i(normalize.apply(through));
        let to_standard = Mobius::rotation_about_i(-psi).compose(&normalize);
        GeodesicFrame { to_standard, from_standard: to_standard.inverse() }
    }

    /// Frame of the ray from `base` leaving at angle `theta` (0 = up).
    pub fn at_angle(base: Complex64, theta: f64) -> Self {
        let from_standard = Mobius::normalize_to_i(base)
            .inverse()
            .compose(&Mobius::rotation_about_i(theta));
        GeodesicFrame { to_standard: from_standard.inverse(), from_standard }
    }

    /// Time-`t` point of the ray.
    pub fn point_at(&self, t: f64) -> Complex64 {
        self.from_standard.apply(Complex64::new(0.0, t.exp()))
    }

    /// Point reached by leaving the time-`s` point perpendicularly (to the
    /// left of the direction of travel) for signed distance `u`.
    pub fn fermi_point(&self, s: f64, u: f64) -> Complex64 {
        let scale = s.exp();
        let z = Complex64::new(scale * u.tanh(), scale / u.cosh());
        self.from_standard.apply(z)
    }

    pub fn to_standard(&self) -> &Mobius {
        &self.to_standard
    }
}
