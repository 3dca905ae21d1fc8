//! C ABI for `stathyp`.
//!
//! Every fallible function returns an [`StStatus`] and writes its result
//! through an out-pointer. On failure, [`st_last_error_message`] describes
//! the error on the calling thread. Handles (`StSpace`, `StBody`) are
//! created by constructor functions and released with the matching
//! `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stathyp::coarse::{self, HoroballPair};
use stathyp::finsler::{self, ConvexBody, Polytope, VolumeMethod};
use stathyp::space::{modular, ModelSpace, NormFactor, Point};
use stathyp::stats;
use stathyp::Error;

/// Default short-curve constant `e^-100`.
pub const ST_DEFAULT_EPSILON0: f64 = 3.720075976020836e-44;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StStatus {
    Ok = 0,
    Domain = 1,
    Parameter = 2,
    UnsupportedMeasure = 3,
    UnsupportedMethod = 4,
    DegenerateRay = 5,
    Coverage = 6,
    Parse = 7,
    NullPointer = 8,
    InvalidUtf8 = 9,
    Panic = 10,
}

/// A model space.
pub struct StSpace(ModelSpace);

/// A centrally symmetric convex body.
pub struct StBody(ConvexBody);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_pairs: u64,
    pub r: f64,
    pub k: f64,
    pub seed: u64,
}

/// Exact evaluation when `monte_carlo` is false; otherwise rejection sampling
/// with `samples` draws from `seed`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StVolumeMethod {
    pub monte_carlo: bool,
    pub samples: u64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StMahler {
    pub dim: u32,
    pub volume: f64,
    pub polar_volume: f64,
    pub mahler: f64,
    pub std_error: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub within_bounds: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StDensities {
    pub dim: u32,
    pub busemann: f64,
    pub holmes_thompson: f64,
    pub ratio: f64,
    pub ratio_std_error: f64,
    pub within_sandwich: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> StStatus {
    match e {
        Error::Domain(_) => StStatus::Domain,
        Error::Parameter(_) => StStatus::Parameter,
        Error::UnsupportedMeasure(_) => StStatus::UnsupportedMeasure,
        Error::UnsupportedMethod(_) => StStatus::UnsupportedMethod,
        Error::DegenerateRay => StStatus::DegenerateRay,
        Error::Coverage(_) => StStatus::Coverage,
        Error::Parse(_) => StStatus::Parse,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> StStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            StStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string argument is not valid UTF-8".into());
            StStatus::InvalidUtf8
        }
        Err(_) => {
            set_last_error("internal panic".into());
            StStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and, per the caller's contract, valid for `len` reads.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and, per the caller's contract, NUL-terminated.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| Failure::Utf8)
}

fn boxed<T>(slot: &mut *mut T, value: T) {
    *slot = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn st_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer returned by a `stathyp` function that
/// documents ownership transfer, not freed before.
#[no_mangle]
pub unsafe extern "C" fn st_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Euclidean `ℓ^p` space of dimension `dim`; `p` may be `INFINITY`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn st_space_euclidean(dim: usize, p: f64, out: *mut *mut StSpace) -> StStatus {
    guard(|| {
        let slot = unsafe { self::out(out, "out")? };
        boxed(slot, StSpace(ModelSpace::euclidean(dim, p)?));
        Ok(())
    })
}

/// The hyperbolic upper half-plane.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn st_space_hyperbolic(out: *mut *mut StSpace) -> StStatus {
    guard(|| {
        boxed(unsafe { self::out(out, "out")? }, StSpace(ModelSpace::hyperbolic_plane()));
        Ok(())
    })
}

/// Upper half-plane with the modular thick/thin structure.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn st_space_modular(out: *mut *mut StSpace) -> StStatus {
    guard(|| {
        boxed(unsafe { self::out(out, "out")? }, StSpace(ModelSpace::modular_torus()));
        Ok(())
    })
}

/// Regular tree of the given valence.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn st_space_tree(valence: u8, out: *mut *mut StSpace) -> StStatus {
    guard(|| {
        let slot = unsafe { self::out(out, "out")? };
        boxed(slot, StSpace(ModelSpace::regular_tree(valence)?));
        Ok(())
    })
}

/// Sup-metric product of `count` factors; factor `i` is `ℓ^{ps[i]}` of
/// dimension `dims[i]`.
///
/// # Safety
/// `dims` and `ps` must each point to `count` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn st_space_sup_product(
    dims: *const usize,
    ps: *const f64,
    count: usize,
    out: *mut *mut StSpace,
) -> StStatus {
    guard(|| {
        let dims = unsafe { slice(dims, count, "dims")? };
        let ps = unsafe { slice(ps, count, "ps")? };
        let factors = dims.iter().zip(ps).map(|(&dim, &p)| NormFactor { dim, p }).collect();
        boxed(unsafe { self::out(out, "out")? }, StSpace(ModelSpace::sup_product(factors)?));
        Ok(())
    })
}

/// Sets the growth exponent of the radial sampling density.
///
/// # Safety
/// `space` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn st_space_set_growth(space: *mut StSpace, h: f64) -> StStatus {
    guard(|| {
        let s = unsafe { self::out(space, "space")? };
        s.0 = s.0.clone().with_growth(h)?;
        Ok(())
    })
}

/// Releases a space handle. Null is ignored.
///
/// # Safety
/// `space` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn st_space_free(space: *mut StSpace) {
    if !space.is_null() {
        // SAFETY: handle was produced by `Box::into_raw` above.
        drop(unsafe { Box::from_raw(space) });
    }
}

/// Short label of the space; free with [`st_string_free`].
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_space_label(space: *const StSpace, out: *mut *mut c_char) -> StStatus {
    guard(|| {
        let s = unsafe { space.as_ref() }.ok_or(Failure::Null("space"))?;
        let label = CString::new(s.0.label()).unwrap_or_default();
        *unsafe { self::out(out, "out")? } = label.into_raw();
        Ok(())
    })
}

unsafe fn space_ref<'a>(space: *const StSpace) -> Result<&'a ModelSpace, Failure> {
    // SAFETY: the caller passes null or a live handle.
    Ok(&unsafe { space.as_ref() }.ok_or(Failure::Null("space"))?.0)
}

/// Distance between two real-vector points of length `len`.
///
/// # Safety
/// `space` must be a live handle, `u` and `v` readable for `len` values and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_distance_real(
    space: *const StSpace,
    u: *const f64,
    v: *const f64,
    len: usize,
    out: *mut f64,
) -> StStatus {
    guard(|| {
        let s = unsafe { space_ref(space)? };
        let u = Point::real(unsafe { slice(u, len, "u")? });
        let v = Point::real(unsafe { slice(v, len, "v")? });
        *unsafe { self::out(out, "out")? } = s.distance(&u, &v)?;
        Ok(())
    })
}

/// Distance between `u_re + i u_im` and `v_re + i v_im` in a half-plane model.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_distance_complex(
    space: *const StSpace,
    u_re: f64,
    u_im: f64,
    v_re: f64,
    v_im: f64,
    out: *mut f64,
) -> StStatus {
    guard(|| {
        let s = unsafe { space_ref(space)? };
        *unsafe { self::out(out, "out")? } = s.distance(&Point::complex(u_re, u_im), &Point::complex(v_re, v_im))?;
        Ok(())
    })
}

/// Distance between tree vertices written as label words (`""` is the root,
/// `"ab"` is two steps out).
///
/// # Safety
/// `space` must be a live handle, `u` and `v` NUL-terminated strings and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_distance_tree(
    space: *const StSpace,
    u: *const c_char,
    v: *const c_char,
    out: *mut f64,
) -> StStatus {
    guard(|| {
        let s = unsafe { space_ref(space)? };
        let u = Point::tree(unsafe { string(u, "u")? })?;
        let v = Point::tree(unsafe { string(v, "v")? })?;
        *unsafe { self::out(out, "out")? } = s.distance(&u, &v)?;
        Ok(())
    })
}

/// Average normalized distance of `n` pairs from the sphere (`k = 0`) or the
/// annulus of width `k` about the space's base point.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_estimate_e(
    space: *const StSpace,
    r: f64,
    k: f64,
    n: u64,
    seed: u64,
    out: *mut StEstimate,
) -> StStatus {
    guard(|| {
        let s = unsafe { space_ref(space)? };
        let n = usize::try_from(n).map_err(|_| Error::Parameter(format!("pair count {n} too large")))?;
        let e = stats::estimate_e(s, &s.basepoint(), r, k, n, seed)?;
        *unsafe { self::out(out, "out")? } =
            StEstimate { mean: e.mean, std_error: e.std_error, n_pairs: e.n_pairs as u64, r: e.r, k: e.k, seed: e.seed };
        Ok(())
    })
}

/// Unit `ℓ^p` ball in dimension `dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn st_body_lp_ball(dim: usize, p: f64, out: *mut *mut StBody) -> StStatus {
    guard(|| {
        let slot = unsafe { self::out(out, "out")? };
        boxed(slot, StBody(ConvexBody::lp_ball(dim, p)?));
        Ok(())
    })
}

/// Axis-aligned ellipsoid with semi-axes `axes[0..dim]`.
///
/// # Safety
/// `axes` must be readable for `dim` values and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_body_ellipsoid(axes: *const f64, dim: usize, out: *mut *mut StBody) -> StStatus {
    guard(|| {
        let axes = unsafe { slice(axes, dim, "axes")? }.to_vec();
        boxed(unsafe { self::out(out, "out")? }, StBody(ConvexBody::ellipsoid(axes)?));
        Ok(())
    })
}

/// Symmetric polytope from `count` vertices stored row-major in `coords`
/// (`count * dim` values); the vertex set must be closed under negation.
///
/// # Safety
/// `coords` must be readable for `count * dim` values and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_body_polytope(
    coords: *const f64,
    count: usize,
    dim: usize,
    out: *mut *mut StBody,
) -> StStatus {
    guard(|| {
        let len = count.checked_mul(dim).ok_or(Error::Parameter("vertex array too large".into()))?;
        let flat = unsafe { slice(coords, len, "coords")? };
        if dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()).into());
        }
        let vertices = flat.chunks(dim).map(<[f64]>::to_vec).collect();
        boxed(unsafe { self::out(out, "out")? }, StBody(ConvexBody::Polytope(Polytope::from_vertices(vertices)?)));
        Ok(())
    })
}

/// Releases a body handle. Null is ignored.
///
/// # Safety
/// `body` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn st_body_free(body: *mut StBody) {
    if !body.is_null() {
        // SAFETY: handle was produced by `Box::into_raw` above.
        drop(unsafe { Box::from_raw(body) });
    }
}

fn method(m: StVolumeMethod) -> VolumeMethod {
    if m.monte_carlo {
        VolumeMethod::MonteCarlo { samples: m.samples, seed: m.seed }
    } else {
        VolumeMethod::Exact
    }
}

unsafe fn body_ref<'a>(body: *const StBody) -> Result<&'a ConvexBody, Failure> {
    // SAFETY: the caller passes null or a live handle.
    Ok(&unsafe { body.as_ref() }.ok_or(Failure::Null("body"))?.0)
}

/// Mahler volume of the body with its John and Blaschke–Santaló bounds.
///
/// # Safety
/// `body` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_mahler(body: *const StBody, m: StVolumeMethod, out: *mut StMahler) -> StStatus {
    guard(|| {
        let r = finsler::mahler(unsafe { body_ref(body)? }, method(m))?;
        *unsafe { self::out(out, "out")? } = StMahler {
            dim: r.dim as u32,
            volume: r.volume.value,
            polar_volume: r.polar_volume.value,
            mahler: r.mahler,
            std_error: r.std_error,
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            within_bounds: r.within_bounds(),
        };
        Ok(())
    })
}

/// Busemann and Holmes–Thompson densities of the norm with this unit ball.
///
/// # Safety
/// `body` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn st_densities(body: *const StBody, m: StVolumeMethod, out: *mut StDensities) -> StStatus {
    guard(|| {
        let d = finsler::densities(unsafe { body_ref(body)? }, method(m))?;
        *unsafe { self::out(out, "out")? } = StDensities {
            dim: d.dim as u32,
            busemann: d.busemann,
            holmes_thompson: d.holmes_thompson,
            ratio: d.ratio,
            ratio_std_error: d.ratio_std_error,
            within_sandwich: d.within_sandwich(),
        };
        Ok(())
    })
}

/// Annular distance `d_A` between horoballs of core lengths `lx`, `ly` at
/// core distance `dc`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn st_annular_distance(lx: f64, ly: f64, dc: f64, epsilon0: f64, out: *mut f64) -> StStatus {
    guard(|| {
        let pair = HoroballPair::with_epsilon0(lx, ly, dc, epsilon0)?;
        *unsafe { self::out(out, "out")? } = coarse::annular_distance(&pair)?;
        Ok(())
    })
}

/// `H_A = max(log⁺ dc, log⁺(1/lx), log⁺(1/ly))`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn st_h_combined(lx: f64, ly: f64, dc: f64, epsilon0: f64, out: *mut f64) -> StStatus {
    guard(|| {
        let pair = HoroballPair::with_epsilon0(lx, ly, dc, epsilon0)?;
        *unsafe { self::out(out, "out")? } = coarse::h_combined(&pair)?;
        Ok(())
    })
}

/// Reduces `re + i im` into the standard fundamental domain. `word_len`
/// (optional, may be null) receives the number of generator steps used.
///
/// # Safety
/// `out_re` and `out_im` must be writable; `word_len` null or writable.
#[no_mangle]
pub unsafe extern "C" fn st_reduce_modular(
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    word_len: *mut u64,
) -> StStatus {
    guard(|| {
        let (z, word) = modular::reduce(num_complex::Complex64::new(re, im))?;
        *unsafe { self::out(out_re, "out_re")? } = z.re;
        *unsafe { self::out(out_im, "out_im")? } = z.im;
        if let Some(len) = unsafe { word_len.as_mut() } {
            *len = word.len() as u64;
        }
        Ok(())
    })
}
