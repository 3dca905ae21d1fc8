#ifndef STATHYP_H
#define STATHYP_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Default short-curve constant `e^-100`.
#define ST_DEFAULT_EPSILON0 3.720075976020836e-44

typedef enum StStatus {
  ST_STATUS_OK = 0,
  ST_STATUS_DOMAIN = 1,
  ST_STATUS_PARAMETER = 2,
  ST_STATUS_UNSUPPORTED_MEASURE = 3,
  ST_STATUS_UNSUPPORTED_METHOD = 4,
  ST_STATUS_DEGENERATE_RAY = 5,
  ST_STATUS_COVERAGE = 6,
  ST_STATUS_PARSE = 7,
  ST_STATUS_NULL_POINTER = 8,
  ST_STATUS_INVALID_UTF8 = 9,
  ST_STATUS_PANIC = 10,
} StStatus;

// A centrally symmetric convex body.
typedef struct StBody StBody;

// A model space.
typedef struct StSpace StSpace;

typedef struct StEstimate {
  double mean;
  double std_error;
  uint64_t n_pairs;
  double r;
  double k;
  uint64_t seed;
} StEstimate;

// Exact evaluation when `monte_carlo` is false; otherwise rejection sampling
// with `samples` draws from `seed`.
typedef struct StVolumeMethod {
  bool monte_carlo;
  uint64_t samples;
  uint64_t seed;
} StVolumeMethod;

typedef struct StMahler {
  uint32_t dim;
  double volume;
  double polar_volume;
  double mahler;
  double std_error;
  double lower_bound;
  double upper_bound;
  bool within_bounds;
} StMahler;

typedef struct StDensities {
  uint32_t dim;
  double busemann;
  double holmes_thompson;
  double ratio;
  double ratio_std_error;
  bool within_sandwich;
} StDensities;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *st_last_error_message(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a pointer returned by a `stathyp` function that
// documents ownership transfer, not freed before.
void st_string_free(char *s);

// Euclidean `ℓ^p` space of dimension `dim`; `p` may be `INFINITY`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum StStatus st_space_euclidean(size_t dim, double p, struct StSpace **out);

// The hyperbolic upper half-plane.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum StStatus st_space_hyperbolic(struct StSpace **out);

// Upper half-plane with the modular thick/thin structure.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum StStatus st_space_modular(struct StSpace **out);

// Regular tree of the given valence.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum StStatus st_space_tree(uint8_t valence, struct StSpace **out);

// Sup-metric product of `count` factors; factor `i` is `ℓ^{ps[i]}` of
// dimension `dims[i]`.
//
// # Safety
// `dims` and `ps` must each point to `count` readable values; `out` must be
// writable.
enum StStatus st_space_sup_product(const size_t *dims,
                                   const double *ps,
                                   size_t count,
                                   struct StSpace **out);

// Sets the growth exponent of the radial sampling density.
//
// # Safety
// `space` must be a live handle.
enum StStatus st_space_set_growth(struct StSpace *space, double h);

// Releases a space handle. Null is ignored.
//
// # Safety
// `space` must be null or a live handle, not used afterwards.
void st_space_free(struct StSpace *space);

// Short label of the space; free with [`st_string_free`].
//
// # Safety
// `space` must be a live handle and `out` writable.
enum StStatus st_space_label(const struct StSpace *space, char **out);

// Distance between two real-vector points of length `len`.
//
// # Safety
// `space` must be a live handle, `u` and `v` readable for `len` values and
// `out` writable.
enum StStatus st_distance_real(const struct StSpace *space,
                               const double *u,
                               const double *v,
                               size_t len,
                               double *out);

// Distance between `u_re + i u_im` and `v_re + i v_im` in a half-plane model.
//
// # Safety
// `space` must be a live handle and `out` writable.
enum StStatus st_distance_complex(const struct StSpace *space,
                                  double u_re,
                                  double u_im,
                                  double v_re,
                                  double v_im,
                                  double *out);

// Distance between tree vertices written as label words (`""` is the root,
// `"ab"` is two steps out).
//
// # Safety
// `space` must be a live handle, `u` and `v` NUL-terminated strings and
// `out` writable.
enum StStatus st_distance_tree(const struct StSpace *space,
                               const char *u,
                               const char *v,
                               double *out);

// Average normalized distance of `n` pairs from the sphere (`k = 0`) or the
// annulus of width `k` about the space's base point.
//
// # Safety
// `space` must be a live handle and `out` writable.
enum StStatus st_estimate_e(const struct StSpace *space,
                            double r,
                            double k,
                            uint64_t n,
                            uint64_t seed,
                            struct StEstimate *out);

// Unit `ℓ^p` ball in dimension `dim`.
//
// # Safety
// `out` must be writable.
enum StStatus st_body_lp_ball(size_t dim, double p, struct StBody **out);

// Axis-aligned ellipsoid with semi-axes `axes[0..dim]`.
//
// # Safety
// `axes` must be readable for `dim` values and `out` writable.
enum StStatus st_body_ellipsoid(const double *axes, size_t dim, struct StBody **out);

// Symmetric polytope from `count` vertices stored row-major in `coords`
// (`count * dim` values); the vertex set must be closed under negation.
//
// # Safety
// `coords` must be readable for `count * dim` values and `out` writable.
enum StStatus st_body_polytope(const double *coords, size_t count, size_t dim, struct StBody **out);

// Releases a body handle. Null is ignored.
//
// # Safety
// `body` must be null or a live handle, not used afterwards.
void st_body_free(struct StBody *body);

// Mahler volume of the body with its John and Blaschke–Santaló bounds.
//
// # Safety
// `body` must be a live handle and `out` writable.
enum StStatus st_mahler(const struct StBody *body, struct StVolumeMethod m, struct StMahler *out);

// Busemann and Holmes–Thompson densities of the norm with this unit ball.
//
// # Safety
// `body` must be a live handle and `out` writable.
enum StStatus st_densities(const struct StBody *body,
                           struct StVolumeMethod m,
                           struct StDensities *out);

// Annular distance `d_A` between horoballs of core lengths `lx`, `ly` at
// core distance `dc`.
//
// # Safety
// `out` must be writable.
enum StStatus st_annular_distance(double lx, double ly, double dc, double epsilon0, double *out);

// `H_A = max(log⁺ dc, log⁺(1/lx), log⁺(1/ly))`.
//
// # Safety
// `out` must be writable.
enum StStatus st_h_combined(double lx, double ly, double dc, double epsilon0, double *out);

// Reduces `re + i im` into the standard fundamental domain. `word_len`
// (optional, may be null) receives the number of generator steps used.
//
// # Safety
// `out_re` and `out_im` must be writable; `word_len` null or writable.
enum StStatus st_reduce_modular(double re,
                                double im,
                                double *out_re,
                                double *out_im,
                                uint64_t *word_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STATHYP_H */
