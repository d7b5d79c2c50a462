#ifndef FSL_RT_H
#define FSL_RT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FSLRT_OK 0

#define FSLRT_ERR_NULL 1

#define FSLRT_ERR_LEVEL 2

#define FSLRT_ERR_COLOR 3

#define FSLRT_ERR_ARITY 4

#define FSLRT_ERR_PRESENTATION 5

#define FSLRT_ERR_DOMAIN 6

#define FSLRT_ERR_CONVERGENCE 7

#define FSLRT_ERR_COMPUTE 8

#define FSLRT_ERR_PANIC 9

#define FSLRT_PRECISION_STANDARD 0

#define FSLRT_PRECISION_EXTENDED 1

/**
 * A level r with its root-of-unity tables.
 */
typedef struct FslrtContext FslrtContext;

/**
 * A link presentation with an optional change of pair.
 */
typedef struct FslrtPresentation FslrtPresentation;

/**
 * A complex number stored as `exp(logmag + i·phase)`, also given in
 * Cartesian form (which may overflow to infinity for large values).
 */
typedef struct FslrtValue {
  double logmag;
  double phase;
  double re;
  double im;
} FslrtValue;

typedef struct FslrtCritical {
  double value_re;
  double value_im;
  double volume;
  double cs;
  double residual;
} FslrtCritical;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fslrt_last_error(void);

/**
 * Build the tables for odd level `r ≥ 3`.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
int fslrt_context_new(int64_t r, int precision, struct FslrtContext **out);

/**
 * # Safety
 * `ctx` must come from [`fslrt_context_new`] and not be used afterwards.
 */
void fslrt_context_free(struct FslrtContext *ctx);

/**
 * The normalization constant μ_r, or NaN for a null handle.
 *
 * # Safety
 * `ctx` must be null or a live context.
 */
double fslrt_mu_r(const struct FslrtContext *ctx);

/**
 * The 6j-symbol at six colors by the alternating sum. With `via_dilog`
 * nonzero the quantum dilogarithm route is used instead, which needs a
 * tuple of hyperideal type.
 *
 * # Safety
 * `colors` must point to six integers and `out` to writable storage.
 */
int fslrt_sixj(const struct FslrtContext *ctx,
               const int64_t *colors,
               int via_dilog,
               struct FslrtValue *out);

/**
 * The built-in presentation of the single-tetrahedron link.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
int fslrt_presentation_tetra1(struct FslrtPresentation **out);

/**
 * Parse a presentation from its JSON form. A change of pair in the
 * document is kept with the handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for one pointer write.
 */
int fslrt_presentation_from_json(const char *json, struct FslrtPresentation **out);

/**
 * # Safety
 * `pres` must come from a presentation constructor and not be used afterwards.
 */
void fslrt_presentation_free(struct FslrtPresentation *pres);

/**
 * Number of link components, or 0 for a null handle.
 *
 * # Safety
 * `pres` must be null or a live presentation.
 */
size_t fslrt_presentation_components(const struct FslrtPresentation *pres);

/**
 * Set a plain change of pair on the 1-based component ids. An empty list
 * clears it.
 *
 * # Safety
 * `ids` must point to `n_ids` values.
 */
int fslrt_presentation_set_change_of_pair(struct FslrtPresentation *pres,
                                          const size_t *ids,
                                          size_t n_ids);

/**
 * The invariant of the link at one coloring, one color per component.
 *
 * # Safety
 * `colors` must point to `n` values and `out` to writable storage.
 */
int fslrt_rt(const struct FslrtContext *ctx,
             const struct FslrtPresentation *pres,
             const int64_t *colors,
             size_t n,
             struct FslrtValue *out);

/**
 * The invariant after the change of pair stored on `pres`: `n_i` colors the
 * components in I (ascending), `m_j` the rest (ascending).
 *
 * # Safety
 * Array arguments must point to the stated number of values.
 */
int fslrt_rt_change_of_pair(const struct FslrtContext *ctx,
                            const struct FslrtPresentation *pres,
                            const int64_t *n_i,
                            size_t n_i_len,
                            const int64_t *m_j,
                            size_t m_j_len,
                            struct FslrtValue *out);

/**
 * Critical point of the potential at cone angles `theta` (one per
 * component, below branch), using the change of pair stored on `pres`.
 *
 * # Safety
 * `theta` must point to `n` values and `out` to writable storage.
 */
int fslrt_critical(const struct FslrtPresentation *pres,
                   const double *theta,
                   size_t n,
                   struct FslrtCritical *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fslrt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FSL_RT_H */
