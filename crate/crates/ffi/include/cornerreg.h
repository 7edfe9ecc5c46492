#ifndef CORNERREG_H
#define CORNERREG_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Library errors use the same numbers as the command-line exit codes.
 */
typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_NULL_POINTER = 1,
  CR_STATUS_INVALID_STRING = 2,
  CR_STATUS_SCHEMA = 3,
  CR_STATUS_GEOMETRY = 4,
  CR_STATUS_MISSING_DATA = 5,
  CR_STATUS_INVALID_PARAMETER = 6,
  CR_STATUS_QUADRATURE = 7,
  CR_STATUS_SOLVER = 8,
  CR_STATUS_UNSUPPORTED = 9,
  CR_STATUS_MESH = 10,
  CR_STATUS_IO = 11,
  CR_STATUS_PANIC = 12,
} CrStatus;

typedef enum CrNormSpace {
  CR_NORM_SPACE_K = 0,
  CR_NORM_SPACE_J = 1,
  CR_NORM_SPACE_STEP = 2,
  CR_NORM_SPACE_M = 3,
  CR_NORM_SPACE_N = 4,
} CrNormSpace;

typedef enum CrExponentKind {
  CR_EXPONENT_KIND_DIRICHLET = 0,
  CR_EXPONENT_KIND_NEUMANN = 1,
} CrExponentKind;

/**
 * A closed-form field bound to the geometry it was built on.
 */
typedef struct CrField CrField;

/**
 * A polygon or polyhedron.
 */
typedef struct CrGeometry CrGeometry;

/**
 * A graded mesh.
 */
typedef struct CrMesh CrMesh;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next failing call.
 */
const char *cr_last_error(void);

/**
 * Library version, a static string.
 */
const char *cr_version(void);

/**
 * Parses a geometry document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CrStatus cr_geometry_from_json(const char *json, struct CrGeometry **out);

/**
 * Loads a bundled geometry: square, l-shape, slit-square, cube, thick-l, fichera.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum CrStatus cr_geometry_bundled(const char *name, struct CrGeometry **out);

/**
 * # Safety
 * `g` must be null or a handle from this library that has not been freed.
 */
void cr_geometry_free(struct CrGeometry *g);

/**
 * Dimension, corner count and edge count.
 *
 * # Safety
 * `g` must be a live handle; the out pointers must be writable.
 */
enum CrStatus cr_geometry_info(const struct CrGeometry *g,
                               size_t *dimension,
                               size_t *corners,
                               size_t *edges);

/**
 * Smallest positive singular exponent at polygon corner `id` (2D) or edge `id`
 * (3D), with the boundary conditions of the geometry.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum CrStatus cr_b_threshold(const struct CrGeometry *g, size_t id, double *out);

/**
 * Whether the corner weights `betas` (one per polygon corner) are admissible.
 *
 * # Safety
 * `g` must be a live handle; `betas` must hold `n` doubles; `admissible` must be writable.
 */
enum CrStatus cr_admissible_2d(const struct CrGeometry *g,
                               const double *betas,
                               size_t n,
                               bool *admissible);

/**
 * Limiting exponent at polyhedron corner `corner` from a spherical-cap
 * refinement study with coarsest size `h0` over `levels` levels.
 *
 * # Safety
 * `g` must be a live handle; `lambda` and `error` must be writable.
 */
enum CrStatus cr_corner_exponent(const struct CrGeometry *g,
                                 size_t corner,
                                 uint32_t kind,
                                 double h0,
                                 size_t levels,
                                 double *lambda,
                                 double *error);

/**
 * Builds a field from a specification such as `"corner_singular k=1"`.
 *
 * # Safety
 * `g` must be a live handle; `spec` a NUL-terminated string; `out` writable.
 */
enum CrStatus cr_field_from_spec(const struct CrGeometry *g,
                                 const char *spec,
                                 struct CrField **out);

/**
 * # Safety
 * `f` must be null or a handle from this library that has not been freed.
 */
void cr_field_free(struct CrField *f);

/**
 * Value of the field at `x` (`dim` coordinates).
 *
 * # Safety
 * `f` must be a live handle; `x` must hold `dim` doubles; `out` writable.
 */
enum CrStatus cr_field_value(const struct CrField *f, const double *x, size_t dim, double *out);

/**
 * Weighted (semi-)norms of orders `0..=max_order` with uniform corner and edge
 * weights. `values` receives `max_order + 1` entries; diverged orders are +inf.
 *
 * # Safety
 * Handles must be live; `values` must have room for `max_order + 1` doubles.
 */
enum CrStatus cr_norm_sequence(const struct CrGeometry *g,
                               const struct CrField *f,
                               uint32_t space,
                               double beta_corner,
                               double beta_edge,
                               size_t max_order,
                               double *values);

/**
 * Graded mesh: corner layers for polygons, anisotropic edge layers for polyhedra.
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum CrStatus cr_mesh_generate(const struct CrGeometry *g,
                               double sigma,
                               size_t layers,
                               struct CrMesh **out);

/**
 * # Safety
 * `m` must be null or a handle from this library that has not been freed.
 */
void cr_mesh_free(struct CrMesh *m);

/**
 * # Safety
 * `m` must be a live handle; the out pointers must be writable.
 */
enum CrStatus cr_mesh_size(const struct CrMesh *m, size_t *vertices, size_t *cells);

/**
 * Writes the mesh as JSON (`format = 0`) or legacy VTK (`format = 1`).
 *
 * # Safety
 * `m` must be a live handle; `path` a NUL-terminated string.
 */
enum CrStatus cr_mesh_write(const struct CrMesh *m, const char *path, uint32_t format);

/**
 * Mesh as a JSON string; release it with [`cr_string_free`].
 *
 * # Safety
 * `m` must be a live handle; `out` writable.
 */
enum CrStatus cr_mesh_to_json(const struct CrMesh *m, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library that has not been freed.
 */
void cr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORNERREG_H */
