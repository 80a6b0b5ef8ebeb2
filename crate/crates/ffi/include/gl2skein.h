#ifndef GL2SKEIN_H
#define GL2SKEIN_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the nonzero values of the command line are reused where they overlap.
 */
typedef enum Gl2Status {
  GL2_STATUS_OK = 0,
  GL2_STATUS_PARSE = 2,
  GL2_STATUS_DOMAIN = 3,
  GL2_STATUS_REDUCTION = 4,
  GL2_STATUS_NULL_ARGUMENT = 5,
  GL2_STATUS_INVALID_UTF8 = 6,
  GL2_STATUS_PANIC = 7,
} Gl2Status;

/**
 * Opaque solid-torus element.
 */
typedef struct Gl2Annulus Gl2Annulus;

/**
 * Opaque torus algebra element.
 */
typedef struct Gl2Torus Gl2Torus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; valid until the next call on the thread.
 */
const char *gl2_last_error(void);

/**
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum Gl2Status gl2_torus_parse(const char *text, struct Gl2Torus **out);

/**
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum Gl2Status gl2_annulus_parse(const char *text, struct Gl2Annulus **out);

/**
 * `out = a * b` in the torus algebra.
 *
 * # Safety
 * Handles must come from this library; `out` must be a valid pointer.
 */
enum Gl2Status gl2_torus_mul(const struct Gl2Torus *a,
                             const struct Gl2Torus *b,
                             struct Gl2Torus **out);

/**
 * `out = pi(a)`.
 *
 * # Safety
 * `a` must come from this library; `out` must be a valid pointer.
 */
enum Gl2Status gl2_project(const struct Gl2Torus *a, struct Gl2Annulus **out);

/**
 * `out = a . u`.
 *
 * # Safety
 * Handles must come from this library; `out` must be a valid pointer.
 */
enum Gl2Status gl2_act(const struct Gl2Torus *a,
                       const struct Gl2Annulus *u,
                       struct Gl2Annulus **out);

/**
 * Canonical text of a torus element.
 *
 * # Safety
 * `a` must come from this library; `out` must be a valid pointer.
 */
enum Gl2Status gl2_torus_to_string(const struct Gl2Torus *a, char **out);

/**
 * Canonical text of a solid-torus element.
 *
 * # Safety
 * `u` must come from this library; `out` must be a valid pointer.
 */
enum Gl2Status gl2_annulus_to_string(const struct Gl2Annulus *u, char **out);

/**
 * Reduces a lens expression in `L(p,q)` and writes the JSON document of the `reduce` command.
 * `budget == 0` and `window <= 0` select the defaults.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out_json` a valid pointer.
 */
enum Gl2Status gl2_reduce(int64_t p,
                          int64_t q,
                          const char *text,
                          uint64_t budget,
                          int64_t window,
                          char **out_json);

/**
 * # Safety
 * `a` must come from this library or be null.
 */
void gl2_torus_free(struct Gl2Torus *a);

/**
 * # Safety
 * `u` must come from this library or be null.
 */
void gl2_annulus_free(struct Gl2Annulus *u);

/**
 * # Safety
 * `s` must be a string returned by this library or null.
 */
void gl2_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GL2SKEIN_H */
