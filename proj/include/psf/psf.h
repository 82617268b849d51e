#ifndef PSF_PSF_H
#define PSF_PSF_H

#include <stddef.h>

#if defined(_WIN32)
#define PSF_API __declspec(dllexport)
#else
#define PSF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psf_status {
  PSF_OK = 0,
  PSF_INVALID_ARGUMENT = 1,
  PSF_PARSE = 2,
  PSF_INVALID_PORTRAIT = 3,
  PSF_DOMAIN = 4,
  PSF_NO_CONVERGENCE = 5,
  PSF_IO = 6,
  PSF_INTERNAL = 7,
  PSF_DEGENERATE = 8,
  PSF_QUADRATURE = 9
} psf_status;

/* What a finished computation concluded. */
typedef enum psf_outcome {
  PSF_CONVERGED = 0,
  PSF_MAX_ITER = 1,
  PSF_DEGENERATE_RUN = 2,
  PSF_GEOMETRY_ABORT = 3,
  PSF_PASS = 4,
  PSF_FAIL = 5,
  PSF_CONCLUSIVE = 6,
  PSF_INCONCLUSIVE = 7,
  PSF_DONE = 8
} psf_outcome;

typedef struct psf_portrait psf_portrait;
typedef struct psf_result psf_result;

typedef struct psf_settings {
  double tol;
  int max_iter;
  double min_gap_abort;
} psf_settings;

typedef struct psf_branch_range {
  int index;
  int lo;
  int hi;
} psf_branch_range;

PSF_API const char* psf_status_string(psf_status s);

/* Message of the last failing call on this thread; "" when none. */
PSF_API const char* psf_last_error(void);

PSF_API void psf_settings_default(psf_settings* s);

/* Parses portrait JSON. A structurally sound portrait that fails validation
   is still returned (with PSF_INVALID_PORTRAIT) so its violations can be read. */
PSF_API psf_status psf_portrait_parse(const char* json, psf_portrait** out);
PSF_API void psf_portrait_free(psf_portrait* p);
PSF_API size_t psf_portrait_violation_count(const psf_portrait* p);
PSF_API const char* psf_portrait_violation(const psf_portrait* p, size_t i);

/* Thurston iteration. The result carries JSON, trace CSV and an SVG plot. */
PSF_API psf_status psf_realize(const psf_portrait* p, const psf_settings* s, psf_result** out);

/* Orbit check of a parameter JSON against a portrait. */
PSF_API psf_status psf_verify(const char* params_json, const psf_portrait* p, double tol,
                              psf_result** out);

/* Direct multistart Newton solve of the orbit equations. */
PSF_API psf_status psf_oracle(const psf_portrait* p, int starts, psf_result** out);

/* Push-forward contraction ratio of a differential under a parameter. */
PSF_API psf_status psf_contract(const char* params_json, const char* differential_json,
                                int truncation, psf_result** out);

/* Sweep over branch ranges and an optional eta range (eta_range NULL for
   none). The result's CSV holds one row per portrait. */
PSF_API psf_status psf_sweep(const psf_portrait* templ, const psf_settings* s,
                             const psf_branch_range* ranges, size_t n_ranges,
                             const int* eta_range, int jobs, int cross_check, psf_result** out);

PSF_API psf_outcome psf_result_outcome(const psf_result* r);
PSF_API const char* psf_result_json(const psf_result* r);
/* "" when the computation has no tabular output. */
PSF_API const char* psf_result_csv(const psf_result* r);
PSF_API const char* psf_result_svg(const psf_result* r);
PSF_API void psf_result_free(psf_result* r);

#ifdef __cplusplus
}
#endif

#endif
