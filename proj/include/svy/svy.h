#ifndef SVY_SVY_H
#define SVY_SVY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SVY_BUILDING)
#    define SVY_API __declspec(dllexport)
#  else
#    define SVY_API __declspec(dllimport)
#  endif
#else
#  define SVY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum svy_status {
  SVY_OK = 0,
  SVY_ERR_PARAMETER,
  SVY_ERR_INGESTION,
  SVY_ERR_INFEASIBLE,
  SVY_ERR_UNSUPPORTED,
  SVY_ERR_DRAW_FAILURE,
  SVY_ERR_ENUMERATION_TOO_LARGE,
  SVY_ERR_COMBINATION,
  SVY_ERR_DEGENERATE,
  SVY_ERR_CONVERGENCE,
  SVY_ERR_UNDEFINED_PARAMETER,
  SVY_ERR_SINGULARITY,
  SVY_ERR_JACKKNIFE_FAILURE,
  SVY_ERR_UNDEFINED_RATIO,
  SVY_ERR_CONFIG,
  SVY_ERR_IO,
  SVY_ERR_INTERNAL
} svy_status;

typedef struct svy_population svy_population;
typedef struct svy_report svy_report;

/* Message of the last failed call on this thread; "" if none. */
SVY_API const char* svy_last_error(void);
SVY_API const char* svy_status_name(svy_status status);

/* model: "univariate" or "bivariate". The override pointers may be NULL;
   otherwise they hold one value per study column. gamma_mean/gamma_sd <= 0
   keep the defaults (1000, 200). */
SVY_API svy_status svy_population_generate(const char* model, size_t n_pop, uint64_t seed,
                                           const double* alpha, const double* beta,
                                           const double* sigma, double gamma_mean,
                                           double gamma_sd, svy_population** out);
/* y_columns is a comma-separated list of column names. */
SVY_API svy_status svy_population_load_csv(const char* path, const char* x_column,
                                           const char* y_columns, svy_population** out);
SVY_API svy_status svy_population_save_csv(const svy_population* pop, const char* path,
                                           const char* x_column, const char* y_columns);
SVY_API void svy_population_free(svy_population* pop);
SVY_API size_t svy_population_size(const svy_population* pop);
SVY_API size_t svy_population_dims(const svy_population* pop);
/* Copies x (size() values) or study column `col` into buf. */
SVY_API svy_status svy_population_x(const svy_population* pop, double* buf, size_t len);
SVY_API svy_status svy_population_y(const svy_population* pop, size_t col, double* buf,
                                    size_t len);

/* Runs the JSON experiment config at config_path. threads == 0 means 1. */
SVY_API svy_status svy_experiment_run_file(const char* config_path, unsigned threads,
                                           svy_report** out);
SVY_API svy_status svy_experiment_run_json(const char* json_text, const char* base_dir,
                                           unsigned threads, svy_report** out);
/* Writes mse.csv, re.csv and ci.csv into dir (created if missing). */
SVY_API svy_status svy_report_write(const svy_report* report, const char* dir);
/* Human-readable summary; release with svy_string_free. */
SVY_API svy_status svy_report_summary(const svy_report* report, char** out);
/* Full-precision CSV text; which is "mse", "re" or "ci". */
SVY_API svy_status svy_report_csv(const svy_report* report, const char* which, char** out);
SVY_API void svy_report_free(svy_report* report);
SVY_API void svy_string_free(char* s);

/* Design/estimator/functional by name, e.g. "SRSWOR", "HT", "mean:0". */
typedef struct svy_exact_summary {
  double expectation;
  double truth;
  double bias;
  double variance;
  double mse;
  size_t support_size;
} svy_exact_summary;

SVY_API svy_status svy_exact_moments(const svy_population* pop, const char* design,
                                     const char* estimator, const char* functional, size_t n,
                                     svy_exact_summary* out);

typedef struct svy_asymptotics {
  double lambda;
  double gamma;
  double phi;
  double x_bar;
  double s2_x;
  double s2_w;
  double s_xw;
  double delta_sq[9];   /* class j at index j-1 */
  int delta_ok[9];      /* 0 when the class is singular for this population */
} svy_asymptotics;

SVY_API svy_status svy_asymptotics_compute(const svy_population* pop, const char* functional,
                                           size_t n, svy_asymptotics* out);
/* Class 1..9 of the pair, or 0 with status set when the pair is invalid. */
SVY_API svy_status svy_equivalence_class(const char* estimator, const char* design,
                                         int lambda_zero, int* out);
SVY_API svy_status svy_gamma_coeff(size_t N, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif
