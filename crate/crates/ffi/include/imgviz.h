#ifndef IMGVIZ_H
#define IMGVIZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ImgvizStatus {
  IMGVIZ_STATUS_OK = 0,
  IMGVIZ_STATUS_NULL_POINTER = 1,
  IMGVIZ_STATUS_INVALID_ARGUMENT = 2,
  IMGVIZ_STATUS_DIMENSION_MISMATCH = 3,
  IMGVIZ_STATUS_OUT_OF_RANGE = 4,
  /**
   * The metric is undefined for the inputs (identical or constant images).
   */
  IMGVIZ_STATUS_UNDEFINED = 5,
  IMGVIZ_STATUS_CONFIG = 6,
  IMGVIZ_STATUS_IO = 7,
  IMGVIZ_STATUS_PANIC = 8,
} ImgvizStatus;

typedef enum ImgvizMetric {
  IMGVIZ_METRIC_SAE = 0,
  IMGVIZ_METRIC_MSE = 1,
  IMGVIZ_METRIC_PSNR = 2,
  IMGVIZ_METRIC_PCC = 3,
  IMGVIZ_METRIC_SSIM = 4,
} ImgvizMetric;

typedef enum ImgvizBenchmark {
  IMGVIZ_BENCHMARK_QING = 0,
  IMGVIZ_BENCHMARK_RASTRIGIN = 1,
  IMGVIZ_BENCHMARK_ROSENBROCK = 2,
  IMGVIZ_BENCHMARK_SALOMON = 3,
  IMGVIZ_BENCHMARK_SPHERICAL = 4,
  IMGVIZ_BENCHMARK_STYBLINSKI_TANG = 5,
  IMGVIZ_BENCHMARK_WAVY = 6,
} ImgvizBenchmark;

/**
 * Opaque run configuration.
 */
typedef struct ImgvizConfig ImgvizConfig;

/**
 * Opaque record of a finished run.
 */
typedef struct ImgvizRun ImgvizRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *imgviz_last_error_message(void);

/**
 * Raw metric value between two images of `len` pixels in `[0, range]`.
 */
enum ImgvizStatus imgviz_metric(enum ImgvizMetric metric,
                                const double *a,
                                const double *b,
                                size_t len,
                                double range,
                                double *result);

/**
 * Metric value in minimization orientation (similarity metrics negated).
 */
enum ImgvizStatus imgviz_metric_fitness(enum ImgvizMetric metric,
                                        const double *a,
                                        const double *b,
                                        size_t len,
                                        double range,
                                        double *result);

/**
 * Partially-separable fitness with separability level `p` on unit-range images.
 */
enum ImgvizStatus imgviz_partial_fitness(const double *x,
                                         const double *t,
                                         size_t len,
                                         double p,
                                         double *result);

/**
 * Lays a column-major vector out as a row-major `height × width` image.
 */
enum ImgvizStatus imgviz_vector_to_matrix(const double *s,
                                          size_t len,
                                          size_t height,
                                          size_t width,
                                          double *row_major);

/**
 * Benchmark value at `x`; fails when `x` leaves the function's domain.
 */
enum ImgvizStatus imgviz_benchmark_eval(enum ImgvizBenchmark benchmark,
                                        const double *x,
                                        size_t len,
                                        double *result);

/**
 * Writes the reference optimum of dimension `len` into `optimum`.
 */
enum ImgvizStatus imgviz_benchmark_optimum(enum ImgvizBenchmark benchmark,
                                           size_t len,
                                           double *optimum);

/**
 * Search domain `[lower, upper]` of a benchmark.
 */
enum ImgvizStatus imgviz_benchmark_domain(enum ImgvizBenchmark benchmark,
                                          double *lower,
                                          double *upper);

/**
 * Relative position encoding of a permutation.
 */
enum ImgvizStatus imgviz_rpi_encode(const uint32_t *perm, size_t len, double *encoded);

/**
 * Rank-matching decode of `x` over the multiset `base`.
 */
enum ImgvizStatus imgviz_rpi_decode(const double *x,
                                    const uint32_t *base,
                                    size_t len,
                                    uint32_t *decoded);

/**
 * Whether objective vector `a` dominates `b` (minimization).
 */
enum ImgvizStatus imgviz_dominates(const double *a,
                                   const double *b,
                                   size_t objectives,
                                   bool *result);

/**
 * Crowding distances of `count` points stored row-major with `objectives`
 * values each. Boundary points receive +infinity.
 */
enum ImgvizStatus imgviz_crowding_distance(const double *points,
                                           size_t count,
                                           size_t objectives,
                                           double *distances);

/**
 * Raw metric over a `resolution × resolution` grid of two-pixel candidates
 * against the target `(t1, t2)`. Cell `(r, c)` lands at `grid[r * resolution + c]`.
 */
enum ImgvizStatus imgviz_landscape(enum ImgvizMetric metric,
                                   double t1,
                                   double t2,
                                   size_t resolution,
                                   double *grid);

/**
 * Loads a configuration file.
 */
enum ImgvizStatus imgviz_config_load(const char *path, struct ImgvizConfig **config);

/**
 * Parses configuration text; relative target paths resolve against
 * `base_dir` when it is not null.
 */
enum ImgvizStatus imgviz_config_parse(const char *text,
                                      const char *base_dir,
                                      struct ImgvizConfig **config);

enum ImgvizStatus imgviz_config_set_seed(struct ImgvizConfig *config, uint64_t seed);

enum ImgvizStatus imgviz_config_set_output(struct ImgvizConfig *config, const char *dir);

void imgviz_config_free(struct ImgvizConfig *config);

/**
 * Runs the configured experiment, writing its artifacts to disk.
 */
enum ImgvizStatus imgviz_run(const struct ImgvizConfig *config, struct ImgvizRun **run);

enum ImgvizStatus imgviz_run_iterations(const struct ImgvizRun *run, size_t *iterations);

enum ImgvizStatus imgviz_run_evaluations(const struct ImgvizRun *run, size_t *evaluations);

/**
 * Final best fitness; objective `index` selects the objective of
 * multi-objective runs (0 otherwise).
 */
enum ImgvizStatus imgviz_run_best_fitness(const struct ImgvizRun *run,
                                          size_t index,
                                          double *fitness);

enum ImgvizStatus imgviz_run_solution_len(const struct ImgvizRun *run, size_t *len);

/**
 * Copies the final best solution into `buffer`, which must hold exactly
 * the solution length.
 */
enum ImgvizStatus imgviz_run_copy_solution(const struct ImgvizRun *run, double *buffer, size_t len);

void imgviz_run_free(struct ImgvizRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IMGVIZ_H */
