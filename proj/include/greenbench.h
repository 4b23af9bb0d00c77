/*
 * greenbench C API: energy-efficiency benchmarking for network equipment.
 *
 * All functions return GB_OK (0) or a GB_ERR_* code; gb_last_error() gives
 * a human-readable message for the most recent failure on the calling
 * thread. Strings returned through char** out-parameters are heap
 * allocations owned by the caller; release them with gb_string_free().
 * Handles are opaque; a gb_device is single-threaded while stepping but
 * distinct handles are independent.
 */

#ifndef GREENBENCH_H
#define GREENBENCH_H

#include <stddef.h>

#if defined _WIN32
#define GB_API __declspec(dllexport)
#else
#define GB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define GB_OK 0
#define GB_ERR_IO 1
#define GB_ERR_PARSE 2
#define GB_ERR_VALIDATION 3
#define GB_ERR_ZERO_THROUGHPUT 4
#define GB_ERR_NONPOSITIVE_POWER 5
#define GB_ERR_REDUCED_EXCEEDS_FULL 6
#define GB_ERR_STATE_ORDER 7
#define GB_ERR_UNKNOWN_INTERFACE_CLASS 8
#define GB_ERR_MISSING_PACKET_SIZE 9
#define GB_ERR_PACKET_SIZE_UNKNOWN 10
#define GB_ERR_UNKNOWN_STATE 11
#define GB_ERR_NO_PASSING_RATE 12
#define GB_ERR_WARMUP_TIMEOUT 13
#define GB_ERR_UNEXPECTED_LOSS 14
#define GB_ERR_INVALID_MEASUREMENT_SET 15
#define GB_ERR_METRIC_ABSENT 16
#define GB_ERR_BAD_ARGUMENT 17
#define GB_ERR_INTERNAL 18

GB_API const char* gb_version(void);
GB_API const char* gb_strerror(int code);
GB_API const char* gb_last_error(void);
GB_API void gb_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Simulated device under test                                         */

typedef struct gb_device gb_device;

GB_API int gb_device_open(const char* path, gb_device** out);
GB_API int gb_device_open_json(const char* json_text, gb_device** out);
GB_API void gb_device_close(gb_device* device);
GB_API int gb_device_name(const gb_device* device, char** out);
GB_API int gb_device_now(const gb_device* device, double* out_seconds);
/* Power draw at a load fraction of the effective state's capacity. */
GB_API int gb_device_power(const gb_device* device, double load_fraction, double at_time,
                           double* out_watts);
/* Constant offered load for duration_s; returns the sample as JSON. */
GB_API int gb_device_offer_load(gb_device* device, double offered_gbps,
                                unsigned packet_size_bytes, double duration_s,
                                char** out_sample_json);
/* Command a power state; out is the transition completion time. */
GB_API int gb_device_set_state(gb_device* device, int state_id, double* out_complete_time);

/* ------------------------------------------------------------------ */
/* Metric formulas (pure)                                              */

/* Peak: watts per Gbps at sustained peak load. */
GB_API int gb_ecr(double watts, double gbps, double* out);
/* -log10(P/T); weights bound idle-first: alpha at 0%, beta at 50%,
 * epsilon at 100% load. */
GB_API int gb_teeer(double e_idle_w, double e_half_w, double e_full_w, double t_gbps,
                    double alpha, double beta, double epsilon, double* out);
/* Max throughput over weighted power, same binding as gb_teeer. */
GB_API int gb_teer_atis(double e_idle_w, double e_half_w, double e_full_w, double t_gbps,
                        double alpha, double beta, double epsilon, double* out);
/* Gbps/W over a full/reduced/idle cycle; weights bound full-first. */
GB_API int gb_eer_vl(double t_full_gbps, double t_reduced_gbps, double e_full_w,
                     double e_reduced_w, double e_idle_w, double alpha, double beta,
                     double epsilon, double* out);
/* Gbps/W over three power states; no zero-utilization phase. */
GB_API int gb_eer_ex(double t_full_gbps, double t_r1_gbps, double t_r2_gbps, double e_full_w,
                     double e_r1_w, double e_r2_w, double alpha, double beta, double epsilon,
                     double* out);

/* ------------------------------------------------------------------ */
/* Scenario and file operations                                        */

/* Run a scenario file; artifacts are written to out_dir (default the
 * current directory if NULL). seed_override, when non-NULL, replaces the
 * scenario's orchestrator seed. The summary JSON reports validity,
 * written files, and invalidation reasons. An invalidated test still
 * returns GB_OK: the verdict is data, not an error. */
GB_API int gb_run_scenario(const char* scenario_path, const char* out_dir,
                           const unsigned long long* seed_override, char** out_summary_json);

/* Compute one metric from a measurement file. metric is one of "ecr",
 * "teeer", "teer_atis", "eer_vl", "eer_ex" (case-insensitive).
 * weights3, when non-NULL, points to {alpha, beta, epsilon} and
 * overrides the profile recorded in the file. Fails with
 * GB_ERR_INVALID_MEASUREMENT_SET on invalidated tests. */
GB_API int gb_metrics_from_file(const char* measurement_path, const char* metric,
                                const double* weights3, char** out_result_json);

/* Render a comparison across report files. format is "json", "csv", or
 * "table". */
GB_API int gb_compare_reports(const char* const* report_paths, size_t n_reports,
                              const char* metric, const char* format, char** out);

/* Re-render a report or measurement artifact as "json", "csv", or
 * "table". */
GB_API int gb_export_file(const char* artifact_path, const char* format, char** out);

/* Schema-validate a device, scenario, measurement, or report file.
 * Returns GB_OK and an empty diagnostics array when valid, or
 * GB_ERR_VALIDATION with one message per violated field. */
GB_API int gb_validate_file(const char* path, char** out_diagnostics_json);

#ifdef __cplusplus
}
#endif

#endif /* GREENBENCH_H */
