/* Copyright 2026 dirom contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the dirom shared library. Every call returns a status
 * code; on failure dirom_last_error() describes the error for the calling
 * thread. Strings returned through `char**` are owned by the caller and
 * released with dirom_string_free().
 */

#ifndef DIROM_DIROM_H
#define DIROM_DIROM_H

#include <stddef.h>

#if defined(DIROM_BUILDING_LIBRARY)
#define DIROM_API __attribute__((visibility("default")))
#else
#define DIROM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dirom_status {
  DIROM_OK = 0,
  DIROM_ERR_INVALID_ARGUMENT = 1,
  DIROM_ERR_CONFIG = 2,
  DIROM_ERR_NUMERICAL = 3,
  DIROM_ERR_STORE = 4,
  DIROM_ERR_IO = 5,
  DIROM_ERR_INTERNAL = 6
} dirom_status;

typedef struct dirom_config dirom_config;
typedef struct dirom_store dirom_store;
typedef struct dirom_trajectory dirom_trajectory;

DIROM_API const char* dirom_version(void);
DIROM_API const char* dirom_status_name(dirom_status status);
/* Message of the last failed call on this thread; empty after success. */
DIROM_API const char* dirom_last_error(void);
DIROM_API void dirom_string_free(char* s);

/* Configuration. Keys are "section.key". */
DIROM_API dirom_status dirom_config_create(dirom_config** out);
DIROM_API dirom_status dirom_config_load(const char* path, dirom_config** out);
DIROM_API dirom_status dirom_config_set(dirom_config* cfg, const char* key, const char* value);
DIROM_API dirom_status dirom_config_get(const dirom_config* cfg, const char* key, char** value);
DIROM_API dirom_status dirom_config_hash(const dirom_config* cfg, char** hex);
DIROM_API void dirom_config_destroy(dirom_config* cfg);

/* Full-order solver. */
DIROM_API dirom_status dirom_hfm_solve(const dirom_config* cfg, double mu1, double mu2,
                                       double t_final, dirom_trajectory** out);
DIROM_API dirom_status dirom_hfm_run(const dirom_config* cfg, double mu1, double mu2,
                                     double t_final, const char* out_path, const char* csv_path);

/* Offline stage: writes a complete store. `summary_json` may be NULL. */
DIROM_API dirom_status dirom_offline(const dirom_config* cfg, const char* store_dir,
                                     char** summary_json);
/* Second reduction stage. Only [pod] and [run] keys of `overrides` (may be NULL) apply. */
DIROM_API dirom_status dirom_pod_reduce(const char* store_dir, const dirom_config* overrides,
                                        char** summary_json);

/* use_pod != 0 selects the POD-reduced bases written by dirom_pod_reduce. */
DIROM_API dirom_status dirom_store_open(const char* store_dir, int use_pod, dirom_store** out);
DIROM_API dirom_status dirom_store_verify(const char* store_dir);
DIROM_API double dirom_store_horizon(const dirom_store* store);
DIROM_API void dirom_store_close(dirom_store* store);

DIROM_API dirom_status dirom_rom_solve(const dirom_store* store, double mu1, double mu2,
                                       double t_final, dirom_trajectory** out);
/* Writes rom.csv, overlay.svg, report.json (and hfm.csv when with_hfm != 0) to out_dir. */
DIROM_API dirom_status dirom_rom_run(const dirom_store* store, double mu1, double mu2,
                                     double t_final, int with_hfm, size_t plot_every,
                                     const char* out_dir, char** report_json);

/* Only [uq] and [run] keys of `overrides` (may be NULL) apply. */
DIROM_API dirom_status dirom_uq_run(const char* store_dir, const dirom_config* overrides,
                                    const char* out_dir, char** summary_json);
DIROM_API dirom_status dirom_report(const char* store_dir, const char* out_dir,
                                    char** summary_json);

/* Trajectories. */
DIROM_API size_t dirom_trajectory_count(const dirom_trajectory* t);
DIROM_API size_t dirom_trajectory_cells(const dirom_trajectory* t);
DIROM_API double dirom_trajectory_time(const dirom_trajectory* t, size_t k);
/* Cell values of snapshot k, or NULL when k is out of range. */
DIROM_API const double* dirom_trajectory_values(const dirom_trajectory* t, size_t k);
DIROM_API dirom_status dirom_trajectory_write(const dirom_trajectory* t, const char* path);
DIROM_API dirom_status dirom_relative_error(const dirom_trajectory* reference,
                                            const dirom_trajectory* approx, double* out);
DIROM_API void dirom_trajectory_destroy(dirom_trajectory* t);

#ifdef __cplusplus
}
#endif

#endif /* DIROM_DIROM_H */
