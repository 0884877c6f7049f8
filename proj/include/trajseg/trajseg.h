#ifndef TRAJSEG_H
#define TRAJSEG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TRAJSEG_API __declspec(dllexport)
#else
#define TRAJSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trajseg_status {
  TRAJSEG_OK = 0,
  TRAJSEG_E_INVALID_ARGUMENT = 1,
  TRAJSEG_E_EMPTY_INPUT = 2,
  TRAJSEG_E_NON_FINITE = 3,
  TRAJSEG_E_OUT_OF_ORDER = 4,
  TRAJSEG_E_NOT_FOUND = 5,
  TRAJSEG_E_DISJOINT_TIME = 6,
  TRAJSEG_E_PARSE = 7,
  TRAJSEG_E_IO = 8,
  TRAJSEG_E_INTERNAL = 9
} trajseg_status;

typedef enum trajseg_t_rep { TRAJSEG_T_REP_MEAN = 0, TRAJSEG_T_REP_START = 1 } trajseg_t_rep;
typedef enum trajseg_estimator { TRAJSEG_EST_RUNNING_CIRCLE = 0, TRAJSEG_EST_BOUNDING_RECT = 1 } trajseg_estimator;
typedef enum trajseg_plot { TRAJSEG_PLOT_RAW = 0, TRAJSEG_PLOT_SEGMENTED = 1, TRAJSEG_PLOT_HEATMAP = 2 } trajseg_plot;

typedef struct trajseg_params {
  double min_r;
  double min_density;
  trajseg_t_rep t_rep;
  trajseg_estimator estimator;
} trajseg_params;

typedef struct trajseg_engine trajseg_engine;
typedef struct trajseg_store trajseg_store;

/* Message of the last failed call on this thread; never NULL. */
TRAJSEG_API const char* trajseg_last_error(void);
/* Releases strings returned through char** out-parameters. NULL is fine. */
TRAJSEG_API void trajseg_string_free(char* s);
TRAJSEG_API const char* trajseg_version(void);

/* Demo defaults (min_r 10, min_density 0.3, mean time, running circle). */
TRAJSEG_API void trajseg_params_default(trajseg_params* out);
TRAJSEG_API trajseg_status trajseg_params_validate(const trajseg_params* p);

/* Synthetic trajectories as traj_id,t,x,y CSV. spec_json may be NULL, in which
   case n_trajectories demo trajectories are generated from seed. */
TRAJSEG_API trajseg_status trajseg_generate_csv(const char* spec_json, size_t n_trajectories, uint64_t seed,
                                                char** out_csv);

/* Batch segmentation of CSV text. Output is JSON Lines, one summary per line,
   in online emission order. report_json (optional) receives row counts. */
TRAJSEG_API trajseg_status trajseg_segment_csv(const char* csv, const trajseg_params* p, int strict,
                                               char** out_jsonl, char** out_report_json);

/* 1 if line looks like a traj_id,t,x,y header row (four fields, t not numeric). */
TRAJSEG_API int trajseg_csv_is_header(const char* line);

TRAJSEG_API trajseg_status trajseg_engine_create(const trajseg_params* p, trajseg_engine** out);
TRAJSEG_API void trajseg_engine_destroy(trajseg_engine* e);
/* out_jsonl receives the closed summary line, or an empty string. */
TRAJSEG_API trajseg_status trajseg_engine_ingest(trajseg_engine* e, const char* traj_id, double t, double x,
                                                 double y, char** out_jsonl);
/* One traj_id,t,x,y row. */
TRAJSEG_API trajseg_status trajseg_engine_ingest_line(trajseg_engine* e, const char* line, char** out_jsonl);
TRAJSEG_API trajseg_status trajseg_engine_flush(trajseg_engine* e, const char* traj_id, char** out_jsonl);
TRAJSEG_API trajseg_status trajseg_engine_flush_all(trajseg_engine* e, char** out_jsonl);
TRAJSEG_API size_t trajseg_engine_live_count(const trajseg_engine* e);
TRAJSEG_API size_t trajseg_engine_state_bytes(const trajseg_engine* e);

/* projection_json may be NULL, or {"kind":"local_equirectangular","lon0":..,"lat0":..}. */
TRAJSEG_API trajseg_status trajseg_store_create(const trajseg_params* p, const char* projection_json,
                                                trajseg_store** out);
TRAJSEG_API trajseg_status trajseg_store_open(const char* dir, trajseg_store** out);
TRAJSEG_API int trajseg_store_exists(const char* dir);
TRAJSEG_API void trajseg_store_destroy(trajseg_store* s);
TRAJSEG_API trajseg_status trajseg_store_save(trajseg_store* s, const char* dir);
TRAJSEG_API trajseg_status trajseg_store_ingest_csv(trajseg_store* s, const char* csv, int strict,
                                                    char** out_report_json);
TRAJSEG_API trajseg_status trajseg_store_ingest_file(trajseg_store* s, const char* path, int strict,
                                                     char** out_report_json);
TRAJSEG_API trajseg_status trajseg_store_query(const trajseg_store* s, const char* query_json,
                                               char** out_result_json);
TRAJSEG_API trajseg_status trajseg_store_stats(const trajseg_store* s, char** out_json);
TRAJSEG_API trajseg_status trajseg_store_plot_svg(const trajseg_store* s, trajseg_plot mode, double heatmap_cell,
                                                  char** out_svg);
TRAJSEG_API uint64_t trajseg_store_raw_points_touched(const trajseg_store* s);
TRAJSEG_API void trajseg_store_reset_raw_counter(const trajseg_store* s);

/* Runs the HTTP service until the process is stopped. config_json may be
   NULL; TRAJ_LISTEN and TRAJ_DATA_DIR override it. */
TRAJSEG_API trajseg_status trajseg_serve(const char* config_json);

#ifdef __cplusplus
}
#endif

#endif
