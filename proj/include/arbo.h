#ifndef ARBO_H
#define ARBO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ARBO_API __declspec(dllexport)
#else
#define ARBO_API __attribute__((visibility("default")))
#endif

typedef enum arbo_status {
    ARBO_OK = 0,
    ARBO_ERR_INTERNAL = 1,
    ARBO_ERR_VALIDATION = 2,
    ARBO_ERR_NUMERICAL = 3,
    ARBO_ERR_IO = 4,
    ARBO_ERR_ARGUMENT = 5
} arbo_status;

/* A subcommand with its parameters, variant, pulse schedule and flags. */
typedef struct arbo_request arbo_request;
/* Files produced by a run, plus a text summary. */
typedef struct arbo_result arbo_result;

ARBO_API const char* arbo_version(void);
/* Message for the last failed call on this thread ("" if none). */
ARBO_API const char* arbo_last_error(void);

/* command: thresholds, equilibria, bifurcation, simulate, strategy,
 * sensitivity-local, sensitivity-global, selfcheck. Parameters start at the
 * built-in defaults. */
ARBO_API arbo_status arbo_request_create(const char* command, arbo_request** out);
ARBO_API void arbo_request_destroy(arbo_request* req);

/* Replaces parameters, variant and schedule with the contents of a config
 * file; keys it omits keep their defaults and are recorded as such. */
ARBO_API arbo_status arbo_request_load_config(arbo_request* req, const char* path);
/* Adds the pulse lines of a config-format file to the schedule. */
ARBO_API arbo_status arbo_request_load_schedule(arbo_request* req, const char* path);
/* Named sets: baseline, backward-figure, forward-figure,
 * no-vaccination-illustration, no-vaccination-reconstructed. */
ARBO_API arbo_status arbo_request_preset(arbo_request* req, const char* name);
ARBO_API arbo_status arbo_request_set_param(arbo_request* req, const char* key, double value);
ARBO_API arbo_status arbo_request_get_param(const arbo_request* req, const char* key, double* value);
ARBO_API arbo_status arbo_request_set_variant(arbo_request* req, const char* variant);
ARBO_API arbo_status arbo_request_add_pulse(arbo_request* req, const char* control, double level, double period,
                                            double duration, double start, double end);
/* Subcommand option, e.g. ("points", "200"); values are parsed at run time. */
ARBO_API arbo_status arbo_request_set_flag(arbo_request* req, const char* name, const char* value);
/* Global sensitivity ranges from a `key = lo hi` file. */
ARBO_API arbo_status arbo_request_load_ranges(arbo_request* req, const char* path);

ARBO_API arbo_status arbo_run(const arbo_request* req, arbo_result** out);
/* Re-runs the request recorded in a manifest; *identical is 1 when every
 * output digest matches. */
ARBO_API arbo_status arbo_replay(const char* manifest_path, arbo_result** out, int* identical);
ARBO_API void arbo_result_destroy(arbo_result* res);

ARBO_API size_t arbo_result_file_count(const arbo_result* res);
ARBO_API const char* arbo_result_file_name(const arbo_result* res, size_t i);
ARBO_API const char* arbo_result_file_content(const arbo_result* res, size_t i);
ARBO_API const char* arbo_result_summary(const arbo_result* res);
/* Failed checks (selfcheck) or mismatched files (replay); 0 otherwise. */
ARBO_API int arbo_result_failures(const arbo_result* res);
/* Writes all files and manifest.txt into dir. */
ARBO_API arbo_status arbo_result_write(const arbo_result* res, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
