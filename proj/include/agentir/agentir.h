/* Stable C interface to the restoration-agent simulator. */
#ifndef AGENTIR_H
#define AGENTIR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AIR_API __declspec(dllexport)
#else
#define AIR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum air_status {
  AIR_OK = 0,
  AIR_E_INVALID_ARGUMENT = 1,
  AIR_E_IO = 2,
  AIR_E_SCHEMA = 3,
  AIR_E_UNKNOWN_TOOL = 4,
  AIR_E_NO_TOOLS = 5,
  AIR_E_UNSCHEDULABLE = 6,
  AIR_E_EMPTY_INPUT = 7,
  AIR_E_INCONSISTENT_TRIAL = 8,
  AIR_E_NONDETERMINISTIC_ENV = 9,
  AIR_E_MISSING_TOOLS = 10,
  AIR_E_TRANSPORT = 11,
  AIR_E_TIMEOUT = 12,
  AIR_E_MALFORMED_RESPONSE = 13,
  AIR_E_INVALID_PERMUTATION = 14,
  AIR_E_INTERNAL = 15
} air_status;

typedef struct air_env air_env;
typedef struct air_kb air_kb;

AIR_API const char* air_version(void);
/* Message of the last failed call on this thread; "" after a success. */
AIR_API const char* air_last_error_message(void);
AIR_API const char* air_status_name(air_status status);
/* Strings returned through char** out-parameters are released with this. */
AIR_API void air_string_free(char* text);

AIR_API air_status air_env_load(const char* path, air_env** out);
AIR_API air_status air_env_from_json(const char* json, air_env** out);
AIR_API air_status air_env_paper_tabular(uint64_t seed, air_env** out);
AIR_API air_status air_env_default_mechanistic(uint64_t seed, air_env** out);
AIR_API air_status air_env_to_json(const air_env* env, char** out);
AIR_API void air_env_free(air_env* env);

AIR_API air_status air_kb_load(const char* path, air_kb** out);
AIR_API air_status air_kb_paper(air_kb** out);
AIR_API air_status air_kb_save(const air_kb* kb, const char* path);
AIR_API air_status air_kb_to_json(const air_kb* kb, char** out);
/* Per-order fail-rate sentences, one line per combination. */
AIR_API air_status air_kb_summary(const air_kb* kb, char** out);
AIR_API void air_kb_free(air_kb* kb);

/* Runs exploration from a harness config (NULL for the built-in default).
 * seed may be NULL to keep the config's seed. Writes trial tuples as JSON lines to
 * tuples_path and the resulting knowledge base to kb_path when they are non-NULL. */
AIR_API air_status air_explore(const char* config_path, const uint64_t* seed, int jobs, const char* tuples_path,
                               const char* kb_path, char** summary);
/* Aggregates and distills trial tuples into a knowledge base. */
AIR_API air_status air_summarize(const char* tuples_path, const char* kb_path, char** summary);

/* Workflow batch. modes is a comma-separated list ("full,no-retrieval"); kb may be
 * NULL for the built-in knowledge base; out_dir may be NULL to skip writing files. */
AIR_API air_status air_run(const char* config_path, const air_kb* kb, const char* modes, uint64_t runs,
                           uint64_t seed, int jobs, const char* out_dir, char** report_text);
/* One workflow on a profile given as JSON; returns the final profile and trace as JSON. */
AIR_API air_status air_run_one(const air_env* env, const air_kb* kb, const char* profile_json, const char* mode,
                               uint64_t seed, char** result_json);

/* Scheduling dispersion. combinations lists labels or group letters separated by commas
 * ("A,B", "rain+haze", "all"). */
AIR_API air_status air_consistency(const char* config_path, const char* scheduler, const char* combinations,
                                   const air_kb* kb, int n, uint64_t seed, char** table_text, char** table_json);

/* Re-derives counters and tables from a run directory. problems is "" when consistent. */
AIR_API air_status air_verify(const char* dir, char** problems);

#ifdef __cplusplus
}
#endif

#endif
