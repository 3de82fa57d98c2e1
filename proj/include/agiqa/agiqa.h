#ifndef AGIQA_AGIQA_H
#define AGIQA_AGIQA_H

/*
 * C interface to the AGI quality-assessment core.
 *
 * Every function returns an agiqa_status. On failure the message for the
 * calling thread is available from agiqa_last_error() until the next call
 * on that thread. Handles are opaque; each create/load has a matching
 * destroy. Strings returned through `const char**` are owned by the handle
 * they came from and stay valid until it is destroyed or modified.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AGIQA_BUILDING_LIBRARY)
#    define AGIQA_API __declspec(dllexport)
#  else
#    define AGIQA_API __declspec(dllimport)
#  endif
#else
#  define AGIQA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum agiqa_status {
  AGIQA_OK = 0,
  AGIQA_ERR_INVALID_ARGUMENT = 1,
  AGIQA_ERR_SHAPE = 2,
  AGIQA_ERR_CONFIG = 3,
  AGIQA_ERR_IO = 4,
  AGIQA_ERR_FORMAT = 5,
  AGIQA_ERR_MAGIC = 6,
  AGIQA_ERR_VERSION = 7,
  AGIQA_ERR_CHECKSUM = 8,
  AGIQA_ERR_NOT_FOUND = 9,
  AGIQA_ERR_PARTIAL_FEATURE = 10,
  AGIQA_ERR_CONFLICT = 11,
  AGIQA_ERR_NUMERIC = 12,
  AGIQA_ERR_STATE = 13,
  AGIQA_ERR_DEGENERATE_WEIGHTS = 14,
  AGIQA_ERR_UNDEFINED_CORRELATION = 15,
  AGIQA_ERR_COMPATIBILITY = 16,
  AGIQA_ERR_TOO_SMALL = 17,
  AGIQA_ERR_EMPTY_INPUT = 18,
  AGIQA_ERR_MANIFEST = 19,
  AGIQA_ERR_INTERNAL = 100
} agiqa_status;

typedef struct agiqa_config agiqa_config;
typedef struct agiqa_result agiqa_result;
typedef struct agiqa_cache agiqa_cache;
typedef struct agiqa_model agiqa_model;

typedef struct agiqa_metrics {
  double srcc;
  double plcc;
  double krcc;
  double rmse;
  size_t n;
} agiqa_metrics;

typedef struct agiqa_cache_summary {
  int magic_ok;
  uint16_t version;
  uint32_t hidden_size;
  uint64_t entry_count;
  uint64_t count_a;
  uint64_t count_b;
  uint64_t count_q;
  int checksum_ok;
  uint32_t stored_crc;
  uint32_t computed_crc;
  uint64_t file_size;
  /* Empty when the file validates completely; owned by the library,
     valid until the next agiqa_cache_info call on this thread. */
  const char* problem;
} agiqa_cache_summary;

AGIQA_API const char* agiqa_last_error(void);
AGIQA_API const char* agiqa_status_string(agiqa_status status);
AGIQA_API const char* agiqa_version(void);

/* Configuration: schema-checked `[section] key = value` files plus overrides. */
AGIQA_API agiqa_status agiqa_config_create(agiqa_config** out);
AGIQA_API agiqa_status agiqa_config_load_file(agiqa_config* config, const char* path);
/* `command` selects which section a bare key resolves to (e.g. "seed" is
   synth.seed for "gen-synth" and train.seed for "train"); may be NULL. */
AGIQA_API agiqa_status agiqa_config_set(agiqa_config* config, const char* command,
                                        const char* key, const char* value);
AGIQA_API agiqa_status agiqa_config_get(agiqa_config* config, const char* qualified_key,
                                        const char** out);
AGIQA_API agiqa_status agiqa_config_echo(agiqa_config* config, const char** out);
AGIQA_API void agiqa_config_destroy(agiqa_config* config);

/* Commands. Each produces a result with a table, line records and metric rows. */
AGIQA_API agiqa_status agiqa_gen_synth(const agiqa_config* config, agiqa_result** out);
AGIQA_API agiqa_status agiqa_train(const agiqa_config* config, agiqa_result** out);
AGIQA_API agiqa_status agiqa_eval(const agiqa_config* config, agiqa_result** out);
AGIQA_API agiqa_status agiqa_cross(const agiqa_config* config, agiqa_result** out);
AGIQA_API agiqa_status agiqa_ablate(const agiqa_config* config, agiqa_result** out);

AGIQA_API const char* agiqa_result_table(const agiqa_result* result);
AGIQA_API const char* agiqa_result_records(const agiqa_result* result);
AGIQA_API size_t agiqa_result_row_count(const agiqa_result* result);
AGIQA_API agiqa_status agiqa_result_row(const agiqa_result* result, size_t index,
                                        agiqa_metrics* out);
/* Index of the headline row (e.g. test metrics after training), or -1. */
AGIQA_API ptrdiff_t agiqa_result_selected_row(const agiqa_result* result);
AGIQA_API void agiqa_result_destroy(agiqa_result* result);

/* Feature caches. cache_info succeeds whenever the file could be read and
   reports damage through the summary; it returns AGIQA_ERR_CHECKSUM (or the
   matching header error) in addition when the file does not validate. */
AGIQA_API agiqa_status agiqa_cache_info(const char* path, agiqa_cache_summary* out);
AGIQA_API agiqa_status agiqa_cache_open(const char* path, agiqa_cache** out);
AGIQA_API uint32_t agiqa_cache_hidden_size(const agiqa_cache* cache);
/* `tag` is 'a', 'b' or 'q'. `*vec` points into the cache. */
AGIQA_API agiqa_status agiqa_cache_lookup(const agiqa_cache* cache, const char* image_id, char tag,
                                          const float** vec, size_t* len);
AGIQA_API void agiqa_cache_close(agiqa_cache* cache);

AGIQA_API agiqa_status agiqa_compute_metrics(const double* pred, const double* truth, size_t n,
                                             agiqa_metrics* out);

/* Writes the two fixed prompts, one per line as `<tag>\t<text>`. */
AGIQA_API agiqa_status agiqa_write_prompt_registry(const char* path);

/* Trained models with cached feature inputs. Pass NULL/0 for masked-out inputs. */
AGIQA_API agiqa_status agiqa_model_load(const char* checkpoint_path, agiqa_model** out);
AGIQA_API agiqa_status agiqa_model_predict(const agiqa_model* model, const double* quality,
                                           size_t quality_len, const double* semantic,
                                           size_t semantic_len, const double* coherence,
                                           size_t coherence_len, double* score);
AGIQA_API void agiqa_model_destroy(agiqa_model* model);

#ifdef __cplusplus
}
#endif

#endif /* AGIQA_AGIQA_H */
