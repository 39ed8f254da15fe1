#ifndef KAPING_KAPING_H
#define KAPING_KAPING_H

/* C interface to the kaping library. Objects are opaque handles; every
 * fallible call returns a kaping_status and leaves a message retrievable via
 * kaping_last_error() on the calling thread. Strings returned through
 * `char** out` parameters are owned by the caller and released with
 * kaping_string_free(). All strings are UTF-8. */

#include <stddef.h>

#if defined(_WIN32)
#define KAPING_API __declspec(dllexport)
#elif defined(__GNUC__)
#define KAPING_API __attribute__((visibility("default")))
#else
#define KAPING_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kaping_status {
  KAPING_OK = 0,
  KAPING_ERR_INVALID_ARGUMENT = 1,
  KAPING_ERR_IO = 2,
  KAPING_ERR_PARSE = 3,
  KAPING_ERR_DANGLING_REFERENCE = 4,
  KAPING_ERR_CONFIG = 5,
  KAPING_ERR_TRANSPORT = 6,
  KAPING_ERR_OVERSIZE = 7,
  KAPING_ERR_INTERNAL = 8
} kaping_status;

typedef struct kaping_graph kaping_graph;

KAPING_API const char* kaping_version(void);
KAPING_API const char* kaping_status_string(kaping_status status);

/* Message of the last failing call on this thread; "" if none. */
KAPING_API const char* kaping_last_error(void);

KAPING_API void kaping_string_free(char* s);

/* Quiets or restores warnings written to stderr. */
KAPING_API void kaping_set_logging(int enabled);

/* Loads a graph from triples/entities TSV files. `relations_path` may be
 * NULL or "" to use relations.tsv next to the entities file when present. */
KAPING_API kaping_status kaping_graph_load(const char* triples_path,
                                           const char* entities_path,
                                           const char* relations_path,
                                           kaping_graph** out);

/* Loads the graph named by a run config (JSON text). Relative paths resolve
 * against `base_dir` (may be NULL). */
KAPING_API kaping_status kaping_graph_load_from_config(const char* config_json,
                                                       const char* base_dir,
                                                       kaping_graph** out);

KAPING_API void kaping_graph_free(kaping_graph* graph);

KAPING_API kaping_status kaping_graph_stats(const kaping_graph* graph,
                                            size_t* entities,
                                            size_t* relations,
                                            size_t* triples);

/* Ranks the question's neighborhood under the config's method and writes
 * {"question", "question_entities", "ranking": [{rank, score, text}], ...}
 * with at most `k` entries. `entity_ids` is a comma-separated seed list, or
 * NULL/"" to link entities from the question text. */
KAPING_API kaping_status kaping_retrieve(const kaping_graph* graph,
                                         const char* config_json,
                                         const char* question,
                                         const char* entity_ids, size_t k,
                                         char** out_json);

/* Full run as described by the config JSON. Writes examples.jsonl and
 * report.json under the configured output directory and returns the report
 * JSON. Per-example failures do not make this call fail. */
KAPING_API kaping_status kaping_run(const char* config_json,
                                    const char* base_dir,
                                    char** out_report_json);

/* Re-scores the generations in a per-example JSONL file; returns the
 * updated JSONL. */
KAPING_API kaping_status kaping_score_jsonl(const char* examples_path,
                                            char** out_jsonl);

/* Aggregates a per-example JSONL file into a report JSON. */
KAPING_API kaping_status kaping_report_jsonl(const char* examples_path,
                                             char** out_report_json);

/* Verbalized form of every triple in ingestion order, one per line. */
KAPING_API kaping_status kaping_graph_verbalize(const kaping_graph* graph,
                                                char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* KAPING_KAPING_H */
