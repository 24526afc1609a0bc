/* C interface of the toposcope library. */
#ifndef TOPOSCOPE_H
#define TOPOSCOPE_H

#include <stddef.h>

#if defined(_WIN32)
#  define TOPOSCOPE_API __declspec(dllexport)
#else
#  define TOPOSCOPE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum toposcope_status {
    TOPOSCOPE_OK = 0,
    TOPOSCOPE_INVALID_INPUT = 1,
    TOPOSCOPE_DEGENERATE_CHANNEL = 2,
    TOPOSCOPE_INVALID_FILTRATION = 3,
    TOPOSCOPE_SCHEMA_ERROR = 4,
    TOPOSCOPE_NOT_FOUND = 5,
    TOPOSCOPE_IO_ERROR = 6,
    TOPOSCOPE_NULL_ARGUMENT = 7,
    TOPOSCOPE_INTERNAL_ERROR = 8
} toposcope_status;

typedef struct toposcope_cloud toposcope_cloud;
typedef struct toposcope_diagram toposcope_diagram;
typedef struct toposcope_mapper_session toposcope_mapper_session;
typedef struct toposcope_server toposcope_server;

/* Message and offending parameter of the last failed call on this thread.
 * Empty strings after a successful call. Valid until the next call. */
TOPOSCOPE_API const char* toposcope_last_error(void);
TOPOSCOPE_API const char* toposcope_last_error_param(void);
TOPOSCOPE_API const char* toposcope_status_string(toposcope_status status);
TOPOSCOPE_API const char* toposcope_version(void);

/* Frees strings returned through char** out parameters. */
TOPOSCOPE_API void toposcope_string_free(char* s);

/* Point clouds */
TOPOSCOPE_API toposcope_status toposcope_cloud_from_csv(const char* text, size_t length, toposcope_cloud** out);
TOPOSCOPE_API toposcope_status toposcope_cloud_from_file(const char* path, toposcope_cloud** out);
/* Copies n * d row-major coordinates. */
TOPOSCOPE_API toposcope_status toposcope_cloud_from_buffer(const double* coords, size_t n, size_t d,
                                                           toposcope_cloud** out);
TOPOSCOPE_API size_t toposcope_cloud_size(const toposcope_cloud* cloud);
TOPOSCOPE_API size_t toposcope_cloud_dim(const toposcope_cloud* cloud);
/* 16 hex digits identifying the cloud's contents. `out` holds 17 bytes. */
TOPOSCOPE_API toposcope_status toposcope_cloud_fingerprint(const toposcope_cloud* cloud, char out[17]);
TOPOSCOPE_API void toposcope_cloud_free(toposcope_cloud* cloud);

/* Persistence diagrams. A negative or NaN max_edge means no cutoff. */
TOPOSCOPE_API toposcope_status toposcope_vr_persistence(const toposcope_cloud* cloud, int max_dim, double max_edge,
                                                        toposcope_diagram** out);
TOPOSCOPE_API size_t toposcope_diagram_size(const toposcope_diagram* dgm);
/* Essential pairs report death = +infinity. */
TOPOSCOPE_API toposcope_status toposcope_diagram_pair(const toposcope_diagram* dgm, size_t index, int* dim,
                                                      double* birth, double* death);
TOPOSCOPE_API toposcope_status toposcope_diagram_json(const toposcope_diagram* dgm, char** out);
TOPOSCOPE_API toposcope_status toposcope_diagram_svg(const toposcope_diagram* dgm, char** out);
TOPOSCOPE_API void toposcope_diagram_free(toposcope_diagram* dgm);

/* Mapper. Parameter strings use the same grammar as the HTTP API, e.g.
 * filter "proj:0", intervals "10", overlap "0.3", clusterer "sl:0.5". */
TOPOSCOPE_API toposcope_status toposcope_mapper_run(const toposcope_cloud* cloud, const char* filter,
                                                    const char* intervals, const char* overlap,
                                                    const char* clusterer, size_t min_intersection, char** json_out);

/* Memoizing session; thread-safe. */
TOPOSCOPE_API toposcope_status toposcope_mapper_session_create(size_t capacity, toposcope_mapper_session** out);
TOPOSCOPE_API toposcope_status toposcope_mapper_session_run(toposcope_mapper_session* session,
                                                            const toposcope_cloud* cloud, const char* filter,
                                                            const char* intervals, const char* overlap,
                                                            const char* clusterer, size_t min_intersection,
                                                            char** json_out, int* cache_hit);
/* Stage computation counts: filter, cover, cluster, nerve. */
TOPOSCOPE_API toposcope_status toposcope_mapper_session_counters(const toposcope_mapper_session* session,
                                                                 size_t counts[4]);
TOPOSCOPE_API void toposcope_mapper_session_free(toposcope_mapper_session* session);

/* Pipelines. input_path may be NULL to use the path in the config; out_dir
 * may be NULL to skip writing files. threads = 0 uses all cores. The
 * results document is returned through results_out when non-NULL. */
TOPOSCOPE_API toposcope_status toposcope_pipeline_run(const char* config_json, const char* input_path,
                                                      const char* out_dir, size_t threads, char** results_out);

/* HTTP service. port 0 picks a free port; static_dir may be NULL. */
TOPOSCOPE_API toposcope_status toposcope_server_create(const char* host, int port, const char* static_dir,
                                                       toposcope_server** out);
/* Serves on a background thread. */
TOPOSCOPE_API toposcope_status toposcope_server_start(toposcope_server* server, int* port_out);
/* Serves on the calling thread until toposcope_server_stop. */
TOPOSCOPE_API toposcope_status toposcope_server_run(toposcope_server* server);
TOPOSCOPE_API int toposcope_server_port(const toposcope_server* server);
TOPOSCOPE_API void toposcope_server_stop(toposcope_server* server);
TOPOSCOPE_API void toposcope_server_free(toposcope_server* server);

#ifdef __cplusplus
}
#endif

#endif
