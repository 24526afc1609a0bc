#include "toposcope/toposcope.h"

#include "toposcope/homology.hpp"
#include "toposcope/io.hpp"
#include "toposcope/mapper.hpp"
#include "toposcope/pipeline.hpp"
#include "toposcope/service.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

using namespace toposcope;

struct toposcope_cloud {
    PointCloud pc;
    std::uint64_t fingerprint = 0;
};

struct toposcope_diagram {
    PersistenceDiagram dgm;
};

struct toposcope_mapper_session {
    explicit toposcope_mapper_session(std::size_t capacity) : cache(capacity) {}
    mapper::MapperCache cache;
};

struct toposcope_server {
    service::Service service;
    std::unique_ptr<service::Server> http;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_param;

toposcope_status status_of(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidInput: return TOPOSCOPE_INVALID_INPUT;
    case ErrorCode::DegenerateChannel: return TOPOSCOPE_DEGENERATE_CHANNEL;
    case ErrorCode::InvalidFiltration: return TOPOSCOPE_INVALID_FILTRATION;
    case ErrorCode::SchemaError: return TOPOSCOPE_SCHEMA_ERROR;
    case ErrorCode::NotFound: return TOPOSCOPE_NOT_FOUND;
    case ErrorCode::Io: return TOPOSCOPE_IO_ERROR;
    }
    return TOPOSCOPE_INTERNAL_ERROR;
}

toposcope_status set_error(toposcope_status status, std::string message, std::string param = "")
{
    last_error = std::move(message);
    last_param = std::move(param);
    return status;
}

template <typename Fn>
toposcope_status guarded(Fn&& fn)
{
    last_error.clear();
    last_param.clear();
    try {
        fn();
        return TOPOSCOPE_OK;
    } catch (const Error& e) {
        return set_error(status_of(e.code()), e.what(), e.param());
    } catch (const std::bad_alloc&) {
        return set_error(TOPOSCOPE_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return set_error(TOPOSCOPE_INTERNAL_ERROR, e.what());
    }
}

char* copy_string(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename... Ptrs>
bool any_null(Ptrs... ptrs)
{
    return ((ptrs == nullptr) || ...);
}

toposcope_status null_argument()
{
    return set_error(TOPOSCOPE_NULL_ARGUMENT, "required argument is NULL");
}

mapper::MapperParams mapper_params(const char* filter, const char* intervals, const char* overlap,
                                   const char* clusterer, std::size_t min_intersection)
{
    mapper::MapperParams p;
    p.filter = mapper::FilterSpec::parse(filter);
    p.cover = mapper::CoverSpec::parse(intervals, overlap);
    p.clusterer = mapper::ClustererSpec::parse(clusterer);
    p.min_intersection = min_intersection;
    return p;
}

toposcope_cloud* make_cloud(PointCloud pc)
{
    auto* c = new toposcope_cloud;
    c->fingerprint = io::fingerprint(pc);
    c->pc = std::move(pc);
    return c;
}

} // namespace

extern "C" {

const char* toposcope_last_error(void)
{
    return last_error.c_str();
}

const char* toposcope_last_error_param(void)
{
    return last_param.c_str();
}

const char* toposcope_status_string(toposcope_status status)
{
    switch (status) {
    case TOPOSCOPE_OK: return "ok";
    case TOPOSCOPE_INVALID_INPUT: return "invalid input";
    case TOPOSCOPE_DEGENERATE_CHANNEL: return "degenerate channel";
    case TOPOSCOPE_INVALID_FILTRATION: return "invalid filtration";
    case TOPOSCOPE_SCHEMA_ERROR: return "schema error";
    case TOPOSCOPE_NOT_FOUND: return "not found";
    case TOPOSCOPE_IO_ERROR: return "i/o error";
    case TOPOSCOPE_NULL_ARGUMENT: return "null argument";
    case TOPOSCOPE_INTERNAL_ERROR: return "internal error";
    }
    return "unknown status";
}

const char* toposcope_version(void)
{
    return "0.1.0";
}

void toposcope_string_free(char* s)
{
    std::free(s);
}

toposcope_status toposcope_cloud_from_csv(const char* text, size_t length, toposcope_cloud** out)
{
    if (any_null(text, out))
        return null_argument();
    return guarded([&] { *out = make_cloud(io::point_cloud_from_csv(std::string_view(text, length))); });
}

toposcope_status toposcope_cloud_from_file(const char* path, toposcope_cloud** out)
{
    if (any_null(path, out))
        return null_argument();
    return guarded([&] { *out = make_cloud(io::point_cloud_from_csv(io::read_file(path))); });
}

toposcope_status toposcope_cloud_from_buffer(const double* coords, size_t n, size_t d, toposcope_cloud** out)
{
    if (any_null(out) || (n * d > 0 && coords == nullptr))
        return null_argument();
    return guarded([&] { *out = make_cloud(PointCloud(std::vector<double>(coords, coords + n * d), n, d)); });
}

size_t toposcope_cloud_size(const toposcope_cloud* cloud)
{
    return cloud ? cloud->pc.size() : 0;
}

size_t toposcope_cloud_dim(const toposcope_cloud* cloud)
{
    return cloud ? cloud->pc.dim() : 0;
}

toposcope_status toposcope_cloud_fingerprint(const toposcope_cloud* cloud, char out[17])
{
    if (any_null(cloud, out))
        return null_argument();
    return guarded([&] {
        const auto hex = io::hex64(cloud->fingerprint);
        std::memcpy(out, hex.c_str(), 17);
    });
}

void toposcope_cloud_free(toposcope_cloud* cloud)
{
    delete cloud;
}

toposcope_status toposcope_vr_persistence(const toposcope_cloud* cloud, int max_dim, double max_edge,
                                          toposcope_diagram** out)
{
    if (any_null(cloud, out))
        return null_argument();
    return guarded([&] {
        homology::VrOptions opts;
        opts.max_dim = max_dim;
        if (!std::isnan(max_edge) && max_edge >= 0.0)
            opts.max_edge = max_edge;
        *out = new toposcope_diagram{homology::vr_persistence(cloud->pc, opts)};
    });
}

size_t toposcope_diagram_size(const toposcope_diagram* dgm)
{
    return dgm ? dgm->dgm.size() : 0;
}

toposcope_status toposcope_diagram_pair(const toposcope_diagram* dgm, size_t index, int* dim, double* birth,
                                        double* death)
{
    if (any_null(dgm, dim, birth, death))
        return null_argument();
    if (index >= dgm->dgm.size())
        return set_error(TOPOSCOPE_INVALID_INPUT, "pair index out of range", "index");
    const auto& p = dgm->dgm.pairs()[index];
    *dim = p.dim;
    *birth = p.birth;
    *death = p.death;
    last_error.clear();
    last_param.clear();
    return TOPOSCOPE_OK;
}

toposcope_status toposcope_diagram_json(const toposcope_diagram* dgm, char** out)
{
    if (any_null(dgm, out))
        return null_argument();
    return guarded([&] { *out = copy_string(io::to_json(dgm->dgm).dump()); });
}

toposcope_status toposcope_diagram_svg(const toposcope_diagram* dgm, char** out)
{
    if (any_null(dgm, out))
        return null_argument();
    return guarded([&] { *out = copy_string(io::diagram_svg(dgm->dgm)); });
}

void toposcope_diagram_free(toposcope_diagram* dgm)
{
    delete dgm;
}

toposcope_status toposcope_mapper_run(const toposcope_cloud* cloud, const char* filter, const char* intervals,
                                      const char* overlap, const char* clusterer, size_t min_intersection,
                                      char** json_out)
{
    if (any_null(cloud, filter, intervals, overlap, clusterer, json_out))
        return null_argument();
    return guarded([&] {
        const auto params = mapper_params(filter, intervals, overlap, clusterer, min_intersection);
        *json_out = copy_string(mapper::to_json(mapper::run_mapper(cloud->pc, params)).dump());
    });
}

toposcope_status toposcope_mapper_session_create(size_t capacity, toposcope_mapper_session** out)
{
    if (any_null(out))
        return null_argument();
    return guarded([&] { *out = new toposcope_mapper_session(capacity == 0 ? 256 : capacity); });
}

toposcope_status toposcope_mapper_session_run(toposcope_mapper_session* session, const toposcope_cloud* cloud,
                                              const char* filter, const char* intervals, const char* overlap,
                                              const char* clusterer, size_t min_intersection, char** json_out,
                                              int* cache_hit)
{
    if (any_null(session, cloud, filter, intervals, overlap, clusterer, json_out))
        return null_argument();
    return guarded([&] {
        const auto params = mapper_params(filter, intervals, overlap, clusterer, min_intersection);
        const auto result = session->cache.run(cloud->pc, cloud->fingerprint, params);
        *json_out = copy_string(mapper::to_json(*result.graph).dump());
        if (cache_hit)
            *cache_hit = result.cache_hit ? 1 : 0;
    });
}

toposcope_status toposcope_mapper_session_counters(const toposcope_mapper_session* session, size_t counts[4])
{
    if (any_null(session, counts))
        return null_argument();
    return guarded([&] {
        const auto c = session->cache.counters();
        counts[0] = c.filter;
        counts[1] = c.cover;
        counts[2] = c.cluster;
        counts[3] = c.nerve;
    });
}

void toposcope_mapper_session_free(toposcope_mapper_session* session)
{
    delete session;
}

toposcope_status toposcope_pipeline_run(const char* config_json, const char* input_path, const char* out_dir,
                                        size_t threads, char** results_out)
{
    if (any_null(config_json))
        return null_argument();
    return guarded([&] {
        const auto cfg = pipeline::parse_config(std::string_view(config_json));
        const std::string path = input_path ? input_path : cfg.input.path;
        if (path.empty())
            fail(ErrorCode::InvalidInput, "no input path given", "input");
        const auto batch = pipeline::load_batch(io::read_file(path), cfg.input.kind);
        const auto results = pipeline::run_pipeline(cfg, batch, threads);
        const std::string dir = out_dir ? out_dir : cfg.output.path;
        if (!dir.empty())
            pipeline::write_outputs(cfg, results, dir);
        if (results_out)
            *results_out = copy_string(pipeline::results_json(results).dump(2));
    });
}

toposcope_status toposcope_server_create(const char* host, int port, const char* static_dir, toposcope_server** out)
{
    if (any_null(host, out))
        return null_argument();
    return guarded([&] {
        auto server = std::make_unique<toposcope_server>();
        std::optional<std::string> dir;
        if (static_dir)
            dir = static_dir;
        server->http = std::make_unique<service::Server>(server->service, host, port, dir);
        *out = server.release();
    });
}

toposcope_status toposcope_server_start(toposcope_server* server, int* port_out)
{
    if (any_null(server))
        return null_argument();
    return guarded([&] {
        const int port = server->http->start();
        if (port_out)
            *port_out = port;
    });
}

toposcope_status toposcope_server_run(toposcope_server* server)
{
    if (any_null(server))
        return null_argument();
    return guarded([&] { server->http->run(); });
}

int toposcope_server_port(const toposcope_server* server)
{
    return server ? server->http->port() : -1;
}

void toposcope_server_stop(toposcope_server* server)
{
    if (server)
        server->http->stop();
}

void toposcope_server_free(toposcope_server* server)
{
    delete server;
}

} // extern "C"
