#include "toposcope/service.hpp"

#include "toposcope/homology.hpp"
#include "toposcope/io.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <cstdio>

namespace toposcope::service {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxUploadBytes = 64u << 20;

const std::string* get(const Query& q, const std::string& key)
{
    const auto it = q.find(key);
    return it == q.end() ? nullptr : &it->second;
}

std::size_t parse_count(const std::string& text, const std::string& param, std::size_t lo, std::size_t hi)
{
    std::size_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end)
        fail(ErrorCode::InvalidInput, param + " must be an integer", param);
    if (value < lo || value > hi)
        fail(ErrorCode::InvalidInput,
             param + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", param);
    return value;
}

double parse_number(const std::string& text, const std::string& param)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
        fail(ErrorCode::InvalidInput, param + " must be a finite number", param);
    return value;
}

double diameter(const PointCloud& pc)
{
    double best = 0.0;
    for (std::size_t i = 0; i < pc.size(); ++i)
        for (std::size_t j = i + 1; j < pc.size(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < pc.dim(); ++k)
                acc += (pc(i, k) - pc(j, k)) * (pc(i, k) - pc(j, k));
            best = std::max(best, acc);
        }
    return std::sqrt(best);
}

std::string default_clusterer(const Dataset& ds)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "sl:%.6g", ds.diameter > 0.0 ? ds.diameter / 10.0 : 0.5);
    return buf;
}

int status_for(ErrorCode code)
{
    return code == ErrorCode::NotFound ? 404 : code == ErrorCode::Io ? 500 : 400;
}

template <typename Fn>
Response guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const Error& e) {
        return error_response(status_for(e.code()), e.what(), e.param());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

void check_known(const Query& q, std::initializer_list<const char*> known)
{
    for (const auto& [key, _] : q)
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            fail(ErrorCode::InvalidInput, "unknown parameter '" + key + "'", key);
}

} // namespace

Response error_response(int status, const std::string& message, const std::string& param)
{
    json err{{"message", message}};
    if (!param.empty())
        err["param"] = param;
    return {status, json{{"error", err}}.dump()};
}

Service::Service(std::size_t cache_capacity) : cache_(cache_capacity) {}

Response Service::post_dataset(std::string_view csv)
{
    return guarded([&] {
        auto pc = io::point_cloud_from_csv(csv);
        if (pc.empty())
            fail(ErrorCode::InvalidInput, "dataset has no rows", "body");
        auto ds = std::make_shared<Dataset>();
        ds->fingerprint = io::fingerprint(pc);
        ds->id = io::hex64(ds->fingerprint);
        ds->diameter = diameter(pc);
        ds->cloud = std::move(pc);
        const json body{{"id", ds->id}, {"n", ds->cloud.size()}, {"d", ds->cloud.dim()}};
        {
            std::unique_lock lock(datasets_mutex_);
            datasets_.try_emplace(ds->id, std::move(ds));
        }
        return Response{201, body.dump()};
    });
}

std::shared_ptr<const Dataset> Service::find(const std::string& id) const
{
    std::shared_lock lock(datasets_mutex_);
    const auto it = datasets_.find(id);
    return it == datasets_.end() ? nullptr : it->second;
}

std::shared_ptr<const Dataset> Service::dataset_for(const Query& query) const
{
    const auto* id = get(query, "dataset");
    if (!id || id->empty())
        fail(ErrorCode::InvalidInput, "missing dataset id", "dataset");
    auto ds = find(*id);
    if (!ds)
        fail(ErrorCode::NotFound, "unknown dataset '" + *id + "'", "dataset");
    return ds;
}

Response Service::get_schema(const std::string& id) const
{
    return guarded([&] {
        const auto ds = find(id);
        if (!ds)
            fail(ErrorCode::NotFound, "unknown dataset '" + id + "'", "dataset");

        json filters = json::array();
        for (std::size_t a = 0; a < ds->cloud.dim(); ++a)
            filters.push_back("proj:" + std::to_string(a));
        for (const char* f : {"norm", "ecc:max", "ecc:mean"})
            filters.push_back(f);

        const double eps_default = ds->diameter > 0.0 ? ds->diameter / 10.0 : 0.5;
        const json params{
            {"filter", {{"type", "string"}, {"default", "proj:0"}, {"options", filters}}},
            {"intervals", {{"type", "integer"}, {"min", 1}, {"max", kMaxIntervals}, {"default", 10}}},
            {"overlap", {{"type", "number"}, {"min", 0.0}, {"max", 1.0}, {"max_exclusive", true}, {"default", 0.3}}},
            {"clusterer",
             {{"type", "string"},
              {"default", default_clusterer(*ds)},
              {"methods", {"sl", "dbscan"}},
              {"eps", {{"type", "number"}, {"min", 0.0}, {"max", ds->diameter}, {"default", eps_default}}},
              {"min_samples", {{"type", "integer"}, {"min", 1}, {"max", ds->cloud.size()}, {"default", 5}}}}},
            {"min_intersection", {{"type", "integer"}, {"min", 1}, {"max", ds->cloud.size()}, {"default", 1}}},
            {"max_dim", {{"type", "integer"}, {"min", 0}, {"max", 2}, {"default", 1}}},
            {"max_edge", {{"type", "number"}, {"min", 0.0}, {"max", ds->diameter}, {"default", "auto"}}},
        };
        const json body{{"id", ds->id}, {"n", ds->cloud.size()}, {"d", ds->cloud.dim()}, {"params", params}};
        return Response{200, body.dump()};
    });
}

Response Service::get_mapper(const Query& query)
{
    return guarded([&] {
        check_known(query, {"dataset", "filter", "intervals", "overlap", "overlap_frac", "clusterer", "min_intersection"});
        const auto ds = dataset_for(query);

        const auto* filter = get(query, "filter");
        const auto* intervals = get(query, "intervals");
        const auto* overlap = get(query, "overlap");
        std::string overlap_param = "overlap";
        if (!overlap && (overlap = get(query, "overlap_frac")))
            overlap_param = "overlap_frac";
        const auto* clusterer = get(query, "clusterer");
        const auto* min_inter = get(query, "min_intersection");

        mapper::MapperParams params;
        params.filter = mapper::FilterSpec::parse(filter ? *filter : "proj:0");
        try {
            params.cover = mapper::CoverSpec::parse(intervals ? *intervals : "10", overlap ? *overlap : "0.3");
        } catch (const Error& e) {
            // Report the overlap under the name the caller used.
            if (e.param() == "overlap")
                fail(e.code(), overlap_param + ": " + e.what(), overlap_param);
            throw;
        }
        for (std::size_t n : params.cover.n_intervals)
            if (n > kMaxIntervals)
                fail(ErrorCode::InvalidInput, "intervals must lie in [1, " + std::to_string(kMaxIntervals) + "]",
                     "intervals");
        params.clusterer = mapper::ClustererSpec::parse(clusterer ? *clusterer : default_clusterer(*ds));
        params.min_intersection =
            min_inter ? parse_count(*min_inter, "min_intersection", 1, std::max<std::size_t>(ds->cloud.size(), 1)) : 1;

        const auto result = cache_.run(ds->cloud, ds->fingerprint, params);
        auto body = mapper::to_json(*result.graph);
        body["cache"] = result.cache_hit ? "hit" : "miss";
        return Response{200, body.dump()};
    });
}

Response Service::get_diagram(const Query& query)
{
    return guarded([&] {
        check_known(query, {"dataset", "max_dim", "max_edge"});
        const auto ds = dataset_for(query);
        const auto* max_dim_text = get(query, "max_dim");
        const auto* max_edge_text = get(query, "max_edge");

        homology::VrOptions opts;
        opts.max_dim = max_dim_text ? static_cast<int>(parse_count(*max_dim_text, "max_dim", 0, 2)) : 1;
        if (max_edge_text && *max_edge_text != "auto") {
            const double e = parse_number(*max_edge_text, "max_edge");
            if (e < 0.0)
                fail(ErrorCode::InvalidInput, "max_edge must be non-negative", "max_edge");
            opts.max_edge = e;
        }
        if (ds->cloud.size() > kMaxDiagramPoints)
            fail(ErrorCode::InvalidInput,
                 "dataset has " + std::to_string(ds->cloud.size()) + " points; the diagram endpoint accepts at most " +
                     std::to_string(kMaxDiagramPoints),
                 "dataset");

        char key[96];
        std::snprintf(key, sizeof key, "%s|%d|%.17g", ds->id.c_str(), opts.max_dim,
                      opts.max_edge ? *opts.max_edge : -1.0);
        {
            std::lock_guard lock(diagrams_mutex_);
            if (const auto it = diagrams_.find(key); it != diagrams_.end())
                return Response{200, it->second};
        }
        auto body = io::to_json(homology::vr_persistence(ds->cloud, opts)).dump();
        std::lock_guard lock(diagrams_mutex_);
        diagrams_.try_emplace(key, body);
        return Response{200, std::move(body)};
    });
}

// ---------------------------------------------------------------------------

std::pair<std::string, int> parse_bind(const std::string& bind)
{
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos || colon == 0)
        fail(ErrorCode::InvalidInput, "bind address must look like host:port", "bind");
    const auto port = parse_count(bind.substr(colon + 1), "bind", 0, 65535);
    return {bind.substr(0, colon), static_cast<int>(port)};
}

namespace {

void send(httplib::Response& res, const Response& r)
{
    res.status = r.status;
    res.set_content(r.body, r.content_type);
}

Query query_of(const httplib::Request& req)
{
    Query q;
    for (const auto& [k, v] : req.params)
        q.try_emplace(k, v);
    return q;
}

} // namespace

Server::Server(Service& service, std::string host, int port, std::optional<std::string> static_dir)
    : service_(service), host_(std::move(host)), port_(port), http_(std::make_unique<httplib::Server>())
{
    auto& http = *http_;
    http.set_payload_max_length(kMaxUploadBytes);
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    http.Post("/api/datasets", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.post_dataset(req.body));
    });
    http.Get("/api/datasets/:id/schema", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.get_schema(req.path_params.at("id")));
    });
    http.Get("/api/mapper", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.get_mapper(query_of(req)));
    });
    http.Get("/api/diagram", [this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.get_diagram(query_of(req)));
    });
    if (static_dir && !http.set_mount_point("/", *static_dir))
        fail(ErrorCode::Io, "cannot serve static files from " + *static_dir, "static");
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            send(res, error_response(res.status, res.status == 404 ? "no such endpoint" : "request failed"));
    });
}

Server::~Server()
{
    stop();
}

void Server::bind()
{
    const int bound = port_ == 0 ? http_->bind_to_any_port(host_) : (http_->bind_to_port(host_, port_) ? port_ : -1);
    if (bound < 0)
        fail(ErrorCode::Io, "cannot bind " + host_ + ":" + std::to_string(port_), "bind");
    port_ = bound;
}

int Server::start()
{
    bind();
    worker_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return port_;
}

void Server::run()
{
    bind();
    http_->listen_after_bind();
}

void Server::stop()
{
    if (http_)
        http_->stop();
    if (worker_.joinable())
        worker_.join();
}

} // namespace toposcope::service
