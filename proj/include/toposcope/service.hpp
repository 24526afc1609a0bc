#pragma once

#include "toposcope/core.hpp"
#include "toposcope/mapper.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>

namespace httplib {
class Server;
}

namespace toposcope::service {

struct Dataset {
    std::string id; // 16 hex digits of the content fingerprint
    std::uint64_t fingerprint = 0;
    PointCloud cloud;
    double diameter = 0.0;
};

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

using Query = std::map<std::string, std::string>;

/// Request handlers of the explorer API, independent of the transport.
class Service {
public:
    /// Datasets larger than this are refused by the diagram endpoint.
    static constexpr std::size_t kMaxDiagramPoints = 2000;
    static constexpr std::size_t kMaxIntervals = 100;

    explicit Service(std::size_t cache_capacity = 256);

    Response post_dataset(std::string_view csv);
    Response get_schema(const std::string& id) const;
    Response get_mapper(const Query& query);
    Response get_diagram(const Query& query);

    std::shared_ptr<const Dataset> find(const std::string& id) const;
    mapper::StageCounters mapper_counters() const { return cache_.counters(); }

private:
    std::shared_ptr<const Dataset> dataset_for(const Query& query) const;

    mutable std::shared_mutex datasets_mutex_;
    std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
    mapper::MapperCache cache_;
    std::mutex diagrams_mutex_;
    std::map<std::string, std::string> diagrams_; // request key -> body
};

Response error_response(int status, const std::string& message, const std::string& param = "");

/// Binds the service to an HTTP listener. Port 0 picks a free port.
class Server {
public:
    Server(Service& service, std::string host, int port, std::optional<std::string> static_dir = std::nullopt);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();
    int port() const noexcept { return port_; }

private:
    void bind();

    Service& service_;
    std::string host_;
    int port_;
    std::unique_ptr<httplib::Server> http_;
    std::thread worker_;
};

/// "host:port"; throws InvalidInput on malformed input.
std::pair<std::string, int> parse_bind(const std::string& bind);

} // namespace toposcope::service
