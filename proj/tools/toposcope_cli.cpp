#include "toposcope/toposcope.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

struct CString {
    char* ptr = nullptr;
    ~CString() { toposcope_string_free(ptr); }
};

struct Cloud {
    toposcope_cloud* ptr = nullptr;
    ~Cloud() { toposcope_cloud_free(ptr); }
};

int report(toposcope_status status)
{
    std::string msg = toposcope_last_error();
    const std::string param = toposcope_last_error_param();
    std::cerr << "toposcope: " << toposcope_status_string(status);
    if (!msg.empty())
        std::cerr << ": " << msg;
    if (!param.empty() && msg.find(param) == std::string::npos)
        std::cerr << " (" << param << ")";
    std::cerr << "\n";
    return status == TOPOSCOPE_IO_ERROR ? 3 : 2;
}

bool read_text(const std::string& path, std::string& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "toposcope: cannot read " << path << "\n";
        return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

int emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << text << "\n")) {
        std::cerr << "toposcope: cannot write " << out_path << "\n";
        return 3;
    }
    return 0;
}

int run_pipeline(const std::string& config_path, const std::string& input, const std::string& out_dir,
                 std::size_t threads)
{
    std::string config;
    if (!read_text(config_path, config))
        return 3;
    CString results;
    const auto status = toposcope_pipeline_run(config.c_str(), input.empty() ? nullptr : input.c_str(),
                                               out_dir.empty() ? nullptr : out_dir.c_str(), threads, &results.ptr);
    if (status != TOPOSCOPE_OK)
        return report(status);

    const auto doc = nlohmann::json::parse(results.ptr);
    std::size_t failed = 0;
    for (const auto& s : doc.at("samples"))
        if (s.at("status") == "error") {
            ++failed;
            std::cerr << "sample " << s.at("index") << " failed at stage " << s.at("error").at("stage") << ": "
                      << s.at("error").at("message").get<std::string>() << "\n";
        }
    std::cout << doc.at("samples").size() << " samples, " << failed << " failed\n";
    if (out_dir.empty())
        std::cout << doc.dump(2) << "\n";
    return failed ? 1 : 0;
}

int run_diagram(const std::string& input, int max_dim, const std::string& max_edge, const std::string& format,
                const std::string& out)
{
    double edge = -1.0;
    if (max_edge != "auto") {
        try {
            std::size_t used = 0;
            edge = std::stod(max_edge, &used);
            if (used != max_edge.size() || !std::isfinite(edge) || edge < 0)
                throw std::invalid_argument(max_edge);
        } catch (const std::exception&) {
            std::cerr << "toposcope: --max-edge must be 'auto' or a non-negative number\n";
            return 2;
        }
    }
    Cloud cloud;
    if (auto s = toposcope_cloud_from_file(input.c_str(), &cloud.ptr); s != TOPOSCOPE_OK)
        return report(s);
    toposcope_diagram* dgm = nullptr;
    if (auto s = toposcope_vr_persistence(cloud.ptr, max_dim, edge, &dgm); s != TOPOSCOPE_OK)
        return report(s);
    CString text;
    const auto s = format == "svg" ? toposcope_diagram_svg(dgm, &text.ptr) : toposcope_diagram_json(dgm, &text.ptr);
    toposcope_diagram_free(dgm);
    if (s != TOPOSCOPE_OK)
        return report(s);
    return emit(text.ptr, out);
}

int run_mapper(const std::string& input, const std::string& filter, const std::string& intervals,
               const std::string& overlap, const std::string& clusterer, std::size_t min_intersection,
               const std::string& out)
{
    Cloud cloud;
    if (auto s = toposcope_cloud_from_file(input.c_str(), &cloud.ptr); s != TOPOSCOPE_OK)
        return report(s);
    CString graph;
    const auto s = toposcope_mapper_run(cloud.ptr, filter.c_str(), intervals.c_str(), overlap.c_str(),
                                        clusterer.c_str(), min_intersection, &graph.ptr);
    if (s != TOPOSCOPE_OK)
        return report(s);
    return emit(nlohmann::json::parse(graph.ptr).dump(2), out);
}

int serve(const std::string& bind, const std::string& static_dir)
{
    const auto colon = bind.rfind(':');
    int port = -1;
    try {
        if (colon != std::string::npos && colon > 0)
            port = std::stoi(bind.substr(colon + 1));
    } catch (const std::exception&) {
    }
    if (port < 0 || port > 65535) {
        std::cerr << "toposcope: --bind must look like host:port\n";
        return 2;
    }
    const std::string host = bind.substr(0, colon);

    // Block the termination signals before any server thread exists so they
    // are delivered to sigwait below.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    toposcope_server* server = nullptr;
    if (auto s = toposcope_server_create(host.c_str(), port, static_dir.empty() ? nullptr : static_dir.c_str(),
                                         &server);
        s != TOPOSCOPE_OK)
        return report(s);
    int bound = 0;
    if (auto s = toposcope_server_start(server, &bound); s != TOPOSCOPE_OK) {
        toposcope_server_free(server);
        return report(s);
    }
    std::cout << "listening on http://" << host << ":" << bound << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    toposcope_server_stop(server);
    toposcope_server_free(server);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Topological data analysis pipelines and Mapper graphs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", toposcope_version());

    std::string config, input, out_dir;
    std::size_t threads = 0;
    auto* run = app.add_subcommand("run", "Run a pipeline config over a batch of samples");
    run->add_option("--config", config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--input", input, "Input CSV; defaults to input.path of the config");
    run->add_option("--out", out_dir, "Output directory; defaults to output.path of the config");
    run->add_option("--threads", threads, "Samples processed in parallel (0 = all cores)");

    std::string dgm_input, max_edge = "auto", format = "json", dgm_out;
    int max_dim = 1;
    auto* dgm = app.add_subcommand("diagram", "Vietoris-Rips persistence diagram of a point cloud");
    dgm->add_option("--input", dgm_input, "Point cloud CSV")->required()->check(CLI::ExistingFile);
    dgm->add_option("--max-dim", max_dim, "Highest homology dimension")->check(CLI::Range(0, 3));
    dgm->add_option("--max-edge", max_edge, "Edge length cutoff or 'auto' for none");
    dgm->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "svg"}));
    dgm->add_option("--out", dgm_out, "Output file (default stdout)");

    std::string map_input, filter = "proj:0", intervals = "10", overlap = "0.3", clusterer = "sl:0.5", map_out;
    std::size_t min_intersection = 1;
    auto* map = app.add_subcommand("mapper", "Mapper graph of a point cloud");
    map->add_option("--input", map_input, "Point cloud CSV")->required()->check(CLI::ExistingFile);
    map->add_option("--filter", filter, "proj:<axis>, height:<x>:<y>..., norm or ecc:max|mean[:metric]");
    map->add_option("--intervals", intervals, "Intervals per filter axis, e.g. 10 or 10,8");
    map->add_option("--overlap", overlap, "Overlap fraction per axis in [0, 1)");
    map->add_option("--clusterer", clusterer, "sl:<eps> or dbscan:<eps>:<min_samples>");
    map->add_option("--min-intersection", min_intersection, "Shared points needed for an edge");
    map->add_option("--out", map_out, "Output file (default stdout)");

    std::string bind = "127.0.0.1:8080", static_dir;
    auto* srv = app.add_subcommand("serve", "Serve the explorer HTTP API");
    srv->add_option("--bind", bind, "host:port");
    srv->add_option("--static", static_dir, "Directory of static files mounted at /")->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    if (*run)
        return run_pipeline(config, input, out_dir, threads);
    if (*dgm)
        return run_diagram(dgm_input, max_dim, max_edge, format, dgm_out);
    if (*map)
        return run_mapper(map_input, filter, intervals, overlap, clusterer, min_intersection, map_out);
    return serve(bind, static_dir);
}
