// Links only the shared library; everything goes through the C header.

#include <doctest.h>

#include "toposcope/toposcope.h"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

std::string take(char* s)
{
    std::string out = s ? s : "";
    toposcope_string_free(s);
    return out;
}

toposcope_cloud* square()
{
    const char csv[] = "0,0\n1,0\n1,1\n0,1\n";
    toposcope_cloud* cloud = nullptr;
    REQUIRE(toposcope_cloud_from_csv(csv, std::strlen(csv), &cloud) == TOPOSCOPE_OK);
    return cloud;
}

std::string circle_csv(int n)
{
    std::string out;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * i / n;
        out += std::to_string(std::cos(t)) + "," + std::to_string(std::sin(t)) + "\n";
    }
    return out;
}

} // namespace

TEST_CASE("version and status strings")
{
    CHECK(std::string(toposcope_version()) == "0.1.0");
    CHECK(std::string(toposcope_status_string(TOPOSCOPE_OK)) == "ok");
    CHECK(toposcope_status_string(static_cast<toposcope_status>(99)) != nullptr);
}

TEST_CASE("clouds")
{
    auto* cloud = square();
    CHECK(toposcope_cloud_size(cloud) == 4);
    CHECK(toposcope_cloud_dim(cloud) == 2);
    char fp[17];
    CHECK(toposcope_cloud_fingerprint(cloud, fp) == TOPOSCOPE_OK);
    CHECK(std::strlen(fp) == 16);

    const double coords[] = {0, 0, 1, 0, 1, 1, 0, 1};
    toposcope_cloud* same = nullptr;
    REQUIRE(toposcope_cloud_from_buffer(coords, 4, 2, &same) == TOPOSCOPE_OK);
    char fp2[17];
    toposcope_cloud_fingerprint(same, fp2);
    CHECK(std::string(fp) == fp2);
    toposcope_cloud_free(same);
    toposcope_cloud_free(cloud);
}

TEST_CASE("errors carry message and parameter")
{
    toposcope_cloud* cloud = nullptr;
    const char bad[] = "1,2\n3,x\n";
    CHECK(toposcope_cloud_from_csv(bad, std::strlen(bad), &cloud) == TOPOSCOPE_INVALID_INPUT);
    CHECK(cloud == nullptr);
    CHECK(std::strlen(toposcope_last_error()) > 0);

    CHECK(toposcope_cloud_from_csv(nullptr, 0, &cloud) == TOPOSCOPE_NULL_ARGUMENT);
    CHECK(toposcope_cloud_from_file("/nonexistent/cloud.csv", &cloud) == TOPOSCOPE_IO_ERROR);

    auto* sq = square();
    char* out = nullptr;
    CHECK(toposcope_mapper_run(sq, "proj:0", "4", "1.2", "sl:0.5", 1, &out) == TOPOSCOPE_INVALID_INPUT);
    CHECK(std::string(toposcope_last_error_param()) == "overlap");
    CHECK(out == nullptr);

    toposcope_diagram* dgm = nullptr;
    CHECK(toposcope_vr_persistence(sq, 1, -1.0, &dgm) == TOPOSCOPE_OK);
    CHECK(std::string(toposcope_last_error()).empty());
    toposcope_diagram_free(dgm);
    toposcope_cloud_free(sq);

    toposcope_cloud_free(nullptr);
    toposcope_diagram_free(nullptr);
}

TEST_CASE("square diagram")
{
    auto* cloud = square();
    toposcope_diagram* dgm = nullptr;
    REQUIRE(toposcope_vr_persistence(cloud, 1, NAN, &dgm) == TOPOSCOPE_OK);
    int h1 = 0, h0_finite = 0;
    for (size_t i = 0; i < toposcope_diagram_size(dgm); ++i) {
        int dim;
        double b, d;
        REQUIRE(toposcope_diagram_pair(dgm, i, &dim, &b, &d) == TOPOSCOPE_OK);
        if (dim == 1) {
            ++h1;
            CHECK(b == doctest::Approx(1.0));
            CHECK(d == doctest::Approx(std::sqrt(2.0)));
        } else if (std::isfinite(d)) {
            ++h0_finite;
            CHECK(d == doctest::Approx(1.0));
        }
    }
    CHECK(h1 == 1);
    CHECK(h0_finite == 3);

    int dim;
    double b, d;
    CHECK(toposcope_diagram_pair(dgm, 99, &dim, &b, &d) == TOPOSCOPE_INVALID_INPUT);

    char* text = nullptr;
    REQUIRE(toposcope_diagram_json(dgm, &text) == TOPOSCOPE_OK);
    CHECK(json::parse(take(text))["pairs"].size() == toposcope_diagram_size(dgm));
    REQUIRE(toposcope_diagram_svg(dgm, &text) == TOPOSCOPE_OK);
    CHECK(take(text).rfind("<svg", 0) == 0);

    toposcope_diagram_free(dgm);
    toposcope_cloud_free(cloud);
}

TEST_CASE("mapper sessions")
{
    const auto csv = circle_csv(40);
    toposcope_cloud* cloud = nullptr;
    REQUIRE(toposcope_cloud_from_csv(csv.data(), csv.size(), &cloud) == TOPOSCOPE_OK);

    char* direct = nullptr;
    REQUIRE(toposcope_mapper_run(cloud, "proj:0", "4", "0.3", "sl:0.5", 1, &direct) == TOPOSCOPE_OK);
    const auto graph = json::parse(take(direct));
    CHECK(graph["nodes"].size() == graph["edges"].size());

    toposcope_mapper_session* session = nullptr;
    REQUIRE(toposcope_mapper_session_create(8, &session) == TOPOSCOPE_OK);
    char* out = nullptr;
    int hit = -1;
    REQUIRE(toposcope_mapper_session_run(session, cloud, "proj:0", "4", "0.3", "sl:0.5", 1, &out, &hit) ==
            TOPOSCOPE_OK);
    CHECK(hit == 0);
    CHECK(json::parse(take(out)) == graph);
    REQUIRE(toposcope_mapper_session_run(session, cloud, "proj:0", "4", "0.3", "sl:0.5", 2, &out, &hit) ==
            TOPOSCOPE_OK);
    take(out);
    size_t counts[4];
    REQUIRE(toposcope_mapper_session_counters(session, counts) == TOPOSCOPE_OK);
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 1);
    CHECK(counts[2] == 1);
    CHECK(counts[3] == 2);

    toposcope_mapper_session_free(session);
    toposcope_cloud_free(cloud);
}

TEST_CASE("pipelines")
{
    const auto dir = std::filesystem::temp_directory_path() / "toposcope_capi_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream in(dir / "clouds.csv");
        in << "0,0\n1,0\n1,1\n0,1\n\n0,0\n2,0\n2,2\n0,2\n";
    }
    const std::string cfg =
        R"({"input": {"kind": "point_cloud"}, "stages": [{"op": "vr_persistence"}, {"op": "count_points", "params": {"dim": 1}}]})";
    char* results = nullptr;
    const auto input = (dir / "clouds.csv").string();
    const auto out = (dir / "out").string();
    REQUIRE(toposcope_pipeline_run(cfg.c_str(), input.c_str(), out.c_str(), 2, &results) == TOPOSCOPE_OK);
    const auto j = json::parse(take(results));
    REQUIRE(j["samples"].size() == 2);
    CHECK(j["samples"][1]["result"]["count"] == 1);
    CHECK(std::filesystem::exists(dir / "out" / "results.json"));

    CHECK(toposcope_pipeline_run(R"({"stages": []})", input.c_str(), nullptr, 1, nullptr) == TOPOSCOPE_SCHEMA_ERROR);
    std::filesystem::remove_all(dir);
}

TEST_CASE("server lifecycle")
{
    toposcope_server* server = nullptr;
    REQUIRE(toposcope_server_create("127.0.0.1", 0, nullptr, &server) == TOPOSCOPE_OK);
    int port = 0;
    REQUIRE(toposcope_server_start(server, &port) == TOPOSCOPE_OK);
    CHECK(port > 0);
    CHECK(toposcope_server_port(server) == port);
    toposcope_server_stop(server);
    toposcope_server_free(server);
}
