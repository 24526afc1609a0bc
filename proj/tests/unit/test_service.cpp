#include <doctest.h>

#include "toposcope/io.hpp"
#include "toposcope/mapper.hpp"
#include "toposcope/service.hpp"

#include "../support/oracles.hpp"

#include <httplib.h>

#include <sstream>

using namespace toposcope;
using namespace toposcope::service;
using nlohmann::json;

namespace {

std::string csv_of(const std::vector<std::vector<double>>& rows)
{
    std::ostringstream out;
    out.precision(17);
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k)
            out << (k ? "," : "") << r[k];
        out << "\n";
    }
    return out.str();
}

std::string post(Service& svc, const std::vector<std::vector<double>>& rows)
{
    const auto r = svc.post_dataset(csv_of(rows));
    REQUIRE(r.status == 201);
    return json::parse(r.body)["id"];
}

Query circle_query(const std::string& id)
{
    return {{"dataset", id}, {"filter", "proj:0"}, {"intervals", "4"}, {"overlap", "0.3"}, {"clusterer", "sl:0.5"}};
}

json error_of(const Response& r)
{
    return json::parse(r.body)["error"];
}

} // namespace

TEST_CASE("datasets")
{
    Service svc;
    const auto r = svc.post_dataset("0,0\n3,4\n");
    CHECK(r.status == 201);
    const auto body = json::parse(r.body);
    CHECK(body["n"] == 2);
    CHECK(body["d"] == 2);
    CHECK(body["id"].get<std::string>().size() == 16);

    const auto ds = svc.find(body["id"]);
    REQUIRE(ds);
    CHECK(ds->diameter == 5.0);
    CHECK(io::hex64(io::fingerprint(ds->cloud)) == ds->id);

    CHECK(svc.post_dataset("").status == 400);
    const auto bad = svc.post_dataset("1,2\n3\n");
    CHECK(bad.status == 400);
    CHECK(error_of(bad).contains("message"));
}

TEST_CASE("mapper endpoint matches a direct run")
{
    Service svc;
    const auto rows = oracle::circle(40);
    const auto id = post(svc, rows);
    const auto r = svc.get_mapper(circle_query(id));
    REQUIRE(r.status == 200);
    auto body = json::parse(r.body);
    CHECK(body["cache"] == "miss");
    CHECK(body["nodes"].size() == body["edges"].size());

    const mapper::MapperParams p{mapper::FilterSpec::parse("proj:0"), mapper::CoverSpec::parse("4", "0.3"),
                                 mapper::ClustererSpec::parse("sl:0.5"), 1};
    body.erase("cache");
    CHECK(body == mapper::to_json(mapper::run_mapper(PointCloud::from_rows(rows), p)));
}

TEST_CASE("repeated mapper requests hit the cache")
{
    Service svc;
    const auto id = post(svc, oracle::circle(40));
    const auto first = svc.get_mapper(circle_query(id));
    const auto counters = svc.mapper_counters();
    const auto second = svc.get_mapper(circle_query(id));
    CHECK(json::parse(second.body)["cache"] == "hit");
    CHECK(svc.mapper_counters() == counters);

    auto a = json::parse(first.body), b = json::parse(second.body);
    a.erase("cache");
    b.erase("cache");
    CHECK(a.dump() == b.dump());

    auto q = circle_query(id);
    q["min_intersection"] = "2";
    svc.get_mapper(q);
    const auto after = svc.mapper_counters();
    CHECK(after.nerve == counters.nerve + 1);
    CHECK(after.cluster == counters.cluster);
    CHECK(after.filter == counters.filter);
}

TEST_CASE("mapper parameter errors name the parameter")
{
    Service svc;
    const auto id = post(svc, oracle::circle(40));

    auto q = circle_query(id);
    q.erase("overlap");
    q["overlap_frac"] = "1.2";
    auto r = svc.get_mapper(q);
    CHECK(r.status == 400);
    CHECK(error_of(r)["param"] == "overlap_frac");

    q = circle_query(id);
    q["overlap"] = "1.2";
    CHECK(error_of(svc.get_mapper(q))["param"] == "overlap");

    q = circle_query(id);
    q["intervals"] = "101";
    CHECK(error_of(svc.get_mapper(q))["param"] == "intervals");

    q = circle_query(id);
    q["clusterer"] = "kmeans:3";
    CHECK(error_of(svc.get_mapper(q))["param"] == "clusterer");

    q = circle_query(id);
    q["filter"] = "proj:7";
    CHECK(error_of(svc.get_mapper(q))["param"] == "filter");

    q = circle_query(id);
    q["min_intersection"] = "0";
    CHECK(error_of(svc.get_mapper(q))["param"] == "min_intersection");

    q = circle_query(id);
    q["colour"] = "red";
    CHECK(svc.get_mapper(q).status == 400);

    CHECK(svc.get_mapper({}).status == 400);
    r = svc.get_mapper({{"dataset", "0123456789abcdef"}});
    CHECK(r.status == 404);
    CHECK(error_of(r)["param"] == "dataset");
}

TEST_CASE("default clusterer scales with the dataset")
{
    Service svc;
    const auto id = post(svc, oracle::circle(40, 10.0));
    const auto schema = json::parse(svc.get_schema(id).body);
    CHECK(schema["params"]["clusterer"]["default"] == "sl:2");
    CHECK(svc.get_mapper({{"dataset", id}}).status == 200);
}

TEST_CASE("schema")
{
    Service svc;
    const auto id = post(svc, oracle::circle(12));
    const auto r = svc.get_schema(id);
    REQUIRE(r.status == 200);
    const auto s = json::parse(r.body);
    CHECK(s["params"]["intervals"]["min"] == 1);
    CHECK(s["params"]["intervals"]["max"] == Service::kMaxIntervals);
    CHECK(s["params"]["intervals"]["default"] == 10);
    CHECK(s["params"]["filter"]["options"].size() == 5);
    CHECK(s["params"]["overlap"]["default"] == 0.3);
    CHECK(svc.get_schema("nope").status == 404);
}

TEST_CASE("diagram endpoint")
{
    Service svc;
    const auto id = post(svc, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto r = svc.get_diagram({{"dataset", id}, {"max_dim", "1"}, {"max_edge", "auto"}});
    REQUIRE(r.status == 200);
    const auto dgm = io::diagram_from_json(json::parse(r.body));
    const auto h1 = dgm.in_dim(1);
    REQUIRE(h1.size() == 1);
    CHECK(h1[0].birth == doctest::Approx(1.0));
    CHECK(h1[0].death == doctest::Approx(std::sqrt(2.0)));
    CHECK(svc.get_diagram({{"dataset", id}, {"max_dim", "1"}, {"max_edge", "auto"}}).body == r.body);

    CHECK(error_of(svc.get_diagram({{"dataset", id}, {"max_dim", "3"}}))["param"] == "max_dim");
    CHECK(error_of(svc.get_diagram({{"dataset", id}, {"max_edge", "-1"}}))["param"] == "max_edge");
    CHECK(svc.get_diagram({{"dataset", "0000000000000000"}}).status == 404);
}

TEST_CASE("bind addresses")
{
    CHECK(parse_bind("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
    CHECK_THROWS_AS(parse_bind("localhost"), Error);
    CHECK_THROWS_AS(parse_bind("127.0.0.1:99999"), Error);
}

TEST_CASE("http round trip")
{
    Service svc;
    Server server(svc, "127.0.0.1", 0);
    const int port = server.start();
    REQUIRE(port > 0);
    httplib::Client cli("127.0.0.1", port);

    const auto posted = cli.Post("/api/datasets", csv_of(oracle::circle(40)), "text/csv");
    REQUIRE(posted);
    CHECK(posted->status == 201);
    CHECK(posted->get_header_value("Access-Control-Allow-Origin") == "*");
    const std::string id = json::parse(posted->body)["id"];

    const std::string path = "/api/mapper?dataset=" + id + "&filter=proj:0&intervals=4&overlap=0.3&clusterer=sl:0.5";
    const auto first = cli.Get(path);
    REQUIRE(first);
    CHECK(first->status == 200);
    CHECK(first->get_header_value("Content-Type").find("application/json") == 0);
    CHECK(json::parse(first->body)["cache"] == "miss");
    const auto second = cli.Get(path);
    CHECK(json::parse(second->body)["cache"] == "hit");

    const auto bad = cli.Get("/api/mapper?dataset=" + id + "&overlap_frac=1.2");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["error"]["param"] == "overlap_frac");

    const auto missing = cli.Get("/api/datasets/ffffffffffffffff/schema");
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["error"].contains("message"));

    const auto schema = cli.Get("/api/datasets/" + id + "/schema");
    CHECK(schema->status == 200);

    const auto unknown = cli.Get("/api/nothing");
    CHECK(unknown->status == 404);
    CHECK(json::parse(unknown->body).contains("error"));

    const auto preflight = cli.Options("/api/mapper");
    REQUIRE(preflight);
    CHECK(preflight->get_header_value("Access-Control-Allow-Methods").find("GET") != std::string::npos);

    server.stop();
}
