#include <doctest.h>

#include "toposcope/core.hpp"
#include "toposcope/io.hpp"

#include "../support/check.hpp"

#include <cmath>
#include <random>

using namespace toposcope;
using testing::fails_with;

TEST_CASE("pairwise distances")
{
    SUBCASE("3-4-5 triangle")
    {
        const auto dm = pairwise_distances(PointCloud::from_rows({{0, 0}, {3, 4}}));
        CHECK(dm.size() == 2);
        CHECK(dm(0, 1) == 5.0);
        CHECK(dm(1, 0) == 5.0);
        CHECK(dm(0, 0) == 0.0);
    }
    SUBCASE("single point gives a 1x1 zero matrix for every metric")
    {
        for (auto m : {Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev}) {
            const auto dm = pairwise_distances(PointCloud::from_rows({{2.5, -1}}), m);
            CHECK(dm.size() == 1);
            CHECK(dm(0, 0) == 0.0);
        }
    }
    SUBCASE("chebyshev and manhattan")
    {
        const auto pc = PointCloud::from_rows({{0, 0}, {1, 1}});
        CHECK(pairwise_distances(pc, Metric::Chebyshev)(0, 1) == 1.0);
        CHECK(pairwise_distances(pc, Metric::Manhattan)(0, 1) == 2.0);
    }
    SUBCASE("empty cloud")
    {
        CHECK(fails_with(ErrorCode::InvalidInput, [] { pairwise_distances(PointCloud{}); }));
    }
}

TEST_CASE("distance matrices are symmetric with zero diagonal and euclidean is a metric")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<double>> rows(12, std::vector<double>(3));
        for (auto& r : rows)
            for (auto& x : r)
                x = g(rng);
        const auto pc = PointCloud::from_rows(rows);
        for (auto m : {Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev}) {
            const auto dm = pairwise_distances(pc, m);
            for (std::size_t i = 0; i < dm.size(); ++i) {
                CHECK(dm(i, i) == 0.0);
                for (std::size_t j = 0; j < dm.size(); ++j)
                    CHECK(dm(i, j) == dm(j, i));
            }
        }
        const auto dm = pairwise_distances(pc);
        for (std::size_t i = 0; i < dm.size(); ++i)
            for (std::size_t j = 0; j < dm.size(); ++j)
                for (std::size_t k = 0; k < dm.size(); ++k)
                    CHECK(dm(i, k) <= dm(i, j) + dm(j, k) + 1e-9);
    }
}

TEST_CASE("metric names")
{
    CHECK(parse_metric("euclidean") == Metric::Euclidean);
    CHECK(parse_metric("chebyshev") == Metric::Chebyshev);
    CHECK(std::string(to_string(Metric::Manhattan)) == "manhattan");
    CHECK(fails_with(ErrorCode::InvalidInput, [] { parse_metric("cosine"); }));
}

TEST_CASE("point cloud validation")
{
    CHECK(fails_with(ErrorCode::InvalidInput, [] { PointCloud({1, 2, 3}, 2, 2); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { PointCloud::from_rows({{1, 2}, {3}}); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { PointCloud::from_rows({{1, NAN}}); }));
    const auto pc = PointCloud::from_rows({{0, 1}, {2, 3}, {4, 5}});
    const std::vector<std::size_t> idx{2, 0};
    const auto sub = pc.select(idx);
    CHECK(sub.size() == 2);
    CHECK(sub(0, 0) == 4.0);
    CHECK(sub(1, 1) == 1.0);
}

TEST_CASE("distance matrix validation")
{
    CHECK_NOTHROW(DistanceMatrix({0, 1, 1, 0}, 2));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { DistanceMatrix({0, 1, 2, 0}, 2); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { DistanceMatrix({1, 1, 1, 0}, 2); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { DistanceMatrix({0, -1, -1, 0}, 2); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { DistanceMatrix({0, 1, 1}, 2); }));
}

TEST_CASE("diagram validation")
{
    const std::vector<PersistencePair> ok{{0, 0.0, 1.0}};
    CHECK_FALSE(validate_diagram(ok).has_value());

    const std::vector<PersistencePair> reversed{{0, 2.0, 1.0}};
    REQUIRE(validate_diagram(reversed).has_value());
    CHECK(*validate_diagram(reversed) == "death < birth");

    const std::vector<PersistencePair> zero{{1, 0.5, 0.5}};
    REQUIRE(validate_diagram(zero).has_value());
    CHECK(*validate_diagram(zero) == "zero persistence pair stored");
}

TEST_CASE("persistence diagram construction")
{
    PersistenceDiagram dgm({{1, 0.5, 0.9}, {0, 0.0, kInfinity}, {0, 0.2, 0.2}, {0, 0.0, 0.3}});
    REQUIRE(dgm.size() == 3); // zero-persistence pair dropped
    CHECK(dgm.pairs()[0] == PersistencePair{0, 0.0, 0.3});
    CHECK(dgm.pairs()[1].essential());
    CHECK(dgm.in_dim(1).size() == 1);
    CHECK(dgm.truncated(0).size() == 2);
    CHECK(fails_with(ErrorCode::InvalidInput, [] { PersistenceDiagram({{0, 1.0, 0.5}}); }));
}

TEST_CASE("filtered complex")
{
    FilteredComplex fc;
    fc.add({1, 0}, 0.5);
    CHECK(fc[0].vertices[0] == 0); // vertex tuples are sorted
    CHECK(fc[0].dim() == 1);
    CHECK(fc.max_dim() == 1);
}

TEST_CASE("weighted graph")
{
    CHECK(fails_with(ErrorCode::InvalidInput, [] { WeightedGraph(2, {{0, 2, 1.0}}, false); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { WeightedGraph(2, {{1, 1, 1.0}}, false); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [] { WeightedGraph(2, {{0, 1, -1.0}}, false); }));
    const WeightedGraph g(3, {{0, 1, 3.0}, {1, 0, 2.0}, {1, 2, 1.0}}, true);
    const auto s = g.symmetrized();
    CHECK_FALSE(s.directed());
    REQUIRE(s.edges().size() == 2);
    CHECK(s.edges()[0] == Edge{0, 1, 2.0});
}

TEST_CASE("csv parsing")
{
    const auto blocks = io::parse_csv_blocks("# header\n1,2\n3, 4\n\n5,6\n");
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].size() == 2);
    CHECK(blocks[0][1][1] == 4.0);
    CHECK(blocks[1][0][0] == 5.0);
    CHECK(io::parse_csv("1\n\n2\n").size() == 2);

    const auto f = testing::failure_of([] { io::parse_csv("1,2\n3,x\n"); });
    REQUIRE(f);
    CHECK(f->code == ErrorCode::InvalidInput);
    CHECK(f->message.find("line 2") != std::string::npos);
}

TEST_CASE("fingerprints depend on values only")
{
    const auto a = io::point_cloud_from_csv("1,2\n3,4\n");
    const auto b = io::point_cloud_from_csv("# same\n1.0, 2\n3,4.000\n");
    const auto c = io::point_cloud_from_csv("1,2\n3,5\n");
    CHECK(io::fingerprint(a) == io::fingerprint(b));
    CHECK(io::fingerprint(a) != io::fingerprint(c));
    CHECK(io::hex64(io::fingerprint(a)).size() == 16);
    CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("diagram json round trip with null deaths")
{
    const PersistenceDiagram dgm({{0, 0.0, kInfinity}, {1, 0.25, 1.5}});
    const auto j = io::to_json(dgm);
    CHECK(j["pairs"][0]["death"].is_null());
    CHECK(j["pairs"][1]["dim"] == 1);
    CHECK(io::diagram_from_json(j) == dgm);
    CHECK(io::diagram_from_json(nlohmann::json::parse(j.dump())) == dgm);
}

TEST_CASE("diagram svg")
{
    const PersistenceDiagram dgm({{0, 0.0, kInfinity}, {1, 0.25, 1.5}});
    const auto svg = io::diagram_svg(dgm);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("class=\"H1\"") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
