#include <doctest.h>

#include "toposcope/diagram.hpp"

#include "../support/check.hpp"
#include "../support/oracles.hpp"

#include <cmath>
#include <random>

using namespace toposcope;
using namespace toposcope::diagram;
using testing::fails_with;

namespace {

PersistenceDiagram h1(std::initializer_list<std::pair<double, double>> pts)
{
    std::vector<PersistencePair> pairs;
    for (const auto& [b, d] : pts)
        pairs.push_back({1, b, d});
    return PersistenceDiagram(std::move(pairs));
}

std::size_t index_of(const std::vector<double>& grid, double t)
{
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] == t)
            return i;
    FAIL("grid point missing");
    return 0;
}

DiagramCurve constant_curve(std::vector<double> grid, double value)
{
    DiagramCurve c;
    c.layers = {std::vector<double>(grid.size(), value)};
    c.grid = std::move(grid);
    return c;
}

} // namespace

TEST_CASE("betti curve")
{
    const std::vector<double> grid{0.0, 1.0, 1.5, 2.0, 3.0};
    const auto curve = betti_curve(h1({{0, 2}, {1, 3}}), 1, grid);
    CHECK(curve.layers[0][index_of(grid, 1.5)] == 2.0);
    CHECK(curve.layers[0][index_of(grid, 2.0)] == 1.0); // (0,2) no longer counts at t = 2
    CHECK(curve.layers[0][index_of(grid, 3.0)] == 0.0);

    const auto empty = betti_curve(PersistenceDiagram{}, 1, grid);
    for (double v : empty.layers[0])
        CHECK(v == 0.0);

    const auto essential = betti_curve(PersistenceDiagram({{1, 0.5, kInfinity}}), 1, grid);
    CHECK(essential.layers[0].back() == 1.0);

    CHECK(fails_with(ErrorCode::InvalidInput, [] { betti_curve(PersistenceDiagram{}, 1, {1.0, 0.5}); }));
}

TEST_CASE("betti curve matches a direct recount")
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pts = oracle::random_pairs(rng, 8);
        const auto dgm = oracle::to_diagram(pts, 1);
        const auto grid = default_grid(dgm, 1, 50);
        const auto curve = betti_curve(dgm, 1, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double count = 0;
            for (const auto& [b, d] : pts)
                count += (b <= grid[i] && grid[i] < d && b != d) ? 1 : 0;
            CHECK(curve.layers[0][i] == count);
        }
    }
}

TEST_CASE("persistence landscape")
{
    const std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto one = persistence_landscape(h1({{0, 2}}), 1, 2, grid);
    REQUIRE(one.layers.size() == 2);
    CHECK(one.layers[0][2] == 1.0);
    CHECK(one.layers[0][1] == 0.5);
    for (double v : one.layers[1])
        CHECK(v == 0.0);

    const auto twice = persistence_landscape(h1({{0, 2}, {0, 2}}), 1, 2, grid);
    CHECK(twice.layers[1][2] == 1.0);

    CHECK(fails_with(ErrorCode::InvalidInput, [&] { persistence_landscape(h1({{0, 2}}), 1, 0, grid); }));
}

TEST_CASE("landscape layers are ordered and 1-Lipschitz")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto dgm = oracle::to_diagram(oracle::random_pairs(rng, 6), 1);
        const auto grid = default_grid(dgm, 1, 64);
        const auto curve = persistence_landscape(dgm, 1, 4, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (std::size_t j = 0; j + 1 < 4; ++j)
                CHECK(curve.layers[j][i] >= curve.layers[j + 1][i]);
        for (const auto& layer : curve.layers)
            for (std::size_t i = 0; i + 1 < grid.size(); ++i)
                CHECK(std::abs(layer[i + 1] - layer[i]) <= grid[i + 1] - grid[i] + 1e-12);
    }
}

TEST_CASE("silhouette")
{
    const std::vector<double> grid{0.0, 1.0, 2.0};
    for (double p : {0.0, 1.0, 2.5})
        CHECK(silhouette(h1({{0, 2}}), 1, p, grid).layers[0][1] == doctest::Approx(1.0));
    CHECK(silhouette(h1({{0, 2}, {0, 2}}), 1, 1.0, grid).layers[0][1] == doctest::Approx(1.0));

    // (4 * tent(0,4)(1) + 2 * tent(0,2)(1)) / 6 with both tents equal to 1.
    CHECK(silhouette(h1({{0, 4}, {0, 2}}), 1, 1.0, grid).layers[0][1] == doctest::Approx(1.0));
    // At t = 2: tents 2 and 0.
    CHECK(silhouette(h1({{0, 4}, {0, 2}}), 1, 1.0, grid).layers[0][2] == doctest::Approx(4.0 * 2.0 / 6.0));

    const auto empty = silhouette(PersistenceDiagram{}, 1, 1.0, grid);
    for (double v : empty.layers[0])
        CHECK(v == 0.0);
    CHECK(fails_with(ErrorCode::InvalidInput, [&] { silhouette(h1({{0, 2}}), 1, -1.0, grid); }));
}

TEST_CASE("heat surface")
{
    const auto dgm = h1({{0.2, 0.9}});
    CHECK(heat_value(dgm, 1, 0.1, 0.9, 0.2) == doctest::Approx(-heat_value(dgm, 1, 0.1, 0.2, 0.9)));
    CHECK(heat_value(dgm, 1, 0.1, 0.2, 0.9) > 0.0);

    const auto img = heat_surface(dgm, 1, 0.1, 20, 20);
    CHECK(img.values.size() == 400);
    const auto [i, j] = img.grid.cell_of(0.2, 0.9);
    CHECK(img.at(i, j) > 0.0);

    for (double v : heat_surface(PersistenceDiagram{}, 1, 0.1, 8, 8).values)
        CHECK(v == 0.0);
    CHECK(fails_with(ErrorCode::InvalidInput, [&] { heat_surface(dgm, 1, 0.0, 8, 8); }));
}

TEST_CASE("persistence image")
{
    const auto single = h1({{0, 2}});
    const auto img = persistence_image(single, 1, 0.2, 25, 25);
    const auto best = std::max_element(img.values.begin(), img.values.end()) - img.values.begin();
    const auto [ci, cj] = img.grid.cell_of(0.0, 2.0);
    CHECK(static_cast<std::size_t>(best) == cj * img.grid.nx + ci);

    const auto doubled = persistence_image(h1({{0, 2}, {0, 2}}), 1, 0.2, 25, 25, {img.grid, {}});
    for (std::size_t n = 0; n < img.values.size(); ++n)
        CHECK(doubled.values[n] == doctest::Approx(2.0 * img.values[n]).epsilon(1e-12));

    for (double v : persistence_image(PersistenceDiagram{}, 1, 0.2, 5, 5).values)
        CHECK(v == 0.0);
}

TEST_CASE("images are additive over disjoint unions on a shared grid")
{
    std::mt19937_64 rng(3);
    const RasterGrid grid{-0.5, 1.5, -0.5, 1.5, 16, 16};
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = oracle::random_pairs(rng, 4), b = oracle::random_pairs(rng, 4);
        auto both = a;
        both.insert(both.end(), b.begin(), b.end());
        const auto da = oracle::to_diagram(a, 1), db = oracle::to_diagram(b, 1), dab = oracle::to_diagram(both, 1);

        const PersistenceImageOptions opts{grid, 1.0};
        const auto pa = persistence_image(da, 1, 0.1, 16, 16, opts);
        const auto pb = persistence_image(db, 1, 0.1, 16, 16, opts);
        const auto pab = persistence_image(dab, 1, 0.1, 16, 16, opts);
        const auto ha = heat_surface(da, 1, 0.1, 16, 16, grid);
        const auto hb = heat_surface(db, 1, 0.1, 16, 16, grid);
        const auto hab = heat_surface(dab, 1, 0.1, 16, 16, grid);
        for (std::size_t n = 0; n < pab.values.size(); ++n) {
            CHECK(std::abs(pab.values[n] - pa.values[n] - pb.values[n]) <= 1e-9);
            CHECK(std::abs(hab.values[n] - ha.values[n] - hb.values[n]) <= 1e-9);
        }
    }
}

TEST_CASE("curve features")
{
    const auto ones = curve_features(constant_curve({0.0, 1.0}, 1.0));
    REQUIRE(ones.size() == 1);
    CHECK(ones[0].area == 1.0);

    const auto zero = curve_features(constant_curve({0.0, 0.5, 1.0}, 0.0));
    CHECK(zero[0].max == 0.0);
    CHECK(zero[0].area == 0.0);

    const auto tent = curve_features(persistence_landscape(h1({{0, 2}}), 1, 1, {0.0, 1.0, 2.0}));
    CHECK(tent[0].max == 1.0);
    CHECK(tent[0].argmax == 1.0);
    CHECK(tent[0].area == 1.0);
}

TEST_CASE("curve distances")
{
    const auto a = constant_curve({0.0, 0.5, 1.0}, 1.0);
    CHECK(lp_curve_distance(a, a, 2.0) == 0.0);
    CHECK(lp_curve_distance(a, constant_curve({0.0, 0.5, 1.0}, 0.0), 1.0) == 1.0);

    auto b = constant_curve({0.0, 0.5, 1.0}, 1.0);
    b.layers[0][1] = 0.5;
    CHECK(lp_curve_distance(a, b, kInfinity) == 0.5);

    CHECK(fails_with(ErrorCode::InvalidInput, [&] { lp_curve_distance(a, constant_curve({0.0, 1.0}, 1.0), 1.0); }));
    CHECK(fails_with(ErrorCode::InvalidInput, [&] { lp_curve_distance(a, a, 0.5); }));
}

TEST_CASE("bottleneck and wasserstein examples")
{
    const auto a = h1({{0, 2}}), b = h1({{0, 3}});
    CHECK(bottleneck_distance(a, a, 1) == 0.0);
    CHECK(bottleneck_distance(a, PersistenceDiagram{}, 1) == 1.0);
    CHECK(bottleneck_distance(a, b, 1) == 1.0);

    CHECK(wasserstein_distance(a, a, 1, 1.0) == 0.0);
    CHECK(wasserstein_distance(a, PersistenceDiagram{}, 1, 1.0) == 1.0);
    CHECK(wasserstein_distance(h1({{0, 2}, {0, 4}}), a, 1, 1.0) == 2.0);

    SUBCASE("essential classes")
    {
        const PersistenceDiagram e1({{0, 0.0, kInfinity}}), e2({{0, 0.5, kInfinity}});
        CHECK(bottleneck_distance(e1, e2, 0) == 0.5);
        CHECK(bottleneck_distance(e1, PersistenceDiagram{}, 0) == kInfinity);
        CHECK(wasserstein_distance(e1, e1, 0, 2.0) == 0.0);
        CHECK(wasserstein_distance(e1, e2, 0, 2.0) == kInfinity);
    }
    SUBCASE("dimension selection")
    {
        const PersistenceDiagram mixed({{0, 0.0, 1.0}, {1, 0.0, 2.0}});
        CHECK(bottleneck_distance(mixed, PersistenceDiagram{}, 0) == 0.5);
        CHECK(bottleneck_distance(mixed, PersistenceDiagram{}, 1) == 1.0);
    }
    CHECK(fails_with(ErrorCode::InvalidInput, [&] { wasserstein_distance(a, b, 1, 0.5); }));
}

TEST_CASE("matching distances agree with brute force")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = oracle::random_pairs(rng, 5), b = oracle::random_pairs(rng, 5);
        const auto da = oracle::to_diagram(a), db = oracle::to_diagram(b);
        const double bn = bottleneck_distance(da, db, 0);
        CHECK(bn == oracle::brute_bottleneck(a, b));
        for (double q : {1.0, 2.0}) {
            const double w = wasserstein_distance(da, db, 0, q);
            CHECK(std::abs(w - oracle::brute_wasserstein(a, b, q)) <= 1e-9);
            CHECK(w >= bn - 1e-12);
        }
    }
}

TEST_CASE("matching distances are metrics")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = oracle::to_diagram(oracle::random_pairs(rng, 4));
        const auto y = oracle::to_diagram(oracle::random_pairs(rng, 4));
        const auto z = oracle::to_diagram(oracle::random_pairs(rng, 4));
        CHECK(bottleneck_distance(x, y, 0) == bottleneck_distance(y, x, 0));
        CHECK(bottleneck_distance(x, x, 0) == 0.0);
        CHECK(bottleneck_distance(x, z, 0) <= bottleneck_distance(x, y, 0) + bottleneck_distance(y, z, 0) + 1e-9);
        for (double q : {1.0, 2.0}) {
            CHECK(std::abs(wasserstein_distance(x, y, 0, q) - wasserstein_distance(y, x, 0, q)) <= 1e-9);
            CHECK(wasserstein_distance(x, y, 0, q) >= 0.0);
            CHECK(wasserstein_distance(x, z, 0, q) <=
                  wasserstein_distance(x, y, 0, q) + wasserstein_distance(y, z, 0, q) + 1e-9);
        }
    }
}

TEST_CASE("persistence entropy")
{
    CHECK(persistence_entropy(PersistenceDiagram({{0, 0, 1}, {0, 0, 1}}), 0) == 1.0);
    CHECK(persistence_entropy(PersistenceDiagram({{0, 0, 1}}), 0) == 0.0);
    const double expected = -(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75));
    CHECK(persistence_entropy(PersistenceDiagram({{0, 0, 1}, {0, 0, 3}}), 0) == doctest::Approx(expected));
    CHECK(std::abs(persistence_entropy(PersistenceDiagram({{0, 0, 1}, {0, 0, 3}}), 0) - 0.811278) <= 1e-6);
    CHECK(persistence_entropy(PersistenceDiagram({{0, 0, kInfinity}}), 0) == 0.0);

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const auto dgm = oracle::to_diagram(oracle::random_pairs(rng, 7));
        const auto n = count_points(dgm, 0);
        if (n == 0)
            continue;
        const double e = persistence_entropy(dgm, 0);
        CHECK(e >= 0.0);
        CHECK(e <= std::log2(static_cast<double>(n)) + 1e-12);
    }
}

TEST_CASE("count points")
{
    CHECK(count_points(PersistenceDiagram{}, 1) == 0);
    CHECK(count_points(h1({{0, 1}, {0, 2}}), 1) == 2);
    CHECK(count_points(h1({{0, 1}, {0, 2}}), 0) == 0);
}

TEST_CASE("amplitude")
{
    for (auto m : {AmplitudeMetric::Bottleneck, AmplitudeMetric::Wasserstein, AmplitudeMetric::Landscape,
                   AmplitudeMetric::Betti, AmplitudeMetric::Heat})
        CHECK(amplitude(PersistenceDiagram{}, 1, {m}) == 0.0);

    CHECK(amplitude(h1({{0, 2}}), 1, {AmplitudeMetric::Bottleneck}) == 1.0);
    AmplitudeSpec w1{AmplitudeMetric::Wasserstein};
    w1.p = 1.0;
    CHECK(amplitude(h1({{0, 2}}), 1, w1) == 1.0);

    // The L1 norm of the first landscape of {(0,2)} is the tent area 1.
    AmplitudeSpec land{AmplitudeMetric::Landscape};
    land.p = 1.0;
    land.n_bins = 201;
    CHECK(amplitude(h1({{0, 2}}), 1, land) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(amplitude(h1({{0, 2}}), 1, {AmplitudeMetric::Heat}) > 0.0);
    CHECK(parse_amplitude_metric("betti") == AmplitudeMetric::Betti);
    CHECK(fails_with(ErrorCode::InvalidInput, [] { parse_amplitude_metric("sliced"); }));
}

TEST_CASE("complex polynomial")
{
    const auto one = complex_polynomial(h1({{0, 1}}), 1, 3);
    CHECK(one[0] == std::complex<double>(0, -1));
    CHECK(one[1] == std::complex<double>(0, 0));

    for (const auto& c : complex_polynomial(PersistenceDiagram{}, 1, 4))
        CHECK(c == std::complex<double>(0, 0));

    const auto two = complex_polynomial(h1({{0, 1}, {0, 1}}), 1, 2);
    CHECK(two[0] == std::complex<double>(0, -2));
    CHECK(two[1] == std::complex<double>(-1, 0));

    CHECK(fails_with(ErrorCode::InvalidInput, [] { complex_polynomial(PersistenceDiagram{}, 1, 0); }));
}

TEST_CASE("infinite deaths are substituted and recorded")
{
    const PersistenceDiagram dgm({{1, 0.0, 1.0}, {1, 0.5, kInfinity}});
    const auto fp = finite_pairs(dgm, 1);
    CHECK(fp.substituted == 1);
    CHECK(fp.pairs[1].second == 1.0);
    const auto curve = persistence_landscape(dgm, 1, 1, default_grid(dgm, 1));
    CHECK(curve.substituted == 1);
    const auto j = to_json(curve);
    CHECK(j["metadata"]["infinite_deaths_substituted"] == 1);
    CHECK(j["grid"].size() == 100);
}
