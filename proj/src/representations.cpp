#include "toposcope/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace toposcope::diagram {

FinitePairs finite_pairs(const PersistenceDiagram& dgm, int k)
{
    const auto sub = dgm.in_dim(k);
    double cap = -kInfinity;
    double max_birth = -kInfinity;
    for (const auto& p : sub) {
        max_birth = std::max(max_birth, p.birth);
        if (!p.essential())
            cap = std::max(cap, p.death);
    }
    if (cap == -kInfinity)
        cap = max_birth;

    FinitePairs out;
    out.pairs.reserve(sub.size());
    for (const auto& p : sub) {
        if (p.essential()) {
            out.pairs.emplace_back(p.birth, std::max(cap, p.birth));
            ++out.substituted;
        } else {
            out.pairs.emplace_back(p.birth, p.death);
        }
    }
    return out;
}

std::vector<double> default_grid(const PersistenceDiagram& dgm, int k, std::size_t n_bins)
{
    if (n_bins < 1)
        fail(ErrorCode::InvalidInput, "grid needs at least one bin", "n_bins");
    const auto fp = finite_pairs(dgm, k);
    double lo = 0.0, hi = 1.0;
    if (!fp.pairs.empty()) {
        lo = kInfinity;
        hi = -kInfinity;
        for (const auto& [b, d] : fp.pairs) {
            lo = std::min(lo, b);
            hi = std::max(hi, d);
        }
        if (hi <= lo)
            hi = lo + 1.0;
    }
    std::vector<double> grid(n_bins);
    if (n_bins == 1) {
        grid[0] = lo;
        return grid;
    }
    const double step = (hi - lo) / static_cast<double>(n_bins - 1);
    for (std::size_t i = 0; i < n_bins; ++i)
        grid[i] = lo + step * static_cast<double>(i);
    grid.back() = hi;
    return grid;
}

namespace {

void check_grid(const std::vector<double>& grid)
{
    if (grid.empty())
        fail(ErrorCode::InvalidInput, "grid must be nonempty", "grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            fail(ErrorCode::InvalidInput, "grid values must be finite", "grid");
        if (i > 0 && grid[i] <= grid[i - 1])
            fail(ErrorCode::InvalidInput, "grid must be strictly increasing", "grid");
    }
}

double tent(double b, double d, double t)
{
    return std::max(0.0, std::min(t - b, d - t));
}

constexpr double kInvTwoPi = 0.5 * std::numbers::inv_pi;

double gaussian(double dx, double dy, double sigma)
{
    return kInvTwoPi / (sigma * sigma) * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

void check_sigma(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        fail(ErrorCode::InvalidInput, "sigma must be positive", "sigma");
}

void check_resolution(std::size_t nx, std::size_t ny)
{
    if (nx < 1 || ny < 1)
        fail(ErrorCode::InvalidInput, "resolution must be at least 1x1", "resolution");
}

} // namespace

DiagramCurve betti_curve(const PersistenceDiagram& dgm, int k, const std::vector<double>& grid)
{
    check_grid(grid);
    const auto sub = dgm.in_dim(k);
    DiagramCurve curve{grid, {std::vector<double>(grid.size(), 0.0)}, k, 0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        curve.layers[0][i] = static_cast<double>(
            std::count_if(sub.begin(), sub.end(), [t](const PersistencePair& p) { return p.birth <= t && t < p.death; }));
    }
    return curve;
}

DiagramCurve persistence_landscape(const PersistenceDiagram& dgm, int k, std::size_t n_layers,
                                   const std::vector<double>& grid)
{
    if (n_layers < 1)
        fail(ErrorCode::InvalidInput, "landscape needs at least one layer", "n_layers");
    check_grid(grid);
    const auto fp = finite_pairs(dgm, k);
    DiagramCurve curve{grid, std::vector<std::vector<double>>(n_layers, std::vector<double>(grid.size(), 0.0)), k,
                       fp.substituted};

    std::vector<double> heights(fp.pairs.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t p = 0; p < fp.pairs.size(); ++p)
            heights[p] = tent(fp.pairs[p].first, fp.pairs[p].second, grid[i]);
        const std::size_t top = std::min(n_layers, heights.size());
        std::partial_sort(heights.begin(), heights.begin() + static_cast<std::ptrdiff_t>(top), heights.end(),
                          std::greater<>());
        for (std::size_t layer = 0; layer < top; ++layer)
            curve.layers[layer][i] = heights[layer];
    }
    return curve;
}

DiagramCurve silhouette(const PersistenceDiagram& dgm, int k, double power, const std::vector<double>& grid)
{
    if (!(power >= 0.0))
        fail(ErrorCode::InvalidInput, "silhouette power must be non-negative", "power");
    check_grid(grid);
    const auto fp = finite_pairs(dgm, k);
    DiagramCurve curve{grid, {std::vector<double>(grid.size(), 0.0)}, k, fp.substituted};

    std::vector<double> weights;
    double total = 0.0;
    for (const auto& [b, d] : fp.pairs) {
        weights.push_back(std::pow(d - b, power));
        total += weights.back();
    }
    if (total == 0.0)
        return curve;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (std::size_t p = 0; p < fp.pairs.size(); ++p)
            acc += weights[p] * tent(fp.pairs[p].first, fp.pairs[p].second, grid[i]);
        curve.layers[0][i] = acc / total;
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Rasters

double RasterGrid::x_center(std::size_t i) const
{
    return x_min + (static_cast<double>(i) + 0.5) * (x_max - x_min) / static_cast<double>(nx);
}

double RasterGrid::y_center(std::size_t j) const
{
    return y_min + (static_cast<double>(j) + 0.5) * (y_max - y_min) / static_cast<double>(ny);
}

double RasterGrid::cell_area() const
{
    return (x_max - x_min) / static_cast<double>(nx) * (y_max - y_min) / static_cast<double>(ny);
}

std::pair<std::size_t, std::size_t> RasterGrid::cell_of(double x, double y) const
{
    auto index = [](double v, double lo, double hi, std::size_t n) {
        const double f = std::floor((v - lo) / (hi - lo) * static_cast<double>(n));
        return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(n - 1)));
    };
    return {index(x, x_min, x_max, nx), index(y, y_min, y_max, ny)};
}

RasterGrid default_heat_grid(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny)
{
    check_sigma(sigma);
    check_resolution(nx, ny);
    const auto span = default_grid(dgm, k, 2);
    const double lo = span.front() - 3.0 * sigma;
    const double hi = span.back() + 3.0 * sigma;
    return {lo, hi, lo, hi, nx, ny};
}

RasterGrid default_image_grid(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny)
{
    check_sigma(sigma);
    check_resolution(nx, ny);
    const auto fp = finite_pairs(dgm, k);
    double b_lo = 0.0, b_hi = 0.0, p_hi = 1.0;
    if (!fp.pairs.empty()) {
        b_lo = kInfinity;
        b_hi = -kInfinity;
        p_hi = 0.0;
        for (const auto& [b, d] : fp.pairs) {
            b_lo = std::min(b_lo, b);
            b_hi = std::max(b_hi, b);
            p_hi = std::max(p_hi, d - b);
        }
    }
    return {b_lo - 3.0 * sigma, b_hi + 3.0 * sigma, 0.0, p_hi + 3.0 * sigma, nx, ny};
}

double heat_value(const PersistenceDiagram& dgm, int k, double sigma, double x, double y)
{
    check_sigma(sigma);
    double acc = 0.0;
    for (const auto& [b, d] : finite_pairs(dgm, k).pairs)
        acc += gaussian(x - b, y - d, sigma) - gaussian(x - d, y - b, sigma);
    return acc;
}

DiagramImage heat_surface(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny,
                          std::optional<RasterGrid> grid)
{
    check_sigma(sigma);
    check_resolution(nx, ny);
    const auto fp = finite_pairs(dgm, k);
    DiagramImage img;
    img.grid = grid.value_or(default_heat_grid(dgm, k, sigma, nx, ny));
    img.sigma = sigma;
    img.dim = k;
    img.substituted = fp.substituted;
    img.values.assign(img.grid.nx * img.grid.ny, 0.0);
    for (std::size_t j = 0; j < img.grid.ny; ++j) {
        const double y = img.grid.y_center(j);
        for (std::size_t i = 0; i < img.grid.nx; ++i) {
            const double x = img.grid.x_center(i);
            double acc = 0.0;
            for (const auto& [b, d] : fp.pairs)
                acc += gaussian(x - b, y - d, sigma) - gaussian(x - d, y - b, sigma);
            img.values[j * img.grid.nx + i] = acc;
        }
    }
    return img;
}

DiagramImage persistence_image(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny,
                               const PersistenceImageOptions& options)
{
    check_sigma(sigma);
    check_resolution(nx, ny);
    const auto fp = finite_pairs(dgm, k);
    DiagramImage img;
    img.grid = options.grid.value_or(default_image_grid(dgm, k, sigma, nx, ny));
    img.sigma = sigma;
    img.dim = k;
    img.substituted = fp.substituted;
    img.values.assign(img.grid.nx * img.grid.ny, 0.0);

    double scale = 0.0;
    for (const auto& [b, d] : fp.pairs)
        scale = std::max(scale, d - b);
    if (options.weight_scale)
        scale = *options.weight_scale;
    auto weight = [scale](double pers) { return scale > 0.0 ? pers / scale : 1.0; };

    for (std::size_t j = 0; j < img.grid.ny; ++j) {
        const double y = img.grid.y_center(j);
        for (std::size_t i = 0; i < img.grid.nx; ++i) {
            const double x = img.grid.x_center(i);
            double acc = 0.0;
            for (const auto& [b, d] : fp.pairs)
                acc += weight(d - b) * gaussian(x - b, y - (d - b), sigma);
            img.values[j * img.grid.nx + i] = acc;
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Curve features and distances

namespace {

std::vector<double> trapezoid_weights(const std::vector<double>& grid)
{
    std::vector<double> w(grid.size(), 0.0);
    if (grid.size() == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double half = 0.5 * (grid[i + 1] - grid[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    return w;
}

} // namespace

std::vector<CurveFeatures> curve_features(const DiagramCurve& curve)
{
    check_grid(curve.grid);
    const auto w = trapezoid_weights(curve.grid);
    std::vector<CurveFeatures> out;
    for (const auto& layer : curve.layers) {
        if (layer.size() != curve.grid.size())
            fail(ErrorCode::InvalidInput, "curve layer length does not match its grid");
        CurveFeatures f;
        const auto it = std::max_element(layer.begin(), layer.end());
        f.max = *it;
        f.argmax = curve.grid[static_cast<std::size_t>(it - layer.begin())];
        if (curve.grid.size() > 1)
            for (std::size_t i = 0; i < layer.size(); ++i)
                f.area += w[i] * layer[i];
        out.push_back(f);
    }
    return out;
}

double lp_curve_distance(const DiagramCurve& a, const DiagramCurve& b, double p)
{
    if (a.grid != b.grid)
        fail(ErrorCode::InvalidInput, "curves are sampled on different grids", "grid");
    if (a.layers.size() != b.layers.size())
        fail(ErrorCode::InvalidInput, "curves have different layer counts", "layers");
    if (!(p >= 1.0))
        fail(ErrorCode::InvalidInput, "p must be at least 1", "p");
    check_grid(a.grid);

    const bool sup = std::isinf(p);
    const auto w = trapezoid_weights(a.grid);
    double acc = 0.0;
    for (std::size_t layer = 0; layer < a.layers.size(); ++layer) {
        if (a.layers[layer].size() != a.grid.size() || b.layers[layer].size() != a.grid.size())
            fail(ErrorCode::InvalidInput, "curve layer length does not match its grid");
        for (std::size_t i = 0; i < a.grid.size(); ++i) {
            const double gap = std::abs(a.layers[layer][i] - b.layers[layer][i]);
            acc = sup ? std::max(acc, gap) : acc + std::pow(gap, p) * w[i];
        }
    }
    return sup ? acc : std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Scalar features

double persistence_entropy(const PersistenceDiagram& dgm, int k)
{
    std::vector<double> lifetimes;
    double total = 0.0;
    for (const auto& p : dgm.in_dim(k))
        if (!p.essential()) {
            lifetimes.push_back(p.persistence());
            total += p.persistence();
        }
    if (lifetimes.empty() || total <= 0.0)
        return 0.0;
    double entropy = 0.0;
    for (double l : lifetimes) {
        const double prob = l / total;
        if (prob > 0.0)
            entropy -= prob * std::log2(prob);
    }
    return entropy;
}

std::size_t count_points(const PersistenceDiagram& dgm, int k)
{
    const auto& pairs = dgm.pairs();
    return static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [k](const PersistencePair& p) { return p.dim == k; }));
}

AmplitudeMetric parse_amplitude_metric(const std::string& name)
{
    if (name == "bottleneck")
        return AmplitudeMetric::Bottleneck;
    if (name == "wasserstein")
        return AmplitudeMetric::Wasserstein;
    if (name == "landscape")
        return AmplitudeMetric::Landscape;
    if (name == "betti")
        return AmplitudeMetric::Betti;
    if (name == "heat")
        return AmplitudeMetric::Heat;
    fail(ErrorCode::InvalidInput, "unknown amplitude metric '" + name + "'", "metric");
}

double amplitude(const PersistenceDiagram& dgm, int k, const AmplitudeSpec& spec)
{
    const PersistenceDiagram empty;
    switch (spec.metric) {
    case AmplitudeMetric::Bottleneck:
        return bottleneck_distance(dgm, empty, k);
    case AmplitudeMetric::Wasserstein:
        return wasserstein_distance(dgm, empty, k, spec.p);
    case AmplitudeMetric::Landscape:
    case AmplitudeMetric::Betti: {
        const auto grid = default_grid(dgm, k, spec.n_bins);
        auto curve = spec.metric == AmplitudeMetric::Betti ? betti_curve(dgm, k, grid)
                                                           : persistence_landscape(dgm, k, spec.n_layers, grid);
        auto zero = curve;
        for (auto& layer : zero.layers)
            std::fill(layer.begin(), layer.end(), 0.0);
        return lp_curve_distance(curve, zero, spec.p);
    }
    case AmplitudeMetric::Heat: {
        if (!(spec.p >= 1.0))
            fail(ErrorCode::InvalidInput, "p must be at least 1", "p");
        const auto img = heat_surface(dgm, k, spec.sigma, spec.n_bins, spec.n_bins);
        if (std::isinf(spec.p)) {
            double m = 0.0;
            for (double v : img.values)
                m = std::max(m, std::abs(v));
            return m;
        }
        double acc = 0.0;
        for (double v : img.values)
            acc += std::pow(std::abs(v), spec.p);
        return std::pow(acc * img.grid.cell_area(), 1.0 / spec.p);
    }
    }
    return 0.0;
}

std::vector<std::complex<double>> complex_polynomial(const PersistenceDiagram& dgm, int k, std::size_t n_coefficients)
{
    if (n_coefficients < 1)
        fail(ErrorCode::InvalidInput, "n_coefficients must be at least 1", "n_coefficients");
    std::vector<std::complex<double>> coeffs{1.0};
    for (const auto& [b, d] : finite_pairs(dgm, k).pairs) {
        const std::complex<double> root(b, d);
        coeffs.push_back(0.0);
        for (std::size_t i = coeffs.size() - 1; i > 0; --i)
            coeffs[i] -= root * coeffs[i - 1];
    }
    std::vector<std::complex<double>> out(n_coefficients, 0.0);
    for (std::size_t i = 0; i < n_coefficients && i + 1 < coeffs.size(); ++i)
        out[i] = coeffs[i + 1];
    return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const DiagramCurve& curve)
{
    return {{"grid", curve.grid},
            {"layers", curve.layers},
            {"metadata", {{"dim", curve.dim}, {"infinite_deaths_substituted", curve.substituted}}}};
}

nlohmann::json to_json(const DiagramImage& image)
{
    std::vector<double> xs(image.grid.nx), ys(image.grid.ny);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = image.grid.x_center(i);
    for (std::size_t j = 0; j < ys.size(); ++j)
        ys[j] = image.grid.y_center(j);
    auto rows = nlohmann::json::array();
    for (std::size_t j = 0; j < image.grid.ny; ++j)
        rows.push_back(std::vector<double>(image.values.begin() + static_cast<std::ptrdiff_t>(j * image.grid.nx),
                                           image.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * image.grid.nx)));
    return {{"grid",
             {{"x", xs},
              {"y", ys},
              {"x_range", {image.grid.x_min, image.grid.x_max}},
              {"y_range", {image.grid.y_min, image.grid.y_max}}}},
            {"values", std::move(rows)},
            {"sigma", image.sigma},
            {"metadata", {{"dim", image.dim}, {"infinite_deaths_substituted", image.substituted}}}};
}

nlohmann::json to_json(const std::vector<CurveFeatures>& features)
{
    auto out = nlohmann::json::array();
    for (const auto& f : features)
        out.push_back({{"max", f.max}, {"argmax", f.argmax}, {"area", f.area}});
    return out;
}

} // namespace toposcope::diagram
