#include "toposcope/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace toposcope::preprocess {

TimeSeries::TimeSeries(std::vector<double> values, std::size_t channels)
    : values_(std::move(values)), channels_(channels)
{
    if (channels_ == 0)
        fail(ErrorCode::InvalidInput, "time series needs at least one channel");
    if (values_.empty())
        fail(ErrorCode::InvalidInput, "time series must have at least one sample");
    if (values_.size() % channels_ != 0)
        fail(ErrorCode::InvalidInput, "time series buffer is not a whole number of steps");
    for (double x : values_)
        if (!std::isfinite(x))
            fail(ErrorCode::InvalidInput, "time series values must be finite");
}

TimeSeries TimeSeries::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty())
        fail(ErrorCode::InvalidInput, "time series must have at least one sample");
    const std::size_t channels = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * channels);
    for (const auto& row : rows) {
        if (row.size() != channels)
            fail(ErrorCode::InvalidInput, "every time step must have the same number of channels");
        values.insert(values.end(), row.begin(), row.end());
    }
    return TimeSeries(std::move(values), channels);
}

std::vector<double> TimeSeries::channel(std::size_t c) const
{
    std::vector<double> out(length());
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = (*this)(t, c);
    return out;
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t count) const
{
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(begin * channels_);
    return TimeSeries(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * channels_)), channels_);
}

WindowBatch sliding_window(const TimeSeries& ts, std::size_t size, std::size_t stride)
{
    if (size < 1)
        fail(ErrorCode::InvalidInput, "window size must be at least 1", "size");
    if (stride < 1)
        fail(ErrorCode::InvalidInput, "window stride must be at least 1", "stride");
    if (size > ts.length())
        fail(ErrorCode::InvalidInput, "window size exceeds series length", "size");

    WindowBatch batch{{}, size, stride};
    for (std::size_t i = 0; i + size <= ts.length(); i += stride)
        batch.windows.push_back(ts.slice(i, size));
    return batch;
}

PointCloud takens_embedding(const TimeSeries& ts, std::size_t dimension, std::size_t delay, std::size_t stride)
{
    if (ts.channels() != 1)
        fail(ErrorCode::InvalidInput, "Takens embedding needs a univariate series");
    if (dimension < 1)
        fail(ErrorCode::InvalidInput, "embedding dimension must be at least 1", "dimension");
    if (delay < 1)
        fail(ErrorCode::InvalidInput, "embedding delay must be at least 1", "delay");
    if (stride < 1)
        fail(ErrorCode::InvalidInput, "embedding stride must be at least 1", "stride");
    const std::size_t span = (dimension - 1) * delay;
    if (ts.length() < span + 1)
        fail(ErrorCode::InvalidInput, "series too short for the requested embedding");

    const std::size_t count = (ts.length() - span - 1) / stride + 1;
    std::vector<double> coords;
    coords.reserve(count * dimension);
    for (std::size_t j = 0; j < count; ++j)
        for (std::size_t k = 0; k < dimension; ++k)
            coords.push_back(ts(j * stride + k * delay));
    return PointCloud(std::move(coords), count, dimension);
}

DistanceMatrix pearson_dissimilarity(const TimeSeries& window)
{
    const std::size_t c = window.channels();
    if (c < 2)
        fail(ErrorCode::InvalidInput, "Pearson dissimilarity needs at least two channels");
    const std::size_t len = window.length();

    // Centered, unit-norm channels; r is then a plain dot product.
    std::vector<std::vector<double>> z(c);
    for (std::size_t ch = 0; ch < c; ++ch) {
        auto x = window.channel(ch);
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(len);
        double ss = 0.0;
        for (double& v : x) {
            v -= mean;
            ss += v * v;
        }
        if (ss == 0.0)
            fail(ErrorCode::DegenerateChannel, "channel " + std::to_string(ch) + " has zero variance");
        const double norm = std::sqrt(ss);
        for (double& v : x)
            v /= norm;
        z[ch] = std::move(x);
    }

    std::vector<double> entries(c * c, 0.0);
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = i + 1; j < c; ++j) {
            double r = std::inner_product(z[i].begin(), z[i].end(), z[j].begin(), 0.0);
            r = std::clamp(r, -1.0, 1.0);
            entries[i * c + j] = entries[j * c + i] = 1.0 - r;
        }
    return DistanceMatrix(std::move(entries), c);
}

WeightedGraph transition_graph(const TimeSeries& ts, std::size_t n_states)
{
    if (n_states < 1)
        fail(ErrorCode::InvalidInput, "n_states must be at least 1", "n_states");
    if (ts.channels() != 1)
        fail(ErrorCode::InvalidInput, "transition graph needs a univariate series");

    const auto values = ts.channel(0);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    auto bin_of = [&](double x) -> std::size_t {
        if (hi == lo)
            return 0;
        const auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(n_states));
        return std::min(b, n_states - 1);
    };

    std::vector<std::size_t> bins(values.size());
    std::transform(values.begin(), values.end(), bins.begin(), bin_of);

    std::vector<std::size_t> occupied(bins);
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
    auto vertex_of = [&](std::size_t bin) {
        return static_cast<std::size_t>(std::lower_bound(occupied.begin(), occupied.end(), bin) - occupied.begin());
    };

    std::map<std::pair<std::size_t, std::size_t>, double> counts;
    for (std::size_t t = 0; t + 1 < bins.size(); ++t)
        if (bins[t] != bins[t + 1])
            counts[{vertex_of(bins[t]), vertex_of(bins[t + 1])}] += 1.0;

    std::vector<Edge> edges;
    for (const auto& [uv, w] : counts)
        edges.push_back({uv.first, uv.second, w});
    return WeightedGraph(occupied.size(), std::move(edges), true);
}

GrayImage binarize_image(const GrayImage& img, double threshold)
{
    std::vector<double> out(img.pixels().size());
    std::transform(img.pixels().begin(), img.pixels().end(), out.begin(),
                   [threshold](double x) { return x >= threshold ? 1.0 : 0.0; });
    return GrayImage(std::move(out), img.rows(), img.cols());
}

namespace {

void require_binary(const GrayImage& img)
{
    for (double x : img.pixels())
        if (x != 0.0 && x != 1.0)
            fail(ErrorCode::InvalidInput, "image must be binary (entries in {0,1})");
}

} // namespace

GrayImage height_filtration(const GrayImage& binary, std::span<const double> direction)
{
    require_binary(binary);
    if (direction.size() != 2)
        fail(ErrorCode::InvalidInput, "height direction must be 2-dimensional for images", "direction");
    const double norm = std::hypot(direction[0], direction[1]);
    if (std::abs(norm - 1.0) > 1e-9)
        fail(ErrorCode::InvalidInput, "height direction must be a unit vector", "direction");

    double lo = kInfinity, hi = -kInfinity;
    std::vector<double> heights(binary.pixels().size());
    for (std::size_t r = 0; r < binary.rows(); ++r)
        for (std::size_t c = 0; c < binary.cols(); ++c) {
            const double h = static_cast<double>(r) * direction[0] + static_cast<double>(c) * direction[1];
            heights[r * binary.cols() + c] = h;
            if (binary(r, c) == 1.0) {
                lo = std::min(lo, h);
                hi = std::max(hi, h);
            }
        }
    if (lo == kInfinity)
        fail(ErrorCode::InvalidInput, "height filtration of an image with no active pixels");

    const double fill = hi - lo + 1.0;
    for (std::size_t i = 0; i < heights.size(); ++i)
        heights[i] = binary.pixels()[i] == 1.0 ? heights[i] - lo : fill;
    return GrayImage(std::move(heights), binary.rows(), binary.cols());
}

PointCloud image_to_point_cloud(const GrayImage& binary)
{
    require_binary(binary);
    std::vector<double> coords;
    for (std::size_t r = 0; r < binary.rows(); ++r)
        for (std::size_t c = 0; c < binary.cols(); ++c)
            if (binary(r, c) == 1.0) {
                coords.push_back(static_cast<double>(r));
                coords.push_back(static_cast<double>(c));
            }
    if (coords.empty())
        fail(ErrorCode::InvalidInput, "image has an empty foreground");
    const std::size_t n = coords.size() / 2;
    return PointCloud(std::move(coords), n, 2);
}

DistanceMatrix graph_geodesic(const WeightedGraph& g)
{
    const auto sym = g.symmetrized();
    const std::size_t n = sym.size();
    double total = 0.0;
    for (const auto& e : sym.edges())
        total += e.weight;
    const double cap = total + 1.0;

    std::vector<double> d(n * n, kInfinity);
    for (std::size_t i = 0; i < n; ++i)
        d[i * n + i] = 0.0;
    for (const auto& e : sym.edges()) {
        d[e.u * n + e.v] = std::min(d[e.u * n + e.v], e.weight);
        d[e.v * n + e.u] = d[e.u * n + e.v];
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const double dik = d[i * n + k];
            if (dik == kInfinity)
                continue;
            for (std::size_t j = 0; j < n; ++j)
                d[i * n + j] = std::min(d[i * n + j], dik + d[k * n + j]);
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            // Reversed paths may round differently; keep the upper triangle.
            const double x = d[i * n + j] == kInfinity ? cap : d[i * n + j];
            d[i * n + j] = d[j * n + i] = x;
        }
    return DistanceMatrix(std::move(d), n);
}

} // namespace toposcope::preprocess
