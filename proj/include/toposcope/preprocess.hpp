#pragma once

#include "toposcope/core.hpp"

#include <cstddef>
#include <vector>

namespace toposcope::preprocess {

/// Uniformly sampled series; `channels` values per time step, row-major.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(std::vector<double> values, std::size_t channels = 1);
    static TimeSeries from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t length() const noexcept { return channels_ == 0 ? 0 : values_.size() / channels_; }
    std::size_t channels() const noexcept { return channels_; }
    double operator()(std::size_t t, std::size_t channel = 0) const { return values_[t * channels_ + channel]; }
    std::vector<double> channel(std::size_t c) const;
    std::span<const double> values() const noexcept { return values_; }

    /// Steps [begin, begin + count).
    TimeSeries slice(std::size_t begin, std::size_t count) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
    std::size_t channels_ = 1;
};

struct WindowBatch {
    std::vector<TimeSeries> windows;
    std::size_t size = 0;
    std::size_t stride = 1;
};

WindowBatch sliding_window(const TimeSeries& ts, std::size_t size, std::size_t stride);

/// Delay-coordinate map of a univariate series.
PointCloud takens_embedding(const TimeSeries& ts, std::size_t dimension, std::size_t delay, std::size_t stride = 1);

/// Channel-by-channel 1 - Pearson correlation. Throws DegenerateChannel for a
/// constant channel.
DistanceMatrix pearson_dissimilarity(const TimeSeries& window);

/// Directed graph of transitions between equal-width value bins. Vertices are
/// the occupied bins renumbered in increasing bin order.
WeightedGraph transition_graph(const TimeSeries& ts, std::size_t n_states);

GrayImage binarize_image(const GrayImage& img, double threshold);

GrayImage height_filtration(const GrayImage& binary, std::span<const double> direction);

PointCloud image_to_point_cloud(const GrayImage& binary);

/// All-pairs shortest paths on the symmetrized graph; unreachable pairs get
/// (sum of edge weights) + 1.
DistanceMatrix graph_geodesic(const WeightedGraph& g);

} // namespace toposcope::preprocess
