#include "toposcope/core.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace toposcope {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DegenerateChannel: return "DegenerateChannel";
    case ErrorCode::InvalidFiltration: return "InvalidFiltration";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// PointCloud

PointCloud::PointCloud(std::vector<double> coords, std::size_t n, std::size_t d)
    : coords_(std::move(coords)), n_(n), d_(d)
{
    if (n_ > 0 && d_ == 0)
        fail(ErrorCode::InvalidInput, "point cloud dimension must be at least 1");
    if (coords_.size() != n_ * d_)
        fail(ErrorCode::InvalidInput, "point cloud buffer size does not match n * d");
    for (double x : coords_)
        if (!std::isfinite(x))
            fail(ErrorCode::InvalidInput, "point cloud coordinates must be finite");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty())
        return {};
    const std::size_t d = rows.front().size();
    std::vector<double> coords;
    coords.reserve(rows.size() * d);
    for (const auto& row : rows) {
        if (row.size() != d)
            fail(ErrorCode::InvalidInput, "all points must have the same dimension");
        coords.insert(coords.end(), row.begin(), row.end());
    }
    return PointCloud(std::move(coords), rows.size(), d);
}

PointCloud PointCloud::select(std::span<const std::size_t> indices) const
{
    std::vector<double> coords;
    coords.reserve(indices.size() * d_);
    for (std::size_t i : indices) {
        auto p = point(i);
        coords.insert(coords.end(), p.begin(), p.end());
    }
    return PointCloud(std::move(coords), indices.size(), d_);
}

// ---------------------------------------------------------------------------
// DistanceMatrix

DistanceMatrix::DistanceMatrix(std::vector<double> entries, std::size_t n)
    : entries_(std::move(entries)), n_(n)
{
    if (entries_.size() != n_ * n_)
        fail(ErrorCode::InvalidInput, "distance matrix must be square");
    for (std::size_t i = 0; i < n_; ++i) {
        if (entries_[i * n_ + i] != 0.0)
            fail(ErrorCode::InvalidInput, "distance matrix diagonal must be zero");
        for (std::size_t j = 0; j < n_; ++j) {
            const double x = entries_[i * n_ + j];
            if (!std::isfinite(x) || x < 0.0)
                fail(ErrorCode::InvalidInput, "distance matrix entries must be finite and non-negative");
            if (std::abs(x - entries_[j * n_ + i]) > 1e-12)
                fail(ErrorCode::InvalidInput, "distance matrix must be symmetric");
        }
    }
}

double DistanceMatrix::max_entry() const
{
    return entries_.empty() ? 0.0 : *std::max_element(entries_.begin(), entries_.end());
}

Metric parse_metric(const std::string& name)
{
    if (name == "euclidean")
        return Metric::Euclidean;
    if (name == "manhattan")
        return Metric::Manhattan;
    if (name == "chebyshev")
        return Metric::Chebyshev;
    fail(ErrorCode::InvalidInput, "unknown metric '" + name + "'", "metric");
}

const char* to_string(Metric metric)
{
    switch (metric) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Manhattan: return "manhattan";
    case Metric::Chebyshev: return "chebyshev";
    }
    return "euclidean";
}

namespace {

double distance(std::span<const double> a, std::span<const double> b, Metric metric)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = std::abs(a[k] - b[k]);
        switch (metric) {
        case Metric::Euclidean: acc += diff * diff; break;
        case Metric::Manhattan: acc += diff; break;
        case Metric::Chebyshev: acc = std::max(acc, diff); break;
        }
    }
    return metric == Metric::Euclidean ? std::sqrt(acc) : acc;
}

} // namespace

DistanceMatrix pairwise_distances(const PointCloud& pc, Metric metric)
{
    if (pc.empty())
        fail(ErrorCode::InvalidInput, "cannot compute distances of an empty point cloud");
    const std::size_t n = pc.size();
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = distance(pc.point(i), pc.point(j), metric);
            entries[i * n + j] = dist;
            entries[j * n + i] = dist;
        }
    return DistanceMatrix(std::move(entries), n);
}

// ---------------------------------------------------------------------------
// FilteredComplex

void FilteredComplex::reserve(std::size_t simplices, std::size_t vertex_slots)
{
    values_.reserve(simplices);
    offsets_.reserve(simplices + 1);
    vertices_.reserve(vertex_slots);
}

void FilteredComplex::add(std::span<const int> vertices, double value)
{
    const std::size_t start = vertices_.size();
    vertices_.insert(vertices_.end(), vertices.begin(), vertices.end());
    std::sort(vertices_.begin() + static_cast<std::ptrdiff_t>(start), vertices_.end());
    offsets_.push_back(vertices_.size());
    values_.push_back(value);
}

void FilteredComplex::add(std::initializer_list<int> vertices, double value)
{
    add(std::span<const int>(vertices.begin(), vertices.size()), value);
}

int FilteredComplex::max_dim() const noexcept
{
    int best = -1;
    for (std::size_t i = 0; i < size(); ++i)
        best = std::max(best, static_cast<int>(offsets_[i + 1] - offsets_[i]) - 1);
    return best;
}

// ---------------------------------------------------------------------------
// PersistenceDiagram

std::optional<std::string> validate_diagram(std::span<const PersistencePair> pairs)
{
    for (const auto& p : pairs) {
        if (p.dim < 0)
            return "negative homology dimension";
        if (!std::isfinite(p.birth))
            return "birth must be finite";
        if (std::isnan(p.death) || p.death == -kInfinity)
            return "death must be a real number or +infinity";
        if (p.death < p.birth)
            return "death < birth";
        if (p.death == p.birth)
            return "zero persistence pair stored";
    }
    return std::nullopt;
}

namespace {

bool canonical_less(const PersistencePair& a, const PersistencePair& b)
{
    return std::tie(a.dim, a.birth, a.death) < std::tie(b.dim, b.birth, b.death);
}

} // namespace

PersistenceDiagram::PersistenceDiagram(std::vector<PersistencePair> pairs)
{
    std::erase_if(pairs, [](const PersistencePair& p) { return p.death == p.birth; });
    if (auto violation = validate_diagram(pairs))
        fail(ErrorCode::InvalidInput, "invalid persistence diagram: " + *violation);
    std::sort(pairs.begin(), pairs.end(), canonical_less);
    pairs_ = std::move(pairs);
}

std::vector<PersistencePair> PersistenceDiagram::in_dim(int k) const
{
    std::vector<PersistencePair> out;
    for (const auto& p : pairs_)
        if (p.dim == k)
            out.push_back(p);
    return out;
}

PersistenceDiagram PersistenceDiagram::truncated(int max_dim) const
{
    PersistenceDiagram out;
    for (const auto& p : pairs_)
        if (p.dim <= max_dim)
            out.pairs_.push_back(p);
    return out;
}

// ---------------------------------------------------------------------------
// GrayImage

GrayImage::GrayImage(std::vector<double> pixels, std::size_t rows, std::size_t cols)
    : pixels_(std::move(pixels)), rows_(rows), cols_(cols)
{
    if (rows_ == 0 || cols_ == 0)
        fail(ErrorCode::InvalidInput, "image must have at least one row and one column");
    if (pixels_.size() != rows_ * cols_)
        fail(ErrorCode::InvalidInput, "image buffer size does not match rows * cols");
    for (double x : pixels_)
        if (!std::isfinite(x))
            fail(ErrorCode::InvalidInput, "image intensities must be finite");
}

GrayImage GrayImage::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty())
        fail(ErrorCode::InvalidInput, "image must have at least one row");
    const std::size_t cols = rows.front().size();
    std::vector<double> pixels;
    pixels.reserve(rows.size() * cols);
    for (const auto& row : rows) {
        if (row.size() != cols)
            fail(ErrorCode::InvalidInput, "image rows must have equal length");
        pixels.insert(pixels.end(), row.begin(), row.end());
    }
    return GrayImage(std::move(pixels), rows.size(), cols);
}

// ---------------------------------------------------------------------------
// WeightedGraph

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges, bool directed)
    : n_(n), edges_(std::move(edges)), directed_(directed)
{
    for (const auto& e : edges_) {
        if (e.u >= n_ || e.v >= n_)
            fail(ErrorCode::InvalidInput, "edge endpoint out of range");
        if (e.u == e.v)
            fail(ErrorCode::InvalidInput, "self-loop edges are not allowed");
        if (!std::isfinite(e.weight) || e.weight < 0.0)
            fail(ErrorCode::InvalidInput, "edge weights must be finite and non-negative");
    }
}

WeightedGraph WeightedGraph::symmetrized() const
{
    std::vector<Edge> sorted;
    sorted.reserve(edges_.size());
    for (const auto& e : edges_)
        sorted.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
    std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.u, a.v, a.weight) < std::tie(b.u, b.v, b.weight);
    });
    std::vector<Edge> out;
    for (const auto& e : sorted)
        if (out.empty() || out.back().u != e.u || out.back().v != e.v)
            out.push_back(e);
    return WeightedGraph(n_, std::move(out), false);
}

} // namespace toposcope
