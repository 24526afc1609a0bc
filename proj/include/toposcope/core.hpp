#pragma once

#include "toposcope/error.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace toposcope {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A finite set of points in R^d, stored row-major.
class PointCloud {
public:
    PointCloud() = default;
    /// Throws InvalidInput if `coords.size() != n * d`, d == 0 with n > 0, or
    /// a coordinate is not finite.
    PointCloud(std::vector<double> coords, std::size_t n, std::size_t d);
    static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }
    bool empty() const noexcept { return n_ == 0; }

    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * d_, d_}; }
    double operator()(std::size_t i, std::size_t axis) const { return coords_[i * d_ + axis]; }
    std::span<const double> coords() const noexcept { return coords_; }

    /// Subset in the order given by `indices`.
    PointCloud select(std::span<const std::size_t> indices) const;

private:
    std::vector<double> coords_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
};

/// Symmetric n x n matrix with zero diagonal and non-negative finite entries.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    /// Validates the invariants (symmetry within 1e-12) and throws InvalidInput.
    DistanceMatrix(std::vector<double> entries, std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    std::span<const double> entries() const noexcept { return entries_; }
    double max_entry() const;

private:
    std::vector<double> entries_;
    std::size_t n_ = 0;
};

enum class Metric { Euclidean, Manhattan, Chebyshev };

Metric parse_metric(const std::string& name);
const char* to_string(Metric metric);

DistanceMatrix pairwise_distances(const PointCloud& pc, Metric metric = Metric::Euclidean);

/// Ordered simplices with filtration values. Vertex tuples are kept in one flat
/// buffer so million-simplex Rips complexes stay cheap to build.
class FilteredComplex {
public:
    struct SimplexView {
        std::span<const int> vertices;
        double value;
        int dim() const noexcept { return static_cast<int>(vertices.size()) - 1; }
    };

    void reserve(std::size_t simplices, std::size_t vertex_slots);
    /// Appends a simplex; the vertex tuple is sorted on insertion. No
    /// invariant checks happen here, reduction validates the whole order.
    void add(std::span<const int> vertices, double value);
    void add(std::initializer_list<int> vertices, double value);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    SimplexView operator[](std::size_t i) const
    {
        return {std::span<const int>(vertices_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]), values_[i]};
    }
    int max_dim() const noexcept;

private:
    std::vector<int> vertices_;
    std::vector<std::size_t> offsets_{0};
    std::vector<double> values_;
};

struct PersistencePair {
    int dim = 0;
    double birth = 0.0;
    double death = kInfinity;

    bool essential() const noexcept { return death == kInfinity; }
    double persistence() const noexcept { return death - birth; }
    friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

/// Returns the first violated diagram invariant, or nullopt when valid.
std::optional<std::string> validate_diagram(std::span<const PersistencePair> pairs);

/// Multiset of (dim, birth, death) pairs in canonical (dim, birth, death) order.
/// Zero-persistence pairs are dropped on construction.
class PersistenceDiagram {
public:
    PersistenceDiagram() = default;
    /// Throws InvalidInput on a pair violating the invariants other than zero
    /// persistence (which is silently dropped).
    explicit PersistenceDiagram(std::vector<PersistencePair> pairs);

    const std::vector<PersistencePair>& pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    bool empty() const noexcept { return pairs_.empty(); }

    /// Pairs of homology dimension k, in canonical order.
    std::vector<PersistencePair> in_dim(int k) const;
    /// Sub-diagram restricted to dimensions <= max_dim.
    PersistenceDiagram truncated(int max_dim) const;

    friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;

private:
    std::vector<PersistencePair> pairs_;
};

/// H x W grid of intensities indexed (row, col).
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(std::vector<double> pixels, std::size_t rows, std::size_t cols);
    static GrayImage from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return pixels_[r * cols_ + c]; }
    std::span<const double> pixels() const noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::vector<double> pixels_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

class WeightedGraph {
public:
    WeightedGraph() = default;
    /// Throws InvalidInput for out-of-range ids, self loops, or negative weights.
    WeightedGraph(std::size_t n, std::vector<Edge> edges, bool directed);

    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool directed() const noexcept { return directed_; }

    /// Undirected version keeping the minimum weight per vertex pair.
    WeightedGraph symmetrized() const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    bool directed_ = false;
};

} // namespace toposcope
