#pragma once

#include "toposcope/core.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace toposcope::homology {

/// Z/2 boundary matrix in filtration order, columns in CSR form with face
/// indices ascending. Both simplicial and cubical complexes reduce through it.
struct BoundaryMatrix {
    std::vector<double> values;
    std::vector<int> dims;
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> faces;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const std::uint32_t> column(std::size_t j) const
    {
        return {faces.data() + offsets[j], offsets[j + 1] - offsets[j]};
    }
};

/// Converts a simplicial filtration into its boundary matrix, checking the
/// FilteredComplex invariants. Throws InvalidFiltration on a missing or late
/// face, a duplicate simplex, a repeated vertex, or a decreasing value.
BoundaryMatrix boundary_matrix(const FilteredComplex& fc);

/// Outcome of column reduction with clearing.
class ReductionState {
public:
    explicit ReductionState(const BoundaryMatrix& boundary);

    /// (birth index, death index) pivot pairs, in order of discovery.
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs() const noexcept { return pairs_; }
    /// Indices of unpaired positive columns.
    const std::vector<std::uint32_t>& essential() const noexcept { return essential_; }
    /// Reduced column j; empty for zero or cleared columns.
    std::span<const std::uint32_t> reduced(std::size_t j) const;
    std::size_t cleared_count() const noexcept { return cleared_count_; }

    PersistenceDiagram diagram(const BoundaryMatrix& boundary) const;

private:
    std::vector<std::vector<std::uint32_t>> reduced_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
    std::vector<std::uint32_t> essential_;
    std::size_t cleared_count_ = 0;
};

PersistenceDiagram reduce_boundary(const BoundaryMatrix& boundary);

/// All simplices on at most max_dim + 1 vertices whose diameter is at most
/// max_edge, ordered by (value, dimension, vertex tuple).
FilteredComplex build_vr_filtration(const DistanceMatrix& dm, int max_dim, double max_edge);

PersistenceDiagram reduce_filtration(const FilteredComplex& fc);

struct VrOptions {
    Metric metric = Metric::Euclidean;
    /// Highest homology dimension reported.
    int max_dim = 1;
    /// Defaults to the largest pairwise distance.
    std::optional<double> max_edge;
};

PersistenceDiagram vr_persistence(const DistanceMatrix& dm, int max_dim, std::optional<double> max_edge = std::nullopt);
PersistenceDiagram vr_persistence(const PointCloud& pc, const VrOptions& options = {});

/// Cubical complex with pixels as top cells; every lower cell takes the
/// minimum value over its incident pixels.
BoundaryMatrix cubical_boundary_matrix(const GrayImage& img);

/// Sublevel-set persistence of the image, dimensions <= max_dim.
PersistenceDiagram cubical_persistence(const GrayImage& img, int max_dim = 1);

} // namespace toposcope::homology
