#include "toposcope/homology.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace toposcope::homology {

// Cells live on a (2H+1) x (2W+1) lattice: (even, even) are vertices, one odd
// coordinate is an edge, (odd, odd) is pixel (i / 2, j / 2).
BoundaryMatrix cubical_boundary_matrix(const GrayImage& img)
{
    const std::size_t rows = 2 * img.rows() + 1;
    const std::size_t cols = 2 * img.cols() + 1;
    const std::size_t cells = rows * cols;

    std::vector<double> value(cells, kInfinity);
    std::vector<int> dim(cells);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t id = i * cols + j;
            dim[id] = static_cast<int>(i % 2 + j % 2);
            // Incident pixels have odd lattice coordinates within one step.
            for (std::size_t pi = (i == 0 ? 0 : i - 1); pi <= std::min(i + 1, rows - 1); ++pi)
                for (std::size_t pj = (j == 0 ? 0 : j - 1); pj <= std::min(j + 1, cols - 1); ++pj)
                    if (pi % 2 == 1 && pj % 2 == 1)
                        value[id] = std::min(value[id], img(pi / 2, pj / 2));
        }

    std::vector<std::uint32_t> order(cells);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::tie(value[a], dim[a], a) < std::tie(value[b], dim[b], b);
    });
    std::vector<std::uint32_t> position(cells);
    for (std::uint32_t p = 0; p < cells; ++p)
        position[order[p]] = p;

    BoundaryMatrix bm;
    bm.values.reserve(cells);
    bm.dims.reserve(cells);
    std::vector<std::uint32_t> column;
    for (std::uint32_t id : order) {
        const std::size_t i = id / cols, j = id % cols;
        column.clear();
        if (i % 2 == 1) {
            column.push_back(position[(i - 1) * cols + j]);
            column.push_back(position[(i + 1) * cols + j]);
        }
        if (j % 2 == 1) {
            column.push_back(position[i * cols + j - 1]);
            column.push_back(position[i * cols + j + 1]);
        }
        std::sort(column.begin(), column.end());
        bm.values.push_back(value[id]);
        bm.dims.push_back(dim[id]);
        bm.faces.insert(bm.faces.end(), column.begin(), column.end());
        bm.offsets.push_back(static_cast<std::uint32_t>(bm.faces.size()));
    }
    return bm;
}

PersistenceDiagram cubical_persistence(const GrayImage& img, int max_dim)
{
    if (max_dim < 0)
        fail(ErrorCode::InvalidInput, "max_dim must be non-negative", "max_dim");
    return reduce_boundary(cubical_boundary_matrix(img)).truncated(max_dim);
}

} // namespace toposcope::homology
