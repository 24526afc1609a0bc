#include "toposcope/homology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace toposcope::homology {

namespace {

struct CliqueCollector {
    const DistanceMatrix& dm;
    const std::vector<std::vector<int>>& upper_neighbors;
    std::size_t max_vertices;

    std::vector<int> vertices; // flat tuples
    std::vector<std::size_t> starts;
    std::vector<double> values;
    std::vector<int> stack;
    std::vector<std::vector<int>> candidates_at; // one buffer per depth

    void record(double value)
    {
        starts.push_back(vertices.size());
        vertices.insert(vertices.end(), stack.begin(), stack.end());
        values.push_back(value);
    }

    // candidates_at[depth] holds vertices greater than the top of the stack
    // and within max_edge of every vertex on it.
    void extend(std::size_t depth, double value)
    {
        record(value);
        if (stack.size() == max_vertices)
            return;
        const auto& candidates = candidates_at[depth];
        auto& next = candidates_at[depth + 1];
        for (int v : candidates) {
            double v_value = value;
            for (int u : stack)
                v_value = std::max(v_value, dm(static_cast<std::size_t>(u), static_cast<std::size_t>(v)));
            next.clear();
            if (stack.size() + 1 < max_vertices) {
                const auto& nv = upper_neighbors[static_cast<std::size_t>(v)];
                std::set_intersection(candidates.begin(), candidates.end(), nv.begin(), nv.end(),
                                      std::back_inserter(next));
            }
            stack.push_back(v);
            extend(depth + 1, v_value);
            stack.pop_back();
        }
    }
};

} // namespace

FilteredComplex build_vr_filtration(const DistanceMatrix& dm, int max_dim, double max_edge)
{
    if (max_dim < 0)
        fail(ErrorCode::InvalidInput, "max_dim must be non-negative", "max_dim");
    if (std::isnan(max_edge) || max_edge < 0.0)
        fail(ErrorCode::InvalidInput, "max_edge must be non-negative", "max_edge");

    const std::size_t n = dm.size();
    std::vector<std::vector<int>> upper(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (dm(i, j) <= max_edge)
                upper[i].push_back(static_cast<int>(j));

    CliqueCollector collect{dm, upper, static_cast<std::size_t>(max_dim) + 1, {}, {}, {}, {}, {}};
    collect.candidates_at.resize(static_cast<std::size_t>(max_dim) + 2);
    for (std::size_t v = 0; v < n; ++v) {
        collect.stack.assign(1, static_cast<int>(v));
        collect.candidates_at[0] = upper[v];
        collect.extend(0, 0.0);
    }
    collect.starts.push_back(collect.vertices.size());

    const std::size_t count = collect.values.size();
    auto tuple = [&](std::size_t i) {
        return std::span<const int>(collect.vertices.data() + collect.starts[i], collect.starts[i + 1] - collect.starts[i]);
    };
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (collect.values[a] != collect.values[b])
            return collect.values[a] < collect.values[b];
        const auto ta = tuple(a), tb = tuple(b);
        if (ta.size() != tb.size())
            return ta.size() < tb.size();
        return std::lexicographical_compare(ta.begin(), ta.end(), tb.begin(), tb.end());
    });

    FilteredComplex fc;
    fc.reserve(count, collect.vertices.size());
    for (std::size_t i : order)
        fc.add(tuple(i), collect.values[i]);
    return fc;
}

PersistenceDiagram vr_persistence(const DistanceMatrix& dm, int max_dim, std::optional<double> max_edge)
{
    if (max_dim < 0)
        fail(ErrorCode::InvalidInput, "max_dim must be non-negative", "max_dim");
    const double edge = max_edge.value_or(dm.max_entry());
    // Simplices one dimension up are needed to kill the top reported classes.
    const auto fc = build_vr_filtration(dm, max_dim + 1, edge);
    return reduce_filtration(fc).truncated(max_dim);
}

PersistenceDiagram vr_persistence(const PointCloud& pc, const VrOptions& options)
{
    return vr_persistence(pairwise_distances(pc, options.metric), options.max_dim, options.max_edge);
}

} // namespace toposcope::homology
