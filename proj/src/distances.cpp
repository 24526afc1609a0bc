#include "toposcope/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace toposcope::diagram {

namespace {

struct SplitDiagram {
    std::vector<std::pair<double, double>> finite;
    std::vector<double> essential_births; // sorted
};

SplitDiagram split(const PersistenceDiagram& dgm, int k)
{
    SplitDiagram out;
    for (const auto& p : dgm.in_dim(k)) {
        if (p.essential())
            out.essential_births.push_back(p.birth);
        else
            out.finite.emplace_back(p.birth, p.death);
    }
    std::sort(out.essential_births.begin(), out.essential_births.end());
    return out;
}

double linf(const std::pair<double, double>& a, const std::pair<double, double>& b)
{
    return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
}

double to_diagonal(const std::pair<double, double>& a)
{
    return (a.second - a.first) / 2.0;
}

// Hopcroft-Karp on a bipartite graph with `n` vertices per side.
class BipartiteMatcher {
public:
    explicit BipartiteMatcher(std::size_t n) : n_(n), adj_(n) {}

    void add_edge(std::size_t left, std::size_t right) { adj_[left].push_back(right); }

    std::size_t max_matching()
    {
        match_left_.assign(n_, kFree);
        match_right_.assign(n_, kFree);
        dist_.assign(n_, 0);
        std::size_t matched = 0;
        while (bfs())
            for (std::size_t u = 0; u < n_; ++u)
                if (match_left_[u] == kFree && dfs(u))
                    ++matched;
        return matched;
    }

private:
    static constexpr std::size_t kFree = SIZE_MAX;
    static constexpr std::size_t kUnreached = SIZE_MAX;

    bool bfs()
    {
        std::queue<std::size_t> queue;
        for (std::size_t u = 0; u < n_; ++u) {
            dist_[u] = match_left_[u] == kFree ? 0 : kUnreached;
            if (dist_[u] == 0)
                queue.push(u);
        }
        bool found = false;
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop();
            for (std::size_t v : adj_[u]) {
                const auto w = match_right_[v];
                if (w == kFree)
                    found = true;
                else if (dist_[w] == kUnreached) {
                    dist_[w] = dist_[u] + 1;
                    queue.push(w);
                }
            }
        }
        return found;
    }

    bool dfs(std::size_t u)
    {
        for (std::size_t v : adj_[u]) {
            const auto w = match_right_[v];
            if (w == kFree || (dist_[w] == dist_[u] + 1 && dfs(w))) {
                match_left_[u] = v;
                match_right_[v] = u;
                return true;
            }
        }
        dist_[u] = kUnreached;
        return false;
    }

    std::size_t n_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> match_left_, match_right_, dist_;
};

// Rows: points of A then diagonal copies of B. Columns: points of B then
// diagonal copies of A. A point may only go to its own diagonal projection;
// diagonal copies match each other for free.
bool bottleneck_feasible(const SplitDiagram& a, const SplitDiagram& b, double delta)
{
    const std::size_t n = a.finite.size(), m = b.finite.size();
    BipartiteMatcher matcher(n + m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            if (linf(a.finite[i], b.finite[j]) <= delta)
                matcher.add_edge(i, j);
        if (to_diagonal(a.finite[i]) <= delta)
            matcher.add_edge(i, m + i);
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (to_diagonal(b.finite[j]) <= delta)
            matcher.add_edge(n + j, j);
        for (std::size_t i = 0; i < n; ++i)
            matcher.add_edge(n + j, m + i);
    }
    return matcher.max_matching() == n + m;
}

// Kuhn-Munkres for a square cost matrix; returns the column of each row.
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n)
{
    const double inf = kInfinity;
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j)
        if (p[j] != 0)
            row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

} // namespace

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int k)
{
    const auto sa = split(a, k), sb = split(b, k);
    if (sa.essential_births.size() != sb.essential_births.size())
        return kInfinity;
    // Sorted order is an optimal bottleneck matching on the line.
    double essential = 0.0;
    for (std::size_t i = 0; i < sa.essential_births.size(); ++i)
        essential = std::max(essential, std::abs(sa.essential_births[i] - sb.essential_births[i]));

    std::vector<double> candidates{0.0};
    for (const auto& p : sa.finite) {
        candidates.push_back(to_diagonal(p));
        for (const auto& q : sb.finite)
            candidates.push_back(linf(p, q));
    }
    for (const auto& q : sb.finite)
        candidates.push_back(to_diagonal(q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Matching everything to the diagonal is always feasible at the largest
    // candidate, so the search terminates inside the candidate set.
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (bottleneck_feasible(sa, sb, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return std::max(essential, candidates[lo]);
}

double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int k, double q)
{
    if (!(q >= 1.0) || std::isinf(q))
        fail(ErrorCode::InvalidInput, "Wasserstein order q must be finite and at least 1", "q");
    const auto sa = split(a, k), sb = split(b, k);
    if (sa.essential_births != sb.essential_births)
        return kInfinity;

    const std::size_t n = sa.finite.size(), m = sb.finite.size();
    const std::size_t size = n + m;
    if (size == 0)
        return 0.0;

    std::vector<double> diag_a(n), diag_b(m);
    double forbidden = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag_a[i] = std::pow(to_diagonal(sa.finite[i]), q);
        forbidden += 2.0 * diag_a[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
        diag_b[j] = std::pow(to_diagonal(sb.finite[j]), q);
        forbidden += 2.0 * diag_b[j];
    }

    // Same layout as the bottleneck graph. `forbidden` exceeds the all-to-
    // diagonal matching, so no optimal assignment uses a forbidden cell.
    std::vector<double> cost(size * size, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            cost[i * size + j] = std::pow(linf(sa.finite[i], sb.finite[j]), q);
        for (std::size_t i2 = 0; i2 < n; ++i2)
            cost[i * size + m + i2] = i2 == i ? diag_a[i] : forbidden;
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t j2 = 0; j2 < m; ++j2)
            cost[(n + j) * size + j2] = j2 == j ? diag_b[j] : forbidden;

    const auto assignment = hungarian(cost, size);
    double total = 0.0;
    for (std::size_t r = 0; r < size; ++r)
        total += cost[r * size + assignment[r]];
    return std::pow(total, 1.0 / q);
}

} // namespace toposcope::diagram
