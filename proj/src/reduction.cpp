#include "toposcope/homology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace toposcope::homology {

namespace {

// Binomial coefficients C(v, k) for v <= max_v, k <= max_k, used to give each
// sorted vertex tuple a unique key within its dimension.
class BinomialTable {
public:
    BinomialTable(std::size_t max_v, std::size_t max_k) : k_(max_k + 1), table_((max_v + 1) * k_, 0)
    {
        for (std::size_t v = 0; v <= max_v; ++v) {
            at(v, 0) = 1;
            for (std::size_t k = 1; k <= std::min(v, max_k); ++k) {
                const std::uint64_t a = at(v - 1, k - 1);
                const std::uint64_t b = k <= v - 1 ? at(v - 1, k) : 0;
                std::uint64_t sum;
                if (__builtin_add_overflow(a, b, &sum))
                    fail(ErrorCode::InvalidInput, "complex too large for simplex key encoding");
                at(v, k) = sum;
            }
        }
    }

    std::uint64_t operator()(std::size_t v, std::size_t k) const { return k > v ? 0 : table_[v * k_ + k]; }

private:
    std::uint64_t& at(std::size_t v, std::size_t k) { return table_[v * k_ + k]; }

    std::size_t k_;
    std::vector<std::uint64_t> table_;
};

std::uint64_t simplex_key(std::span<const int> vertices, const BinomialTable& binom, std::size_t skip = SIZE_MAX)
{
    std::uint64_t key = 0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (i == skip)
            continue;
        key += binom(static_cast<std::size_t>(vertices[i]), pos + 1);
        ++pos;
    }
    return key;
}

// Simplex key -> position, dense when the key range is comparable to the
// number of simplices.
class KeyIndex {
public:
    static constexpr std::uint32_t kNone = UINT32_MAX;

    KeyIndex(std::uint64_t key_range, std::size_t expected)
    {
        if (key_range <= std::max<std::uint64_t>(4 * expected, 1u << 20))
            dense_.assign(key_range, kNone);
    }

    std::uint32_t find(std::uint64_t key) const
    {
        if (!dense_.empty())
            return key < dense_.size() ? dense_[key] : kNone;
        const auto it = sparse_.find(key);
        return it == sparse_.end() ? kNone : it->second;
    }

    bool insert(std::uint64_t key, std::uint32_t position)
    {
        if (!dense_.empty()) {
            if (dense_[key] != kNone)
                return false;
            dense_[key] = position;
            return true;
        }
        return sparse_.emplace(key, position).second;
    }

private:
    std::vector<std::uint32_t> dense_;
    std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
};

} // namespace

BoundaryMatrix boundary_matrix(const FilteredComplex& fc)
{
    BoundaryMatrix bm;
    const std::size_t n = fc.size();
    if (n == 0)
        return bm;

    int max_vertex = -1;
    const int max_dim = fc.max_dim();
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = fc[i];
        if (s.vertices.empty())
            fail(ErrorCode::InvalidFiltration, "simplex " + std::to_string(i) + " has no vertices");
        if (!std::isfinite(s.value))
            fail(ErrorCode::InvalidFiltration, "simplex " + std::to_string(i) + " has a non-finite value");
        if (i > 0 && s.value < fc[i - 1].value)
            fail(ErrorCode::InvalidFiltration, "filtration values decrease at simplex " + std::to_string(i));
        if (s.vertices.front() < 0)
            fail(ErrorCode::InvalidFiltration, "negative vertex id in simplex " + std::to_string(i));
        if (std::adjacent_find(s.vertices.begin(), s.vertices.end()) != s.vertices.end())
            fail(ErrorCode::InvalidFiltration, "repeated vertex in simplex " + std::to_string(i));
        max_vertex = std::max(max_vertex, s.vertices.back());
    }

    const auto vertex_count = static_cast<std::size_t>(max_vertex) + 1;
    const BinomialTable binom(vertex_count, static_cast<std::size_t>(max_dim) + 1);
    std::vector<std::size_t> per_dim(static_cast<std::size_t>(max_dim) + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        ++per_dim[static_cast<std::size_t>(fc[i].dim())];
    std::vector<KeyIndex> index_by_dim;
    index_by_dim.reserve(per_dim.size());
    for (std::size_t d = 0; d < per_dim.size(); ++d)
        index_by_dim.emplace_back(binom(vertex_count, d + 1), per_dim[d]);

    bm.values.reserve(n);
    bm.dims.reserve(n);
    bm.offsets.reserve(n + 1);
    std::vector<std::uint32_t> column;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = fc[i];
        const int dim = s.dim();
        column.clear();
        if (dim > 0) {
            const auto& faces = index_by_dim[static_cast<std::size_t>(dim - 1)];
            for (std::size_t r = 0; r < s.vertices.size(); ++r) {
                const auto face = faces.find(simplex_key(s.vertices, binom, r));
                if (face == KeyIndex::kNone)
                    fail(ErrorCode::InvalidFiltration,
                         "simplex " + std::to_string(i) + " is listed before one of its faces");
                column.push_back(face);
            }
            std::sort(column.begin(), column.end());
        }
        if (!index_by_dim[static_cast<std::size_t>(dim)].insert(simplex_key(s.vertices, binom), static_cast<std::uint32_t>(i)))
            fail(ErrorCode::InvalidFiltration, "duplicate simplex at position " + std::to_string(i));

        bm.values.push_back(s.value);
        bm.dims.push_back(dim);
        bm.faces.insert(bm.faces.end(), column.begin(), column.end());
        bm.offsets.push_back(static_cast<std::uint32_t>(bm.faces.size()));
    }
    return bm;
}

namespace {

// Working column over the cells of one dimension, stored as a dense bit set.
// A column's low only ever moves down while it is reduced, so the scan for the
// next low is bounded by the width of the dimension.
class BitColumn {
public:
    explicit BitColumn(std::size_t width) : words_((width + 63) / 64, 0) {}

    void flip(std::uint32_t i)
    {
        auto& w = words_[i >> 6];
        const std::uint64_t bit = std::uint64_t{1} << (i & 63);
        count_ += (w & bit) ? -1 : 1;
        w ^= bit;
    }
    bool empty() const noexcept { return count_ == 0; }

    // Highest set index at or below `from`; the column must be nonempty.
    std::uint32_t low_from(std::uint32_t from) const
    {
        std::size_t word = from >> 6;
        std::uint64_t w = words_[word] & (~std::uint64_t{0} >> (63 - (from & 63)));
        while (w == 0)
            w = words_[--word];
        return static_cast<std::uint32_t>(word * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(w)));
    }

    // Moves the set indices out in ascending order, leaving the column empty.
    void drain(std::uint32_t low, std::vector<std::uint32_t>& out)
    {
        out.clear();
        for (std::size_t word = 0; word <= (low >> 6); ++word)
            while (words_[word] != 0) {
                const int bit = __builtin_ctzll(words_[word]);
                out.push_back(static_cast<std::uint32_t>(word * 64 + static_cast<std::size_t>(bit)));
                words_[word] &= words_[word] - 1;
            }
        count_ = 0;
    }

private:
    std::vector<std::uint64_t> words_;
    long count_ = 0;
};

// Number of positive edges, i.e. dim Z_1 = #edges - rank of the edge
// boundary. Pivots of 2-cell columns are distinct positive edges, so once this
// many have been found every remaining 2-cell column reduces to zero.
std::size_t cycle_rank(const BoundaryMatrix& boundary, const std::vector<std::uint32_t>& edges)
{
    std::vector<std::uint32_t> parent(boundary.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t merges = 0;
    for (std::uint32_t e : edges) {
        const auto col = boundary.column(e);
        if (col.size() != 2)
            return edges.size();
        const auto a = find(col[0]), b = find(col[1]);
        if (a != b) {
            parent[a] = b;
            ++merges;
        }
    }
    return edges.size() - merges;
}

} // namespace

ReductionState::ReductionState(const BoundaryMatrix& boundary) : reduced_(boundary.size())
{
    const std::size_t n = boundary.size();
    if (n == 0)
        return;

    const int max_dim = *std::max_element(boundary.dims.begin(), boundary.dims.end());
    std::vector<std::vector<std::uint32_t>> by_dim(static_cast<std::size_t>(max_dim) + 1);
    std::vector<std::uint32_t> local(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto& cells = by_dim[static_cast<std::size_t>(boundary.dims[j])];
        local[j] = static_cast<std::uint32_t>(cells.size());
        cells.push_back(static_cast<std::uint32_t>(j));
    }

    constexpr std::uint32_t kNone = UINT32_MAX;
    std::vector<std::uint32_t> pivot_owner(n, kNone);
    std::vector<char> cleared(n, 0);
    std::vector<char> paired(n, 0);

    // Highest dimension first: every pivot found in dimension d clears the
    // column of its low simplex in dimension d - 1, which is then skipped.
    // Reduced columns are held in face-local indices while reducing.
    std::vector<std::uint32_t> drained;
    for (int d = max_dim; d >= 1; --d) {
        const auto& faces = by_dim[static_cast<std::size_t>(d - 1)];
        BitColumn work(faces.size());
        const std::size_t capacity = d == 2 ? cycle_rank(boundary, faces) : SIZE_MAX;
        std::size_t found = 0;
        for (std::uint32_t j : by_dim[static_cast<std::size_t>(d)]) {
            if (found == capacity)
                break;
            if (cleared[j]) {
                ++cleared_count_;
                continue;
            }
            std::uint32_t low = 0;
            for (std::uint32_t f : boundary.column(j)) {
                work.flip(local[f]);
                low = std::max(low, local[f]);
            }
            while (!work.empty()) {
                low = work.low_from(low);
                const std::uint32_t owner = pivot_owner[faces[low]];
                if (owner == kNone)
                    break;
                for (std::uint32_t f : reduced_[owner])
                    work.flip(f);
            }
            if (work.empty())
                continue;
            work.drain(low, drained);
            const std::uint32_t birth = faces[low];
            pivot_owner[birth] = j;
            cleared[birth] = 1;
            paired[birth] = paired[j] = 1;
            reduced_[j] = drained;
            pairs_.emplace_back(birth, j);
            ++found;
        }
        for (std::uint32_t j : by_dim[static_cast<std::size_t>(d)])
            for (auto& f : reduced_[j])
                f = faces[f];
    }
    for (std::uint32_t j = 0; j < n; ++j)
        if (!paired[j])
            essential_.push_back(j);
}

std::span<const std::uint32_t> ReductionState::reduced(std::size_t j) const
{
    return reduced_[j];
}

PersistenceDiagram ReductionState::diagram(const BoundaryMatrix& boundary) const
{
    std::vector<PersistencePair> out;
    out.reserve(pairs_.size() + essential_.size());
    for (const auto& [birth, death] : pairs_)
        out.push_back({boundary.dims[birth], boundary.values[birth], boundary.values[death]});
    for (std::uint32_t i : essential_)
        out.push_back({boundary.dims[i], boundary.values[i], kInfinity});
    return PersistenceDiagram(std::move(out));
}

PersistenceDiagram reduce_boundary(const BoundaryMatrix& boundary)
{
    return ReductionState(boundary).diagram(boundary);
}

PersistenceDiagram reduce_filtration(const FilteredComplex& fc)
{
    return reduce_boundary(boundary_matrix(fc));
}

} // namespace toposcope::homology
