#include "toposcope/mapper.hpp"

#include "toposcope/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace toposcope::mapper {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(const std::string& text, const char* param)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
        fail(ErrorCode::InvalidInput, std::string(param) + ": '" + text + "' is not a finite number", param);
    return value;
}

std::size_t parse_size(const std::string& text, const char* param)
{
    std::size_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end)
        fail(ErrorCode::InvalidInput, std::string(param) + ": '" + text + "' is not a non-negative integer", param);
    return value;
}

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x)
            x = parent_[x] = parent_[parent_[x]];
        return x;
    }

    void merge(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

double euclidean(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        acc += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(acc);
}

} // namespace

// ---------------------------------------------------------------------------
// Filters

FilterSpec FilterSpec::parse(const std::string& text)
{
    FilterSpec spec;
    for (const auto& part : split(text, ',')) {
        const auto fields = split(part, ':');
        FilterComponent c;
        if (fields[0] == "proj" && fields.size() == 2) {
            c.kind = FilterComponent::Kind::Projection;
            c.axis = parse_size(fields[1], "filter");
        } else if (fields[0] == "height" && fields.size() >= 2) {
            c.kind = FilterComponent::Kind::Height;
            for (std::size_t i = 1; i < fields.size(); ++i)
                c.direction.push_back(parse_double(fields[i], "filter"));
            double norm = 0.0;
            for (double x : c.direction)
                norm += x * x;
            if (std::abs(std::sqrt(norm) - 1.0) > 1e-9)
                fail(ErrorCode::InvalidInput, "filter: height direction must be a unit vector", "filter");
        } else if (fields[0] == "norm" && fields.size() == 1) {
            c.kind = FilterComponent::Kind::L2Norm;
        } else if (fields[0] == "ecc" && (fields.size() == 2 || fields.size() == 3)) {
            c.kind = FilterComponent::Kind::Eccentricity;
            if (fields[1] == "max")
                c.aggregate = FilterComponent::Aggregate::Max;
            else if (fields[1] == "mean")
                c.aggregate = FilterComponent::Aggregate::Mean;
            else
                fail(ErrorCode::InvalidInput, "filter: eccentricity aggregate must be max or mean", "filter");
            if (fields.size() == 3) {
                try {
                    c.metric = parse_metric(fields[2]);
                } catch (const Error& e) {
                    fail(ErrorCode::InvalidInput, std::string("filter: ") + e.what(), "filter");
                }
            }
        } else {
            fail(ErrorCode::InvalidInput, "filter: unrecognized filter '" + part + "'", "filter");
        }
        spec.components.push_back(std::move(c));
    }
    if (spec.components.size() > 2)
        fail(ErrorCode::InvalidInput, "filter: at most two filter components are supported", "filter");
    return spec;
}

std::string FilterSpec::to_string() const
{
    std::string out;
    for (const auto& c : components) {
        if (!out.empty())
            out += ',';
        switch (c.kind) {
        case FilterComponent::Kind::Projection: out += "proj:" + std::to_string(c.axis); break;
        case FilterComponent::Kind::Height:
            out += "height";
            for (double x : c.direction)
                out += ':' + format_double(x);
            break;
        case FilterComponent::Kind::L2Norm: out += "norm"; break;
        case FilterComponent::Kind::Eccentricity:
            out += c.aggregate == FilterComponent::Aggregate::Max ? "ecc:max" : "ecc:mean";
            out += ':';
            out += toposcope::to_string(c.metric);
            break;
        }
    }
    return out;
}

void FilterSpec::validate(const PointCloud& pc) const
{
    if (components.empty() || components.size() > 2)
        fail(ErrorCode::InvalidInput, "filter must have one or two components", "filter");
    for (const auto& c : components) {
        if (c.kind == FilterComponent::Kind::Projection && c.axis >= pc.dim())
            fail(ErrorCode::InvalidInput,
                 "filter: projection axis " + std::to_string(c.axis) + " is out of range for dimension " +
                     std::to_string(pc.dim()),
                 "filter");
        if (c.kind == FilterComponent::Kind::Height) {
            if (c.direction.size() != pc.dim())
                fail(ErrorCode::InvalidInput, "filter: height direction does not match the data dimension", "filter");
            double norm = 0.0;
            for (double x : c.direction)
                norm += x * x;
            if (std::abs(std::sqrt(norm) - 1.0) > 1e-9)
                fail(ErrorCode::InvalidInput, "filter: height direction must be a unit vector", "filter");
        }
    }
}

std::vector<double> FilterValues::column(std::size_t c) const
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (*this)(i, c);
    return out;
}

FilterValues eval_filter(const PointCloud& pc, const FilterSpec& filter)
{
    if (pc.empty())
        fail(ErrorCode::InvalidInput, "cannot evaluate a filter on an empty point cloud");
    filter.validate(pc);

    FilterValues out{pc.size(), filter.dim(), std::vector<double>(pc.size() * filter.dim(), 0.0)};
    for (std::size_t c = 0; c < filter.dim(); ++c) {
        const auto& comp = filter.components[c];
        if (comp.kind == FilterComponent::Kind::Eccentricity) {
            const auto dm = pairwise_distances(pc, comp.metric);
            for (std::size_t i = 0; i < pc.size(); ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < pc.size(); ++j)
                    acc = comp.aggregate == FilterComponent::Aggregate::Max ? std::max(acc, dm(i, j)) : acc + dm(i, j);
                if (comp.aggregate == FilterComponent::Aggregate::Mean)
                    acc /= static_cast<double>(pc.size());
                out.values[i * out.dim + c] = acc;
            }
            continue;
        }
        for (std::size_t i = 0; i < pc.size(); ++i) {
            const auto p = pc.point(i);
            double v = 0.0;
            switch (comp.kind) {
            case FilterComponent::Kind::Projection: v = p[comp.axis]; break;
            case FilterComponent::Kind::Height:
                v = std::inner_product(p.begin(), p.end(), comp.direction.begin(), 0.0);
                break;
            case FilterComponent::Kind::L2Norm:
                v = std::sqrt(std::inner_product(p.begin(), p.end(), p.begin(), 0.0));
                break;
            case FilterComponent::Kind::Eccentricity: break;
            }
            out.values[i * out.dim + c] = v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cover

std::vector<Interval> build_cover_1d(std::span<const double> values, std::size_t n, double overlap)
{
    if (n < 1)
        fail(ErrorCode::InvalidInput, "number of intervals must be at least 1", "intervals");
    if (!(overlap >= 0.0 && overlap < 1.0))
        fail(ErrorCode::InvalidInput, "overlap fraction must lie in [0, 1)", "overlap");
    if (values.empty())
        fail(ErrorCode::InvalidInput, "cover needs at least one filter value");

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (lo == hi)
        return {{lo, hi}};

    const double nd = static_cast<double>(n);
    const double length = (hi - lo) / (nd - (nd - 1.0) * overlap);
    const double spacing = length * (1.0 - overlap);
    std::vector<Interval> cover(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double start = lo + static_cast<double>(i) * spacing;
        cover[i] = {start, start + length};
    }
    cover.front().lo = lo;
    cover.back().hi = hi;
    return cover;
}

std::size_t CoverSpec::intervals_for(std::size_t axis) const
{
    return n_intervals.size() == 1 ? n_intervals.front() : n_intervals.at(axis);
}

double CoverSpec::overlap_for(std::size_t axis) const
{
    return overlap.size() == 1 ? overlap.front() : overlap.at(axis);
}

CoverSpec CoverSpec::parse(const std::string& intervals, const std::string& overlap)
{
    CoverSpec spec;
    for (const auto& part : split(intervals, ','))
        spec.n_intervals.push_back(parse_size(part, "intervals"));
    for (const auto& part : split(overlap, ','))
        spec.overlap.push_back(parse_double(part, "overlap"));
    for (std::size_t n : spec.n_intervals)
        if (n < 1)
            fail(ErrorCode::InvalidInput, "intervals must be at least 1", "intervals");
    for (double g : spec.overlap)
        if (!(g >= 0.0 && g < 1.0))
            fail(ErrorCode::InvalidInput, "overlap fraction must lie in [0, 1)", "overlap");
    return spec;
}

std::string CoverSpec::to_string() const
{
    std::string out = "n=";
    for (std::size_t i = 0; i < n_intervals.size(); ++i)
        out += (i ? "," : "") + std::to_string(n_intervals[i]);
    out += ";g=";
    for (std::size_t i = 0; i < overlap.size(); ++i)
        out += (i ? "," : "") + format_double(overlap[i]);
    return out;
}

void CoverSpec::validate(std::size_t filter_dim) const
{
    if (n_intervals.empty() || (n_intervals.size() != 1 && n_intervals.size() != filter_dim))
        fail(ErrorCode::InvalidInput, "intervals must have one value or one per filter axis", "intervals");
    if (overlap.empty() || (overlap.size() != 1 && overlap.size() != filter_dim))
        fail(ErrorCode::InvalidInput, "overlap must have one value or one per filter axis", "overlap");
    for (std::size_t n : n_intervals)
        if (n < 1)
            fail(ErrorCode::InvalidInput, "intervals must be at least 1", "intervals");
    for (double g : overlap)
        if (!(g >= 0.0 && g < 1.0))
            fail(ErrorCode::InvalidInput, "overlap fraction must lie in [0, 1)", "overlap");
}

std::vector<CoverElement> build_cover(const FilterValues& values, const CoverSpec& cover)
{
    cover.validate(values.dim);
    std::vector<CoverElement> elements{CoverElement{}};
    for (std::size_t axis = 0; axis < values.dim; ++axis) {
        const auto column = values.column(axis);
        const auto intervals = build_cover_1d(column, cover.intervals_for(axis), cover.overlap_for(axis));
        std::vector<CoverElement> next;
        next.reserve(elements.size() * intervals.size());
        for (const auto& e : elements)
            for (const auto& iv : intervals) {
                next.push_back(e);
                next.back().box.push_back(iv);
            }
        elements = std::move(next);
    }
    return elements;
}

std::vector<std::vector<std::size_t>> assign_pullback(const FilterValues& values,
                                                      const std::vector<CoverElement>& cover)
{
    std::vector<std::vector<std::size_t>> fibers(cover.size());
    for (std::size_t e = 0; e < cover.size(); ++e) {
        const auto& box = cover[e].box;
        for (std::size_t i = 0; i < values.n; ++i) {
            bool inside = true;
            for (std::size_t axis = 0; axis < box.size() && inside; ++axis)
                inside = box[axis].contains(values(i, axis));
            if (inside)
                fibers[e].push_back(i);
        }
    }
    return fibers;
}

// ---------------------------------------------------------------------------
// Clustering

ClustererSpec ClustererSpec::parse(const std::string& text)
{
    const auto fields = split(text, ':');
    if (fields[0] == "sl" && fields.size() == 2) {
        const double eps = parse_double(fields[1], "clusterer");
        if (eps < 0.0)
            fail(ErrorCode::InvalidInput, "clusterer: eps must be non-negative", "clusterer");
        return {SingleLinkage{eps}};
    }
    if (fields[0] == "dbscan" && fields.size() == 3) {
        const double eps = parse_double(fields[1], "clusterer");
        const std::size_t min_samples = parse_size(fields[2], "clusterer");
        if (eps < 0.0 || min_samples < 1)
            fail(ErrorCode::InvalidInput, "clusterer: dbscan needs eps >= 0 and min_samples >= 1", "clusterer");
        return {Dbscan{eps, min_samples}};
    }
    fail(ErrorCode::InvalidInput, "clusterer: expected 'sl:<eps>' or 'dbscan:<eps>:<min_samples>'", "clusterer");
}

std::string ClustererSpec::to_string() const
{
    if (const auto* sl = std::get_if<SingleLinkage>(&method))
        return "sl:" + format_double(sl->eps);
    const auto& db = std::get<Dbscan>(method);
    return "dbscan:" + format_double(db.eps) + ":" + std::to_string(db.min_samples);
}

std::vector<std::vector<std::size_t>> cluster_fiber(const PointCloud& pc, std::span<const std::size_t> fiber,
                                                    const ClustererSpec& clusterer)
{
    const std::size_t m = fiber.size();
    if (m == 0)
        fail(ErrorCode::InvalidInput, "cannot cluster an empty fiber");

    std::vector<double> dist(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            dist[a * m + b] = dist[b * m + a] = euclidean(pc.point(fiber[a]), pc.point(fiber[b]));

    UnionFind uf(m);
    if (const auto* sl = std::get_if<SingleLinkage>(&clusterer.method)) {
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                if (dist[a * m + b] <= sl->eps)
                    uf.merge(a, b);
    } else {
        const auto& db = std::get<Dbscan>(clusterer.method);
        std::vector<char> core(m, 0);
        for (std::size_t a = 0; a < m; ++a) {
            std::size_t neighbours = 0;
            for (std::size_t b = 0; b < m; ++b)
                neighbours += dist[a * m + b] <= db.eps;
            core[a] = neighbours >= db.min_samples;
        }
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
                if (core[a] && core[b] && dist[a * m + b] <= db.eps)
                    uf.merge(a, b);
        // Border points join their lowest-index core neighbour; noise stays
        // in its own singleton set.
        for (std::size_t a = 0; a < m; ++a) {
            if (core[a])
                continue;
            for (std::size_t b = 0; b < m; ++b)
                if (core[b] && dist[a * m + b] <= db.eps) {
                    uf.merge(a, b);
                    break;
                }
        }
    }

    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> slot(m, SIZE_MAX);
    // Fibers are ascending, so visiting in order yields ascending members and
    // clusters ordered by smallest member.
    for (std::size_t a = 0; a < m; ++a) {
        const auto root = uf.find(a);
        if (slot[root] == SIZE_MAX) {
            slot[root] = clusters.size();
            clusters.emplace_back();
        }
        clusters[slot[root]].push_back(fiber[a]);
    }
    return clusters;
}

// ---------------------------------------------------------------------------
// Nerve

MapperGraph build_nerve(const std::vector<std::vector<std::vector<std::size_t>>>& clusters_per_element,
                        const FilterValues& values, std::size_t min_intersection)
{
    if (min_intersection < 1)
        fail(ErrorCode::InvalidInput, "min_intersection must be at least 1", "min_intersection");

    MapperGraph graph;
    for (std::size_t e = 0; e < clusters_per_element.size(); ++e)
        for (const auto& members : clusters_per_element[e]) {
            if (members.empty())
                continue;
            MapperNode node;
            node.id = graph.nodes.size();
            node.cover_id = e;
            node.members = members;
            std::sort(node.members.begin(), node.members.end());
            double acc = 0.0;
            for (std::size_t i : node.members)
                acc += values(i, 0);
            node.mean_filter = acc / static_cast<double>(node.members.size());
            graph.nodes.push_back(std::move(node));
        }

    for (std::size_t a = 0; a < graph.nodes.size(); ++a)
        for (std::size_t b = a + 1; b < graph.nodes.size(); ++b) {
            const auto& ma = graph.nodes[a].members;
            const auto& mb = graph.nodes[b].members;
            std::size_t shared = 0;
            for (auto i = ma.begin(), j = mb.begin(); i != ma.end() && j != mb.end();) {
                if (*i < *j)
                    ++i;
                else if (*j < *i)
                    ++j;
                else {
                    ++shared;
                    ++i;
                    ++j;
                }
            }
            if (shared >= min_intersection)
                graph.edges.push_back({a, b, shared});
        }
    return graph;
}

namespace {

std::vector<std::vector<std::vector<std::size_t>>> cluster_all(const PointCloud& pc,
                                                              const std::vector<std::vector<std::size_t>>& fibers,
                                                              const ClustererSpec& clusterer, std::size_t threads)
{
    std::vector<std::vector<std::vector<std::size_t>>> out(fibers.size());
    parallel_for(fibers.size(), threads, [&](std::size_t e) {
        if (!fibers[e].empty())
            out[e] = cluster_fiber(pc, fibers[e], clusterer);
    });
    return out;
}

} // namespace

MapperGraph run_mapper(const PointCloud& pc, const MapperParams& params, std::size_t threads)
{
    const auto values = eval_filter(pc, params.filter);
    const auto cover = build_cover(values, params.cover);
    const auto fibers = assign_pullback(values, cover);
    const auto clusters = cluster_all(pc, fibers, params.clusterer, threads);
    return build_nerve(clusters, values, params.min_intersection);
}

nlohmann::json to_json(const MapperGraph& graph)
{
    auto nodes = nlohmann::json::array();
    for (const auto& n : graph.nodes)
        nodes.push_back({{"id", n.id},
                         {"cover_id", n.cover_id},
                         {"members", n.members},
                         {"size", n.size()},
                         {"mean_filter", n.mean_filter}});
    auto edges = nlohmann::json::array();
    for (const auto& e : graph.edges)
        edges.push_back({{"source", e.source}, {"target", e.target}, {"weight", e.weight}});
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

MapperGraph graph_from_json(const nlohmann::json& j)
{
    MapperGraph graph;
    for (const auto& n : j.at("nodes")) {
        MapperNode node;
        node.id = n.at("id").get<std::size_t>();
        node.cover_id = n.at("cover_id").get<std::size_t>();
        node.members = n.at("members").get<std::vector<std::size_t>>();
        node.mean_filter = n.at("mean_filter").get<double>();
        graph.nodes.push_back(std::move(node));
    }
    for (const auto& e : j.at("edges"))
        graph.edges.push_back(
            {e.at("source").get<std::size_t>(), e.at("target").get<std::size_t>(), e.at("weight").get<std::size_t>()});
    return graph;
}

// ---------------------------------------------------------------------------
// Memoization

std::string memo_key(Stage stage, std::uint64_t fingerprint, const MapperParams& params)
{
    static const char* names[] = {"filter", "cover", "cluster", "nerve"};
    char fp[17];
    std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(fingerprint));
    std::string key = std::string(names[static_cast<int>(stage)]) + "|" + fp + "|" + params.filter.to_string();
    if (stage >= Stage::Cover)
        key += "|" + params.cover.to_string();
    if (stage >= Stage::Cluster)
        key += "|" + params.clusterer.to_string();
    if (stage >= Stage::Nerve)
        key += "|m=" + std::to_string(params.min_intersection);
    return key;
}

MapperCache::MapperCache(std::size_t capacity, std::size_t threads) : capacity_(std::max<std::size_t>(capacity, 1)), threads_(threads)
{
}

template <typename T, typename Compute>
std::shared_ptr<const T> MapperCache::memoized(StageTable<T>& table, const std::string& key,
                                               std::atomic<std::size_t>& counter, bool& computed, Compute&& compute)
{
    std::promise<std::shared_ptr<const T>> promise;
    std::shared_future<std::shared_ptr<const T>> future;
    {
        std::lock_guard lock(mutex_);
        const auto it = table.entries.find(key);
        if (it != table.entries.end()) {
            future = it->second;
        } else {
            future = promise.get_future().share();
            table.entries.emplace(key, future);
            table.order.push_back(key);
            computed = true;
        }
    }
    if (!computed)
        return future.get();

    try {
        ++counter;
        promise.set_value(std::make_shared<const T>(compute()));
    } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard lock(mutex_);
        table.entries.erase(key);
        std::erase(table.order, key);
        throw;
    }
    {
        std::lock_guard lock(mutex_);
        while (table.order.size() > capacity_) {
            table.entries.erase(table.order.front());
            table.order.erase(table.order.begin());
        }
    }
    return future.get();
}

MemoResult MapperCache::run(const PointCloud& pc, std::uint64_t fingerprint, const MapperParams& params)
{
    params.filter.validate(pc);
    params.cover.validate(params.filter.dim());
    if (params.min_intersection < 1)
        fail(ErrorCode::InvalidInput, "min_intersection must be at least 1", "min_intersection");

    bool filter_computed = false, cover_computed = false, cluster_computed = false, nerve_computed = false;
    std::shared_ptr<const FilterValues> values;
    std::shared_ptr<const CoverResult> cover;
    std::shared_ptr<const Clusters> clusters;

    auto get_values = [&] {
        if (!values)
            values = memoized(filters_, memo_key(Stage::Filter, fingerprint, params), counts_[0], filter_computed,
                              [&] { return eval_filter(pc, params.filter); });
        return values;
    };
    auto get_cover = [&] {
        if (!cover)
            cover = memoized(covers_, memo_key(Stage::Cover, fingerprint, params), counts_[1], cover_computed, [&] {
                const auto v = get_values();
                CoverResult result;
                result.elements = build_cover(*v, params.cover);
                result.fibers = assign_pullback(*v, result.elements);
                return result;
            });
        return cover;
    };
    auto get_clusters = [&] {
        if (!clusters)
            clusters = memoized(clusters_, memo_key(Stage::Cluster, fingerprint, params), counts_[2], cluster_computed,
                                [&] { return cluster_all(pc, get_cover()->fibers, params.clusterer, threads_); });
        return clusters;
    };

    // Upstream stages are only looked up when a downstream stage misses.
    auto graph = memoized(nerves_, memo_key(Stage::Nerve, fingerprint, params), counts_[3], nerve_computed,
                          [&] { return build_nerve(*get_clusters(), *get_values(), params.min_intersection); });
    return {std::move(graph), !nerve_computed};
}

StageCounters MapperCache::counters() const
{
    return {counts_[0].load(), counts_[1].load(), counts_[2].load(), counts_[3].load()};
}

} // namespace toposcope::mapper
