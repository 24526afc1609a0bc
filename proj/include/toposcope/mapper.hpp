#pragma once

#include "toposcope/core.hpp"

#include <json.hpp>

#include <array>
#include <atomic>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

namespace toposcope::mapper {

// ---------------------------------------------------------------------------
// Filters

struct FilterComponent {
    enum class Kind { Projection, Height, L2Norm, Eccentricity };
    enum class Aggregate { Max, Mean };

    Kind kind = Kind::Projection;
    std::size_t axis = 0;
    std::vector<double> direction;
    Aggregate aggregate = Aggregate::Max;
    Metric metric = Metric::Euclidean;
};

/// One or two filter components. Text form, components joined by ',':
/// "proj:<axis>", "height:<x>:<y>[:...]", "norm", "ecc:max|mean[:<metric>]".
struct FilterSpec {
    std::vector<FilterComponent> components;

    std::size_t dim() const noexcept { return components.size(); }
    static FilterSpec parse(const std::string& text);
    /// Canonical text; parse(to_string()) reproduces the spec.
    std::string to_string() const;
    /// Throws InvalidInput (param "filter") when the spec does not fit `pc`.
    void validate(const PointCloud& pc) const;
};

/// Per-point filter values, n rows of dim() columns.
struct FilterValues {
    std::size_t n = 0;
    std::size_t dim = 1;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t c) const { return values[i * dim + c]; }
    std::vector<double> column(std::size_t c) const;
};

FilterValues eval_filter(const PointCloud& pc, const FilterSpec& filter);

// ---------------------------------------------------------------------------
// Cover and pullback

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// n closed intervals of length l = |R| / (n - (n-1) g) with starts spaced
/// l (1 - g) over R = [min, max]. The outer endpoints are pinned to min and
/// max so the union is exactly R.
std::vector<Interval> build_cover_1d(std::span<const double> values, std::size_t n, double overlap);

struct CoverSpec {
    std::vector<std::size_t> n_intervals; // one per filter axis, or one shared
    std::vector<double> overlap;

    std::size_t intervals_for(std::size_t axis) const;
    double overlap_for(std::size_t axis) const;
    /// "10" or "10,8" and "0.3" or "0.3,0.2".
    static CoverSpec parse(const std::string& intervals, const std::string& overlap);
    std::string to_string() const;
    void validate(std::size_t filter_dim) const;
};

/// Product of per-axis intervals (first axis outermost).
struct CoverElement {
    std::vector<Interval> box;
};

std::vector<CoverElement> build_cover(const FilterValues& values, const CoverSpec& cover);

/// Point indices (ascending) whose filter values lie in each element.
std::vector<std::vector<std::size_t>> assign_pullback(const FilterValues& values,
                                                      const std::vector<CoverElement>& cover);

// ---------------------------------------------------------------------------
// Clustering

struct SingleLinkage {
    double eps = 0.5;
};

struct Dbscan {
    double eps = 0.5;
    std::size_t min_samples = 5;
};

/// "sl:<eps>" or "dbscan:<eps>:<min_samples>".
struct ClustererSpec {
    std::variant<SingleLinkage, Dbscan> method;

    static ClustererSpec parse(const std::string& text);
    std::string to_string() const;
};

/// Clusters of the fiber as ascending global point indices, ordered by their
/// smallest member. Euclidean distances in the ambient space. DBSCAN noise
/// points become singleton clusters.
std::vector<std::vector<std::size_t>> cluster_fiber(const PointCloud& pc, std::span<const std::size_t> fiber,
                                                    const ClustererSpec& clusterer);

// ---------------------------------------------------------------------------
// Nerve

struct MapperNode {
    std::size_t id = 0;
    std::size_t cover_id = 0;
    std::vector<std::size_t> members;
    double mean_filter = 0.0;

    std::size_t size() const noexcept { return members.size(); }
};

struct MapperEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    std::size_t weight = 0;
};

struct MapperGraph {
    std::vector<MapperNode> nodes;
    std::vector<MapperEdge> edges;
};

/// One node per cluster (in element order), an edge wherever two clusters
/// share at least min_intersection points. mean_filter averages the first
/// filter column over the members.
MapperGraph build_nerve(const std::vector<std::vector<std::vector<std::size_t>>>& clusters_per_element,
                        const FilterValues& values, std::size_t min_intersection = 1);

struct MapperParams {
    FilterSpec filter;
    CoverSpec cover;
    ClustererSpec clusterer;
    std::size_t min_intersection = 1;
};

/// Full pipeline; fibers are clustered on up to `threads` workers
/// (0 = hardware concurrency) and merged in element order.
MapperGraph run_mapper(const PointCloud& pc, const MapperParams& params, std::size_t threads = 0);

nlohmann::json to_json(const MapperGraph& graph);
MapperGraph graph_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Memoized execution

enum class Stage { Filter = 0, Cover = 1, Cluster = 2, Nerve = 3 };

/// Cache key of a stage: the stage name, the dataset fingerprint and the
/// canonical parameters of that stage and everything upstream of it.
std::string memo_key(Stage stage, std::uint64_t fingerprint, const MapperParams& params);

struct StageCounters {
    std::size_t filter = 0;
    std::size_t cover = 0;
    std::size_t cluster = 0;
    std::size_t nerve = 0;

    std::size_t total() const noexcept { return filter + cover + cluster + nerve; }
    friend bool operator==(const StageCounters&, const StageCounters&) = default;
};

struct MemoResult {
    std::shared_ptr<const MapperGraph> graph;
    bool cache_hit = false;
};

/// Stage-level memo of the Mapper pipeline. Safe for concurrent callers:
/// concurrent requests for the same stage key compute it once and share the
/// result. Each stage keeps at most `capacity` entries (oldest evicted first).
class MapperCache {
public:
    explicit MapperCache(std::size_t capacity = 256, std::size_t threads = 0);

    MemoResult run(const PointCloud& pc, std::uint64_t fingerprint, const MapperParams& params);

    /// Number of times each stage was actually computed.
    StageCounters counters() const;

private:
    struct CoverResult {
        std::vector<CoverElement> elements;
        std::vector<std::vector<std::size_t>> fibers;
    };
    using Clusters = std::vector<std::vector<std::vector<std::size_t>>>;

    template <typename T>
    struct StageTable {
        std::map<std::string, std::shared_future<std::shared_ptr<const T>>> entries;
        std::vector<std::string> order;
    };

    template <typename T, typename Compute>
    std::shared_ptr<const T> memoized(StageTable<T>& table, const std::string& key, std::atomic<std::size_t>& counter,
                                      bool& computed, Compute&& compute);

    std::size_t capacity_;
    std::size_t threads_;
    mutable std::mutex mutex_;
    StageTable<FilterValues> filters_;
    StageTable<CoverResult> covers_;
    StageTable<Clusters> clusters_;
    StageTable<MapperGraph> nerves_;
    std::array<std::atomic<std::size_t>, 4> counts_{};
};

} // namespace toposcope::mapper
