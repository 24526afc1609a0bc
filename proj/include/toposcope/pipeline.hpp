#pragma once

#include "toposcope/core.hpp"
#include "toposcope/diagram.hpp"
#include "toposcope/mapper.hpp"
#include "toposcope/preprocess.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace toposcope::pipeline {

enum class BaseKind {
    PointCloud,
    TimeSeries,
    Image,
    Graph,
    DistanceMatrix,
    Diagram,
    Curve,
    Raster,
    Features,
    MapperGraph,
};

/// A stage's data kind. `list` marks a batch of values produced by a
/// windowing stage; later stages are applied to each element.
struct Kind {
    BaseKind base = BaseKind::PointCloud;
    bool list = false;

    friend bool operator==(const Kind&, const Kind&) = default;
};

std::string to_string(BaseKind kind);
std::string to_string(const Kind& kind);
/// Input kinds accepted in configs: point_cloud, time_series, image, graph.
std::optional<BaseKind> parse_input_kind(std::string_view name);

struct Value {
    using Data = std::variant<PointCloud, preprocess::TimeSeries, GrayImage, WeightedGraph, DistanceMatrix,
                              PersistenceDiagram, diagram::DiagramCurve, diagram::DiagramImage, nlohmann::json,
                              mapper::MapperGraph, std::vector<Value>>;
    Data data;

    bool is_list() const noexcept { return std::holds_alternative<std::vector<Value>>(data); }
};

struct StageConfig {
    std::string op;
    nlohmann::json params = nlohmann::json::object(); // defaults filled in
};

struct PipelineConfig {
    struct Input {
        std::string path;
        BaseKind kind = BaseKind::PointCloud;
    } input;
    std::vector<StageConfig> stages;
    struct Output {
        std::string path;
        std::vector<std::string> formats{"json"};
    } output;

    /// Kind after each stage (same length as `stages`).
    std::vector<Kind> kinds;
};

struct SchemaIssue {
    std::string path; // e.g. "stages[2].params.delay"
    std::string message;
};

/// Every problem found in a config, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<SchemaIssue> issues);
    const std::vector<SchemaIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<SchemaIssue> issues_;
};

PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig parse_config(std::string_view text);
inline PipelineConfig parse_config(const char* text) { return parse_config(std::string_view(text)); }

/// Names of all registered stage ops, sorted.
std::vector<std::string> op_names();

/// JSON description of the config format: input kinds, output formats and
/// per-op accepted kinds and parameters.
nlohmann::json config_schema();

/// One sample per blank-line separated CSV block. Time series rows are time
/// steps, image rows are pixel rows, graph rows are "u,v,weight".
std::vector<Value> load_batch(std::string_view csv, BaseKind kind);

struct SampleResult {
    std::size_t index = 0;
    std::optional<Value> value;
    std::string error;
    std::optional<std::size_t> failed_stage;

    bool ok() const noexcept { return value.has_value(); }
};

/// Runs the stages on every sample, up to `threads` samples at a time
/// (0 = hardware concurrency). A failing sample records its error and the
/// rest of the batch still runs. Results are in batch order.
std::vector<SampleResult> run_pipeline(const PipelineConfig& cfg, const std::vector<Value>& batch,
                                       std::size_t threads = 0);

nlohmann::json to_json(const Value& value);
nlohmann::json results_json(const std::vector<SampleResult>& results);

/// CSV rendering of a value; lists are rendered element by element into
/// blank-line separated blocks.
std::string to_csv(const Value& value);

/// Writes results.json and, per requested format, sample_<i>.csv and
/// sample_<i>.svg (diagram values only; list elements get sample_<i>_<j>).
void write_outputs(const PipelineConfig& cfg, const std::vector<SampleResult>& results, const std::string& out_dir);

} // namespace toposcope::pipeline
