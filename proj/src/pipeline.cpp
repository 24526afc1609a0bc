#include "toposcope/pipeline.hpp"

#include "toposcope/homology.hpp"
#include "toposcope/io.hpp"
#include "toposcope/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>

namespace toposcope::pipeline {

using nlohmann::json;

namespace {

enum class ParamType { Count, Number, String, NumberArray, OptionalNumber };

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::Number;
    json fallback; // null means required (except OptionalNumber)
};

using Apply = std::function<Value(const Value&, const json&)>;

struct OpSpec {
    std::vector<BaseKind> accepts;
    BaseKind output = BaseKind::PointCloud;
    bool produces_list = false;
    std::vector<ParamSpec> params;
    Apply apply;
};

const char* type_name(ParamType t)
{
    switch (t) {
    case ParamType::Count: return "non-negative integer";
    case ParamType::Number: return "number";
    case ParamType::String: return "string";
    case ParamType::NumberArray: return "array of numbers";
    case ParamType::OptionalNumber: return "number or null";
    }
    return "?";
}

bool type_matches(const json& v, ParamType t)
{
    switch (t) {
    case ParamType::Count: return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    case ParamType::Number: return v.is_number();
    case ParamType::String: return v.is_string();
    case ParamType::NumberArray:
        return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
    case ParamType::OptionalNumber: return v.is_null() || v.is_number();
    }
    return false;
}

template <typename T>
const T& as(const Value& v)
{
    return std::get<T>(v.data);
}

int dim_param(const json& p)
{
    return p.at("dim").get<int>();
}

std::vector<double> grid_for(const PersistenceDiagram& dgm, const json& p)
{
    return diagram::default_grid(dgm, dim_param(p), p.at("n_bins").get<std::size_t>());
}

const std::map<std::string, OpSpec>& registry()
{
    using preprocess::TimeSeries;
    static const std::map<std::string, OpSpec> ops = [] {
        std::map<std::string, OpSpec> r;
        const ParamSpec dim{"dim", ParamType::Count, 1};
        const ParamSpec n_bins{"n_bins", ParamType::Count, 100};

        r["sliding_window"] = {{BaseKind::TimeSeries}, BaseKind::TimeSeries, true,
                               {{"size", ParamType::Count, {}}, {"stride", ParamType::Count, 1}},
                               [](const Value& v, const json& p) {
                                   auto batch = preprocess::sliding_window(as<TimeSeries>(v), p.at("size"), p.at("stride"));
                                   std::vector<Value> out;
                                   for (auto& w : batch.windows)
                                       out.push_back({std::move(w)});
                                   return Value{std::move(out)};
                               }};
        r["takens_embedding"] = {{BaseKind::TimeSeries}, BaseKind::PointCloud, false,
                                 {{"dimension", ParamType::Count, {}},
                                  {"delay", ParamType::Count, {}},
                                  {"stride", ParamType::Count, 1}},
                                 [](const Value& v, const json& p) {
                                     return Value{preprocess::takens_embedding(as<TimeSeries>(v), p.at("dimension"),
                                                                               p.at("delay"), p.at("stride"))};
                                 }};
        r["pearson_dissimilarity"] = {{BaseKind::TimeSeries}, BaseKind::DistanceMatrix, false, {},
                                      [](const Value& v, const json&) {
                                          return Value{preprocess::pearson_dissimilarity(as<TimeSeries>(v))};
                                      }};
        r["transition_graph"] = {{BaseKind::TimeSeries}, BaseKind::Graph, false, {{"n_states", ParamType::Count, {}}},
                                 [](const Value& v, const json& p) {
                                     return Value{preprocess::transition_graph(as<TimeSeries>(v), p.at("n_states"))};
                                 }};
        r["binarize_image"] = {{BaseKind::Image}, BaseKind::Image, false, {{"threshold", ParamType::Number, {}}},
                               [](const Value& v, const json& p) {
                                   return Value{preprocess::binarize_image(as<GrayImage>(v), p.at("threshold"))};
                               }};
        r["height_filtration"] = {{BaseKind::Image}, BaseKind::Image, false,
                                  {{"direction", ParamType::NumberArray, {}}},
                                  [](const Value& v, const json& p) {
                                      const auto dir = p.at("direction").get<std::vector<double>>();
                                      return Value{preprocess::height_filtration(as<GrayImage>(v), dir)};
                                  }};
        r["image_to_point_cloud"] = {{BaseKind::Image}, BaseKind::PointCloud, false, {},
                                     [](const Value& v, const json&) {
                                         return Value{preprocess::image_to_point_cloud(as<GrayImage>(v))};
                                     }};
        r["graph_geodesic"] = {{BaseKind::Graph}, BaseKind::DistanceMatrix, false, {},
                               [](const Value& v, const json&) {
                                   return Value{preprocess::graph_geodesic(as<WeightedGraph>(v))};
                               }};
        r["pairwise_distances"] = {{BaseKind::PointCloud}, BaseKind::DistanceMatrix, false,
                                   {{"metric", ParamType::String, "euclidean"}},
                                   [](const Value& v, const json& p) {
                                       return Value{pairwise_distances(as<PointCloud>(v),
                                                                       parse_metric(p.at("metric").get<std::string>()))};
                                   }};
        r["vr_persistence"] = {{BaseKind::PointCloud, BaseKind::DistanceMatrix}, BaseKind::Diagram, false,
                               {{"max_dim", ParamType::Count, 1},
                                {"max_edge", ParamType::OptionalNumber, nullptr},
                                {"metric", ParamType::String, "euclidean"}},
                               [](const Value& v, const json& p) {
                                   std::optional<double> max_edge;
                                   if (!p.at("max_edge").is_null())
                                       max_edge = p.at("max_edge").get<double>();
                                   const int max_dim = p.at("max_dim");
                                   if (const auto* dm = std::get_if<DistanceMatrix>(&v.data))
                                       return Value{homology::vr_persistence(*dm, max_dim, max_edge)};
                                   homology::VrOptions opts;
                                   opts.metric = parse_metric(p.at("metric").get<std::string>());
                                   opts.max_dim = max_dim;
                                   opts.max_edge = max_edge;
                                   return Value{homology::vr_persistence(as<PointCloud>(v), opts)};
                               }};
        r["cubical_persistence"] = {{BaseKind::Image}, BaseKind::Diagram, false, {{"max_dim", ParamType::Count, 1}},
                                    [](const Value& v, const json& p) {
                                        return Value{homology::cubical_persistence(as<GrayImage>(v), p.at("max_dim"))};
                                    }};
        r["betti_curve"] = {{BaseKind::Diagram}, BaseKind::Curve, false, {dim, n_bins},
                            [](const Value& v, const json& p) {
                                const auto& d = as<PersistenceDiagram>(v);
                                return Value{diagram::betti_curve(d, dim_param(p), grid_for(d, p))};
                            }};
        r["persistence_landscape"] = {{BaseKind::Diagram}, BaseKind::Curve, false,
                                      {dim, n_bins, {"n_layers", ParamType::Count, 1}},
                                      [](const Value& v, const json& p) {
                                          const auto& d = as<PersistenceDiagram>(v);
                                          return Value{diagram::persistence_landscape(d, dim_param(p), p.at("n_layers"),
                                                                                      grid_for(d, p))};
                                      }};
        r["silhouette"] = {{BaseKind::Diagram}, BaseKind::Curve, false, {dim, n_bins, {"power", ParamType::Number, 1.0}},
                           [](const Value& v, const json& p) {
                               const auto& d = as<PersistenceDiagram>(v);
                               return Value{diagram::silhouette(d, dim_param(p), p.at("power"), grid_for(d, p))};
                           }};
        r["heat_surface"] = {{BaseKind::Diagram}, BaseKind::Raster, false,
                             {dim, {"sigma", ParamType::Number, 0.1}, {"n_bins", ParamType::Count, 50}},
                             [](const Value& v, const json& p) {
                                 const std::size_t n = p.at("n_bins");
                                 return Value{diagram::heat_surface(as<PersistenceDiagram>(v), dim_param(p),
                                                                    p.at("sigma"), n, n)};
                             }};
        r["persistence_image"] = {{BaseKind::Diagram}, BaseKind::Raster, false,
                                  {dim, {"sigma", ParamType::Number, 0.1}, {"n_bins", ParamType::Count, 50}},
                                  [](const Value& v, const json& p) {
                                      const std::size_t n = p.at("n_bins");
                                      return Value{diagram::persistence_image(as<PersistenceDiagram>(v), dim_param(p),
                                                                              p.at("sigma"), n, n)};
                                  }};
        r["curve_features"] = {{BaseKind::Curve}, BaseKind::Features, false, {},
                               [](const Value& v, const json&) {
                                   return Value{diagram::to_json(diagram::curve_features(as<diagram::DiagramCurve>(v)))};
                               }};
        r["persistence_entropy"] = {{BaseKind::Diagram}, BaseKind::Features, false, {dim},
                                    [](const Value& v, const json& p) {
                                        return Value{json{{"entropy", diagram::persistence_entropy(
                                                                          as<PersistenceDiagram>(v), dim_param(p))}}};
                                    }};
        r["count_points"] = {{BaseKind::Diagram}, BaseKind::Features, false, {dim},
                             [](const Value& v, const json& p) {
                                 return Value{json{
                                     {"count", diagram::count_points(as<PersistenceDiagram>(v), dim_param(p))}}};
                             }};
        r["amplitude"] = {{BaseKind::Diagram}, BaseKind::Features, false,
                          {dim,
                           {"metric", ParamType::String, "bottleneck"},
                           {"p", ParamType::Number, 2.0},
                           {"n_layers", ParamType::Count, 1},
                           {"sigma", ParamType::Number, 0.1},
                           n_bins},
                          [](const Value& v, const json& p) {
                              diagram::AmplitudeSpec spec;
                              spec.metric = diagram::parse_amplitude_metric(p.at("metric").get<std::string>());
                              spec.p = p.at("p");
                              spec.n_layers = p.at("n_layers");
                              spec.sigma = p.at("sigma");
                              spec.n_bins = p.at("n_bins");
                              const double a = diagram::amplitude(as<PersistenceDiagram>(v), dim_param(p), spec);
                              // JSON has no infinity; an infinite amplitude is written as null.
                              return Value{json{{"amplitude", std::isinf(a) ? json(nullptr) : json(a)}}};
                          }};
        r["complex_polynomial"] = {{BaseKind::Diagram}, BaseKind::Features, false,
                                   {dim, {"n_coefficients", ParamType::Count, 10}},
                                   [](const Value& v, const json& p) {
                                       const auto coeffs = diagram::complex_polynomial(
                                           as<PersistenceDiagram>(v), dim_param(p), p.at("n_coefficients"));
                                       json out = json::array();
                                       for (const auto& c : coeffs)
                                           out.push_back({c.real(), c.imag()});
                                       return Value{json{{"coefficients", std::move(out)}}};
                                   }};
        r["mapper"] = {{BaseKind::PointCloud}, BaseKind::MapperGraph, false,
                       {{"filter", ParamType::String, "proj:0"},
                        {"intervals", ParamType::String, "10"},
                        {"overlap", ParamType::String, "0.3"},
                        {"clusterer", ParamType::String, "sl:0.5"},
                        {"min_intersection", ParamType::Count, 1}},
                       [](const Value& v, const json& p) {
                           mapper::MapperParams params;
                           params.filter = mapper::FilterSpec::parse(p.at("filter"));
                           params.cover = mapper::CoverSpec::parse(p.at("intervals"), p.at("overlap"));
                           params.clusterer = mapper::ClustererSpec::parse(p.at("clusterer"));
                           params.min_intersection = p.at("min_intersection");
                           // Samples already run in parallel; keep each one single-threaded.
                           return Value{mapper::run_mapper(as<PointCloud>(v), params, 1)};
                       }};
        return r;
    }();
    return ops;
}

std::string join_kinds(const std::vector<BaseKind>& kinds)
{
    std::string out;
    for (std::size_t i = 0; i < kinds.size(); ++i)
        out += (i ? " or " : "") + to_string(kinds[i]);
    return out;
}

} // namespace

std::string to_string(BaseKind kind)
{
    switch (kind) {
    case BaseKind::PointCloud: return "point_cloud";
    case BaseKind::TimeSeries: return "time_series";
    case BaseKind::Image: return "image";
    case BaseKind::Graph: return "graph";
    case BaseKind::DistanceMatrix: return "distance_matrix";
    case BaseKind::Diagram: return "diagram";
    case BaseKind::Curve: return "curve";
    case BaseKind::Raster: return "raster";
    case BaseKind::Features: return "features";
    case BaseKind::MapperGraph: return "mapper_graph";
    }
    return "?";
}

std::string to_string(const Kind& kind)
{
    return kind.list ? "list<" + to_string(kind.base) + ">" : to_string(kind.base);
}

std::optional<BaseKind> parse_input_kind(std::string_view name)
{
    if (name == "point_cloud")
        return BaseKind::PointCloud;
    if (name == "time_series")
        return BaseKind::TimeSeries;
    if (name == "image")
        return BaseKind::Image;
    if (name == "graph")
        return BaseKind::Graph;
    return std::nullopt;
}

namespace {

std::string describe(const std::vector<SchemaIssue>& issues)
{
    std::string msg = "invalid pipeline config:";
    for (const auto& i : issues)
        msg += "\n  " + i.path + ": " + i.message;
    return msg;
}

} // namespace

ConfigError::ConfigError(std::vector<SchemaIssue> issues)
    : Error(ErrorCode::SchemaError, describe(issues), issues.empty() ? "" : issues.front().path),
      issues_(std::move(issues))
{
}

PipelineConfig parse_config(const json& j)
{
    std::vector<SchemaIssue> issues;
    auto issue = [&](std::string path, std::string message) { issues.push_back({std::move(path), std::move(message)}); };

    PipelineConfig cfg;
    if (!j.is_object())
        throw ConfigError(std::vector<SchemaIssue>{{"$", "config must be a JSON object"}});

    for (const auto& [key, _] : j.items())
        if (key != "input" && key != "stages" && key != "output")
            issue(key, "unknown field '" + key + "'");

    std::optional<Kind> current;
    if (!j.contains("input") || !j["input"].is_object()) {
        issue("input", "missing object with 'kind'");
    } else {
        const auto& in = j["input"];
        if (in.contains("path")) {
            if (in["path"].is_string())
                cfg.input.path = in["path"];
            else
                issue("input.path", "expected a string");
        }
        if (!in.contains("kind") || !in["kind"].is_string()) {
            issue("input.kind", "missing string (point_cloud, time_series, image or graph)");
        } else if (auto k = parse_input_kind(in["kind"].get<std::string>())) {
            cfg.input.kind = *k;
            current = Kind{*k, false};
        } else {
            issue("input.kind", "unknown input kind '" + in["kind"].get<std::string>() + "'");
        }
    }

    if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty()) {
        issue("stages", "expected a non-empty array of stages");
    } else {
        const auto& ops = registry();
        for (std::size_t s = 0; s < j["stages"].size(); ++s) {
            const auto& st = j["stages"][s];
            const std::string path = "stages[" + std::to_string(s) + "]";
            StageConfig stage;
            if (!st.is_object() || !st.contains("op") || !st["op"].is_string()) {
                issue(path + ".op", "missing op name");
                current.reset();
                cfg.stages.push_back(stage);
                continue;
            }
            stage.op = st["op"];
            const auto it = ops.find(stage.op);
            if (it == ops.end()) {
                issue(path + ".op", "unknown op '" + stage.op + "'");
                current.reset();
                cfg.stages.push_back(stage);
                continue;
            }
            const auto& spec = it->second;

            json given = json::object();
            if (st.contains("params")) {
                if (st["params"].is_object())
                    given = st["params"];
                else
                    issue(path + ".params", "expected an object");
            }
            for (const auto& [key, _] : given.items())
                if (std::none_of(spec.params.begin(), spec.params.end(), [&](const ParamSpec& p) { return p.name == key; }))
                    issue(path + ".params." + key, "unknown parameter for " + stage.op);
            for (const auto& p : spec.params) {
                const std::string ppath = path + ".params." + p.name;
                if (given.contains(p.name)) {
                    if (type_matches(given[p.name], p.type))
                        stage.params[p.name] = given[p.name];
                    else
                        issue(ppath, std::string("expected ") + type_name(p.type));
                } else if (p.fallback.is_null() && p.type != ParamType::OptionalNumber) {
                    issue(ppath, "missing required parameter");
                } else {
                    stage.params[p.name] = p.fallback;
                }
            }

            if (current) {
                const bool accepted =
                    std::find(spec.accepts.begin(), spec.accepts.end(), current->base) != spec.accepts.end();
                if (!accepted || (spec.produces_list && current->list)) {
                    issue(path, "kind mismatch: " + stage.op + " takes " + join_kinds(spec.accepts) + " but receives " +
                                    to_string(*current));
                    current.reset();
                } else {
                    current = Kind{spec.output, current->list || spec.produces_list};
                }
            }
            cfg.kinds.push_back(current.value_or(Kind{spec.output, false}));
            cfg.stages.push_back(std::move(stage));
        }
    }

    if (j.contains("output")) {
        const auto& out = j["output"];
        if (!out.is_object()) {
            issue("output", "expected an object");
        } else {
            if (out.contains("path")) {
                if (out["path"].is_string())
                    cfg.output.path = out["path"];
                else
                    issue("output.path", "expected a string");
            }
            if (out.contains("formats")) {
                cfg.output.formats.clear();
                if (!out["formats"].is_array()) {
                    issue("output.formats", "expected an array");
                } else {
                    for (std::size_t f = 0; f < out["formats"].size(); ++f) {
                        const auto& fmt = out["formats"][f];
                        if (fmt.is_string() && (fmt == "json" || fmt == "csv" || fmt == "svg"))
                            cfg.output.formats.push_back(fmt);
                        else
                            issue("output.formats[" + std::to_string(f) + "]", "expected json, csv or svg");
                    }
                }
            }
        }
    }

    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return cfg;
}

PipelineConfig parse_config(std::string_view text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::vector<SchemaIssue>{{"$", std::string("not valid JSON: ") + e.what()}});
    }
    return parse_config(j);
}

std::vector<std::string> op_names()
{
    std::vector<std::string> names;
    for (const auto& [name, _] : registry())
        names.push_back(name);
    return names;
}

json config_schema()
{
    json ops = json::object();
    for (const auto& [name, spec] : registry()) {
        json accepts = json::array();
        for (auto k : spec.accepts)
            accepts.push_back(to_string(k));
        json params = json::object();
        for (const auto& p : spec.params) {
            json entry{{"type", type_name(p.type)}};
            if (p.fallback.is_null() && p.type != ParamType::OptionalNumber)
                entry["required"] = true;
            else
                entry["default"] = p.fallback;
            params[p.name] = entry;
        }
        ops[name] = {{"accepts", accepts},
                     {"returns", to_string(Kind{spec.output, spec.produces_list})},
                     {"params", params}};
    }
    return {{"input_kinds", {"point_cloud", "time_series", "image", "graph"}},
            {"output_formats", {"json", "csv", "svg"}},
            {"ops", ops}};
}

std::vector<Value> load_batch(std::string_view csv, BaseKind kind)
{
    std::vector<Value> batch;
    for (const auto& rows : io::parse_csv_blocks(csv)) {
        switch (kind) {
        case BaseKind::PointCloud: batch.push_back({PointCloud::from_rows(rows)}); break;
        case BaseKind::TimeSeries: batch.push_back({preprocess::TimeSeries::from_rows(rows)}); break;
        case BaseKind::Image: batch.push_back({GrayImage::from_rows(rows)}); break;
        case BaseKind::Graph: {
            std::vector<Edge> edges;
            std::size_t n = 0;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto& row = rows[r];
                if (row.size() != 3 || row[0] < 0 || row[1] < 0 || row[0] != std::floor(row[0]) ||
                    row[1] != std::floor(row[1]))
                    fail(ErrorCode::InvalidInput,
                         "graph row " + std::to_string(r + 1) + " must be 'u,v,weight' with integer vertex ids");
                const auto u = static_cast<std::size_t>(row[0]), v = static_cast<std::size_t>(row[1]);
                n = std::max({n, u + 1, v + 1});
                edges.push_back({u, v, row[2]});
            }
            batch.push_back({WeightedGraph(n, std::move(edges), false)});
            break;
        }
        default: fail(ErrorCode::InvalidInput, "unsupported input kind " + to_string(kind));
        }
    }
    return batch;
}

namespace {

Value apply_stage(const OpSpec& spec, const Value& input, const json& params)
{
    if (const auto* list = std::get_if<std::vector<Value>>(&input.data)) {
        std::vector<Value> out;
        out.reserve(list->size());
        for (const auto& item : *list)
            out.push_back(spec.apply(item, params));
        return {std::move(out)};
    }
    return spec.apply(input, params);
}

} // namespace

std::vector<SampleResult> run_pipeline(const PipelineConfig& cfg, const std::vector<Value>& batch,
                                       std::size_t threads)
{
    const auto& ops = registry();
    std::vector<const OpSpec*> specs;
    for (const auto& stage : cfg.stages) {
        const auto it = ops.find(stage.op);
        if (it == ops.end())
            fail(ErrorCode::SchemaError, "unknown op '" + stage.op + "'", "op");
        specs.push_back(&it->second);
    }

    std::vector<SampleResult> results(batch.size());
    parallel_for(batch.size(), threads, [&](std::size_t i) {
        auto& r = results[i];
        r.index = i;
        Value current = batch[i];
        for (std::size_t s = 0; s < specs.size(); ++s) {
            try {
                current = apply_stage(*specs[s], current, cfg.stages[s].params);
            } catch (const std::exception& e) {
                r.error = e.what();
                r.failed_stage = s;
                return;
            }
        }
        r.value = std::move(current);
    });
    return results;
}

json to_json(const Value& value)
{
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, preprocess::TimeSeries>) {
                json rows = json::array();
                for (std::size_t t = 0; t < v.length(); ++t) {
                    json row = json::array();
                    for (std::size_t c = 0; c < v.channels(); ++c)
                        row.push_back(v(t, c));
                    rows.push_back(std::move(row));
                }
                return {{"channels", v.channels()}, {"values", std::move(rows)}};
            } else if constexpr (std::is_same_v<T, nlohmann::json>) {
                return v;
            } else if constexpr (std::is_same_v<T, std::vector<Value>>) {
                json out = json::array();
                for (const auto& item : v)
                    out.push_back(to_json(item));
                return out;
            } else if constexpr (std::is_same_v<T, mapper::MapperGraph>) {
                return mapper::to_json(v);
            } else if constexpr (std::is_same_v<T, diagram::DiagramCurve> || std::is_same_v<T, diagram::DiagramImage>) {
                return diagram::to_json(v);
            } else {
                return io::to_json(v);
            }
        },
        value.data);
}

json results_json(const std::vector<SampleResult>& results)
{
    json samples = json::array();
    for (const auto& r : results) {
        json entry{{"index", r.index}};
        if (r.ok()) {
            entry["status"] = "ok";
            entry["result"] = to_json(*r.value);
        } else {
            entry["status"] = "error";
            entry["error"] = {{"stage", *r.failed_stage}, {"message", r.error}};
        }
        samples.push_back(std::move(entry));
    }
    return {{"samples", std::move(samples)}};
}

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void append_row(std::string& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i)
        out += (i ? "," : "") + cells[i];
    out += '\n';
}

std::string flat_csv(const json& j)
{
    // Features: one "key,value" row per scalar leaf.
    std::string out;
    std::function<void(const std::string&, const json&)> walk = [&](const std::string& prefix, const json& v) {
        if (v.is_structured()) {
            for (auto it = v.begin(); it != v.end(); ++it) {
                const std::string key = v.is_array() ? std::to_string(std::distance(v.begin(), it)) : it.key();
                walk(prefix.empty() ? key : prefix + "." + key, *it);
            }
        } else {
            append_row(out, {prefix, v.is_number() ? num(v.get<double>()) : v.dump()});
        }
    };
    walk("", j);
    return out;
}

} // namespace

std::string to_csv(const Value& value)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            std::string out;
            if constexpr (std::is_same_v<T, PointCloud>) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    std::vector<std::string> row;
                    for (double x : v.point(i))
                        row.push_back(num(x));
                    append_row(out, row);
                }
            } else if constexpr (std::is_same_v<T, preprocess::TimeSeries>) {
                for (std::size_t t = 0; t < v.length(); ++t) {
                    std::vector<std::string> row;
                    for (std::size_t c = 0; c < v.channels(); ++c)
                        row.push_back(num(v(t, c)));
                    append_row(out, row);
                }
            } else if constexpr (std::is_same_v<T, GrayImage>) {
                for (std::size_t r = 0; r < v.rows(); ++r) {
                    std::vector<std::string> row;
                    for (std::size_t c = 0; c < v.cols(); ++c)
                        row.push_back(num(v(r, c)));
                    append_row(out, row);
                }
            } else if constexpr (std::is_same_v<T, WeightedGraph>) {
                for (const auto& e : v.edges())
                    append_row(out, {std::to_string(e.u), std::to_string(e.v), num(e.weight)});
            } else if constexpr (std::is_same_v<T, DistanceMatrix>) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    std::vector<std::string> row;
                    for (std::size_t j = 0; j < v.size(); ++j)
                        row.push_back(num(v(i, j)));
                    append_row(out, row);
                }
            } else if constexpr (std::is_same_v<T, PersistenceDiagram>) {
                out = "dim,birth,death\n";
                for (const auto& p : v.pairs())
                    append_row(out, {std::to_string(p.dim), num(p.birth), p.essential() ? "inf" : num(p.death)});
            } else if constexpr (std::is_same_v<T, diagram::DiagramCurve>) {
                std::vector<std::string> header{"t"};
                for (std::size_t l = 0; l < v.layers.size(); ++l)
                    header.push_back("layer" + std::to_string(l));
                append_row(out, header);
                for (std::size_t i = 0; i < v.grid.size(); ++i) {
                    std::vector<std::string> row{num(v.grid[i])};
                    for (const auto& layer : v.layers)
                        row.push_back(num(layer[i]));
                    append_row(out, row);
                }
            } else if constexpr (std::is_same_v<T, diagram::DiagramImage>) {
                for (std::size_t j = 0; j < v.grid.ny; ++j) {
                    std::vector<std::string> row;
                    for (std::size_t i = 0; i < v.grid.nx; ++i)
                        row.push_back(num(v.at(i, j)));
                    append_row(out, row);
                }
            } else if constexpr (std::is_same_v<T, nlohmann::json>) {
                out = flat_csv(v);
            } else if constexpr (std::is_same_v<T, mapper::MapperGraph>) {
                out = "source,target,weight\n";
                for (const auto& e : v.edges)
                    append_row(out, {std::to_string(e.source), std::to_string(e.target), std::to_string(e.weight)});
            } else {
                for (std::size_t i = 0; i < v.size(); ++i)
                    out += (i ? "\n" : "") + to_csv(v[i]);
            }
            return out;
        },
        value.data);
}

void write_outputs(const PipelineConfig& cfg, const std::vector<SampleResult>& results, const std::string& out_dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        fail(ErrorCode::Io, "cannot create output directory " + out_dir + ": " + ec.message(), "out");

    const auto wants = [&](const char* f) {
        return std::find(cfg.output.formats.begin(), cfg.output.formats.end(), f) != cfg.output.formats.end();
    };
    const fs::path dir(out_dir);
    io::write_file((dir / "results.json").string(), results_json(results).dump(2) + "\n");

    for (const auto& r : results) {
        if (!r.ok())
            continue;
        const std::string stem = "sample_" + std::to_string(r.index);
        if (wants("csv"))
            io::write_file((dir / (stem + ".csv")).string(), to_csv(*r.value));
        if (!wants("svg"))
            continue;
        if (const auto* dgm = std::get_if<PersistenceDiagram>(&r.value->data)) {
            io::write_file((dir / (stem + ".svg")).string(), io::diagram_svg(*dgm));
        } else if (const auto* list = std::get_if<std::vector<Value>>(&r.value->data)) {
            for (std::size_t j = 0; j < list->size(); ++j)
                if (const auto* d = std::get_if<PersistenceDiagram>(&(*list)[j].data))
                    io::write_file((dir / (stem + "_" + std::to_string(j) + ".svg")).string(), io::diagram_svg(*d));
        }
    }
}

} // namespace toposcope::pipeline
