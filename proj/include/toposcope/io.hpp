#pragma once

#include "toposcope/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace toposcope::io {

using Rows = std::vector<std::vector<double>>;

/// Parses comma-separated numeric text. Lines starting with '#' are comments.
/// Blank lines separate samples; a text without blank lines is one sample.
/// Throws InvalidInput naming the offending line.
std::vector<Rows> parse_csv_blocks(std::string_view text);

/// All non-blank rows of the text as a single sample.
Rows parse_csv(std::string_view text);

PointCloud point_cloud_from_csv(std::string_view text);

/// Rows at 17 significant digits, comma-separated, '\n' terminated. This is
/// the byte stream dataset fingerprints are computed over.
std::string canonical_csv(const PointCloud& pc);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fingerprint(const PointCloud& pc);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Diagram JSON: {"pairs": [{"dim": k, "birth": b, "death": d-or-null}, ...]}
nlohmann::json to_json(const PersistenceDiagram& dgm);
PersistenceDiagram diagram_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DistanceMatrix& dm);
nlohmann::json to_json(const PointCloud& pc);
nlohmann::json to_json(const GrayImage& img);
nlohmann::json to_json(const WeightedGraph& g);

/// Scatter plot of a diagram: birth on x, death on y, with the diagonal and a
/// dashed line for essential classes drawn above the finite range.
std::string diagram_svg(const PersistenceDiagram& dgm, int width = 480, int height = 480);

} // namespace toposcope::io
