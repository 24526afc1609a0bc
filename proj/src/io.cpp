#include "toposcope/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace toposcope::io {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<double> parse_row(std::string_view line, std::size_t line_no)
{
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        const auto field = trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
        double value = 0.0;
        const char* begin = field.data();
        const char* end = begin + field.size();
        if (!field.empty() && *begin == '+')
            ++begin;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (field.empty() || ec != std::errc() || ptr != end)
            fail(ErrorCode::InvalidInput,
                 "line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a number");
        if (!std::isfinite(value))
            fail(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": non-finite value");
        row.push_back(value);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return row;
}

} // namespace

std::vector<Rows> parse_csv_blocks(std::string_view text)
{
    std::vector<Rows> blocks;
    Rows current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        const auto line = trim(text.substr(pos, nl - pos));
        ++line_no;
        pos = nl + 1;
        if (!line.empty() && line.front() == '#')
            continue;
        if (line.empty()) {
            if (!current.empty())
                blocks.push_back(std::move(current));
            current.clear();
            continue;
        }
        current.push_back(parse_row(line, line_no));
    }
    if (!current.empty())
        blocks.push_back(std::move(current));
    return blocks;
}

Rows parse_csv(std::string_view text)
{
    Rows all;
    for (auto& block : parse_csv_blocks(text))
        for (auto& row : block)
            all.push_back(std::move(row));
    return all;
}

PointCloud point_cloud_from_csv(std::string_view text)
{
    auto rows = parse_csv(text);
    if (rows.empty())
        fail(ErrorCode::InvalidInput, "point cloud CSV contains no rows");
    return PointCloud::from_rows(rows);
}

std::string canonical_csv(const PointCloud& pc)
{
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < pc.size(); ++i) {
        for (std::size_t k = 0; k < pc.dim(); ++k) {
            if (k > 0)
                out.push_back(',');
            const int len = std::snprintf(buf, sizeof buf, "%.17g", pc(i, k));
            out.append(buf, static_cast<std::size_t>(len));
        }
        out.push_back('\n');
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::uint64_t fingerprint(const PointCloud& pc)
{
    return fnv1a64(canonical_csv(pc));
}

std::string hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::Io, "cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const PersistenceDiagram& dgm)
{
    auto pairs = nlohmann::json::array();
    for (const auto& p : dgm.pairs()) {
        nlohmann::json death = p.essential() ? nlohmann::json(nullptr) : nlohmann::json(p.death);
        pairs.push_back({{"dim", p.dim}, {"birth", p.birth}, {"death", std::move(death)}});
    }
    return {{"pairs", std::move(pairs)}};
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
        fail(ErrorCode::InvalidInput, "diagram JSON must be an object with a 'pairs' array");
    std::vector<PersistencePair> pairs;
    for (const auto& item : j["pairs"]) {
        if (!item.is_object() || !item.contains("dim") || !item.contains("birth") || !item.contains("death"))
            fail(ErrorCode::InvalidInput, "diagram pair must carry dim, birth and death");
        PersistencePair p;
        p.dim = item["dim"].get<int>();
        p.birth = item["birth"].get<double>();
        p.death = item["death"].is_null() ? kInfinity : item["death"].get<double>();
        pairs.push_back(p);
    }
    if (auto violation = validate_diagram(pairs))
        fail(ErrorCode::InvalidInput, "invalid persistence diagram: " + *violation);
    return PersistenceDiagram(std::move(pairs));
}

nlohmann::json to_json(const DistanceMatrix& dm)
{
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < dm.size(); ++i) {
        auto row = nlohmann::json::array();
        for (std::size_t j = 0; j < dm.size(); ++j)
            row.push_back(dm(i, j));
        rows.push_back(std::move(row));
    }
    return {{"distance_matrix", std::move(rows)}};
}

nlohmann::json to_json(const PointCloud& pc)
{
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < pc.size(); ++i) {
        auto p = pc.point(i);
        rows.push_back(std::vector<double>(p.begin(), p.end()));
    }
    return {{"points", std::move(rows)}};
}

nlohmann::json to_json(const GrayImage& img)
{
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < img.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < img.cols(); ++c)
            row.push_back(img(r, c));
        rows.push_back(std::move(row));
    }
    return {{"image", std::move(rows)}};
}

nlohmann::json to_json(const WeightedGraph& g)
{
    auto edges = nlohmann::json::array();
    for (const auto& e : g.edges())
        edges.push_back({{"source", e.u}, {"target", e.v}, {"weight", e.weight}});
    return {{"n", g.size()}, {"directed", g.directed()}, {"edges", std::move(edges)}};
}

// ---------------------------------------------------------------------------
// SVG

std::string diagram_svg(const PersistenceDiagram& dgm, int width, int height)
{
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    double lo = 0.0, hi = 1.0;
    bool any = false;
    for (const auto& p : dgm.pairs()) {
        const double top = p.essential() ? p.birth : p.death;
        if (!any) {
            lo = std::min(p.birth, top);
            hi = std::max(p.birth, top);
            any = true;
        }
        lo = std::min(lo, p.birth);
        hi = std::max(hi, top);
    }
    if (hi <= lo)
        hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    // Essential classes are drawn on a line above every finite death.
    const double inf_line = hi + pad;
    const double axis_lo = lo - pad;
    const double axis_hi = inf_line + pad;

    const double margin = 40.0;
    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    auto sx = [&](double v) { return margin + (v - axis_lo) / (axis_hi - axis_lo) * plot_w; };
    auto sy = [&](double v) { return height - margin - (v - axis_lo) / (axis_hi - axis_lo) * plot_h; };

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line class=\"diagonal\" x1=\"" << sx(axis_lo) << "\" y1=\"" << sy(axis_lo) << "\" x2=\"" << sx(axis_hi)
        << "\" y2=\"" << sy(axis_hi) << "\" stroke=\"#888\"/>\n";
    svg << "<line class=\"infinity\" x1=\"" << sx(axis_lo) << "\" y1=\"" << sy(inf_line) << "\" x2=\"" << sx(axis_hi)
        << "\" y2=\"" << sy(inf_line) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 8 << "\" text-anchor=\"middle\" font-size=\"12\">birth</text>\n";
    svg << "<text x=\"12\" y=\"" << height / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 "
        << height / 2 << ")\">death</text>\n";
    for (const auto& p : dgm.pairs()) {
        const double y = p.essential() ? inf_line : p.death;
        svg << "<circle class=\"H" << p.dim << "\" cx=\"" << sx(p.birth) << "\" cy=\"" << sy(y)
            << "\" r=\"3\" fill=\"" << palette[static_cast<std::size_t>(p.dim) % 5] << "\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace toposcope::io
