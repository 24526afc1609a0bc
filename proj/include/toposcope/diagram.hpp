#pragma once

#include "toposcope/core.hpp"

#include <json.hpp>

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace toposcope::diagram {

/// Finite (birth, death) pairs of one homology dimension. Infinite deaths are
/// replaced by the largest finite death of that dimension (or the largest birth
/// when nothing is finite); `substituted` counts the replacements.
struct FinitePairs {
    std::vector<std::pair<double, double>> pairs;
    std::size_t substituted = 0;
};

FinitePairs finite_pairs(const PersistenceDiagram& dgm, int k);

/// `n_bins` evenly spaced points over [min birth, max finite death] of the
/// dimension-k pairs. Empty or degenerate spans fall back to a unit interval.
std::vector<double> default_grid(const PersistenceDiagram& dgm, int k, std::size_t n_bins = 100);

struct DiagramCurve {
    std::vector<double> grid;
    std::vector<std::vector<double>> layers;
    int dim = 1;
    std::size_t substituted = 0;
};

DiagramCurve betti_curve(const PersistenceDiagram& dgm, int k, const std::vector<double>& grid);
DiagramCurve persistence_landscape(const PersistenceDiagram& dgm, int k, std::size_t n_layers,
                                   const std::vector<double>& grid);
DiagramCurve silhouette(const PersistenceDiagram& dgm, int k, double power, const std::vector<double>& grid);

/// Raster of nx x ny cells over [x_min, x_max] x [y_min, y_max]. Values are
/// sampled at cell centres.
struct RasterGrid {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    std::size_t nx = 1, ny = 1;

    double x_center(std::size_t i) const;
    double y_center(std::size_t j) const;
    double cell_area() const;
    /// Cell holding (x, y), clamped to the raster.
    std::pair<std::size_t, std::size_t> cell_of(double x, double y) const;
};

struct DiagramImage {
    RasterGrid grid;
    std::vector<double> values; // ny rows of nx, row j at y_center(j)
    double sigma = 1.0;
    int dim = 1;
    std::size_t substituted = 0;

    double at(std::size_t i, std::size_t j) const { return values[j * grid.nx + i]; }
};

/// Square (birth, death) raster over [lo - 3 sigma, hi + 3 sigma] on both axes
/// with [lo, hi] the default curve span.
RasterGrid default_heat_grid(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny);
/// (birth, persistence) raster: births span plus 3 sigma, persistence
/// [0, max persistence] plus 3 sigma.
RasterGrid default_image_grid(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny);

/// Sum of Gaussians at the pairs minus Gaussians at their mirror images.
double heat_value(const PersistenceDiagram& dgm, int k, double sigma, double x, double y);
DiagramImage heat_surface(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny,
                          std::optional<RasterGrid> grid = std::nullopt);

struct PersistenceImageOptions {
    std::optional<RasterGrid> grid;
    /// Persistence giving weight 1. Defaults to the diagram's maximum.
    std::optional<double> weight_scale;
};

DiagramImage persistence_image(const PersistenceDiagram& dgm, int k, double sigma, std::size_t nx, std::size_t ny,
                               const PersistenceImageOptions& options = {});

struct CurveFeatures {
    double max = 0.0;
    double argmax = 0.0;
    double area = 0.0;
};

/// One entry per layer; area by the trapezoid rule.
std::vector<CurveFeatures> curve_features(const DiagramCurve& curve);

/// L^p distance of two curves sampled on the same grid, integrated with
/// trapezoid weights. p = infinity gives the maximum absolute gap.
double lp_curve_distance(const DiagramCurve& a, const DiagramCurve& b, double p);

/// Bottleneck distance between the dimension-k sub-diagrams with L-infinity
/// ground cost. Infinite when the essential class counts differ.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int k);

/// q-Wasserstein distance between the dimension-k sub-diagrams. Essential
/// classes must agree exactly, otherwise the distance is infinite.
double wasserstein_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int k, double q);

/// Base-2 Shannon entropy of the normalized finite lifetimes.
double persistence_entropy(const PersistenceDiagram& dgm, int k);

std::size_t count_points(const PersistenceDiagram& dgm, int k);

enum class AmplitudeMetric { Bottleneck, Wasserstein, Landscape, Betti, Heat };

struct AmplitudeSpec {
    AmplitudeMetric metric = AmplitudeMetric::Bottleneck;
    double p = 2.0;            // Wasserstein q or the L^p exponent
    std::size_t n_layers = 1;  // landscape
    double sigma = 0.1;        // heat
    std::size_t n_bins = 100;
};

AmplitudeMetric parse_amplitude_metric(const std::string& name);

/// Distance to the empty diagram (norm of the representation for curve and
/// image metrics).
double amplitude(const PersistenceDiagram& dgm, int k, const AmplitudeSpec& spec);

/// Coefficients after the leading 1 of prod (x - (b + i d)), descending
/// degree, zero-padded to n_coefficients.
std::vector<std::complex<double>> complex_polynomial(const PersistenceDiagram& dgm, int k, std::size_t n_coefficients);

nlohmann::json to_json(const DiagramCurve& curve);
nlohmann::json to_json(const DiagramImage& image);
nlohmann::json to_json(const std::vector<CurveFeatures>& features);

} // namespace toposcope::diagram
