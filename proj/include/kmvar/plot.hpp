#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kmvar/estimators.hpp"

namespace kmvar {

/// A right-continuous step function: `y[i]` holds on [x[i], x[i+1]). The
/// series is truncated at `undefined_from` when a value becomes undefined.
struct StepSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::optional<double> undefined_from;
};

struct StepPlot {
    std::string title;
    std::string y_label;
    double x_max = 1.0;
    std::vector<StepSeries> series;  ///< first is the estimate, the rest bands
};

/// Renders a step plot as a standalone SVG document. Each series is a path
/// of horizontal runs and vertical drops; the estimate path additionally
/// carries a `data-steps` attribute listing "t:from:to" for every jump.
std::string render_svg(const StepPlot& plot);

/// Names of the files written by write_plots, in order.
inline const std::vector<std::string> kPlotFiles = {
    "survival.svg", "greenwood.svg", "rhat.svg", "survival_ci.svg", "greenwood_ci.svg",
    "plot_points.csv"};

/// Writes the five step plots plus the underlying point table into `dir`.
/// The survival band is s -/+ z sqrt(g); the Greenwood band is g -/+ z sqrt(r).
/// `x_max` is the right edge of the time axis (usually the largest observed
/// time).
void write_plots(const std::filesystem::path& dir, const EstimateCurve& curve, double x_max);

}  // namespace kmvar
