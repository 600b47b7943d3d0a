#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "kmvar/lifetable.hpp"

namespace kmvar {

/// How the normal quantile of a Wald interval is chosen.
///   paper:     z = Phi^-1(1 - alpha)
///   two_sided: z = Phi^-1(1 - alpha / 2)
enum class CiConvention { paper, two_sided };

std::string_view to_string(CiConvention c);
std::optional<CiConvention> parse_convention(std::string_view name);

/// Estimates at one event time. Quantities that involve a row with n == d
/// (or any later row) are empty.
struct EstimatePoint {
    double t = 0.0;
    double s = 1.0;                ///< Kaplan-Meier survival
    std::optional<double> w;       ///< sum d/(n(n-d)), variance of log S
    std::optional<double> g;       ///< Greenwood variance s^2 * w
    std::optional<double> csum;    ///< sum d/(n(n-d)^3)
    std::optional<double> r;       ///< variance of g: s^4 (4 w^3 + csum)
    std::optional<double> ci_lo;
    std::optional<double> ci_hi;
};

struct EstimateCurve {
    std::vector<EstimatePoint> points;  ///< one per risk-table row
    double alpha = 0.05;
    CiConvention convention = CiConvention::paper;
    bool clamp = false;
};

struct HazardEstimate {
    double lambda_hat = 0.0;
    double avar = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Per-row operations. Each evaluates rows [0, j] of the table and throws
// IndexError when j is out of range.
double km_survival(const RiskTable& table, std::size_t j);
std::optional<double> greenwood_sum(const RiskTable& table, std::size_t j);
std::optional<double> greenwood(const RiskTable& table, std::size_t j);
std::optional<double> c_sum(const RiskTable& table, std::size_t j);
std::optional<double> r_hat(const RiskTable& table, std::size_t j);
std::optional<double> a_hat(const RiskTable& table, std::size_t j);

/// s^4 (4 w^3 + csum).
double r_hat_from(double s, double w, double csum) noexcept;

/// Variance of log G: 4 w + csum / w^2. Empty when w == 0.
std::optional<double> a_hat_from(double w, double csum) noexcept;

HazardEstimate hazard_estimate(const RiskRow& row) noexcept;

/// Normal quantile used by wald_ci for the given level and convention.
double wald_z(double alpha, CiConvention convention);

/// estimate -/+ z * sqrt(variance). Throws InvalidAlpha unless alpha lies in
/// (0, 1) and InvalidVariance for a negative or NaN variance.
Interval wald_ci(double estimate, double variance, double alpha, CiConvention convention);

/// Builds every per-row estimate in one pass. With `clamp`, ci_lo is floored
/// at zero.
EstimateCurve build_curve(const RiskTable& table, double alpha = 0.05,
                          CiConvention convention = CiConvention::paper, bool clamp = false);

/// Right-continuous lookup: the point at the largest event time <= t, or
/// nullptr before the first event.
const EstimatePoint* point_at(const EstimateCurve& curve, double t) noexcept;

}  // namespace kmvar
