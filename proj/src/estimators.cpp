#include "kmvar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kmvar/normal.hpp"
#include "kmvar/numeric.hpp"

namespace kmvar {

namespace {

/// Walks a risk table row by row carrying S, W and the C-sum.
///
/// S is evaluated segment-wise: between censorings the risk set only loses
/// events, so prod (n_k - d_k)/n_k telescopes to (n_j - d_j)/n_first. Each
/// segment therefore costs one division and one multiplication, and an
/// uncensored table gives S exactly as the rounded ratio of counts.
class PrefixWalker {
public:
    struct State {
        double s;
        std::optional<double> w;
        std::optional<double> csum;
    };

    State step(const RiskRow& row) {
        if (segment_n0_ == 0) segment_n0_ = row.n;
        const double s = segment_base_ * (static_cast<double>(row.n - row.d) /
                                          static_cast<double>(segment_n0_));
        if (row.c > 0) {
            segment_base_ = s;
            segment_n0_ = 0;
        }

        if (row.n == row.d) singular_ = true;
        if (singular_) return {s, std::nullopt, std::nullopt};

        const double n = static_cast<double>(row.n);
        const double m = static_cast<double>(row.n - row.d);
        const double d = static_cast<double>(row.d);
        w_.add(d / (n * m));
        csum_.add(d / (n * m * m * m));
        return {s, w_.value(), csum_.value()};
    }

private:
    double segment_base_ = 1.0;
    std::int64_t segment_n0_ = 0;
    bool singular_ = false;
    CompensatedSum w_;
    CompensatedSum csum_;
};

PrefixWalker::State state_at(const RiskTable& table, std::size_t j) {
    if (j >= table.rows.size()) {
        throw IndexError("row index " + std::to_string(j) + " out of range for table with " +
                         std::to_string(table.rows.size()) + " rows");
    }
    PrefixWalker walker;
    PrefixWalker::State state{};
    for (std::size_t k = 0; k <= j; ++k) state = walker.step(table.rows[k]);
    return state;
}

}  // namespace

InvalidAlpha::InvalidAlpha(double alpha)
    : Error("alpha must lie in (0, 1), got " + format_double(alpha)) {}

InvalidVariance::InvalidVariance(double r)
    : Error("variance must be non-negative, got " + format_double(r)) {}

std::string_view to_string(CiConvention c) {
    return c == CiConvention::paper ? "paper" : "two_sided";
}

std::optional<CiConvention> parse_convention(std::string_view name) {
    if (name == "paper") return CiConvention::paper;
    if (name == "two_sided") return CiConvention::two_sided;
    return std::nullopt;
}

double km_survival(const RiskTable& table, std::size_t j) { return state_at(table, j).s; }

std::optional<double> greenwood_sum(const RiskTable& table, std::size_t j) {
    return state_at(table, j).w;
}

std::optional<double> greenwood(const RiskTable& table, std::size_t j) {
    const auto st = state_at(table, j);
    if (!st.w) return std::nullopt;
    return st.s * st.s * *st.w;
}

std::optional<double> c_sum(const RiskTable& table, std::size_t j) {
    return state_at(table, j).csum;
}

std::optional<double> r_hat(const RiskTable& table, std::size_t j) {
    const auto st = state_at(table, j);
    if (!st.w || !st.csum) return std::nullopt;
    return r_hat_from(st.s, *st.w, *st.csum);
}

std::optional<double> a_hat(const RiskTable& table, std::size_t j) {
    const auto st = state_at(table, j);
    if (!st.w || !st.csum) return std::nullopt;
    return a_hat_from(*st.w, *st.csum);
}

double r_hat_from(double s, double w, double csum) noexcept {
    const double s2 = s * s;
    return s2 * s2 * (4.0 * w * w * w + csum);
}

std::optional<double> a_hat_from(double w, double csum) noexcept {
    if (!(w > 0.0)) return std::nullopt;
    return 4.0 * w + csum / (w * w);
}

HazardEstimate hazard_estimate(const RiskRow& row) noexcept {
    const double n = static_cast<double>(row.n);
    const double lambda = static_cast<double>(row.d) / n;
    return {lambda, lambda * (1.0 - lambda) / n};
}

double wald_z(double alpha, CiConvention convention) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidAlpha(alpha);
    const double tail = convention == CiConvention::paper ? alpha : alpha / 2.0;
    return normal_quantile(1.0 - tail);
}

Interval wald_ci(double estimate, double variance, double alpha, CiConvention convention) {
    const double z = wald_z(alpha, convention);
    if (!(variance >= 0.0)) throw InvalidVariance(variance);
    const double half = z * std::sqrt(variance);
    return {estimate - half, estimate + half};
}

EstimateCurve build_curve(const RiskTable& table, double alpha, CiConvention convention,
                          bool clamp) {
    const double z = wald_z(alpha, convention);

    EstimateCurve curve;
    curve.alpha = alpha;
    curve.convention = convention;
    curve.clamp = clamp;
    curve.points.reserve(table.rows.size());

    PrefixWalker walker;
    for (const RiskRow& row : table.rows) {
        const auto st = walker.step(row);
        EstimatePoint p;
        p.t = row.t;
        p.s = st.s;
        p.w = st.w;
        p.csum = st.csum;
        if (st.w && st.csum) {
            const double g = st.s * st.s * *st.w;
            const double r = r_hat_from(st.s, *st.w, *st.csum);
            const double half = z * std::sqrt(r);
            p.g = g;
            p.r = r;
            p.ci_lo = clamp ? std::max(0.0, g - half) : g - half;
            p.ci_hi = g + half;
        }
        curve.points.push_back(p);
    }
    return curve;
}

const EstimatePoint* point_at(const EstimateCurve& curve, double t) noexcept {
    const auto it = std::upper_bound(curve.points.begin(), curve.points.end(), t,
                                     [](double v, const EstimatePoint& p) { return v < p.t; });
    if (it == curve.points.begin()) return nullptr;
    return &*std::prev(it);
}

}  // namespace kmvar
