#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kmvar/estimators.hpp"
#include "kmvar/lifetable.hpp"

namespace kmvar {

/// Stateless counter-based generator: every draw is a hash of
/// (seed, stream, draw index), so replications can be generated in any order
/// or on any thread and still see the same numbers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    /// Raw 64-bit output for a draw index.
    std::uint64_t bits(std::uint64_t draw) const noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t draw) const noexcept;

    /// Exponential with the given rate.
    double exponential(std::uint64_t draw, double rate) const noexcept;

private:
    std::uint64_t key_;
};

struct CensorModel {
    enum class Kind { none, uniform, exponential };
    Kind kind = Kind::none;
    double param = 0.0;  ///< c_max for uniform, rate for exponential

    static CensorModel none() { return {}; }
    static CensorModel uniform(double c_max) { return {Kind::uniform, c_max}; }
    static CensorModel exponential(double rate) { return {Kind::exponential, rate}; }
};

struct SimConfig {
    std::int64_t n = 500;
    double event_rate = 1.0;
    CensorModel censor = CensorModel::uniform(3.0);
    std::int64_t reps = 4000;
    std::uint64_t seed = 42;
    std::vector<double> eval_times;  ///< empty: default_eval_times()
    unsigned workers = 0;            ///< 0: hardware concurrency
    /// Testing hook: every replication reuses the stream of replication 0.
    bool identical_replications = false;
};

/// Throws InvalidConfig naming the offending field.
void validate(const SimConfig& config);

/// One synthetic dataset. Depends only on (seed, rep_index).
std::vector<ObservationRecord> generate_dataset(const SimConfig& config, std::int64_t rep_index);

/// Times at which the Kaplan-Meier curve first drops to or below 0.75, 0.5
/// and 0.25. Levels the curve never reaches are omitted.
std::vector<double> survival_quartile_times(const EstimateCurve& curve);

/// Empirical quantiles of replication 0's event times at p = 1/8, 3/8, 5/8,
/// 7/8, one representative time per event-time quartile.
std::vector<double> default_eval_times(const SimConfig& config);

/// Half-open time interval (lo, hi].
struct TimeBin {
    double lo = 0.0;
    double hi = 0.0;
};

struct EvalSummary {
    double t = 0.0;
    std::size_t defined_count = 0;
    std::optional<double> mean_s;
    std::optional<double> emp_var_s;
    std::optional<double> mean_g;
    std::optional<double> emp_var_g;
    std::optional<double> mean_r;
    std::optional<double> ratio_g;  ///< emp_var_s / mean_g
    std::optional<double> ratio_r;  ///< emp_var_g / mean_r
};

struct HazardDiagnostic {
    TimeBin bin_a;
    TimeBin bin_b;
    std::size_t defined_count = 0;
    std::optional<double> hazard_correlation;     ///< of sum d/n per bin
    std::optional<double> greenwood_correlation;  ///< of sum d/(n(n-d)) per bin
};

struct SimReport {
    SimConfig config;  ///< with eval_times resolved
    std::vector<EvalSummary> points;
    std::optional<HazardDiagnostic> hazard;  ///< needs at least two eval times
};

/// Replays the estimators over every replication and compares empirical
/// sampling variances with the analytic estimates. Statistics at each eval
/// time use the replications where s, g and r are all defined there. The
/// reduction runs in replication order, so the report does not depend on the
/// number of workers.
SimReport run_validation(const SimConfig& config);

/// Minimum replication count accepted by hazard_independence_check.
inline constexpr std::int64_t kMinDiagnosticReps = 30;

/// Empirical correlation across replications of the Greenwood increments
/// sum d/(n(n-d)) aggregated over two disjoint bins. Replications where a
/// bin contains an n == d row are skipped. Throws InvalidConfig for
/// overlapping bins or reps < kMinDiagnosticReps, DegenerateBin when either
/// aggregate has zero variance.
double hazard_independence_check(const SimConfig& config, TimeBin bin_a, TimeBin bin_b);

/// Synthetic stand-in for a large cardiovascular-outcomes trial arm: 9344
/// subjects, low event hazard, follow-up ending between 3.5 and 5 years so
/// most censoring is late. Times are whole days expressed in years, rounded
/// to 7 decimals, which produces ties.
std::vector<ObservationRecord> leader_stand_in(std::uint64_t seed);

}  // namespace kmvar
