#include "kmvar/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "kmvar/numeric.hpp"

namespace kmvar {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Streams used outside the replication index space.
constexpr std::uint64_t kLeaderStream = 0x4C45414445520000ULL;

std::uint64_t stream_for(const SimConfig& config, std::int64_t rep_index) {
    return config.identical_replications ? 0 : static_cast<std::uint64_t>(rep_index);
}

unsigned resolve_workers(const SimConfig& config) {
    unsigned w = config.workers != 0 ? config.workers : std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    return static_cast<unsigned>(std::min<std::int64_t>(w, config.reps));
}

/// Runs `fn(rep)` for every replication, distributing indices over workers.
/// `fn` must only write to its own replication slot.
template <typename Fn>
void for_each_replication(const SimConfig& config, Fn&& fn) {
    const unsigned workers = resolve_workers(config);
    if (workers <= 1) {
        for (std::int64_t rep = 0; rep < config.reps; ++rep) fn(rep);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::int64_t rep = w; rep < config.reps; rep += workers) fn(rep);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct MeanVar {
    double mean = 0.0;
    std::optional<double> var;
};

MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar out;
    if (xs.empty()) return out;
    CompensatedSum sum;
    for (double x : xs) sum.add(x);
    out.mean = sum.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    CompensatedSum ss;
    for (double x : xs) ss.add((x - out.mean) * (x - out.mean));
    out.var = ss.value() / static_cast<double>(xs.size() - 1);
    return out;
}

struct Correlation {
    std::optional<double> value;
    bool degenerate = false;
};

Correlation correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    Correlation out;
    if (xs.size() < 2) {
        out.degenerate = true;
        return out;
    }
    const double mx = mean_var(xs).mean;
    const double my = mean_var(ys).mean;
    CompensatedSum sxy, sxx, syy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    if (!(sxx.value() > 0.0) || !(syy.value() > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.value = sxy.value() / std::sqrt(sxx.value() * syy.value());
    return out;
}

struct BinAggregate {
    double hazard = 0.0;
    double greenwood = 0.0;
    bool defined = true;
};

BinAggregate aggregate_bin(const RiskTable& table, TimeBin bin) {
    BinAggregate out;
    CompensatedSum hazard, greenwood;
    for (const RiskRow& row : table.rows) {
        if (!(row.t > bin.lo && row.t <= bin.hi)) continue;
        const double n = static_cast<double>(row.n);
        const double d = static_cast<double>(row.d);
        hazard.add(d / n);
        if (row.n == row.d) {
            out.defined = false;
        } else {
            greenwood.add(d / (n * (n - d)));
        }
    }
    out.hazard = hazard.value();
    out.greenwood = greenwood.value();
    return out;
}

bool disjoint(TimeBin a, TimeBin b) { return a.hi <= b.lo || b.hi <= a.lo; }

void check_bin(const TimeBin& bin, const char* field) {
    if (!std::isfinite(bin.lo) || !std::isfinite(bin.hi) || !(bin.lo < bin.hi)) {
        throw InvalidConfig(field, std::string(field) + " must satisfy lo < hi");
    }
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::bits(std::uint64_t draw) const noexcept {
    return mix64(key_ ^ mix64((draw + 1) * kGolden));
}

double CounterRng::uniform(std::uint64_t draw) const noexcept {
    return (static_cast<double>(bits(draw) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::exponential(std::uint64_t draw, double rate) const noexcept {
    return -std::log(uniform(draw)) / rate;
}

void validate(const SimConfig& config) {
    if (config.n < 2) throw InvalidConfig("n", "n must be >= 2");
    if (config.reps < 2) throw InvalidConfig("reps", "reps must be >= 2");
    if (!(config.event_rate > 0.0) || !std::isfinite(config.event_rate)) {
        throw InvalidConfig("event_rate", "event rate must be positive and finite");
    }
    if (config.censor.kind != CensorModel::Kind::none &&
        (!(config.censor.param > 0.0) || !std::isfinite(config.censor.param))) {
        throw InvalidConfig("censor", "censoring parameter must be positive and finite");
    }
    for (std::size_t i = 0; i < config.eval_times.size(); ++i) {
        const double t = config.eval_times[i];
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw InvalidConfig("eval_times", "eval times must be positive and finite");
        }
        if (i > 0 && !(config.eval_times[i - 1] < t)) {
            throw InvalidConfig("eval_times", "eval times must be strictly increasing");
        }
    }
}

std::vector<ObservationRecord> generate_dataset(const SimConfig& config, std::int64_t rep_index) {
    if (rep_index < 0 || rep_index >= config.reps) {
        throw IndexError("replication index " + std::to_string(rep_index) + " out of range");
    }
    const CounterRng rng(config.seed, stream_for(config, rep_index));
    std::vector<ObservationRecord> out;
    out.reserve(static_cast<std::size_t>(config.n));
    for (std::int64_t i = 0; i < config.n; ++i) {
        const auto draw = static_cast<std::uint64_t>(i) * 2;
        const double event = rng.exponential(draw, config.event_rate);
        double censor = HUGE_VAL;
        switch (config.censor.kind) {
            case CensorModel::Kind::none: break;
            case CensorModel::Kind::uniform: censor = config.censor.param * rng.uniform(draw + 1); break;
            case CensorModel::Kind::exponential:
                censor = rng.exponential(draw + 1, config.censor.param);
                break;
        }
        out.push_back(event <= censor ? ObservationRecord{event, 1} : ObservationRecord{censor, 0});
    }
    return out;
}

std::vector<double> survival_quartile_times(const EstimateCurve& curve) {
    std::vector<double> out;
    for (double level : {0.75, 0.5, 0.25}) {
        for (const auto& p : curve.points) {
            if (p.s <= level) {
                if (out.empty() || out.back() < p.t) out.push_back(p.t);
                break;
            }
        }
    }
    return out;
}

std::vector<double> default_eval_times(const SimConfig& config) {
    std::vector<double> events;
    for (const auto& r : generate_dataset(config, 0)) {
        if (r.status == 1) events.push_back(r.time);
    }
    if (events.empty()) {
        throw InvalidConfig("eval_times", "replication 0 has no events; set eval times explicitly");
    }
    std::sort(events.begin(), events.end());
    std::vector<double> out;
    for (double p : {0.125, 0.375, 0.625, 0.875}) {
        const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(events.size())));
        const double t = events[std::max<std::size_t>(k, 1) - 1];
        if (t > 0.0 && (out.empty() || out.back() < t)) out.push_back(t);
    }
    return out;
}

SimReport run_validation(const SimConfig& input) {
    validate(input);
    SimReport report;
    report.config = input;
    if (report.config.eval_times.empty()) report.config.eval_times = default_eval_times(input);
    const SimConfig& config = report.config;
    const auto& times = config.eval_times;
    const std::size_t k = times.size();

    struct Sample {
        double s = 1.0, g = 0.0, r = 0.0;
        bool defined = true;
    };
    struct RepResult {
        std::vector<Sample> at;
        BinAggregate bin_a, bin_b;
    };

    std::optional<HazardDiagnostic> diag;
    if (k >= 2) {
        diag.emplace();
        diag->bin_a = {0.0, times[0]};
        diag->bin_b = {times[k - 2], times[k - 1]};
    }

    std::vector<RepResult> results(static_cast<std::size_t>(config.reps));
    for_each_replication(config, [&](std::int64_t rep) {
        const auto records = generate_dataset(config, rep);
        const RiskTable table = build_risk_table(records);
        const EstimateCurve curve = build_curve(table);
        RepResult& out = results[static_cast<std::size_t>(rep)];
        out.at.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const EstimatePoint* p = point_at(curve, times[i]);
            if (p == nullptr) continue;
            out.at[i].s = p->s;
            if (p->g && p->r) {
                out.at[i].g = *p->g;
                out.at[i].r = *p->r;
            } else {
                out.at[i].defined = false;
            }
        }
        if (diag) {
            out.bin_a = aggregate_bin(table, diag->bin_a);
            out.bin_b = aggregate_bin(table, diag->bin_b);
        }
    });

    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> s, g, r;
        for (const auto& rep : results) {
            const Sample& x = rep.at[i];
            if (!x.defined) continue;
            s.push_back(x.s);
            g.push_back(x.g);
            r.push_back(x.r);
        }
        EvalSummary sum;
        sum.t = times[i];
        sum.defined_count = s.size();
        if (!s.empty()) {
            const MeanVar ms = mean_var(s), mg = mean_var(g), mr = mean_var(r);
            sum.mean_s = ms.mean;
            sum.emp_var_s = ms.var;
            sum.mean_g = mg.mean;
            sum.emp_var_g = mg.var;
            sum.mean_r = mr.mean;
            if (ms.var && mg.mean > 0.0) sum.ratio_g = *ms.var / mg.mean;
            if (mg.var && mr.mean > 0.0) sum.ratio_r = *mg.var / mr.mean;
        }
        report.points.push_back(sum);
    }

    if (diag) {
        std::vector<double> ha, hb, ga, gb;
        for (const auto& rep : results) {
            ha.push_back(rep.bin_a.hazard);
            hb.push_back(rep.bin_b.hazard);
            if (rep.bin_a.defined && rep.bin_b.defined) {
                ga.push_back(rep.bin_a.greenwood);
                gb.push_back(rep.bin_b.greenwood);
            }
        }
        diag->defined_count = ga.size();
        diag->hazard_correlation = correlation(ha, hb).value;
        diag->greenwood_correlation = correlation(ga, gb).value;
        report.hazard = diag;
    }
    return report;
}

double hazard_independence_check(const SimConfig& config, TimeBin bin_a, TimeBin bin_b) {
    validate(config);
    check_bin(bin_a, "bin_a");
    check_bin(bin_b, "bin_b");
    if (!disjoint(bin_a, bin_b)) throw InvalidConfig("bins", "bins must be disjoint");
    if (config.reps < kMinDiagnosticReps) {
        throw InvalidConfig("reps", "the independence diagnostic needs reps >= " +
                                        std::to_string(kMinDiagnosticReps));
    }

    std::vector<BinAggregate> a(static_cast<std::size_t>(config.reps));
    std::vector<BinAggregate> b(a.size());
    for_each_replication(config, [&](std::int64_t rep) {
        const RiskTable table = build_risk_table(generate_dataset(config, rep));
        a[static_cast<std::size_t>(rep)] = aggregate_bin(table, bin_a);
        b[static_cast<std::size_t>(rep)] = aggregate_bin(table, bin_b);
    });

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].defined || !b[i].defined) continue;
        xs.push_back(a[i].greenwood);
        ys.push_back(b[i].greenwood);
    }
    const Correlation c = correlation(xs, ys);
    if (c.degenerate) throw DegenerateBin("greenwood increments have zero variance in a bin");
    return *c.value;
}

std::vector<ObservationRecord> leader_stand_in(std::uint64_t seed) {
    constexpr std::int64_t kSubjects = 9344;
    constexpr double kEventRate = 0.025;  // per year
    constexpr double kDropout = 0.06;
    constexpr double kDaysPerYear = 365.25;

    const CounterRng rng(seed, kLeaderStream);
    std::vector<ObservationRecord> out;
    out.reserve(kSubjects);
    for (std::int64_t i = 0; i < kSubjects; ++i) {
        const auto draw = static_cast<std::uint64_t>(i) * 3;
        const double event = rng.exponential(draw, kEventRate);
        const double censor = rng.uniform(draw + 1) < kDropout ? 3.5 * rng.uniform(draw + 2)
                                                               : 3.5 + 1.5 * rng.uniform(draw + 2);
        const bool died = event <= censor;
        const double days = std::max(1.0, std::ceil((died ? event : censor) * kDaysPerYear));
        const double years = std::round(days / kDaysPerYear * 1e7) / 1e7;
        out.push_back({years, died ? 1 : 0});
    }
    return out;
}

}  // namespace kmvar
