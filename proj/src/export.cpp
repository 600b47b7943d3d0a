#include "kmvar/export.hpp"

#include <cstdint>
#include <cstdio>
#include <ostream>

#include "kmvar/numeric.hpp"

namespace kmvar {

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "null"; }

nlohmann::json value_or_null(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::int64_t event_count(const RiskTable& table) {
    std::int64_t d = 0;
    for (const auto& row : table.rows) d += row.d;
    return d;
}

const char* censor_kind(CensorModel::Kind k) {
    switch (k) {
        case CensorModel::Kind::uniform: return "uniform";
        case CensorModel::Kind::exponential: return "exponential";
        case CensorModel::Kind::none: break;
    }
    return "none";
}

}  // namespace

std::string input_checksum(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

void write_estimate_csv(std::ostream& out, const RiskTable& table, const EstimateCurve& curve,
                        std::string_view checksum) {
    out << "# alpha=" << format_double(curve.alpha) << '\n'
        << "# convention=" << to_string(curve.convention) << '\n'
        << "# clamp=" << (curve.clamp ? "true" : "false") << '\n'
        << "# input_checksum=" << checksum << '\n'
        << "# total=" << table.total << '\n'
        << kEstimateColumns << '\n';
    for (std::size_t j = 0; j < curve.points.size(); ++j) {
        const RiskRow& row = table.rows[j];
        const EstimatePoint& p = curve.points[j];
        out << format_double(p.t) << ',' << row.n << ',' << row.d << ',' << row.c << ','
            << format_double(p.s) << ',' << cell(p.w) << ',' << cell(p.g) << ','
            << cell(p.csum) << ',' << cell(p.r) << ',' << cell(p.ci_lo) << ','
            << cell(p.ci_hi) << '\n';
    }
}

nlohmann::json estimate_json(const RiskTable& table, const EstimateCurve& curve,
                             std::string_view checksum) {
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t j = 0; j < curve.points.size(); ++j) {
        const RiskRow& row = table.rows[j];
        const EstimatePoint& p = curve.points[j];
        points.push_back({{"t", p.t},
                          {"n", row.n},
                          {"d", row.d},
                          {"c", row.c},
                          {"s", p.s},
                          {"w", value_or_null(p.w)},
                          {"g", value_or_null(p.g)},
                          {"csum", value_or_null(p.csum)},
                          {"r", value_or_null(p.r)},
                          {"ci_lo", value_or_null(p.ci_lo)},
                          {"ci_hi", value_or_null(p.ci_hi)}});
    }
    nlohmann::json meta = {{"alpha", curve.alpha},
                           {"convention", std::string(to_string(curve.convention))},
                           {"clamp", curve.clamp},
                           {"input_checksum", std::string(checksum)},
                           {"total", table.total},
                           {"events", event_count(table)},
                           {"pre_first_censored", table.pre_first_censored}};
    return {{"meta", meta}, {"points", points}};
}

nlohmann::json report_json(const SimReport& report) {
    const SimConfig& cfg = report.config;
    nlohmann::json config = {
        {"n", cfg.n},
        {"reps", cfg.reps},
        {"event_rate", cfg.event_rate},
        {"censor", {{"kind", censor_kind(cfg.censor.kind)}, {"param", cfg.censor.param}}},
        {"seed", cfg.seed},
        {"eval_times", cfg.eval_times}};

    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : report.points) {
        points.push_back({{"t", p.t},
                          {"defined_count", p.defined_count},
                          {"mean_s", value_or_null(p.mean_s)},
                          {"emp_var_s", value_or_null(p.emp_var_s)},
                          {"mean_g", value_or_null(p.mean_g)},
                          {"emp_var_g", value_or_null(p.emp_var_g)},
                          {"mean_r", value_or_null(p.mean_r)},
                          {"ratio_g", value_or_null(p.ratio_g)},
                          {"ratio_r", value_or_null(p.ratio_r)}});
    }

    nlohmann::json hazard = nullptr;
    if (report.hazard) {
        const auto& h = *report.hazard;
        hazard = {{"bin_a", {h.bin_a.lo, h.bin_a.hi}},
                  {"bin_b", {h.bin_b.lo, h.bin_b.hi}},
                  {"defined_count", h.defined_count},
                  {"hazard_correlation", value_or_null(h.hazard_correlation)},
                  {"greenwood_correlation", value_or_null(h.greenwood_correlation)}};
    }
    return {{"config", config}, {"points", points}, {"hazard_diagnostic", hazard}};
}

}  // namespace kmvar
