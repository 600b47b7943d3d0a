#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "kmvar/estimators.hpp"
#include "kmvar/export.hpp"
#include "kmvar/lifetable.hpp"
#include "kmvar/numeric.hpp"
#include "kmvar/plot.hpp"
#include "kmvar/simulation.hpp"

namespace kmvar::cli {

namespace {

namespace fs = std::filesystem;

struct EstimateOptions {
    std::string input;
    double alpha = 0.05;
    std::string convention = "paper";
    bool clamp = false;
    std::string format = "csv";
    std::string output;
    std::string out_dir = ".";
};

struct SimulateOptions {
    std::int64_t n = 500;
    std::int64_t reps = 4000;
    double event_rate = 1.0;
    std::string censor = "uniform:3.0";
    std::uint64_t seed = 42;
    std::string eval_times;
    unsigned workers = 0;
    std::string output;
    std::string emit_dataset;
};

fs::path resolve_output(const std::string& path) {
    fs::path p(path);
    if (p.is_relative()) {
        if (const char* base = std::getenv(kOutputDirEnv); base != nullptr && *base != '\0') {
            return fs::path(base) / p;
        }
    }
    return p;
}

std::optional<std::string> read_file(const std::string& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) return std::nullopt;
    return text;
}

/// Writes `content` to `path`, or to `out` when `path` is empty.
int emit(const std::string& path, const std::string& content, std::ostream& out,
         std::ostream& err) {
    if (path.empty()) {
        out << content;
        return kOk;
    }
    const fs::path target = resolve_output(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    std::ofstream file(target, std::ios::binary);
    file << content;
    if (!file) {
        err << "error: cannot write " << target.string() << '\n';
        return kCantCreate;
    }
    return kOk;
}

struct LoadedInput {
    RiskTable table;
    EstimateCurve curve;
    std::string checksum;
    double max_time = 0.0;
};

/// Shared front half of estimate/plot. Returns an exit code on failure.
std::variant<LoadedInput, int> load(const EstimateOptions& opt, std::ostream& err) {
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) {
        err << "error: --alpha must lie in (0, 1)\n";
        return kUsage;
    }
    const auto text = read_file(opt.input);
    if (!text) {
        err << "error: cannot read " << opt.input << '\n';
        return kUnreadable;
    }
    LoadedInput in;
    try {
        const auto records = parse_observations_csv(*text);
        in.table = build_risk_table(records);
        for (const auto& r : records) in.max_time = std::max(in.max_time, r.time);
    } catch (const EmptyDataset& e) {
        err << "error: " << opt.input << ": " << e.what() << '\n';
        return kMalformed;
    } catch (const InvalidRecord& e) {
        err << "error: " << opt.input << ": " << e.what() << '\n';
        return kMalformed;
    }
    in.curve = build_curve(in.table, opt.alpha, *parse_convention(opt.convention), opt.clamp);
    in.checksum = input_checksum(*text);
    return in;
}

int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err) {
    auto loaded = load(opt, err);
    if (auto* code = std::get_if<int>(&loaded)) return *code;
    const auto& in = std::get<LoadedInput>(loaded);

    std::ostringstream body;
    if (opt.format == "json") {
        body << estimate_json(in.table, in.curve, in.checksum).dump(2) << '\n';
    } else {
        write_estimate_csv(body, in.table, in.curve, in.checksum);
    }
    return emit(opt.output, body.str(), out, err);
}

int cmd_plot(const EstimateOptions& opt, std::ostream& out, std::ostream& err) {
    auto loaded = load(opt, err);
    if (auto* code = std::get_if<int>(&loaded)) return *code;
    const auto& in = std::get<LoadedInput>(loaded);

    const fs::path dir = resolve_output(opt.out_dir);
    try {
        write_plots(dir, in.curve, in.max_time);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCantCreate;
    }
    for (const auto& name : kPlotFiles) out << (dir / name).string() << '\n';
    return kOk;
}

std::optional<CensorModel> parse_censor(const std::string& spec) {
    if (spec == "none") return CensorModel::none();
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return std::nullopt;
    const std::string kind = spec.substr(0, colon);
    double param = 0.0;
    try {
        std::size_t used = 0;
        param = std::stod(spec.substr(colon + 1), &used);
        if (used != spec.size() - colon - 1) return std::nullopt;
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (kind == "uniform") return CensorModel::uniform(param);
    if (kind == "exp") return CensorModel::exponential(param);
    return std::nullopt;
}

std::optional<std::vector<double>> parse_times(const std::string& list) {
    std::vector<double> out;
    if (list.empty()) return out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return out;
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    if (!opt.emit_dataset.empty()) {
        const auto records = leader_stand_in(opt.seed);
        std::ostringstream body;
        write_observations_csv(body, records);
        const int rc = emit(opt.emit_dataset, body.str(), out, err);
        if (rc == kOk) {
            std::int64_t events = 0;
            for (const auto& r : records) events += r.status;
            err << "wrote " << records.size() << " subjects (" << events << " events) to "
                << resolve_output(opt.emit_dataset).string() << '\n';
        }
        return rc;
    }

    SimConfig config;
    config.n = opt.n;
    config.reps = opt.reps;
    config.event_rate = opt.event_rate;
    config.seed = opt.seed;
    config.workers = opt.workers;
    const auto censor = parse_censor(opt.censor);
    if (!censor) {
        err << "error: invalid config: censor: expected none, uniform:<c_max> or exp:<rate>\n";
        return kUsage;
    }
    config.censor = *censor;
    const auto times = parse_times(opt.eval_times);
    if (!times) {
        err << "error: invalid config: eval_times: expected comma-separated numbers\n";
        return kUsage;
    }
    config.eval_times = *times;

    SimReport report;
    try {
        validate(config);
        report = run_validation(config);
    } catch (const InvalidConfig& e) {
        err << "error: invalid config: " << e.field() << ": " << e.what() << '\n';
        return kUsage;
    }

    const int rc = emit(opt.output, report_json(report).dump(2) + "\n", out, err);
    if (rc != kOk) return rc;
    std::ostream& summary = opt.output.empty() ? err : out;
    const auto opt_str = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("null");
    };
    for (const auto& p : report.points) {
        summary << "t=" << format_double(p.t) << " ratio_g=" << opt_str(p.ratio_g)
                << " ratio_r=" << opt_str(p.ratio_r) << " defined=" << p.defined_count << '\n';
    }
    return kOk;
}

void add_estimate_flags(CLI::App* cmd, EstimateOptions& opt) {
    cmd->add_option("input", opt.input, "CSV file with header time,status")->required();
    cmd->add_option("--alpha", opt.alpha, "Confidence parameter alpha in (0, 1)");
    cmd->add_option("--convention", opt.convention,
                    "Normal quantile: paper = Phi^-1(1-alpha), two_sided = Phi^-1(1-alpha/2)")
        ->check(CLI::IsMember({"paper", "two_sided"}));
    cmd->add_flag("--clamp", opt.clamp, "Floor lower interval bounds at 0");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kaplan-Meier, Greenwood and variance-of-Greenwood estimates", "kmvar"};
    app.require_subcommand(1);

    EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "Estimate table for a time,status CSV");
    add_estimate_flags(estimate, est);
    estimate->add_option("--format", est.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    estimate->add_option("-o,--output", est.output, "Output file (default: stdout)");

    EstimateOptions plt;
    auto* plot = app.add_subcommand("plot", "Write step-plot SVGs and the plot-point CSV");
    add_estimate_flags(plot, plt);
    plot->add_option("--out-dir", plt.out_dir, "Output directory");

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo validation of the variances");
    simulate->add_option("--n", sim.n, "Subjects per replication");
    simulate->add_option("--reps", sim.reps, "Replications");
    simulate->add_option("--event-rate", sim.event_rate, "Exponential event rate");
    simulate->add_option("--censor", sim.censor, "none | uniform:<c_max> | exp:<rate>");
    simulate->add_option("--seed", sim.seed, "Master seed");
    simulate->add_option("--eval-times", sim.eval_times, "Comma-separated evaluation times");
    simulate->add_option("--workers", sim.workers, "Worker threads (0: all cores)");
    simulate->add_option("-o,--output", sim.output, "Report file (default: stdout)");
    simulate->add_option("--emit-dataset", sim.emit_dataset,
                         "Write the 9344-subject synthetic trial dataset to this CSV and exit");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (estimate->parsed()) return cmd_estimate(est, out, err);
        if (plot->parsed()) return cmd_plot(plt, out, err);
        return cmd_simulate(sim, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace kmvar::cli
