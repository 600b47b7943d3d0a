#include "kmvar/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kmvar/numeric.hpp"

namespace kmvar {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Scale {
    double lo, hi, px_lo, px_hi;
    double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

/// Series of one curve quantity; stops at the first point where `get` is
/// empty.
template <typename Get>
StepSeries make_series(std::string name, const EstimateCurve& curve, double y0, Get get) {
    StepSeries s;
    s.name = std::move(name);
    s.x.push_back(0.0);
    s.y.push_back(y0);
    for (const auto& p : curve.points) {
        const std::optional<double> v = get(p);
        if (!v) {
            s.undefined_from = p.t;
            break;
        }
        if (p.t == 0.0) {
            s.y.back() = *v;
        } else {
            s.x.push_back(p.t);
            s.y.push_back(*v);
        }
    }
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

std::string render_svg(const StepPlot& plot) {
    double y_lo = 0.0;
    double y_hi = 0.0;
    for (const auto& s : plot.series) {
        for (double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
    y_hi += 0.05 * (y_hi - y_lo);
    const double x_max = plot.x_max > 0.0 ? plot.x_max : 1.0;

    const Scale sx{0.0, x_max, kLeft, kWidth - kRight};
    const Scale sy{y_lo, y_hi, kHeight - kBottom, kTop};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<title>" << escape(plot.title) << "</title>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(plot.title) << "</text>\n";

    // Axes and ticks.
    svg << "<g class=\"axes\" stroke=\"#444\" font-size=\"11\" font-family=\"sans-serif\">\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << sy(y_lo) << "\" x2=\"" << kWidth - kRight
        << "\" y2=\"" << sy(y_lo) << "\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << sy(y_lo) << "\" x2=\"" << kLeft
        << "\" y2=\"" << kTop << "\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x_max * i / 5.0;
        const double yv = y_lo + (y_hi - y_lo) * i / 5.0;
        svg << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(sy(y_lo) + 16)
            << "\" text-anchor=\"middle\" stroke=\"none\">" << fmt(xv, "%.4g") << "</text>\n"
            << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(sy(yv) + 4)
            << "\" text-anchor=\"end\" stroke=\"none\">" << fmt(yv, "%.3g") << "</text>\n";
    }
    svg << "<text x=\"" << fmt((kLeft + kWidth - kRight) / 2) << "\" y=\"" << fmt(kHeight - 10)
        << "\" text-anchor=\"middle\" stroke=\"none\">time</text>\n"
        << "<text x=\"16\" y=\"" << fmt((kTop + kHeight - kBottom) / 2)
        << "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 16 "
        << fmt((kTop + kHeight - kBottom) / 2) << ")\">" << escape(plot.y_label) << "</text>\n"
        << "</g>\n";

    std::optional<double> undefined_from;
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const StepSeries& s = plot.series[k];
        if (s.undefined_from) {
            undefined_from = undefined_from ? std::min(*undefined_from, *s.undefined_from)
                                            : *s.undefined_from;
        }
        if (s.x.empty()) continue;

        std::string d = "M" + fmt(sx(s.x[0])) + " " + fmt(sy(s.y[0]));
        std::string steps;
        for (std::size_t i = 1; i < s.x.size(); ++i) {
            d += " H" + fmt(sx(s.x[i]));
            if (s.y[i] != s.y[i - 1]) {
                d += " V" + fmt(sy(s.y[i]));
                if (!steps.empty()) steps += ';';
                steps += format_double(s.x[i]) + ":" + format_double(s.y[i - 1]) + ":" +
                         format_double(s.y[i]);
            }
        }
        const double end = s.undefined_from ? *s.undefined_from : std::max(x_max, s.x.back());
        d += " H" + fmt(sx(end));

        const bool estimate = k == 0;
        svg << "<path class=\"" << (estimate ? "estimate" : "band") << "\" data-series=\""
            << escape(s.name) << "\"";
        if (estimate) svg << " data-steps=\"" << steps << "\"";
        svg << " d=\"" << d << "\" fill=\"none\" stroke=\""
            << (estimate ? "black" : "steelblue") << "\" stroke-width=\""
            << (estimate ? "1.8" : "1.2") << "\"" << (estimate ? "" : " stroke-dasharray=\"5 3\"")
            << "/>\n";
    }

    if (undefined_from) {
        svg << "<text class=\"annotation\" x=\"" << fmt(kWidth - kRight - 4) << "\" y=\""
            << fmt(kTop + 14) << "\" text-anchor=\"end\" font-size=\"12\" fill=\"firebrick\">"
            << "undefined beyond t=" << format_double(*undefined_from) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_plots(const std::filesystem::path& dir, const EstimateCurve& curve, double x_max) {
    std::filesystem::create_directories(dir);
    const double z = wald_z(curve.alpha, curve.convention);
    const auto floor0 = [&](double v) { return curve.clamp ? std::max(0.0, v) : v; };

    const auto s_of = [](const EstimatePoint& p) { return std::optional<double>(p.s); };
    const auto g_of = [](const EstimatePoint& p) { return p.g; };
    const auto r_of = [](const EstimatePoint& p) { return p.r; };
    const auto s_lo = [&](const EstimatePoint& p) -> std::optional<double> {
        if (!p.g) return std::nullopt;
        return floor0(p.s - z * std::sqrt(*p.g));
    };
    const auto s_hi = [&](const EstimatePoint& p) -> std::optional<double> {
        if (!p.g) return std::nullopt;
        return p.s + z * std::sqrt(*p.g);
    };
    const auto g_lo = [](const EstimatePoint& p) { return p.ci_lo; };
    const auto g_hi = [](const EstimatePoint& p) { return p.ci_hi; };

    const std::string level = fmt(100.0 * (1.0 - curve.alpha), "%.4g");
    const std::string band = " with pointwise " + level + "% Wald interval (" +
                             std::string(to_string(curve.convention)) + ")";

    const StepPlot plots[] = {
        {"Kaplan-Meier survival", "S(t)", x_max, {make_series("s", curve, 1.0, s_of)}},
        {"Greenwood variance", "G(t)", x_max, {make_series("g", curve, 0.0, g_of)}},
        {"Variance of the Greenwood estimator", "R(t)", x_max,
         {make_series("r", curve, 0.0, r_of)}},
        {"Kaplan-Meier survival" + band, "S(t)", x_max,
         {make_series("s", curve, 1.0, s_of), make_series("s_lo", curve, 1.0, s_lo),
          make_series("s_hi", curve, 1.0, s_hi)}},
        {"Greenwood variance" + band, "G(t)", x_max,
         {make_series("g", curve, 0.0, g_of), make_series("g_lo", curve, 0.0, g_lo),
          make_series("g_hi", curve, 0.0, g_hi)}},
    };
    for (std::size_t i = 0; i < 5; ++i) write_file(dir / kPlotFiles[i], render_svg(plots[i]));

    std::ostringstream csv;
    const auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("null");
    };
    csv << "t,s,s_lo,s_hi,g,g_lo,g_hi,r\n";
    csv << "0,1,1,1,0,0,0,0\n";
    for (const auto& p : curve.points) {
        csv << format_double(p.t) << ',' << format_double(p.s) << ',' << cell(s_lo(p)) << ','
            << cell(s_hi(p)) << ',' << cell(p.g) << ',' << cell(p.ci_lo) << ','
            << cell(p.ci_hi) << ',' << cell(p.r) << '\n';
    }
    write_file(dir / kPlotFiles[5], csv.str());
}

}  // namespace kmvar
