#include "tvcert/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <iterator>

#include "tvcert/errors.hpp"

namespace tvcert::report {

std::string format17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// JSON has no representation for non-finite numbers.
nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return format17(v);
}

nlohmann::json numbers(const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

}  // namespace

nlohmann::json to_json(const precert::CertificateReport& r) {
    nlohmann::json j;
    j["sigma"] = number(r.sigma);
    j["tau"] = number(r.tau);
    j["radii"] = numbers(r.radii);
    j["amplitudes"] = numbers(r.amplitudes);
    j["alpha"] = numbers(r.alpha);
    j["beta"] = numbers(r.beta);
    j["gram_condition"] = number(r.gram_condition);
    j["constraint_residual"] = number(r.constraint_residual);
    j["ridge_applied"] = r.ridge_applied;
    j["saturation_residuals"] = numbers(r.saturation_residuals);
    j["eta_residuals"] = numbers(r.eta_residuals);
    j["derivative_residuals"] = numbers(r.derivative_residuals);
    j["feasibility_margin"] = number(r.feasibility_margin);
    j["sup_outside"] = number(r.sup_outside);
    j["argmax_outside"] = number(r.argmax_outside);
    j["window_max"] = numbers(r.window_max);
    j["tail_bound"] = number(r.tail_bound);
    j["total_moment"] = number(r.total_moment);
    j["scan_radius"] = number(r.scan_radius);
    j["scan_points"] = r.scan_points;
    j["stability_margins"] = numbers(r.stability_margins);
    j["fv_second_numeric"] = numbers(r.fv_second_numeric);
    j["fv_second_closed"] = numbers(r.fv_second_closed);
    j["fv_second_unsigned"] = numbers(r.fv_second_printed);
    j["second_derivative_mismatch"] = r.second_derivative_mismatch;
    j["verdict"] = precert::to_string(r.verdict);
    j["minimal_norm_certificate"] = r.minimal_norm_certificate;
    return j;
}

nlohmann::json to_json(const tvgrid::LevelStructure& s) {
    nlohmann::json j;
    j["threshold"] = number(s.threshold);
    j["component_count"] = s.component_count();
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : s.components) {
        comps.push_back({{"pixel_count", c.pixel_count},
                         {"area", number(c.area)},
                         {"mean_amplitude", number(c.mean_amplitude)},
                         {"median_amplitude", number(c.median_amplitude)},
                         {"sign", c.sign},
                         {"bounding_box",
                          {{"row_min", c.row_min},
                           {"row_max", c.row_max},
                           {"col_min", c.col_min},
                           {"col_max", c.col_max}}}});
    }
    j["components"] = comps;
    return j;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw InvalidArgument("write_csv: header/column count");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw InvalidArgument("write_csv: ragged columns");
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < columns.size(); ++k)
            out << (k ? "," : "") << format17(columns[k][i]);
        out << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const std::vector<stability::ModeQuotient>& spectrum) {
    out << "k,quotient\n";
    for (const auto& m : spectrum) out << m.k << ',' << format17(m.quotient) << '\n';
}

namespace {

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

/// Roughly five round-numbered ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0})
        if (f * mag >= raw) {
            step = f * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(v);
    return t;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_svg(std::ostream& out, const LinePlot& plot, const std::optional<std::string>& comment) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : plot.series) {
        if (s.x.size() != s.y.size()) throw InvalidArgument("write_svg: series x/y lengths differ");
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    }
    for (double g : plot.horizontal_guides) {
        ymin = std::min(ymin, g);
        ymax = std::max(ymax, g);
    }
    for (double v : plot.vertical_markers) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
    if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
    if (xmax - xmin <= 0.0) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin <= 0.0) ymin -= 0.5, ymax += 0.5;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double W = plot.width, H = plot.height;
    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\""
        << plot.height << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\">\n";
    if (comment) out << "<!-- " << escape(*comment) << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<text x=\"" << fmt(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(plot.title) << "</text>\n";
    out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(xmin, xmax)) {
        out << "<line x1=\"" << fmt(X(t)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(X(t))
            << "\" y2=\"" << fmt(top + ph + 5) << "\" stroke=\"black\"/>";
        out << "<text x=\"" << fmt(X(t)) << "\" y=\"" << fmt(top + ph + 18)
            << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (double t : ticks(ymin, ymax)) {
        out << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(Y(t)) << "\" x2=\"" << fmt(left)
            << "\" y2=\"" << fmt(Y(t)) << "\" stroke=\"black\"/>";
        out << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(Y(t) + 4)
            << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
    }
    out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(H - 15)
        << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << fmt(top + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

    for (double g : plot.horizontal_guides)
        out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(Y(g)) << "\" x2=\"" << fmt(left + pw)
            << "\" y2=\"" << fmt(Y(g)) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    for (double v : plot.vertical_markers)
        out << "<line x1=\"" << fmt(X(v)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(X(v))
            << "\" y2=\"" << fmt(top + ph) << "\" stroke=\"#888\" stroke-dasharray=\"2,3\"/>\n";

    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const Series& ser = plot.series[s];
        const char* color = kPalette[s % std::size(kPalette)];
        if (ser.points) {
            for (std::size_t k = 0; k < ser.x.size(); ++k)
                if (std::isfinite(ser.x[k]) && std::isfinite(ser.y[k]))
                    out << "<circle cx=\"" << fmt(X(ser.x[k])) << "\" cy=\"" << fmt(Y(ser.y[k]))
                        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (std::size_t k = 0; k < ser.x.size(); ++k) {
                if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k])) continue;
                out << (first ? "" : " ") << fmt(X(ser.x[k])) << ',' << fmt(Y(ser.y[k]));
                first = false;
            }
            out << "\"/>\n";
        }
        if (!ser.label.empty())
            out << "<text x=\"" << fmt(left + pw - 10) << "\" y=\"" << fmt(top + 16 + 16 * s)
                << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(ser.label)
                << "</text>\n";
    }
    out << "</g>\n</svg>\n";
}

}  // namespace tvcert::report
