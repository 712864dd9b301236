#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvcert/precertificate.hpp"
#include "tvcert/stability.hpp"
#include "tvcert/tvgrid/level_structure.hpp"

namespace tvcert::report {

/// "%.17g"; non-finite values print as nan / inf / -inf.
std::string format17(double v);

nlohmann::json to_json(const precert::CertificateReport& r);
nlohmann::json to_json(const tvgrid::LevelStructure& s);

/// Header line then one row per index; every column must have the same length.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

void write_spectrum_csv(std::ostream& out, const std::vector<stability::ModeQuotient>& spectrum);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool points = false;  // draw markers instead of a polyline
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<double> horizontal_guides;
    std::vector<double> vertical_markers;
    int width = 720;
    int height = 480;
};

/// Self-contained SVG. `comment`, when given, is emitted as an XML comment
/// right after the root element.
void write_svg(std::ostream& out, const LinePlot& plot,
               const std::optional<std::string>& comment = std::nullopt);

}  // namespace tvcert::report
