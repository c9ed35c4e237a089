#include "syrenn/svg.hpp"

#include "syrenn/error.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace syrenn {

namespace {

constexpr double kCanvas = 600.0;
constexpr double kMargin = 10.0;
constexpr double kLegendWidth = 140.0;
constexpr double kLegendRow = 22.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

const std::vector<std::string>& default_palette() {
    static const std::vector<std::string> palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette;
}

std::string render_decision_svg(const PlanarRegion& input, const std::vector<LabeledRegion>& regions,
                                const std::vector<std::string>& palette) {
    if (palette.empty()) throw std::invalid_argument("palette must not be empty");
    const auto frame = PlaneFrame::for_vertices(input.preimage);
    if (!frame) throw GeometryError(GeometryErrc::Degenerate, "input polygon has no plane");

    Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (Eigen::Index k = 0; k < input.preimage.cols(); ++k) {
        const Eigen::Vector2d p = frame->project(input.preimage.col(k));
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double span = std::max((hi - lo).maxCoeff(), 1e-300);
    const double scale = kCanvas / span;
    const double width = (hi.x() - lo.x()) * scale + 2 * kMargin;
    const double height = (hi.y() - lo.y()) * scale + 2 * kMargin;

    std::set<std::size_t> labels;
    for (const auto& r : regions) labels.insert(r.label);
    const double total_h = std::max(height, 2 * kMargin + kLegendRow * static_cast<double>(labels.size()));
    const double total_w = width + kLegendWidth;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(total_w) << "\" height=\"" << num(total_h)
        << "\" viewBox=\"0 0 " << num(total_w) << ' ' << num(total_h) << "\">\n"
        << "<g id=\"regions\">\n";
    for (const auto& r : regions) {
        svg << "<path d=\"";
        for (Eigen::Index k = 0; k < r.region.preimage.cols(); ++k) {
            const Eigen::Vector2d p = frame->project(r.region.preimage.col(k));
            svg << (k == 0 ? "M " : " L ") << num(kMargin + (p.x() - lo.x()) * scale) << ' '
                << num(kMargin + (hi.y() - p.y()) * scale);
        }
        svg << " Z\" fill=\"" << palette[r.label % palette.size()]
            << "\" stroke=\"#000000\" stroke-width=\"0.5\" data-label=\"" << r.label << "\"/>\n";
    }
    svg << "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    double y = kMargin;
    for (std::size_t label : labels) {
        svg << "<rect x=\"" << num(width + 10) << "\" y=\"" << num(y) << "\" width=\"14\" height=\"14\" fill=\""
            << palette[label % palette.size()] << "\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n"
            << "<text x=\"" << num(width + 30) << "\" y=\"" << num(y + 12) << "\">label " << label << "</text>\n";
        y += kLegendRow;
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

} // namespace syrenn
