#include "voxsel/svg.hpp"

#include <cmath>
#include <sstream>

namespace voxsel {

namespace {

const char* color_for(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::Gender: return "#999999";
        case FeatureGroup::G1: return "#4e79a7";
        case FeatureGroup::G2: return "#f28e2b";
        case FeatureGroup::G3: return "#e15759";
        case FeatureGroup::G4: return "#76b7b2";
        case FeatureGroup::G5: return "#59a14f";
        case FeatureGroup::G6: return "#edc948";
        case FeatureGroup::Unknown: break;
    }
    return "#b07aa1";
}

std::string fmt(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

}  // namespace

std::string pie_chart_svg(const std::map<FeatureGroup, double>& fractions,
                          const std::string& title) {
    const double cx = 150.0, cy = 160.0, radius = 110.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"460\" height=\"320\" "
          "viewBox=\"0 0 460 320\">\n";
    os << "  <text x=\"230\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"15\">"
       << title << "</text>\n";

    double angle = -0.5 * M_PI;  // start at 12 o'clock
    int legend_row = 0;
    for (const auto& [g, frac] : fractions) {
        if (frac <= 0.0) continue;
        const double sweep = 2.0 * M_PI * frac;
        if (frac >= 1.0 - 1e-12) {
            os << "  <circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << radius
               << "\" fill=\"" << color_for(g) << "\" stroke=\"white\"/>\n";
        } else {
            const double x0 = cx + radius * std::cos(angle);
            const double y0 = cy + radius * std::sin(angle);
            const double x1 = cx + radius * std::cos(angle + sweep);
            const double y1 = cy + radius * std::sin(angle + sweep);
            const int large = sweep > M_PI ? 1 : 0;
            os << "  <path d=\"M" << fmt(cx) << "," << fmt(cy) << " L" << fmt(x0) << ","
               << fmt(y0) << " A" << fmt(radius) << "," << fmt(radius) << " 0 " << large
               << " 1 " << fmt(x1) << "," << fmt(y1) << " Z\" fill=\"" << color_for(g)
               << "\" stroke=\"white\"/>\n";
        }
        const double ly = 60.0 + 24.0 * legend_row;
        os << "  <rect x=\"300\" y=\"" << fmt(ly - 11) << "\" width=\"14\" height=\"14\" fill=\""
           << color_for(g) << "\"/>\n";
        os << "  <text x=\"322\" y=\"" << fmt(ly) << "\" font-family=\"sans-serif\" "
              "font-size=\"13\">"
           << to_string(g) << "  " << fmt(100.0 * frac) << "%</text>\n";
        angle += sweep;
        ++legend_row;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace voxsel
