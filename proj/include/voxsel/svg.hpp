#pragma once

#include <map>
#include <string>

#include "voxsel/dataset.hpp"

namespace voxsel {

// Static pie chart of per-group selection fractions.
std::string pie_chart_svg(const std::map<FeatureGroup, double>& fractions,
                          const std::string& title);

}  // namespace voxsel
