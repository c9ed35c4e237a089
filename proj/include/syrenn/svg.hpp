#pragma once

#include "syrenn/analyses.hpp"

#include <string>
#include <vector>

namespace syrenn {

/// Ten fixed fill colours indexed by label (wrapping for larger labels).
const std::vector<std::string>& default_palette();

/// One <path> per labeled region, filled by label, with 0.5-unit black
/// borders and a legend of the labels present. Plane coordinates come from
/// the polygon's frame (standard axes in 2D) with y pointing up.
std::string render_decision_svg(const PlanarRegion& input, const std::vector<LabeledRegion>& regions,
                                const std::vector<std::string>& palette = default_palette());

} // namespace syrenn
