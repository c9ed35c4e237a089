#pragma once

#include "pattern.hpp"
#include "syrenn/core.hpp"

#include <functional>
#include <vector>

namespace syrenn::detail {

/// Maps the image vertices of a region known to lie in one linear piece.
/// The first argument is the mean of the image vertices.
using PieceMap = std::function<Matrix(const Vector& center, const Matrix& images)>;

std::vector<PlanarRegion> refine_regions(const std::vector<PlanarRegion>& regions,
                                         const SeparatorFamily& family, const PieceMap& map,
                                         const EngineOptions& options);

std::vector<PlanarRegion> refine_regions_reference(const std::vector<PlanarRegion>& regions,
                                                   const SeparatorFamily& family, const PieceMap& map,
                                                   const EngineOptions& options);

int resolve_threads(int requested);

} // namespace syrenn::detail
