#pragma once

// JSON encodings shared by the CLI and the analysis service. Every document
// is written with nlohmann's shortest round-trip number formatting, so the
// same value always produces the same bytes.

#include "syrenn/analyses.hpp"
#include "syrenn/core.hpp"
#include "syrenn/network.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace syrenn {

using Json = nlohmann::json;

Layer layer_from_json(const Json& j);
Json layer_to_json(const Layer& layer);
Network network_from_json(const Json& j, std::optional<std::size_t> input_dim = std::nullopt);
Json network_to_json(const Network& net);

Point point_from_json(const Json& j);
Json point_to_json(const Eigen::Ref<const Point>& p);
/// Accepts [[x, y], ...] or {"vertices": [[x, y], ...]}; returns columns.
Matrix vertices_from_json(const Json& j);
Json columns_to_json(const Matrix& columns);

Json partition_to_json(const PartitionSet2D& parts);
Json line_to_json(const SegmentedLine& line);
Json attribution_to_json(const Attribution& a);
Json labeled_regions_to_json(const PlanarRegion& input, const std::vector<LabeledRegion>& regions);

/// Compact dump followed by a newline.
std::string dump_document(const Json& j);

} // namespace syrenn
