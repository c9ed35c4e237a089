#include "syrenn/serialize.hpp"

#include "syrenn/error.hpp"

#include <array>
#include <tuple>

namespace syrenn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Json& require(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(where + " is missing \"" + key + "\"");
    }
    return j.at(key);
}

std::vector<double> numbers(const Json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ParseError(what + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::pair<std::size_t, std::size_t> pair_param(const Json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return {fallback, fallback};
    const Json& v = j.at(key);
    if (v.is_number_unsigned()) return {v.get<std::size_t>(), v.get<std::size_t>()};
    if (v.is_array() && v.size() == 2) return {v.at(0).get<std::size_t>(), v.at(1).get<std::size_t>()};
    throw ParseError(std::string("\"") + key + "\" must be a non-negative integer or a pair");
}

std::array<std::size_t, 3> shape3(const Json& j, const std::string& where) {
    const Json& s = require(j, "input_shape", where);
    if (!s.is_array() || s.size() != 3) throw ParseError(where + " \"input_shape\" must be [channels, height, width]");
    return {s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<std::size_t>()};
}

Layer conv_from_json(const Json& j) {
    const auto [channels, height, width] = shape3(j, "conv layer");
    const Json& kernel = require(j, "kernel", "conv layer");
    ConvSpec spec;
    spec.in_channels = channels;
    spec.height = height;
    spec.width = width;
    if (!kernel.is_array() || kernel.empty() || !kernel.at(0).is_array() || kernel.at(0).empty() ||
        !kernel.at(0).at(0).is_array() || kernel.at(0).at(0).empty()) {
        throw ParseError("conv \"kernel\" must be nested [out][in][kh][kw]");
    }
    spec.out_channels = kernel.size();
    spec.kernel_h = kernel.at(0).at(0).size();
    spec.kernel_w = kernel.at(0).at(0).at(0).size();
    for (const auto& out_c : kernel) {
        if (out_c.size() != channels) throw ParseError("conv kernel input channels do not match input_shape");
        for (const auto& in_c : out_c) {
            if (in_c.size() != spec.kernel_h) throw ParseError("conv kernel rows are ragged");
            for (const auto& row : in_c) {
                const auto vals = numbers(row, "conv kernel row");
                if (vals.size() != spec.kernel_w) throw ParseError("conv kernel columns are ragged");
                spec.kernel.insert(spec.kernel.end(), vals.begin(), vals.end());
            }
        }
    }
    if (j.contains("bias")) spec.bias = numbers(j.at("bias"), "conv bias");
    std::tie(spec.stride_h, spec.stride_w) = pair_param(j, "stride", 1);
    std::tie(spec.pad_h, spec.pad_w) = pair_param(j, "padding", 0);
    return lower_convolution(spec);
}

} // namespace

Layer layer_from_json(const Json& j) {
    try {
        const std::string type = require(j, "type", "layer").get<std::string>();
        if (type == "affine") {
            const Json& w = require(j, "weights", "affine layer");
            const auto bias = numbers(require(j, "bias", "affine layer"), "affine bias");
            if (!w.is_array() || w.empty()) throw ParseError("affine \"weights\" must be a non-empty matrix");
            const auto first = numbers(w.at(0), "affine weights row");
            AffineLayer l{Matrix(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(first.size())),
                          Vector(static_cast<Eigen::Index>(bias.size()))};
            for (std::size_t r = 0; r < w.size(); ++r) {
                const auto row = numbers(w.at(r), "affine weights row");
                if (row.size() != first.size()) throw ParseError("affine weights are ragged at row " + std::to_string(r));
                for (std::size_t c = 0; c < row.size(); ++c) {
                    l.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
                }
            }
            for (std::size_t k = 0; k < bias.size(); ++k) l.bias[static_cast<Eigen::Index>(k)] = bias[k];
            if (l.bias.size() != l.weights.rows()) {
                throw ParseError("affine bias has " + std::to_string(bias.size()) + " entries for " +
                                 std::to_string(w.size()) + " rows");
            }
            if (first.empty()) throw ParseError("affine \"weights\" has empty rows");
            return l;
        }
        if (type == "relu") return ReluLayer{};
        if (type == "hard_tanh") return HardTanhLayer{};
        if (type == "leaky_relu") {
            LeakyReluLayer l;
            if (j.contains("alpha")) l.alpha = j.at("alpha").get<double>();
            if (!(l.alpha >= 0.0 && l.alpha < 1.0)) throw ParseError("leaky_relu alpha must lie in [0, 1)");
            return l;
        }
        if (type == "maxpool") {
            if (j.contains("groups")) {
                MaxPoolLayer l;
                l.groups = j.at("groups").get<std::vector<std::vector<std::size_t>>>();
                return l;
            }
            const auto [c, h, w] = shape3(j, "maxpool layer");
            const auto [wh, ww] = pair_param(j, "window", 0);
            return maxpool_from_geometry(c, h, w, wh, ww);
        }
        if (type == "conv") return conv_from_json(j);
        throw ParseError("unsupported layer type \"" + type + "\"");
    } catch (const Json::exception& e) {
        throw ParseError(std::string("layer schema: ") + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

Json layer_to_json(const Layer& layer) {
    return std::visit(overloaded{
                          [](const AffineLayer& l) {
                              Json w = Json::array();
                              for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
                                  Json row = Json::array();
                                  for (Eigen::Index c = 0; c < l.weights.cols(); ++c) row.push_back(l.weights(r, c));
                                  w.push_back(std::move(row));
                              }
                              return Json{{"type", "affine"}, {"weights", std::move(w)}, {"bias", point_to_json(l.bias)}};
                          },
                          [](const ReluLayer&) { return Json{{"type", "relu"}}; },
                          [](const LeakyReluLayer& l) { return Json{{"type", "leaky_relu"}, {"alpha", l.alpha}}; },
                          [](const HardTanhLayer&) { return Json{{"type", "hard_tanh"}}; },
                          [](const MaxPoolLayer& l) { return Json{{"type", "maxpool"}, {"groups", l.groups}}; },
                      },
                      layer);
}

Network network_from_json(const Json& j, std::optional<std::size_t> input_dim) {
    if (!j.is_object()) throw ParseError("network document must be a JSON object");
    const Json& layers = require(j, "layers", "network");
    if (!layers.is_array()) throw ParseError("\"layers\" must be an array");

    std::vector<Layer> parsed;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        try {
            parsed.push_back(layer_from_json(layers.at(i)));
        } catch (const ParseError& e) {
            throw ParseError("layer " + std::to_string(i) + ": " + e.what());
        }
    }
    if (j.contains("input_dim")) {
        if (!j.at("input_dim").is_number_unsigned()) throw ParseError("\"input_dim\" must be a positive integer");
        input_dim = j.at("input_dim").get<std::size_t>();
    }
    if (!input_dim) {
        for (const auto& l : parsed) {
            if (auto d = layer_input_dim(l)) {
                input_dim = d;
                break;
            }
        }
    }
    if (!input_dim || *input_dim == 0) throw ParseError("network needs a positive \"input_dim\"");

    Network net(*input_dim);
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        try {
            net.append(std::move(parsed[i]));
        } catch (const Error& e) {
            throw ParseError("layer " + std::to_string(i) + ": " + e.what());
        }
    }
    return net;
}

Json network_to_json(const Network& net) {
    Json layers = Json::array();
    for (const auto& l : net.layers()) layers.push_back(layer_to_json(l));
    return Json{{"input_dim", net.input_dim()}, {"layers", std::move(layers)}};
}

Point point_from_json(const Json& j) {
    const auto vals = numbers(j, "point");
    if (vals.empty()) throw ParseError("point must have at least one coordinate");
    Point p(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t k = 0; k < vals.size(); ++k) p[static_cast<Eigen::Index>(k)] = vals[k];
    return p;
}

Json point_to_json(const Eigen::Ref<const Point>& p) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < p.size(); ++k) out.push_back(p[k]);
    return out;
}

Matrix vertices_from_json(const Json& j) {
    const Json& list = j.is_object() ? require(j, "vertices", "polytope") : j;
    if (!list.is_array() || list.empty()) throw ParseError("polytope must be a non-empty list of points");
    std::vector<Point> pts;
    for (const auto& v : list) pts.push_back(point_from_json(v));
    for (const auto& p : pts) {
        if (p.size() != pts.front().size()) throw ParseError("polytope vertices have mixed dimensions");
    }
    return to_columns(pts);
}

Json columns_to_json(const Matrix& columns) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < columns.cols(); ++k) out.push_back(point_to_json(columns.col(k)));
    return out;
}

Json partition_to_json(const PartitionSet2D& parts) {
    Json regions = Json::array();
    for (const auto& r : parts.regions) {
        regions.push_back(Json{{"preimage", columns_to_json(r.preimage)}, {"image", columns_to_json(r.image)}});
    }
    return Json{{"input_polytope", columns_to_json(parts.input_polytope.preimage)}, {"regions", std::move(regions)}};
}

Json line_to_json(const SegmentedLine& line) {
    Matrix points(line.start.size(), static_cast<Eigen::Index>(line.ratios.size()));
    for (std::size_t k = 0; k < line.ratios.size(); ++k) {
        points.col(static_cast<Eigen::Index>(k)) = line.point_at(line.ratios[k]);
    }
    return Json{{"start", point_to_json(line.start)},
                {"end", point_to_json(line.end)},
                {"breakpoints", line.ratios},
                {"points", columns_to_json(points)},
                {"images", columns_to_json(line.images)}};
}

Json attribution_to_json(const Attribution& a) {
    return Json{{"target", a.target},
                {"baseline", point_to_json(a.baseline)},
                {"input", point_to_json(a.input)},
                {"values", point_to_json(a.values)},
                {"f_input", a.f_input},
                {"f_baseline", a.f_baseline}};
}

Json labeled_regions_to_json(const PlanarRegion& input, const std::vector<LabeledRegion>& regions) {
    Json out = Json::array();
    for (const auto& r : regions) {
        out.push_back(Json{{"preimage", columns_to_json(r.region.preimage)},
                           {"image", columns_to_json(r.region.image)},
                           {"label", r.label}});
    }
    return Json{{"input_polytope", columns_to_json(input.preimage)}, {"regions", std::move(out)}};
}

std::string dump_document(const Json& j) {
    return j.dump() + "\n";
}

} // namespace syrenn
