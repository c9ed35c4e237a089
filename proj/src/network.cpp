#include "syrenn/network.hpp"

#include "pattern.hpp"
#include "syrenn/error.hpp"

#include <algorithm>
#include <cmath>

namespace syrenn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t group_total(const MaxPoolLayer& l) {
    std::size_t total = 0;
    for (const auto& g : l.groups) total += g.size();
    return total;
}

} // namespace

bool AffineLayer::operator==(const AffineLayer& other) const {
    return weights.rows() == other.weights.rows() && weights.cols() == other.weights.cols() &&
           bias.size() == other.bias.size() && weights == other.weights && bias == other.bias;
}

bool is_linear(const Layer& layer) noexcept {
    return std::holds_alternative<AffineLayer>(layer);
}

std::string layer_name(const Layer& layer) {
    return std::visit(overloaded{
                          [](const AffineLayer&) { return std::string("affine"); },
                          [](const ReluLayer&) { return std::string("relu"); },
                          [](const LeakyReluLayer&) { return std::string("leaky_relu"); },
                          [](const HardTanhLayer&) { return std::string("hard_tanh"); },
                          [](const MaxPoolLayer&) { return std::string("maxpool"); },
                      },
                      layer);
}

std::optional<std::size_t> layer_input_dim(const Layer& layer) {
    if (const auto* a = std::get_if<AffineLayer>(&layer)) return static_cast<std::size_t>(a->weights.cols());
    if (const auto* m = std::get_if<MaxPoolLayer>(&layer)) return group_total(*m);
    return std::nullopt;
}

std::size_t layer_output_dim(const Layer& layer, std::size_t input_dim) {
    if (const auto* a = std::get_if<AffineLayer>(&layer)) return static_cast<std::size_t>(a->weights.rows());
    if (const auto* m = std::get_if<MaxPoolLayer>(&layer)) return m->groups.size();
    return input_dim;
}

void validate_layer(const Layer& layer, std::size_t input_dim) {
    std::visit(
        overloaded{
            [&](const AffineLayer& l) {
                if (l.weights.rows() == 0 || l.weights.cols() == 0) {
                    throw NetworkError("affine layer has an empty weight matrix");
                }
                if (l.bias.size() != l.weights.rows()) {
                    throw NetworkError("affine bias has " + std::to_string(l.bias.size()) +
                                       " entries for " + std::to_string(l.weights.rows()) + " rows");
                }
                if (!l.weights.allFinite() || !l.bias.allFinite()) {
                    throw NetworkError("affine layer has non-finite entries");
                }
                if (static_cast<std::size_t>(l.weights.cols()) != input_dim) {
                    throw DimensionError("affine layer expects " + std::to_string(l.weights.cols()) +
                                         " inputs, got " + std::to_string(input_dim));
                }
            },
            [&](const ReluLayer&) {},
            [&](const LeakyReluLayer& l) {
                if (!(l.alpha >= 0.0 && l.alpha < 1.0)) {
                    throw NetworkError("leaky relu alpha must lie in [0, 1)");
                }
            },
            [&](const HardTanhLayer&) {},
            [&](const MaxPoolLayer& l) {
                if (l.groups.empty()) throw NetworkError("maxpool needs at least one group");
                const std::size_t total = group_total(l);
                if (total != input_dim) {
                    throw DimensionError("maxpool groups cover " + std::to_string(total) +
                                         " indices, input has " + std::to_string(input_dim));
                }
                std::vector<bool> seen(input_dim, false);
                for (const auto& g : l.groups) {
                    if (g.empty()) throw NetworkError("maxpool group is empty");
                    for (std::size_t idx : g) {
                        if (idx >= input_dim || seen[idx]) {
                            throw NetworkError("maxpool groups must partition the input indices");
                        }
                        seen[idx] = true;
                    }
                }
            },
        },
        layer);
    if (input_dim == 0) throw DimensionError("layer input dimension must be positive");
}

Vector apply_layer(const Layer& layer, const Eigen::Ref<const Vector>& x) {
    return std::visit(
        overloaded{
            [&](const AffineLayer& l) -> Vector { return l.weights * x + l.bias; },
            [&](const ReluLayer&) -> Vector { return x.cwiseMax(0.0); },
            [&](const LeakyReluLayer& l) -> Vector {
                return (x.array() < 0.0).select(l.alpha * x, x);
            },
            [&](const HardTanhLayer&) -> Vector { return x.cwiseMax(-1.0).cwiseMin(1.0); },
            [&](const MaxPoolLayer& l) -> Vector {
                Vector out(static_cast<Eigen::Index>(l.groups.size()));
                for (std::size_t g = 0; g < l.groups.size(); ++g) {
                    double best = x[static_cast<Eigen::Index>(l.groups[g].front())];
                    for (std::size_t idx : l.groups[g]) best = std::max(best, x[static_cast<Eigen::Index>(idx)]);
                    out[static_cast<Eigen::Index>(g)] = best;
                }
                return out;
            },
        },
        layer);
}

Network::Network(std::size_t input_dim) : widths_{input_dim} {
    if (input_dim == 0) throw DimensionError("network input dimension must be positive");
}

Network::Network(std::size_t input_dim, std::vector<Layer> layers) : Network(input_dim) {
    for (auto& layer : layers) append(std::move(layer));
}

void Network::append(Layer layer) {
    validate_layer(layer, output_dim());
    const std::size_t out = layer_output_dim(layer, output_dim());
    layers_.push_back(std::move(layer));
    widths_.push_back(out);
}

Vector evaluate(const Network& net, const Eigen::Ref<const Vector>& x) {
    if (static_cast<std::size_t>(x.size()) != net.input_dim()) {
        throw DimensionError("evaluate: network expects " + std::to_string(net.input_dim()) +
                             " inputs, got " + std::to_string(x.size()));
    }
    Vector v = x;
    for (const auto& layer : net.layers()) v = apply_layer(layer, v);
    return v;
}

std::vector<Hyperplane> pwl_hyperplanes(const Layer& layer, std::size_t dim) {
    const auto family = detail::SeparatorFamily::for_layer(layer, dim);
    std::vector<Hyperplane> out;
    out.reserve(family.size());
    for (std::size_t k = 0; k < family.size(); ++k) out.push_back(family.hyperplane(k));
    return out;
}

AffineMap local_affine(const Layer& layer, const Eigen::Ref<const Vector>& representative, double eps) {
    const Vector at = representative;
    if (const auto need = layer_input_dim(layer); need && *need != static_cast<std::size_t>(at.size())) {
        throw DimensionError("local_affine: layer expects " + std::to_string(*need) + " inputs");
    }
    const auto family = detail::SeparatorFamily::for_layer(layer, static_cast<std::size_t>(at.size()));
    if (family.touches(at, eps)) {
        throw GeometryError(GeometryErrc::AmbiguousPattern,
                            "representative lies on a " + layer_name(layer) + " hyperplane");
    }
    return detail::pattern_affine(layer, at);
}

AffineLayer lower_convolution(const ConvSpec& s) {
    if (s.in_channels == 0 || s.height == 0 || s.width == 0 || s.out_channels == 0 ||
        s.kernel_h == 0 || s.kernel_w == 0 || s.stride_h == 0 || s.stride_w == 0) {
        throw NetworkError("convolution sizes and strides must be positive");
    }
    const std::size_t padded_h = s.height + 2 * s.pad_h;
    const std::size_t padded_w = s.width + 2 * s.pad_w;
    if (s.kernel_h > padded_h || s.kernel_w > padded_w) {
        throw DimensionError("convolution kernel is larger than the padded input");
    }
    if (s.stride_h > padded_h || s.stride_w > padded_w) {
        throw DimensionError("convolution stride is larger than the padded input");
    }
    const std::size_t kernel_size = s.out_channels * s.in_channels * s.kernel_h * s.kernel_w;
    if (s.kernel.size() != kernel_size) {
        throw DimensionError("convolution kernel has " + std::to_string(s.kernel.size()) +
                             " entries, expected " + std::to_string(kernel_size));
    }
    if (!s.bias.empty() && s.bias.size() != s.out_channels) {
        throw DimensionError("convolution bias must have one entry per output channel");
    }

    const std::size_t out_h = (padded_h - s.kernel_h) / s.stride_h + 1;
    const std::size_t out_w = (padded_w - s.kernel_w) / s.stride_w + 1;
    const auto rows = static_cast<Eigen::Index>(s.out_channels * out_h * out_w);
    const auto cols = static_cast<Eigen::Index>(s.in_channels * s.height * s.width);

    AffineLayer out{Matrix::Zero(rows, cols), Vector::Zero(rows)};
    for (std::size_t oc = 0; oc < s.out_channels; ++oc) {
        for (std::size_t oy = 0; oy < out_h; ++oy) {
            for (std::size_t ox = 0; ox < out_w; ++ox) {
                const auto row = static_cast<Eigen::Index>((oc * out_h + oy) * out_w + ox);
                out.bias[row] = s.bias.empty() ? 0.0 : s.bias[oc];
                for (std::size_t ic = 0; ic < s.in_channels; ++ic) {
                    for (std::size_t ky = 0; ky < s.kernel_h; ++ky) {
                        for (std::size_t kx = 0; kx < s.kernel_w; ++kx) {
                            const std::size_t py = oy * s.stride_h + ky;
                            const std::size_t px = ox * s.stride_w + kx;
                            if (py < s.pad_h || px < s.pad_w) continue;
                            const std::size_t iy = py - s.pad_h;
                            const std::size_t ix = px - s.pad_w;
                            if (iy >= s.height || ix >= s.width) continue;
                            const auto col = static_cast<Eigen::Index>((ic * s.height + iy) * s.width + ix);
                            const std::size_t k = ((oc * s.in_channels + ic) * s.kernel_h + ky) * s.kernel_w + kx;
                            out.weights(row, col) += s.kernel[k];
                        }
                    }
                }
            }
        }
    }
    return out;
}

MaxPoolLayer maxpool_from_geometry(std::size_t channels, std::size_t height, std::size_t width,
                                   std::size_t window_h, std::size_t window_w) {
    if (channels == 0 || height == 0 || width == 0 || window_h == 0 || window_w == 0) {
        throw NetworkError("maxpool geometry must be positive");
    }
    if (height % window_h != 0 || width % window_w != 0) {
        throw DimensionError("maxpool window must tile the input exactly");
    }
    MaxPoolLayer out;
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t y = 0; y < height; y += window_h) {
            for (std::size_t x = 0; x < width; x += window_w) {
                std::vector<std::size_t> group;
                for (std::size_t dy = 0; dy < window_h; ++dy) {
                    for (std::size_t dx = 0; dx < window_w; ++dx) {
                        group.push_back((c * height + y + dy) * width + x + dx);
                    }
                }
                out.groups.push_back(std::move(group));
            }
        }
    }
    return out;
}

} // namespace syrenn
