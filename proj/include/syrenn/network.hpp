#pragma once

#include "syrenn/geometry.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace syrenn {

using Vector = Eigen::VectorXd;

struct AffineLayer {
    Matrix weights; // out x in
    Vector bias;    // out

    bool operator==(const AffineLayer& other) const;
};

struct ReluLayer {
    bool operator==(const ReluLayer&) const = default;
};

struct LeakyReluLayer {
    double alpha = 0.01;
    bool operator==(const LeakyReluLayer&) const = default;
};

/// Clamps every component to [-1, 1].
struct HardTanhLayer {
    bool operator==(const HardTanhLayer&) const = default;
};

/// Output k is the max over the input indices in groups[k].
struct MaxPoolLayer {
    std::vector<std::vector<std::size_t>> groups;
    bool operator==(const MaxPoolLayer&) const = default;
};

using Layer = std::variant<AffineLayer, ReluLayer, LeakyReluLayer, HardTanhLayer, MaxPoolLayer>;

bool is_linear(const Layer& layer) noexcept;
std::string layer_name(const Layer& layer);

/// Fixed input width for Affine and MaxPool; nullopt for elementwise layers.
std::optional<std::size_t> layer_input_dim(const Layer& layer);
std::size_t layer_output_dim(const Layer& layer, std::size_t input_dim);

/// Throws NetworkError on bad parameters and DimensionError when the layer
/// cannot accept `input_dim` inputs.
void validate_layer(const Layer& layer, std::size_t input_dim);

Vector apply_layer(const Layer& layer, const Eigen::Ref<const Vector>& x);

/// x -> linear * x + offset
struct AffineMap {
    Matrix linear;
    Vector offset;
};

/// Sequential composition of layers; the empty network is the identity.
class Network {
public:
    explicit Network(std::size_t input_dim = 1);
    Network(std::size_t input_dim, std::vector<Layer> layers);

    /// Validates against the current output width; on error the network is
    /// left unchanged.
    void append(Layer layer);

    std::size_t input_dim() const noexcept { return widths_.front(); }
    std::size_t output_dim() const noexcept { return widths_.back(); }
    /// Input width of layer i; layer_width(size()) is the output width.
    std::size_t layer_width(std::size_t i) const { return widths_.at(i); }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::size_t size() const noexcept { return layers_.size(); }

    bool operator==(const Network& other) const {
        return widths_ == other.widths_ && layers_ == other.layers_;
    }

private:
    std::vector<Layer> layers_;
    std::vector<std::size_t> widths_;
};

Vector evaluate(const Network& net, const Eigen::Ref<const Vector>& x);

/// Hyperplanes separating the linear pieces of a PWL layer, in canonical
/// order. Empty for Affine.
std::vector<Hyperplane> pwl_hyperplanes(const Layer& layer, std::size_t dim);

/// Affine map equal to the layer on the linear piece containing
/// `representative`. Throws GeometryError(AmbiguousPattern) if the point lies
/// within eps of one of the layer's hyperplanes.
AffineMap local_affine(const Layer& layer, const Eigen::Ref<const Vector>& representative,
                       double eps = 1e-7);

/// 2D convolution over a channels x height x width input, flattened row-major.
struct ConvSpec {
    std::size_t in_channels = 1;
    std::size_t height = 1;
    std::size_t width = 1;
    std::size_t out_channels = 1;
    std::size_t kernel_h = 1;
    std::size_t kernel_w = 1;
    std::size_t stride_h = 1;
    std::size_t stride_w = 1;
    std::size_t pad_h = 0;
    std::size_t pad_w = 0;
    std::vector<double> kernel; // out x in x kh x kw, row-major
    std::vector<double> bias;   // out_channels entries, or empty for zeros
};

AffineLayer lower_convolution(const ConvSpec& spec);

/// Non-overlapping max pooling windows expanded to index groups.
MaxPoolLayer maxpool_from_geometry(std::size_t channels, std::size_t height, std::size_t width,
                                   std::size_t window_h, std::size_t window_w);

Network parse_eran(std::string_view text);

/// `input_dim` is used when the document omits "input_dim".
Network parse_json_network(std::string_view text, std::optional<std::size_t> input_dim = std::nullopt);
Layer parse_json_layer(std::string_view text);
std::string serialize_json_network(const Network& net);

} // namespace syrenn
