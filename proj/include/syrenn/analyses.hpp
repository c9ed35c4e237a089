#pragma once

// Analyses built on the symbolic representation: exact and sampled
// Integrated Gradients, exact decision regions, and vertex enumeration for
// repair pipelines.

#include "syrenn/core.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace syrenn {

struct Attribution {
    Vector values;
    std::size_t target = 0;
    Point baseline;
    Point input;
    double f_input = 0.0;
    double f_baseline = 0.0;
};

/// Integrated Gradients computed from the linear pieces of the segment
/// baseline -> input. Exact up to floating point.
Attribution exact_ig(const Network& net, const Point& baseline, const Point& input, std::size_t target,
                     const EngineOptions& options = {});

/// Independent attributions for many (baseline, input) pairs.
std::vector<Attribution> exact_ig_batch(const Network& net, const std::vector<std::pair<Point, Point>>& pairs,
                                        std::size_t target, const EngineOptions& options = {});

enum class RiemannScheme { Left, Trapezoid };

/// m-sample approximation: left uses alpha = k/m for k < m; trapezoid uses
/// k = 0..m with the two endpoints weighted 1/2. A sample that lands on a
/// kink is nudged by 1e-9 of the path toward the interior.
Attribution sampled_ig(const Network& net, const Point& baseline, const Point& input, std::size_t target,
                       std::size_t samples, RiemannScheme scheme, const EngineOptions& options = {});

/// Serial version of sampled_ig, kept as the test reference.
Attribution sampled_ig_reference(const Network& net, const Point& baseline, const Point& input,
                                 std::size_t target, std::size_t samples, RiemannScheme scheme);

/// Gradient of output `target` at x on the piece selected by the tie rule.
Vector output_gradient(const Network& net, const Point& x, std::size_t target);

struct LabeledRegion {
    PlanarRegion region;
    std::size_t label = 0;
};

/// Argmax with ties within eps resolved to the smallest index.
std::size_t argmax_label(const Eigen::Ref<const Vector>& scores, double eps = 1e-9);

/// Partition of the polygon into pieces of constant argmax class.
std::vector<LabeledRegion> decision_regions(const Network& net, const PlanarRegion& input,
                                            const EngineOptions& options = {});

struct PartitionVertex {
    Point preimage;
    Point image;
};

/// Deduplicated vertices of every region, sorted by preimage.
std::vector<PartitionVertex> enumerate_vertices(const PartitionSet2D& parts, const Tolerances& tol = {});

} // namespace syrenn
