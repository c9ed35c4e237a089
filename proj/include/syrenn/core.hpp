#pragma once

// Symbolic representation of a piecewise-linear network restricted to a
// segment or a planar polygon: a partition of the input into pieces on each
// of which the network is affine.

#include "syrenn/geometry.hpp"
#include "syrenn/network.hpp"

#include <atomic>
#include <cstddef>
#include <vector>

namespace syrenn {

struct PartitionSet2D {
    PlanarRegion input_polytope;
    std::vector<PlanarRegion> regions;
};

/// A segment start -> end split at increasing ratios (first 0, last 1).
/// images.col(k) is the prefix network applied to point_at(ratios[k]).
struct SegmentedLine {
    Point start;
    Point end;
    std::vector<double> ratios;
    Matrix images;

    Point point_at(double t) const { return start + t * (end - start); }
    std::size_t segment_count() const noexcept { return ratios.empty() ? 0 : ratios.size() - 1; }
};

class LayerTransformer {
public:
    enum class Kind { Linear, Piecewise };

    explicit LayerTransformer(Layer layer)
        : layer_(std::move(layer)), kind_(is_linear(layer_) ? Kind::Linear : Kind::Piecewise) {}

    const Layer& layer() const noexcept { return layer_; }
    Kind kind() const noexcept { return kind_; }

private:
    Layer layer_;
    Kind kind_;
};

struct ExtendStats {
    std::atomic<std::size_t> splits{0};
    std::atomic<std::size_t> pops{0};
};

struct EngineOptions {
    /// 0 uses every available core; 1 runs single-threaded.
    int threads = 0;
    std::size_t region_budget = 10'000'000;
    Tolerances tol{};
    ExtendStats* stats = nullptr;
};

/// One Extend step. Linear layers map image vertices only; piecewise layers
/// split each region until no hyperplane of the layer strictly separates its
/// image vertices. Regions are processed in parallel; the output lists the
/// descendants of each input region in input order.
PartitionSet2D extend_2d(const LayerTransformer& t, const PartitionSet2D& parts,
                         const EngineOptions& options = {});

/// Single-threaded global-FIFO worklist. Same region set as extend_2d up to
/// ordering; kept as the test reference.
PartitionSet2D extend_2d_reference(const LayerTransformer& t, const PartitionSet2D& parts,
                                   const EngineOptions& options = {});

SegmentedLine extend_1d(const LayerTransformer& t, const SegmentedLine& line,
                        const EngineOptions& options = {});

PartitionSet2D symbolic_rep_2d(const Network& net, const PlanarRegion& input,
                               const EngineOptions& options = {});

SegmentedLine symbolic_rep_1d(const Network& net, const Point& start, const Point& end,
                              const EngineOptions& options = {});

/// Rotates every region to start at its lexicographically smallest preimage
/// vertex and sorts regions by their rotated preimage vertex sequences.
void canonicalize(PartitionSet2D& parts);

/// Jacobian (output_dim x input_dim) of the network on the piece containing
/// the polygon or segment whose vertices are the columns of `vertices`.
/// Throws GeometryError(DegenerateRegion) when some layer hyperplane strictly
/// separates the vertices.
Matrix region_jacobian(const Network& net, const Matrix& vertices, double eps = 1e-7);
Matrix region_jacobian(const Network& net, const PlanarRegion& region, double eps = 1e-7);
Matrix region_jacobian(const Network& net, const SegmentedLine& line, std::size_t segment,
                       double eps = 1e-7);

} // namespace syrenn
