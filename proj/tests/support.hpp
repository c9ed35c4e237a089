#pragma once

// Fixtures, random generators and independent oracles shared by the unit
// tests and the acceptance suite.

#include "syrenn/analyses.hpp"
#include "syrenn/core.hpp"
#include "syrenn/geometry.hpp"
#include "syrenn/network.hpp"

#include <random>
#include <string>
#include <vector>

namespace syrenn::testing {

using Rng = std::mt19937_64;

/// f(x) = relu(x - 1) - relu(x) - relu(-x) on R^1.
Network example_network();
const char* example_eran_text();
const char* example_json_text();

/// Closed form of the example network: x on [-1,0], -x on [0,1], -1 on [1,2].
double example_closed_form(double x);

PlanarRegion triangle_fixture();                 // (2,0), (-2,2), (-2,0)
PlanarRegion square(double half_side);           // origin-centred, CCW
PlanarRegion box(double x0, double y0, double x1, double y1);

enum class Activation { Relu, LeakyRelu, HardTanh, MaxPool };

struct NetSpec {
    std::size_t input_dim = 2;
    std::size_t output_dim = 2;
    std::vector<std::size_t> widths;          // hidden widths before pooling
    std::vector<Activation> activations;      // one per hidden layer
    double weight_scale = 1.0;
};

Network random_network(Rng& rng, const NetSpec& spec);

/// 2-4 hidden layers, widths <= 16, activations drawn from all four kinds.
Network random_mixed_network(Rng& rng, std::size_t input_dim, std::size_t output_dim);

/// Random convex polygon in R^dim (dim >= 2), counter-clockwise in its frame.
Matrix random_convex_polygon(Rng& rng, std::size_t dim, std::size_t max_vertices = 8);

/// Per-layer piece choices for every PWL unit, with the same tie rule as the
/// engine (active at 0, smallest winner index for MaxPool).
std::vector<int> activation_pattern(const Network& net, const Vector& x);

/// Frame coordinates of every preimage vertex.
std::vector<Eigen::Vector2d> plane_coords(const Matrix& vertices, const PlaneFrame& frame);

/// Distance from q to the nearest edge line of a convex polygon given in
/// plane coordinates; negative when q is outside.
double inner_distance(const std::vector<Eigen::Vector2d>& polygon, const Eigen::Vector2d& q);

/// Central-difference Jacobian restricted to the frame directions u, w.
Matrix fd_plane_jacobian(const Network& net, const Point& p, const PlaneFrame& frame, double h);

struct LinearityReport {
    std::size_t regions = 0;
    std::size_t failures = 0;
    double worst = 0.0;
};

/// Three interior points per region, finite-difference Jacobians compared
/// pairwise with tolerance `rel` relative to max(1, |J|).
LinearityReport check_linearity(const Network& net, const PartitionSet2D& parts, double rel);

struct CoverageReport {
    double area_error = 0.0;   // |sum area - area(X)| / area(X)
    std::size_t samples = 0;
    std::size_t uncovered = 0; // interior samples in no region
    std::size_t overlapped = 0;
};

/// Area conservation plus point-location disjointness on random samples.
CoverageReport check_coverage(const PartitionSet2D& parts, Rng& rng, std::size_t samples);

/// Index of the region whose interior contains p (nullopt if p lies within
/// `band` of a boundary or outside every region). All regions must share the
/// frame of the input polytope.
class RegionLocator {
public:
    RegionLocator(const std::vector<PlanarRegion>& regions, const PlaneFrame& frame);
    std::optional<std::size_t> locate(const Eigen::Vector2d& q, double band) const;
    std::size_t hits(const Eigen::Vector2d& q, double band) const;

private:
    std::vector<std::vector<Eigen::Vector2d>> polys_;
    std::vector<Eigen::AlignedBox2d> boxes_;
};

double image_error(const Network& net, const PartitionSet2D& parts, std::size_t prefix_layers);

/// Network made of the first k layers.
Network prefix(const Network& net, std::size_t k);

std::string slurp(const std::string& path);

} // namespace syrenn::testing
