#pragma once

// Floating-point primitives for bounded convex 2D polygons embedded in R^n.
//
// Polygons are kept in V-representation only: a column-major vertex matrix in
// counter-clockwise order (no repeated closing vertex), paired with a second
// matrix holding the image of every vertex under the network prefix computed
// so far.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace syrenn {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Tolerances {
    double side = 1e-7;    // relative band for side classification
    double vertex = 1e-10; // vertex deduplication distance
    double area = 1e-12;   // degenerate-split filter, relative to the parent area
    double plane = 1e-6;   // coplanarity residual, relative to polygon extent
};

/// The set {x : normal . x = offset}.
struct Hyperplane {
    Point normal;
    double offset = 0.0;
};

/// Columns are vertices. preimage is n x v, image is m x v.
struct PlanarRegion {
    Matrix preimage;
    Matrix image;

    Eigen::Index size() const noexcept { return preimage.cols(); }
};

/// An orthonormal 2D coordinate system on the plane of a polygon.
///
/// Polygons in R^2 use the standard axes so that clockwise input can be told
/// apart from counter-clockwise input. In higher dimensions the frame is
/// induced by the first three non-collinear vertices, which makes the
/// polygon counter-clockwise by construction.
struct PlaneFrame {
    Point origin;
    Point u;
    Point w;

    Eigen::Vector2d project(const Eigen::Ref<const Point>& p) const {
        const Point d = p - origin;
        return {u.dot(d), w.dot(d)};
    }

    static PlaneFrame standard2d();
    static std::optional<PlaneFrame> induced(const Matrix& vertices);
    static std::optional<PlaneFrame> for_vertices(const Matrix& vertices);
};

/// Sign of N.p - b, or 0 when |N.p - b| <= eps * (1 + |b| + |N| |p|).
int side_of(const Hyperplane& h, const Eigen::Ref<const Point>& p, double eps);

/// Factor t such that a + t (b - a) lies on the plane. Throws
/// GeometryError(Parallel) when the segment is (nearly) parallel to it.
double crossing_ratio(const Hyperplane& h, const Eigen::Ref<const Point>& a_img,
                      const Eigen::Ref<const Point>& b_img, double eps = 1e-12);

using SplitResult = std::optional<std::pair<PlanarRegion, PlanarRegion>>;

/// Splits `region` by `h`, which is evaluated on the IMAGE vertices. The first
/// returned half lies on the side of the first strictly-signed vertex.
/// Returns nullopt when nothing is strictly separated or when one half would be
/// degenerate.
SplitResult split_by_plane(const PlanarRegion& region, const Hyperplane& h,
                           const Tolerances& tol = {});

/// Same as split_by_plane but takes precomputed N.img_k - b values and their
/// tolerance-aware signs. Used by the Extend kernels.
SplitResult split_by_values(const PlanarRegion& region, std::span<const double> values,
                            std::span<const int> signs, const Tolerances& tol = {});

/// Shoelace area in plane coordinates. Collinear or fewer than three vertices
/// give 0; vertices off the common plane throw GeometryError(NonCoplanar).
double polygon_area(const Matrix& vertices, const Tolerances& tol = {});
double polygon_area(const PlanarRegion& region, const Tolerances& tol = {});

/// Signed shoelace area in the given frame. No coplanarity check.
double signed_area(const Matrix& vertices, const PlaneFrame& frame);

/// Vertex average; interior for any non-degenerate convex polygon.
Point centroid(const Matrix& vertices);

/// Checks vertex count, finiteness, distinct consecutive vertices,
/// coplanarity, convexity and counter-clockwise order. Returns a region whose
/// image equals its preimage.
PlanarRegion validate_region(const Matrix& vertices, const Tolerances& tol = {});
PlanarRegion validate_region(const std::vector<Point>& vertices, const Tolerances& tol = {});

/// Stacks points as columns. All points must share one dimension.
Matrix to_columns(const std::vector<Point>& points);

/// Lexicographic order on coordinates.
bool lex_less(const Eigen::Ref<const Point>& a, const Eigen::Ref<const Point>& b);

} // namespace syrenn
