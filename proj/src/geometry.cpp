#include "syrenn/geometry.hpp"

#include "syrenn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace syrenn {

const char* to_string(GeometryErrc kind) noexcept {
    switch (kind) {
    case GeometryErrc::NonFinite: return "non-finite coordinate";
    case GeometryErrc::TooFewVertices: return "too few vertices";
    case GeometryErrc::RepeatedVertex: return "repeated vertex";
    case GeometryErrc::NonCoplanar: return "non-coplanar";
    case GeometryErrc::NonConvex: return "non-convex";
    case GeometryErrc::Clockwise: return "clockwise";
    case GeometryErrc::Degenerate: return "degenerate";
    case GeometryErrc::Parallel: return "parallel";
    case GeometryErrc::AmbiguousPattern: return "ambiguous pattern";
    case GeometryErrc::DegenerateRegion: return "degenerate region";
    }
    return "geometry error";
}

namespace {

double vertex_gap(const Eigen::Ref<const Point>& a, const Eigen::Ref<const Point>& b) {
    return (a - b).norm();
}

bool same_vertex(const Eigen::Ref<const Point>& a, const Eigen::Ref<const Point>& b, double eps) {
    return vertex_gap(a, b) <= eps * std::max(1.0, a.lpNorm<Eigen::Infinity>());
}

double extent(const Matrix& vertices, const Point& origin) {
    double r = 0.0;
    for (Eigen::Index k = 0; k < vertices.cols(); ++k) {
        r = std::max(r, (vertices.col(k) - origin).norm());
    }
    return r;
}

// Builds the two halves with a single cyclic walk. Vertices with sign 0 go
// to both halves; crossings are inserted on every strictly sign-changing edge.
struct HalfBuilder {
    Matrix pre;
    Matrix img;
    Eigen::Index count = 0;

    HalfBuilder(Eigen::Index pre_rows, Eigen::Index img_rows, Eigen::Index capacity)
        : pre(pre_rows, capacity), img(img_rows, capacity) {}

    template <class P, class I>
    void push(const P& p, const I& i) {
        pre.col(count) = p;
        img.col(count) = i;
        ++count;
    }

    PlanarRegion finish(double eps) {
        // Drop consecutive duplicates, including the wrap-around pair.
        Eigen::Index kept = 0;
        for (Eigen::Index k = 0; k < count; ++k) {
            if (kept > 0 && same_vertex(pre.col(kept - 1), pre.col(k), eps)) continue;
            if (kept != k) {
                pre.col(kept) = pre.col(k);
                img.col(kept) = img.col(k);
            }
            ++kept;
        }
        while (kept > 1 && same_vertex(pre.col(kept - 1), pre.col(0), eps)) --kept;
        return PlanarRegion{pre.leftCols(kept), img.leftCols(kept)};
    }
};

} // namespace

PlaneFrame PlaneFrame::standard2d() {
    PlaneFrame f;
    f.origin = Point::Zero(2);
    f.u = Point::Unit(2, 0);
    f.w = Point::Unit(2, 1);
    return f;
}

std::optional<PlaneFrame> PlaneFrame::induced(const Matrix& vertices) {
    if (vertices.cols() < 3) return std::nullopt;
    const Point origin = vertices.col(0);
    const double scale = std::max(extent(vertices, origin), 1e-300);

    Eigen::Index j = 1;
    while (j < vertices.cols() && (vertices.col(j) - origin).norm() <= 1e-12 * scale) ++j;
    if (j == vertices.cols()) return std::nullopt;
    const Point u = (vertices.col(j) - origin).normalized();

    for (Eigen::Index k = j + 1; k < vertices.cols(); ++k) {
        const Point d = vertices.col(k) - origin;
        const Point ortho = d - u.dot(d) * u;
        if (ortho.norm() > 1e-9 * scale) {
            return PlaneFrame{origin, u, ortho.normalized()};
        }
    }
    return std::nullopt;
}

std::optional<PlaneFrame> PlaneFrame::for_vertices(const Matrix& vertices) {
    if (vertices.rows() == 2) return standard2d();
    return induced(vertices);
}

int side_of(const Hyperplane& h, const Eigen::Ref<const Point>& p, double eps) {
    if (h.normal.size() != p.size()) {
        throw DimensionError("side_of: hyperplane has dimension " + std::to_string(h.normal.size()) +
                             ", point has " + std::to_string(p.size()));
    }
    const double v = h.normal.dot(p) - h.offset;
    const double band = eps * (1.0 + std::abs(h.offset) + h.normal.norm() * p.norm());
    if (std::abs(v) <= band) return 0;
    return v > 0 ? 1 : -1;
}

double crossing_ratio(const Hyperplane& h, const Eigen::Ref<const Point>& a_img,
                      const Eigen::Ref<const Point>& b_img, double eps) {
    if (h.normal.size() != a_img.size() || a_img.size() != b_img.size()) {
        throw DimensionError("crossing_ratio: dimension mismatch");
    }
    const double denom = h.normal.dot(b_img - a_img);
    if (std::abs(denom) <= eps * h.normal.norm() * (b_img - a_img).norm() || denom == 0.0) {
        throw GeometryError(GeometryErrc::Parallel, "segment does not cross the hyperplane");
    }
    const double t = (h.offset - h.normal.dot(a_img)) / denom;
    return std::clamp(t, 0.0, 1.0);
}

SplitResult split_by_values(const PlanarRegion& region, std::span<const double> values,
                            std::span<const int> signs, const Tolerances& tol) {
    const Eigen::Index n = region.size();
    const auto first = std::find_if(signs.begin(), signs.end(), [](int s) { return s != 0; });
    if (first == signs.end()) return std::nullopt;
    const int side_a = *first;
    if (std::find(signs.begin(), signs.end(), -side_a) == signs.end()) return std::nullopt;
    const int side_b = -side_a;

    HalfBuilder a(region.preimage.rows(), region.image.rows(), n + 2);
    HalfBuilder b(region.preimage.rows(), region.image.rows(), n + 2);

    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index next = (k + 1) % n;
        const int s = signs[k];
        if (s != side_b) a.push(region.preimage.col(k), region.image.col(k));
        if (s != side_a) b.push(region.preimage.col(k), region.image.col(k));
        if (s * signs[next] < 0) {
            // Interpolate from the lexicographically smaller endpoint so a
            // shared edge yields the same crossing from either neighbour.
            Eigen::Index lo = k, hi = next;
            if (lex_less(region.preimage.col(next), region.preimage.col(k))) std::swap(lo, hi);
            const double t = values[lo] / (values[lo] - values[hi]);
            const Point p = region.preimage.col(lo) + t * (region.preimage.col(hi) - region.preimage.col(lo));
            const Point q = region.image.col(lo) + t * (region.image.col(hi) - region.image.col(lo));
            a.push(p, q);
            b.push(p, q);
        }
    }

    PlanarRegion ra = a.finish(tol.vertex);
    PlanarRegion rb = b.finish(tol.vertex);
    if (ra.size() < 3 || rb.size() < 3) return std::nullopt;

    const auto frame = PlaneFrame::induced(region.preimage);
    if (!frame) return std::nullopt;
    const double parent = std::abs(signed_area(region.preimage, *frame));
    const double floor = tol.area * parent;
    if (std::abs(signed_area(ra.preimage, *frame)) <= floor ||
        std::abs(signed_area(rb.preimage, *frame)) <= floor) {
        return std::nullopt;
    }
    return std::make_pair(std::move(ra), std::move(rb));
}

SplitResult split_by_plane(const PlanarRegion& region, const Hyperplane& h, const Tolerances& tol) {
    if (region.size() < 3) {
        throw GeometryError(GeometryErrc::TooFewVertices, "region needs at least 3 vertices");
    }
    if (region.image.cols() != region.size()) {
        throw GeometryError(GeometryErrc::Degenerate, "preimage and image vertex counts differ");
    }
    if (!region.preimage.allFinite() || !region.image.allFinite()) {
        throw GeometryError(GeometryErrc::NonFinite, "region has non-finite coordinates");
    }
    if (h.normal.size() != region.image.rows()) {
        throw DimensionError("split_by_plane: hyperplane dimension " + std::to_string(h.normal.size()) +
                             " does not match image dimension " + std::to_string(region.image.rows()));
    }
    std::vector<double> values(static_cast<std::size_t>(region.size()));
    std::vector<int> signs(values.size());
    for (Eigen::Index k = 0; k < region.size(); ++k) {
        values[k] = h.normal.dot(region.image.col(k)) - h.offset;
        signs[k] = side_of(h, region.image.col(k), tol.side);
    }
    return split_by_values(region, values, signs, tol);
}

double signed_area(const Matrix& vertices, const PlaneFrame& frame) {
    const Eigen::Index n = vertices.cols();
    if (n < 3) return 0.0;
    double twice = 0.0;
    Eigen::Vector2d prev = frame.project(vertices.col(n - 1));
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Vector2d cur = frame.project(vertices.col(k));
        twice += prev.x() * cur.y() - cur.x() * prev.y();
        prev = cur;
    }
    return 0.5 * twice;
}

double polygon_area(const Matrix& vertices, const Tolerances& tol) {
    const auto frame = PlaneFrame::for_vertices(vertices);
    if (!frame) return 0.0;
    if (vertices.rows() > 2) {
        const double scale = std::max(1.0, extent(vertices, frame->origin));
        for (Eigen::Index k = 0; k < vertices.cols(); ++k) {
            const Point d = vertices.col(k) - frame->origin;
            const Point residual = d - frame->u.dot(d) * frame->u - frame->w.dot(d) * frame->w;
            if (residual.norm() > tol.plane * scale) {
                throw GeometryError(GeometryErrc::NonCoplanar,
                                    "vertex " + std::to_string(k) + " is off the polygon plane");
            }
        }
    }
    return std::abs(signed_area(vertices, *frame));
}

double polygon_area(const PlanarRegion& region, const Tolerances& tol) {
    return polygon_area(region.preimage, tol);
}

Point centroid(const Matrix& vertices) {
    return vertices.rowwise().mean();
}

PlanarRegion validate_region(const Matrix& vertices, const Tolerances& tol) {
    const Eigen::Index n = vertices.cols();
    if (n < 3) {
        throw GeometryError(GeometryErrc::TooFewVertices, "got " + std::to_string(n) + " vertices");
    }
    if (vertices.rows() < 1) {
        throw GeometryError(GeometryErrc::Degenerate, "zero-dimensional vertices");
    }
    if (!vertices.allFinite()) {
        throw GeometryError(GeometryErrc::NonFinite, "vertex coordinates must be finite");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (same_vertex(vertices.col(k), vertices.col((k + 1) % n), tol.vertex)) {
            throw GeometryError(GeometryErrc::RepeatedVertex,
                                "vertices " + std::to_string(k) + " and " + std::to_string((k + 1) % n));
        }
    }
    const auto frame = PlaneFrame::for_vertices(vertices);
    if (!frame) throw GeometryError(GeometryErrc::Degenerate, "all vertices are collinear");

    const double scale = std::max(1.0, extent(vertices, frame->origin));
    if (vertices.rows() > 2) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const Point d = vertices.col(k) - frame->origin;
            const Point residual = d - frame->u.dot(d) * frame->u - frame->w.dot(d) * frame->w;
            if (residual.norm() > tol.plane * scale) {
                throw GeometryError(GeometryErrc::NonCoplanar,
                                    "vertex " + std::to_string(k) + " is off the polygon plane");
            }
        }
    }

    std::vector<Eigen::Vector2d> flat(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) flat[k] = frame->project(vertices.col(k));

    bool left = false, right = false;
    double turning = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Vector2d e0 = flat[(k + 1) % n] - flat[k];
        const Eigen::Vector2d e1 = flat[(k + 2) % n] - flat[(k + 1) % n];
        const double cross = e0.x() * e1.y() - e0.y() * e1.x();
        const double band = 1e-12 * e0.norm() * e1.norm();
        if (cross > band) left = true;
        if (cross < -band) right = true;
        turning += std::atan2(cross, e0.dot(e1));
    }
    if (left && right) throw GeometryError(GeometryErrc::NonConvex, "turn directions are mixed");
    if (!left && !right) throw GeometryError(GeometryErrc::Degenerate, "zero area");
    if (std::abs(std::abs(turning) - 2.0 * std::numbers::pi) > 1e-6) {
        throw GeometryError(GeometryErrc::NonConvex, "boundary winds more than once");
    }
    if (right) throw GeometryError(GeometryErrc::Clockwise, "vertices are in clockwise order");
    return PlanarRegion{vertices, vertices};
}

PlanarRegion validate_region(const std::vector<Point>& vertices, const Tolerances& tol) {
    return validate_region(to_columns(vertices), tol);
}

Matrix to_columns(const std::vector<Point>& points) {
    if (points.empty()) return Matrix(0, 0);
    Matrix m(points.front().size(), static_cast<Eigen::Index>(points.size()));
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (points[k].size() != m.rows()) throw DimensionError("points have mixed dimensions");
        m.col(static_cast<Eigen::Index>(k)) = points[k];
    }
    return m;
}

bool lex_less(const Eigen::Ref<const Point>& a, const Eigen::Ref<const Point>& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

} // namespace syrenn
