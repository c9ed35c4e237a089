#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace syrenn::testing {

Network example_network() {
    AffineLayer first;
    first.weights = Matrix{{1.0}, {1.0}, {-1.0}};
    first.bias = Vector{{-1.0, 0.0, 0.0}};
    AffineLayer last;
    last.weights = Matrix{{1.0, -1.0, -1.0}};
    last.bias = Vector{{0.0}};
    return Network(1, {first, ReluLayer{}, last});
}

const char* example_eran_text() {
    return "ReLU\n"
           "[[1],[1],[-1]]\n"
           "[-1,0,0]\n"
           "Affine\n"
           "[[1,-1,-1]]\n"
           "[0]\n";
}

const char* example_json_text() {
    return R"({"input_dim": 1, "layers": [
  {"type": "affine", "weights": [[1], [1], [-1]], "bias": [-1, 0, 0]},
  {"type": "relu"},
  {"type": "affine", "weights": [[1, -1, -1]], "bias": [0]}]})";
}

double example_closed_form(double x) {
    if (x <= 0.0) return x;
    if (x <= 1.0) return -x;
    return -1.0;
}

PlanarRegion triangle_fixture() {
    return validate_region(Matrix{{2.0, -2.0, -2.0}, {0.0, 2.0, 0.0}});
}

PlanarRegion square(double s) {
    return validate_region(Matrix{{s, -s, -s, s}, {s, s, -s, -s}});
}

PlanarRegion box(double x0, double y0, double x1, double y1) {
    return validate_region(Matrix{{x0, x1, x1, x0}, {y0, y0, y1, y1}});
}

namespace {

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
    return m;
}

} // namespace

Network random_network(Rng& rng, const NetSpec& spec) {
    Network net(spec.input_dim);
    std::size_t width = spec.input_dim;
    for (std::size_t k = 0; k < spec.widths.size(); ++k) {
        std::size_t out = spec.widths[k];
        const Activation act = spec.activations.at(k);
        if (act == Activation::MaxPool && out % 2 == 1) ++out;
        const double scale = spec.weight_scale / std::sqrt(static_cast<double>(width));
        AffineLayer affine{gaussian(rng, static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(width), scale),
                           gaussian(rng, static_cast<Eigen::Index>(out), 1, 0.5 * spec.weight_scale).col(0)};
        net.append(std::move(affine));
        switch (act) {
        case Activation::Relu: net.append(ReluLayer{}); break;
        case Activation::LeakyRelu: {
            std::uniform_real_distribution<double> a(0.0, 0.5);
            net.append(LeakyReluLayer{a(rng)});
            break;
        }
        case Activation::HardTanh: net.append(HardTanhLayer{}); break;
        case Activation::MaxPool: {
            MaxPoolLayer pool;
            for (std::size_t g = 0; g < out; g += 2) pool.groups.push_back({g, g + 1});
            net.append(std::move(pool));
            out /= 2;
            break;
        }
        }
        width = out;
    }
    const double scale = spec.weight_scale / std::sqrt(static_cast<double>(width));
    net.append(AffineLayer{gaussian(rng, static_cast<Eigen::Index>(spec.output_dim), static_cast<Eigen::Index>(width), scale),
                           gaussian(rng, static_cast<Eigen::Index>(spec.output_dim), 1, 0.1).col(0)});
    return net;
}

Network random_mixed_network(Rng& rng, std::size_t input_dim, std::size_t output_dim) {
    std::uniform_int_distribution<std::size_t> depth(2, 4);
    std::uniform_int_distribution<std::size_t> width(2, 16);
    std::uniform_int_distribution<int> kind(0, 3);
    NetSpec spec;
    spec.input_dim = input_dim;
    spec.output_dim = output_dim;
    spec.weight_scale = 1.5;
    const std::size_t layers = depth(rng);
    for (std::size_t k = 0; k < layers; ++k) {
        std::size_t w = width(rng);
        Activation a = static_cast<Activation>(kind(rng));
        if (a == Activation::MaxPool) w -= w % 2;
        spec.widths.push_back(w);
        spec.activations.push_back(a);
    }
    return random_network(rng, spec);
}

Matrix random_convex_polygon(Rng& rng, std::size_t dim, std::size_t max_vertices) {
    std::uniform_int_distribution<std::size_t> count(3, std::max<std::size_t>(3, max_vertices));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t v = count(rng);

    // Distinct sorted angles on an ellipse give a strictly convex CCW polygon.
    std::vector<double> angles;
    while (angles.size() < v) {
        const double a = 2.0 * std::numbers::pi * unit(rng);
        bool far = true;
        for (double b : angles) far = far && std::abs(a - b) > 0.05;
        if (far) angles.push_back(a);
    }
    std::sort(angles.begin(), angles.end());
    const double rx = 0.5 + 1.5 * unit(rng);
    const double ry = 0.5 + 1.5 * unit(rng);
    const double tilt = 2.0 * std::numbers::pi * unit(rng);
    const Eigen::Vector2d centre(unit(rng) - 0.5, unit(rng) - 0.5);

    Matrix planar(2, static_cast<Eigen::Index>(v));
    for (std::size_t k = 0; k < v; ++k) {
        const Eigen::Vector2d e(rx * std::cos(angles[k]), ry * std::sin(angles[k]));
        const Eigen::Rotation2Dd rot(tilt);
        planar.col(static_cast<Eigen::Index>(k)) = centre + rot * e;
    }
    if (dim == 2) return planar;

    // Embed in a random plane through a random origin.
    Matrix basis = gaussian(rng, static_cast<Eigen::Index>(dim), 2, 1.0);
    Eigen::HouseholderQR<Matrix> qr(basis);
    const Matrix q = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(dim), 2);
    const Vector origin = gaussian(rng, static_cast<Eigen::Index>(dim), 1, 0.3).col(0);
    Matrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(v));
    for (Eigen::Index k = 0; k < out.cols(); ++k) out.col(k) = origin + q * planar.col(k);
    return out;
}

std::vector<int> activation_pattern(const Network& net, const Vector& x) {
    std::vector<int> pattern;
    Vector v = x;
    for (const Layer& layer : net.layers()) {
        if (std::holds_alternative<ReluLayer>(layer) || std::holds_alternative<LeakyReluLayer>(layer)) {
            for (Eigen::Index i = 0; i < v.size(); ++i) pattern.push_back(v[i] >= 0.0 ? 1 : 0);
        } else if (std::holds_alternative<HardTanhLayer>(layer)) {
            for (Eigen::Index i = 0; i < v.size(); ++i) pattern.push_back(v[i] < -1.0 ? -1 : (v[i] > 1.0 ? 1 : 0));
        } else if (const auto* pool = std::get_if<MaxPoolLayer>(&layer)) {
            for (const auto& group : pool->groups) {
                std::size_t best = group.front();
                for (std::size_t idx : group)
                    if (v[static_cast<Eigen::Index>(idx)] > v[static_cast<Eigen::Index>(best)]) best = idx;
                pattern.push_back(static_cast<int>(best));
            }
        }
        v = apply_layer(layer, v);
    }
    return pattern;
}

std::vector<Eigen::Vector2d> plane_coords(const Matrix& vertices, const PlaneFrame& frame) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(static_cast<std::size_t>(vertices.cols()));
    for (Eigen::Index k = 0; k < vertices.cols(); ++k) out.push_back(frame.project(vertices.col(k)));
    return out;
}

double inner_distance(const std::vector<Eigen::Vector2d>& polygon, const Eigen::Vector2d& q) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = polygon.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector2d& a = polygon[k];
        const Eigen::Vector2d& b = polygon[(k + 1) % n];
        const Eigen::Vector2d e = b - a;
        const double len = e.norm();
        if (len == 0.0) continue;
        const double cross = e.x() * (q.y() - a.y()) - e.y() * (q.x() - a.x());
        best = std::min(best, cross / len);
    }
    return best;
}

Matrix fd_plane_jacobian(const Network& net, const Point& p, const PlaneFrame& frame, double h) {
    Matrix j(static_cast<Eigen::Index>(net.output_dim()), 2);
    for (int d = 0; d < 2; ++d) {
        const Point& dir = d == 0 ? frame.u : frame.w;
        const Point plus = p + h * dir;
        const Point minus = p - h * dir;
        // Use the step actually represented in floating point.
        const double span = (plus - minus).dot(dir);
        j.col(d) = (evaluate(net, plus) - evaluate(net, minus)) / span;
    }
    return j;
}

LinearityReport check_linearity(const Network& net, const PartitionSet2D& parts, double rel) {
    LinearityReport report;
    const auto frame = PlaneFrame::for_vertices(parts.input_polytope.preimage);
    if (!frame) throw std::runtime_error("degenerate input polytope");
    for (const PlanarRegion& r : parts.regions) {
        ++report.regions;
        const auto poly = plane_coords(r.preimage, *frame);
        const Point c = centroid(r.preimage);
        const Eigen::Index v = r.size();
        double diameter = 0.0;
        for (Eigen::Index a = 0; a < v; ++a)
            for (Eigen::Index b = a + 1; b < v; ++b) diameter = std::max(diameter, (r.preimage.col(a) - r.preimage.col(b)).norm());

        std::vector<Matrix> jacobians;
        for (Eigen::Index k : {Eigen::Index{0}, v / 3, (2 * v) / 3}) {
            const Point p = 0.6 * c + 0.4 * r.preimage.col(k);
            const double dist = inner_distance(poly, frame->project(p));
            const double h = std::min(1e-4 * diameter, 0.25 * dist);
            jacobians.push_back(fd_plane_jacobian(net, p, *frame, h));
        }
        bool ok = true;
        for (std::size_t a = 0; a < jacobians.size(); ++a) {
            for (std::size_t b = a + 1; b < jacobians.size(); ++b) {
                const double scale = std::max({1.0, jacobians[a].norm(), jacobians[b].norm()});
                const double err = (jacobians[a] - jacobians[b]).norm() / scale;
                report.worst = std::max(report.worst, err);
                ok = ok && err <= rel;
            }
        }
        if (!ok) ++report.failures;
    }
    return report;
}

RegionLocator::RegionLocator(const std::vector<PlanarRegion>& regions, const PlaneFrame& frame) {
    for (const PlanarRegion& r : regions) {
        polys_.push_back(plane_coords(r.preimage, frame));
        Eigen::AlignedBox2d bb;
        for (const auto& p : polys_.back()) bb.extend(p);
        boxes_.push_back(bb);
    }
}

std::optional<std::size_t> RegionLocator::locate(const Eigen::Vector2d& q, double band) const {
    for (std::size_t k = 0; k < polys_.size(); ++k) {
        if (!boxes_[k].contains(q)) continue;
        const double d = inner_distance(polys_[k], q);
        if (d > band) return k;
        if (d >= -band) return std::nullopt;
    }
    return std::nullopt;
}

std::size_t RegionLocator::hits(const Eigen::Vector2d& q, double band) const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < polys_.size(); ++k) {
        if (boxes_[k].contains(q) && inner_distance(polys_[k], q) > band) ++n;
    }
    return n;
}

CoverageReport check_coverage(const PartitionSet2D& parts, Rng& rng, std::size_t samples) {
    CoverageReport report;
    const double total = polygon_area(parts.input_polytope);
    double sum = 0.0;
    for (const PlanarRegion& r : parts.regions) sum += polygon_area(r);
    report.area_error = std::abs(sum - total) / total;

    const auto frame = PlaneFrame::for_vertices(parts.input_polytope.preimage);
    const auto outer = plane_coords(parts.input_polytope.preimage, *frame);
    Eigen::AlignedBox2d bb;
    for (const auto& p : outer) bb.extend(p);
    const double band = 1e-9 * bb.diagonal().norm();
    const RegionLocator locator(parts.regions, *frame);

    std::uniform_real_distribution<double> ux(bb.min().x(), bb.max().x());
    std::uniform_real_distribution<double> uy(bb.min().y(), bb.max().y());
    while (report.samples < samples) {
        const Eigen::Vector2d q(ux(rng), uy(rng));
        if (inner_distance(outer, q) <= band) continue;
        // Skip points near any region boundary; they belong to two regions.
        bool near_edge = false;
        std::size_t inside = 0;
        for (const PlanarRegion& r : parts.regions) {
            const double d = inner_distance(plane_coords(r.preimage, *frame), q);
            if (std::abs(d) <= band) near_edge = true;
            if (d > band) ++inside;
        }
        if (near_edge) continue;
        ++report.samples;
        if (inside == 0) ++report.uncovered;
        if (inside > 1) ++report.overlapped;
    }
    return report;
}

Network prefix(const Network& net, std::size_t k) {
    std::vector<Layer> layers(net.layers().begin(), net.layers().begin() + static_cast<std::ptrdiff_t>(k));
    return Network(net.input_dim(), std::move(layers));
}

double image_error(const Network& net, const PartitionSet2D& parts, std::size_t prefix_layers) {
    const Network head = prefix(net, prefix_layers);
    double worst = 0.0;
    for (const PlanarRegion& r : parts.regions) {
        for (Eigen::Index k = 0; k < r.size(); ++k) {
            const Vector y = evaluate(head, r.preimage.col(k));
            worst = std::max(worst, (y - r.image.col(k)).norm() / std::max(1.0, y.norm()));
        }
    }
    return worst;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace syrenn::testing
