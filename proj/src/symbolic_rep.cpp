#include "extend.hpp"
#include "syrenn/error.hpp"

#include <algorithm>
#include <numeric>

namespace syrenn {

SegmentedLine extend_1d(const LayerTransformer& t, const SegmentedLine& line, const EngineOptions& options) {
    validate_layer(t.layer(), static_cast<std::size_t>(line.images.rows()));
    SegmentedLine out{line.start, line.end, {}, {}};

    if (t.kind() == LayerTransformer::Kind::Linear) {
        const auto& affine = std::get<AffineLayer>(t.layer());
        out.ratios = line.ratios;
        out.images = affine.weights * line.images;
        out.images.colwise() += affine.bias;
        return out;
    }

    const Layer& layer = t.layer();
    const auto family = detail::SeparatorFamily::for_layer(layer, static_cast<std::size_t>(line.images.rows()));
    const double length = (line.end - line.start).norm();
    const auto segments = static_cast<std::ptrdiff_t>(line.segment_count());

    // Per segment: ratios after the segment start and the matching images.
    std::vector<std::vector<double>> seg_ratios(static_cast<std::size_t>(segments));
    std::vector<std::vector<Vector>> seg_images(static_cast<std::size_t>(segments));
    Vector first_image;

#pragma omp parallel for schedule(dynamic, 16) num_threads(detail::resolve_threads(options.threads))
    for (std::ptrdiff_t s = 0; s < segments; ++s) {
        const auto k = static_cast<std::size_t>(s);
        const double ta = line.ratios[k];
        const double tb = line.ratios[k + 1];
        Matrix ends(line.images.rows(), 2);
        ends.col(0) = line.images.col(static_cast<Eigen::Index>(k));
        ends.col(1) = line.images.col(static_cast<Eigen::Index>(k + 1));

        Matrix values;
        Eigen::MatrixXi signs;
        family.classify(ends, options.tol.side, values, signs);
        std::vector<double> cuts{0.0};
        for (Eigen::Index h = 0; h < values.rows(); ++h) {
            if (signs(h, 0) * signs(h, 1) < 0) cuts.push_back(values(h, 0) / (values(h, 0) - values(h, 1)));
        }
        std::sort(cuts.begin() + 1, cuts.end());
        cuts.push_back(1.0);
        const double span = (tb - ta) * length;
        std::vector<double> kept{0.0};
        for (std::size_t c = 1; c < cuts.size(); ++c) {
            const bool last = c + 1 == cuts.size();
            if ((cuts[c] - kept.back()) * span <= options.tol.vertex) {
                // A crossing that lands on the segment end merges into it.
                if (last && kept.size() > 1) kept.back() = 1.0;
                else if (last) kept.push_back(1.0);
                continue;
            }
            kept.push_back(cuts[c]);
        }

        for (std::size_t q = 0; q + 1 < kept.size(); ++q) {
            Matrix piece(ends.rows(), 2);
            piece.col(0) = ends.col(0) + kept[q] * (ends.col(1) - ends.col(0));
            piece.col(1) = ends.col(0) + kept[q + 1] * (ends.col(1) - ends.col(0));
            const Vector center = piece.rowwise().mean();
            const Matrix mapped = detail::map_columns(layer, center, piece);
            if (k == 0 && q == 0) first_image = mapped.col(0);
            seg_ratios[k].push_back(q + 2 == kept.size() ? tb : ta + kept[q + 1] * (tb - ta));
            seg_images[k].push_back(mapped.col(1));
        }
    }

    std::size_t total = 1;
    for (const auto& r : seg_ratios) total += r.size();
    out.ratios.reserve(total);
    out.ratios.push_back(line.ratios.front());
    const auto out_dim = static_cast<Eigen::Index>(layer_output_dim(layer, static_cast<std::size_t>(line.images.rows())));
    out.images.resize(out_dim, static_cast<Eigen::Index>(total));
    out.images.col(0) = first_image;
    Eigen::Index col = 1;
    for (std::size_t k = 0; k < seg_ratios.size(); ++k) {
        for (std::size_t q = 0; q < seg_ratios[k].size(); ++q) {
            out.ratios.push_back(seg_ratios[k][q]);
            out.images.col(col++) = seg_images[k][q];
        }
    }
    return out;
}

PartitionSet2D symbolic_rep_2d(const Network& net, const PlanarRegion& input, const EngineOptions& options) {
    if (static_cast<std::size_t>(input.preimage.rows()) != net.input_dim()) {
        throw DimensionError("polytope has dimension " + std::to_string(input.preimage.rows()) +
                             ", network expects " + std::to_string(net.input_dim()));
    }
    PlanarRegion seed{input.preimage, input.preimage};
    PartitionSet2D parts{seed, {seed}};
    for (const auto& layer : net.layers()) {
        parts = extend_2d(LayerTransformer(layer), parts, options);
    }
    canonicalize(parts);
    return parts;
}

SegmentedLine symbolic_rep_1d(const Network& net, const Point& start, const Point& end, const EngineOptions& options) {
    if (static_cast<std::size_t>(start.size()) != net.input_dim() ||
        static_cast<std::size_t>(end.size()) != net.input_dim()) {
        throw DimensionError("line endpoints must have dimension " + std::to_string(net.input_dim()));
    }
    if (!start.allFinite() || !end.allFinite()) {
        throw GeometryError(GeometryErrc::NonFinite, "line endpoints must be finite");
    }
    if ((end - start).norm() <= options.tol.vertex * std::max(1.0, start.lpNorm<Eigen::Infinity>())) {
        throw GeometryError(GeometryErrc::Degenerate, "line endpoints coincide");
    }
    SegmentedLine line{start, end, {0.0, 1.0}, Matrix(start.size(), 2)};
    line.images.col(0) = start;
    line.images.col(1) = end;
    for (const auto& layer : net.layers()) line = extend_1d(LayerTransformer(layer), line, options);
    return line;
}

void canonicalize(PartitionSet2D& parts) {
    for (auto& r : parts.regions) {
        Eigen::Index lowest = 0;
        for (Eigen::Index k = 1; k < r.size(); ++k) {
            if (lex_less(r.preimage.col(k), r.preimage.col(lowest))) lowest = k;
        }
        if (lowest == 0) continue;
        const Eigen::Index n = r.size();
        Matrix pre(r.preimage.rows(), n);
        Matrix img(r.image.rows(), n);
        for (Eigen::Index k = 0; k < n; ++k) {
            pre.col(k) = r.preimage.col((k + lowest) % n);
            img.col(k) = r.image.col((k + lowest) % n);
        }
        r.preimage = std::move(pre);
        r.image = std::move(img);
    }
    std::sort(parts.regions.begin(), parts.regions.end(), [](const PlanarRegion& a, const PlanarRegion& b) {
        const Eigen::Index n = std::min(a.size(), b.size());
        for (Eigen::Index k = 0; k < n; ++k) {
            if (lex_less(a.preimage.col(k), b.preimage.col(k))) return true;
            if (lex_less(b.preimage.col(k), a.preimage.col(k))) return false;
        }
        return a.size() < b.size();
    });
}

Matrix region_jacobian(const Network& net, const Matrix& vertices, double eps) {
    if (static_cast<std::size_t>(vertices.rows()) != net.input_dim() || vertices.cols() < 1) {
        throw DimensionError("region_jacobian: vertices must have dimension " + std::to_string(net.input_dim()));
    }
    Matrix points = vertices;
    Vector center = centroid(vertices);
    Matrix jac = Matrix::Identity(vertices.rows(), vertices.rows());
    Matrix values;
    Eigen::MatrixXi signs;
    for (std::size_t i = 0; i < net.size(); ++i) {
        const Layer& layer = net.layers()[i];
        if (!is_linear(layer)) {
            const auto family = detail::SeparatorFamily::for_layer(layer, net.layer_width(i));
            family.classify(points, eps, values, signs);
            for (Eigen::Index k = 0; k < signs.rows(); ++k) {
                if (signs.row(k).maxCoeff() > 0 && signs.row(k).minCoeff() < 0) {
                    throw GeometryError(GeometryErrc::DegenerateRegion,
                                        "layer " + std::to_string(i) + " hyperplane " + std::to_string(k) +
                                            " crosses the region");
                }
            }
        }
        jac = detail::pattern_affine(layer, center).linear * jac;
        Matrix next(static_cast<Eigen::Index>(net.layer_width(i + 1)), points.cols());
        for (Eigen::Index k = 0; k < points.cols(); ++k) next.col(k) = apply_layer(layer, points.col(k));
        points = std::move(next);
        center = apply_layer(layer, center);
    }
    return jac;
}

Matrix region_jacobian(const Network& net, const PlanarRegion& region, double eps) {
    return region_jacobian(net, region.preimage, eps);
}

Matrix region_jacobian(const Network& net, const SegmentedLine& line, std::size_t segment, double eps) {
    if (segment >= line.segment_count()) throw std::out_of_range("segment index out of range");
    Matrix ends(line.start.size(), 2);
    ends.col(0) = line.point_at(line.ratios[segment]);
    ends.col(1) = line.point_at(line.ratios[segment + 1]);
    return region_jacobian(net, ends, eps);
}

} // namespace syrenn
