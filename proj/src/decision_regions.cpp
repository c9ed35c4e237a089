#include "extend.hpp"
#include "syrenn/analyses.hpp"
#include "syrenn/error.hpp"

#include <algorithm>

namespace syrenn {

std::size_t argmax_label(const Eigen::Ref<const Vector>& scores, double eps) {
    if (scores.size() == 0) throw DimensionError("argmax of an empty vector");
    const double band = eps * (1.0 + scores.cwiseAbs().maxCoeff());
    const double top = scores.maxCoeff();
    Eigen::Index k = 0;
    while (scores[k] < top - band) ++k;
    return static_cast<std::size_t>(k);
}

std::vector<LabeledRegion> decision_regions(const Network& net, const PlanarRegion& input,
                                            const EngineOptions& options) {
    if (net.output_dim() < 2) {
        throw DimensionError("decision regions need at least two outputs, network has " +
                             std::to_string(net.output_dim()));
    }
    PartitionSet2D parts = symbolic_rep_2d(net, input, options);

    // Split once more by the class boundaries {y_a = y_b}; the map is the
    // identity.
    const auto family = detail::SeparatorFamily::argmax_boundaries(net.output_dim());
    const detail::PieceMap identity = [](const Vector&, const Matrix& images) { return images; };
    parts.regions = detail::refine_regions(parts.regions, family, identity, options);
    canonicalize(parts);

    std::vector<LabeledRegion> out;
    out.reserve(parts.regions.size());
    for (auto& r : parts.regions) {
        const Vector center = r.image.rowwise().mean();
        const std::size_t label = argmax_label(center);
        out.push_back(LabeledRegion{std::move(r), label});
    }
    return out;
}

std::vector<PartitionVertex> enumerate_vertices(const PartitionSet2D& parts, const Tolerances& tol) {
    std::vector<PartitionVertex> all;
    for (const auto& r : parts.regions) {
        for (Eigen::Index k = 0; k < r.size(); ++k) all.push_back({r.preimage.col(k), r.image.col(k)});
    }
    std::sort(all.begin(), all.end(),
              [](const PartitionVertex& a, const PartitionVertex& b) { return lex_less(a.preimage, b.preimage); });

    // Points within tol.vertex of each other agree in the first coordinate
    // within tol.vertex, so only a short run of kept points needs checking.
    std::vector<PartitionVertex> out;
    for (auto& v : all) {
        const double eps = tol.vertex * std::max(1.0, v.preimage.lpNorm<Eigen::Infinity>());
        bool duplicate = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (v.preimage[0] - it->preimage[0] > eps) break;
            if ((v.preimage - it->preimage).norm() <= eps) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) out.push_back(std::move(v));
    }
    return out;
}

} // namespace syrenn
