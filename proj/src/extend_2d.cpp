#include "extend.hpp"
#include "syrenn/error.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace syrenn::detail {

namespace {

// Splits by the smallest-index hyperplane that strictly separates the image
// vertices and yields two non-degenerate halves.
SplitResult first_split(const PlanarRegion& r, const SeparatorFamily& family, const Tolerances& tol,
                        Matrix& values, Eigen::MatrixXi& signs) {
    family.classify(r.image, tol.side, values, signs);
    const auto n = static_cast<std::size_t>(r.size());
    std::vector<double> row(n);
    std::vector<int> row_signs(n);
    for (Eigen::Index k = 0; k < values.rows(); ++k) {
        const auto s = signs.row(k);
        if (s.maxCoeff() <= 0 || s.minCoeff() >= 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = values(k, static_cast<Eigen::Index>(j));
            row_signs[j] = s[static_cast<Eigen::Index>(j)];
        }
        if (auto halves = split_by_values(r, row, row_signs, tol)) return halves;
    }
    return std::nullopt;
}

PlanarRegion finish(PlanarRegion r, const PieceMap& map) {
    const Vector center = r.image.rowwise().mean();
    r.image = map(center, r.image);
    return r;
}

void count(ExtendStats* stats, std::atomic<std::size_t> ExtendStats::*field) {
    if (stats) (stats->*field).fetch_add(1, std::memory_order_relaxed);
}

} // namespace

int resolve_threads(int requested) {
#ifdef _OPENMP
    return requested > 0 ? requested : omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

std::vector<PlanarRegion> refine_regions(const std::vector<PlanarRegion>& regions,
                                         const SeparatorFamily& family, const PieceMap& map,
                                         const EngineOptions& options) {
    const auto seeds = static_cast<std::ptrdiff_t>(regions.size());
    std::vector<std::vector<PlanarRegion>> pieces(regions.size());
    std::atomic<std::size_t> live{regions.size()};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(options.threads))
    for (std::ptrdiff_t i = 0; i < seeds; ++i) {
        if (stop.load(std::memory_order_relaxed)) continue;
        try {
            Matrix values;
            Eigen::MatrixXi signs;
            std::vector<PlanarRegion> stack{regions[static_cast<std::size_t>(i)]};
            auto& out = pieces[static_cast<std::size_t>(i)];
            while (!stack.empty() && !stop.load(std::memory_order_relaxed)) {
                PlanarRegion r = std::move(stack.back());
                stack.pop_back();
                count(options.stats, &ExtendStats::pops);
                if (auto halves = first_split(r, family, options.tol, values, signs)) {
                    count(options.stats, &ExtendStats::splits);
                    if (live.fetch_add(1, std::memory_order_relaxed) + 1 > options.region_budget) {
                        stop = true;
                        break;
                    }
                    stack.push_back(std::move(halves->second));
                    stack.push_back(std::move(halves->first));
                    continue;
                }
                out.push_back(finish(std::move(r), map));
            }
        } catch (...) {
#pragma omp critical(syrenn_refine_failure)
            {
                if (!failure) failure = std::current_exception();
            }
            stop = true;
        }
    }
    if (failure) std::rethrow_exception(failure);
    if (stop) throw ResourceError(live.load(), options.region_budget);

    std::size_t total = 0;
    for (const auto& p : pieces) total += p.size();
    std::vector<PlanarRegion> out;
    out.reserve(total);
    for (auto& p : pieces) std::move(p.begin(), p.end(), std::back_inserter(out));
    return out;
}

std::vector<PlanarRegion> refine_regions_reference(const std::vector<PlanarRegion>& regions,
                                                   const SeparatorFamily& family, const PieceMap& map,
                                                   const EngineOptions& options) {
    std::deque<PlanarRegion> queue(regions.begin(), regions.end());
    std::vector<PlanarRegion> out;
    std::size_t live = regions.size();
    Matrix values;
    Eigen::MatrixXi signs;
    while (!queue.empty()) {
        PlanarRegion r = std::move(queue.front());
        queue.pop_front();
        count(options.stats, &ExtendStats::pops);
        if (auto halves = first_split(r, family, options.tol, values, signs)) {
            count(options.stats, &ExtendStats::splits);
            if (++live > options.region_budget) throw ResourceError(live, options.region_budget);
            queue.push_back(std::move(halves->first));
            queue.push_back(std::move(halves->second));
            continue;
        }
        out.push_back(finish(std::move(r), map));
    }
    return out;
}

} // namespace syrenn::detail

namespace syrenn {

namespace {

void check_image_dim(const LayerTransformer& t, const PartitionSet2D& parts) {
    if (parts.regions.empty()) return;
    const auto dim = static_cast<std::size_t>(parts.regions.front().image.rows());
    validate_layer(t.layer(), dim);
}

PartitionSet2D extend_with(const LayerTransformer& t, const PartitionSet2D& parts,
                           const EngineOptions& options, bool reference) {
    check_image_dim(t, parts);
    PartitionSet2D out{parts.input_polytope, {}};
    if (t.kind() == LayerTransformer::Kind::Linear) {
        const auto& affine = std::get<AffineLayer>(t.layer());
        out.regions = parts.regions;
        const auto n = static_cast<std::ptrdiff_t>(out.regions.size());
        const int threads = reference ? 1 : detail::resolve_threads(options.threads);
#pragma omp parallel for schedule(static) num_threads(threads)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            auto& r = out.regions[static_cast<std::size_t>(i)];
            Matrix mapped = affine.weights * r.image;
            mapped.colwise() += affine.bias;
            r.image = std::move(mapped);
        }
        return out;
    }
    const auto dim = parts.regions.empty() ? std::size_t{0}
                                           : static_cast<std::size_t>(parts.regions.front().image.rows());
    const auto family = detail::SeparatorFamily::for_layer(t.layer(), dim);
    const Layer& layer = t.layer();
    const detail::PieceMap map = [&layer](const Vector& center, const Matrix& images) {
        return detail::map_columns(layer, center, images);
    };
    out.regions = reference ? detail::refine_regions_reference(parts.regions, family, map, options)
                            : detail::refine_regions(parts.regions, family, map, options);
    return out;
}

} // namespace

PartitionSet2D extend_2d(const LayerTransformer& t, const PartitionSet2D& parts, const EngineOptions& options) {
    return extend_with(t, parts, options, false);
}

PartitionSet2D extend_2d_reference(const LayerTransformer& t, const PartitionSet2D& parts,
                                   const EngineOptions& options) {
    return extend_with(t, parts, options, true);
}

} // namespace syrenn
