#include "extend.hpp"
#include "syrenn/analyses.hpp"
#include "syrenn/error.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <stdexcept>

namespace syrenn {

namespace {

constexpr std::size_t kBlock = 4096;
constexpr double kKinkBand = 1e-12;
constexpr double kNudge = 1e-9;

void check_ig_args(const Network& net, const Point& baseline, const Point& input, std::size_t target) {
    if (static_cast<std::size_t>(baseline.size()) != net.input_dim() ||
        static_cast<std::size_t>(input.size()) != net.input_dim()) {
        throw DimensionError("baseline and input must have dimension " + std::to_string(net.input_dim()));
    }
    if (target >= net.output_dim()) {
        throw DimensionError("target " + std::to_string(target) + " out of range for " +
                             std::to_string(net.output_dim()) + " outputs");
    }
}

Attribution make_attribution(const Network& net, const Point& baseline, const Point& input, std::size_t target,
                             Vector values) {
    const auto c = static_cast<Eigen::Index>(target);
    return Attribution{std::move(values), target, baseline, input, evaluate(net, input)[c],
                       evaluate(net, baseline)[c]};
}

// Gradient at x, or nothing when some layer input sits on a kink.
std::optional<Vector> gradient_off_kinks(const Network& net, const Vector& x, std::size_t target) {
    std::vector<Vector> inputs;
    inputs.reserve(net.size());
    Vector v = x;
    for (std::size_t i = 0; i < net.size(); ++i) {
        const Layer& layer = net.layers()[i];
        if (!is_linear(layer) && detail::SeparatorFamily::for_layer(layer, net.layer_width(i)).touches(v, kKinkBand)) {
            return std::nullopt;
        }
        inputs.push_back(v);
        v = apply_layer(layer, v);
    }
    Vector g = Vector::Unit(static_cast<Eigen::Index>(net.output_dim()), static_cast<Eigen::Index>(target));
    for (std::size_t i = net.size(); i-- > 0;) g = detail::pullback(net.layers()[i], inputs[i], g);
    return g;
}

Vector path_gradient(const Network& net, const Point& baseline, const Point& input, std::size_t target,
                     double alpha) {
    const Vector dir = input - baseline;
    double nudge = kNudge;
    for (int attempt = 0; attempt < 8; ++attempt) {
        if (auto g = gradient_off_kinks(net, baseline + alpha * dir, target)) return *g;
        alpha = alpha < 1.0 ? std::min(1.0, alpha + nudge) : alpha - nudge;
        nudge *= 10.0;
    }
    return output_gradient(net, baseline + alpha * dir, target);
}

struct SamplePlan {
    std::size_t count;
    double weight;
    double edge_weight; // weight of the first and (trapezoid) last sample

    double weight_of(std::size_t k, RiemannScheme scheme) const {
        if (scheme == RiemannScheme::Trapezoid && (k == 0 || k + 1 == count)) return edge_weight;
        return weight;
    }
};

SamplePlan plan(std::size_t m, RiemannScheme scheme) {
    const double w = 1.0 / static_cast<double>(m);
    if (scheme == RiemannScheme::Left) return {m, w, w};
    return {m + 1, w, 0.5 * w};
}

} // namespace

Vector output_gradient(const Network& net, const Point& x, std::size_t target) {
    if (target >= net.output_dim()) throw DimensionError("target out of range");
    std::vector<Vector> inputs;
    inputs.reserve(net.size());
    Vector v = x;
    for (const auto& layer : net.layers()) {
        inputs.push_back(v);
        v = apply_layer(layer, v);
    }
    Vector g = Vector::Unit(static_cast<Eigen::Index>(net.output_dim()), static_cast<Eigen::Index>(target));
    for (std::size_t i = net.size(); i-- > 0;) g = detail::pullback(net.layers()[i], inputs[i], g);
    return g;
}

Attribution exact_ig(const Network& net, const Point& baseline, const Point& input, std::size_t target,
                     const EngineOptions& options) {
    check_ig_args(net, baseline, input, target);
    const SegmentedLine line = symbolic_rep_1d(net, baseline, input, options);
    const auto c = static_cast<Eigen::Index>(target);
    Vector values = Vector::Zero(baseline.size());
    for (std::size_t s = 0; s < line.segment_count(); ++s) {
        const Vector step = line.point_at(line.ratios[s + 1]) - line.point_at(line.ratios[s]);
        const Vector grad = region_jacobian(net, line, s, options.tol.side).row(c).transpose();
        values += step.cwiseProduct(grad);
    }
    return make_attribution(net, baseline, input, target, std::move(values));
}

std::vector<Attribution> exact_ig_batch(const Network& net, const std::vector<std::pair<Point, Point>>& pairs,
                                        std::size_t target, const EngineOptions& options) {
    std::vector<Attribution> out(pairs.size());
    EngineOptions inner = options;
    inner.threads = 1;
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(detail::resolve_threads(options.threads))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const auto& [baseline, input] = pairs[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(i)] = exact_ig(net, baseline, input, target, inner);
        } catch (...) {
#pragma omp critical(syrenn_ig_failure)
            {
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

Attribution sampled_ig(const Network& net, const Point& baseline, const Point& input, std::size_t target,
                       std::size_t samples, RiemannScheme scheme, const EngineOptions& options) {
    check_ig_args(net, baseline, input, target);
    if (samples == 0) throw std::invalid_argument("sampled_ig needs at least one sample");
    const SamplePlan p = plan(samples, scheme);
    const double m = static_cast<double>(samples);

    // Fixed-size blocks summed in order keep the result independent of the
    // thread count.
    const std::size_t blocks = (p.count + kBlock - 1) / kBlock;
    std::vector<Vector> partial(blocks, Vector::Zero(baseline.size()));
#pragma omp parallel for schedule(dynamic, 1) num_threads(detail::resolve_threads(options.threads))
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(p.count, lo + kBlock);
        Vector acc = Vector::Zero(baseline.size());
        for (std::size_t k = lo; k < hi; ++k) {
            const double alpha = static_cast<double>(k) / m;
            acc += p.weight_of(k, scheme) * path_gradient(net, baseline, input, target, alpha);
        }
        partial[static_cast<std::size_t>(b)] = std::move(acc);
    }
    Vector sum = Vector::Zero(baseline.size());
    for (const auto& v : partial) sum += v;
    return make_attribution(net, baseline, input, target, (input - baseline).cwiseProduct(sum));
}

Attribution sampled_ig_reference(const Network& net, const Point& baseline, const Point& input,
                                 std::size_t target, std::size_t samples, RiemannScheme scheme) {
    check_ig_args(net, baseline, input, target);
    if (samples == 0) throw std::invalid_argument("sampled_ig needs at least one sample");
    const SamplePlan p = plan(samples, scheme);
    Vector sum = Vector::Zero(baseline.size());
    for (std::size_t k = 0; k < p.count; ++k) {
        const double alpha = static_cast<double>(k) / static_cast<double>(samples);
        sum += p.weight_of(k, scheme) * path_gradient(net, baseline, input, target, alpha);
    }
    return make_attribution(net, baseline, input, target, (input - baseline).cwiseProduct(sum));
}

} // namespace syrenn
