#include "support.hpp"

#include "syrenn/analyses.hpp"
#include "syrenn/error.hpp"
#include "syrenn/svg.hpp"

#include <doctest.h>

#include <cmath>
#include <regex>
#include <set>

using namespace syrenn;
using namespace syrenn::testing;

namespace {

double completeness_gap(const Attribution& a) {
    const double scale = std::max({1.0, std::abs(a.f_input), std::abs(a.f_baseline)});
    return std::abs(a.values.sum() - (a.f_input - a.f_baseline)) / scale;
}

std::size_t count(const std::string& text, const std::string& pattern) {
    const std::regex re(pattern);
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

} // namespace

TEST_CASE("exact IG on the example network") {
    const Attribution a = exact_ig(example_network(), Vector{{-1.0}}, Vector{{2.0}}, 0);
    CHECK(std::abs(a.values[0]) <= 1e-12);
    CHECK(a.f_input == -1.0);
    CHECK(a.f_baseline == -1.0);

    const Attribution left = sampled_ig(example_network(), Vector{{-1.0}}, Vector{{2.0}}, 0, 1, RiemannScheme::Left);
    CHECK(left.values[0] == 3.0);
    const Attribution trap = sampled_ig(example_network(), Vector{{-1.0}}, Vector{{2.0}}, 0, 1000000,
                                        RiemannScheme::Trapezoid);
    CHECK(std::abs(trap.values[0]) <= 1e-4);
}

TEST_CASE("exact IG on the identity network") {
    const Attribution a = exact_ig(Network(2), Vector{{0.0, 0.0}}, Vector{{3.0, 4.0}}, 0);
    CHECK(a.values[0] == doctest::Approx(3.0));
    CHECK(a.values[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(exact_ig(Network(2), Vector{{0.0, 0.0}}, Vector{{3.0, 4.0}}, 2), DimensionError);
    CHECK_THROWS_AS(exact_ig(Network(2), Vector{{1.0, 0.0}}, Vector{{1.0, 0.0}}, 0), GeometryError);
}

TEST_CASE("sampled IG is exact on linear networks") {
    const Network net(2, {AffineLayer{Matrix{{1.0, -2.0}}, Vector{{0.5}}}});
    for (std::size_t m : {1, 3, 17}) {
        const auto left = sampled_ig(net, Vector{{0.0, 0.0}}, Vector{{1.0, 2.0}}, 0, m, RiemannScheme::Left);
        CHECK(left.values.isApprox(Vector{{1.0, -4.0}}));
        const auto trap = sampled_ig(net, Vector{{0.0, 0.0}}, Vector{{1.0, 2.0}}, 0, m, RiemannScheme::Trapezoid);
        CHECK(trap.values.isApprox(Vector{{1.0, -4.0}}));
    }
}

TEST_CASE("exact IG completeness on random networks") {
    Rng rng(41);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int draw = 0; draw < 30; ++draw) {
        const Network net = random_mixed_network(rng, 3, 3);
        const Point x0 = Vector::NullaryExpr(3, [&] { return n(rng); });
        const Point x1 = Vector::NullaryExpr(3, [&] { return n(rng); });
        const Attribution a = exact_ig(net, x0, x1, static_cast<std::size_t>(draw % 3));
        CHECK(completeness_gap(a) <= 1e-6);
    }
}

TEST_CASE("sampled IG: parallel equals serial and error shrinks with m") {
    Rng rng(43);
    std::normal_distribution<double> n(0.0, 1.0);
    NetSpec spec;
    spec.input_dim = 3;
    spec.widths = {12, 12};
    spec.activations = {Activation::Relu, Activation::Relu};
    spec.weight_scale = 2.0;
    const Network net = random_network(rng, spec);
    const Point x0 = Vector::NullaryExpr(3, [&] { return n(rng); });
    const Point x1 = Vector::NullaryExpr(3, [&] { return n(rng); });
    const Attribution exact = exact_ig(net, x0, x1, 1);

    EngineOptions four;
    four.threads = 4;
    EngineOptions one;
    one.threads = 1;
    double last = std::numeric_limits<double>::infinity();
    for (std::size_t m : {10, 100, 1000, 10000}) {
        const auto par = sampled_ig(net, x0, x1, 1, m, RiemannScheme::Trapezoid, four);
        const auto ser = sampled_ig_reference(net, x0, x1, 1, m, RiemannScheme::Trapezoid);
        CHECK(par.values == sampled_ig(net, x0, x1, 1, m, RiemannScheme::Trapezoid, one).values);
        CHECK((par.values - ser.values).norm() <= 1e-12 * std::max(1.0, ser.values.norm()));
        const double err = (par.values - exact.values).norm();
        CHECK(err <= 1.1 * last);
        last = err;
    }
}

TEST_CASE("trapezoid equals left plus the endpoint correction") {
    Rng rng(44);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = random_mixed_network(rng, 3, 2);
        const Point x0 = Vector::NullaryExpr(3, [&] { return n(rng); });
        const Point x1 = Vector::NullaryExpr(3, [&] { return n(rng); });
        for (std::size_t m : {1, 10, 1000}) {
            const Vector left = sampled_ig(net, x0, x1, 0, m, RiemannScheme::Left).values;
            const Vector trap = sampled_ig(net, x0, x1, 0, m, RiemannScheme::Trapezoid).values;
            const Vector jump = output_gradient(net, x1, 0) - output_gradient(net, x0, 0);
            const Vector want = left + (x1 - x0).cwiseProduct(jump) / (2.0 * static_cast<double>(m));
            CHECK((trap - want).norm() <= 1e-12 * std::max(1.0, want.norm()));
        }
    }
}

TEST_CASE("exact_ig_batch matches single calls") {
    const Network net = example_network();
    const std::vector<std::pair<Point, Point>> pairs{{Vector{{-1.0}}, Vector{{2.0}}}, {Vector{{0.5}}, Vector{{-0.5}}}};
    const auto batch = exact_ig_batch(net, pairs, 0);
    REQUIRE(batch.size() == 2);
    CHECK(batch[1].values == exact_ig(net, pairs[1].first, pairs[1].second, 0).values);
    CHECK(batch[1].values[0] == doctest::Approx(0.0));
    CHECK(batch[0].values[0] == doctest::Approx(0.0));
}

TEST_CASE("argmax ties go to the smallest index") {
    CHECK(argmax_label(Vector{{1.0, 3.0, 3.0}}) == 1);
    CHECK(argmax_label(Vector{{2.0, 2.0 + 1e-12}}) == 0);
    CHECK(argmax_label(Vector{{-5.0, -1.0}}) == 1);
}

TEST_CASE("decision regions of the identity split along the diagonal") {
    const auto regions = decision_regions(Network(2), box(0, 0, 1, 1));
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].region.size() == 3);
    CHECK(regions[1].region.size() == 3);
    std::set<std::size_t> labels{regions[0].label, regions[1].label};
    CHECK(labels == std::set<std::size_t>{0, 1});
    for (const auto& lr : regions) CHECK(polygon_area(lr.region) == doctest::Approx(0.5));

    const std::string svg = render_decision_svg(box(0, 0, 1, 1), regions, default_palette());
    CHECK(count(svg, "<path ") == 2);
    CHECK(count(svg, "<text") == 2);
}

TEST_CASE("constant output gives a single region") {
    const Network net(2, {AffineLayer{Matrix::Zero(2, 2), Vector{{1.0, 0.0}}}});
    const auto regions = decision_regions(net, box(0, 0, 1, 1));
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].label == 0);
    CHECK(count(render_decision_svg(box(0, 0, 1, 1), regions, default_palette()), "<path ") == 1);
    CHECK_THROWS_AS(decision_regions(Network(1, {}), validate_region(Matrix{{0, 1, 0}, {0, 0, 1}})), DimensionError);
}

TEST_CASE("decision region labels hold at every vertex") {
    Rng rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const Network net = random_mixed_network(rng, 2, 4);
        const PlanarRegion x = validate_region(random_convex_polygon(rng, 2));
        const auto regions = decision_regions(net, x);
        double sum = 0.0;
        for (const LabeledRegion& lr : regions) {
            sum += polygon_area(lr.region);
            for (Eigen::Index k = 0; k < lr.region.size(); ++k) {
                const Vector y = evaluate(net, lr.region.preimage.col(k));
                const double tol = 1e-6 * std::max(1.0, y.cwiseAbs().maxCoeff());
                CHECK(y[static_cast<Eigen::Index>(lr.label)] >= y.maxCoeff() - tol);
            }
        }
        CHECK(std::abs(sum - polygon_area(x)) <= 1e-6 * polygon_area(x));
    }
}

TEST_CASE("vertex enumeration") {
    const PartitionSet2D sq{box(0, 0, 1, 1), {box(0, 0, 1, 1)}};
    CHECK(enumerate_vertices(sq).size() == 4);

    const PartitionSet2D tri = symbolic_rep_2d(Network(2, {ReluLayer{}}), triangle_fixture());
    const auto verts = enumerate_vertices(tri);
    REQUIRE(verts.size() == 5);
    CHECK(verts[0].preimage == Vector{{-2.0, 0.0}});
    CHECK(verts[1].preimage == Vector{{-2.0, 2.0}});
    CHECK(verts[2].preimage == Vector{{0.0, 0.0}});
    CHECK(verts[3].preimage == Vector{{0.0, 1.0}});
    CHECK(verts[4].preimage == Vector{{2.0, 0.0}});
    CHECK(verts[1].image == Vector{{0.0, 2.0}});

    const PartitionSet2D quads = symbolic_rep_2d(Network(2, {ReluLayer{}}), square(1.0));
    CHECK(enumerate_vertices(quads).size() == 9);
}
