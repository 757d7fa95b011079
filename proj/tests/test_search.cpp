#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atlas/plant.hpp"
#include "atlas/search.hpp"
#include "oracle_helpers.hpp"

using namespace atlas;

namespace {

Vec v1(double a) {
    Vec v(1);
    v[0] = a;
    return v;
}

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

PlantPtr scalar_affine(double clo = -10.0, double chi = 10.0) {
    return make_affine_plant(Mat::Identity(1, 1), Mat::Identity(1, 1), Vec::Zero(1),
                             Box(v1(-10.0), v1(10.0)), Box(v1(clo), v1(chi)));
}

} // namespace

TEST_CASE("best_control recovers the analytic minimizer") {
    auto plant = scalar_affine();
    OutputBox box(v1(-1), v1(1), v1(0));
    BestControlResult res = best_control(*plant, v1(2.0), box, v1(1.0), 2000, 7);
    CHECK(std::abs(res.control[0] - (-2.0)) < 1e-3);
    CHECK(res.loss < 1e-6);
    CHECK(res.evals_used <= 2000);
}

TEST_CASE("best_control clips to the control domain edge") {
    auto plant = scalar_affine(-1.0, 1.0);
    OutputBox box(v1(-1), v1(1), v1(0));
    BestControlResult res = best_control(*plant, v1(2.0), box, v1(1.0), 2000, 7);
    CHECK(std::abs(res.control[0] - (-1.0)) < 1e-3);
}

TEST_CASE("best_control throws when no control reaches the box") {
    auto plant = scalar_affine(-1.0, 1.0);
    OutputBox box(v1(-1), v1(1), v1(0));
    CHECK_THROWS_AS(best_control(*plant, v1(8.0), box, v1(1.0), 500, 7), NoAcceptableControl);
}

TEST_CASE("best_control is monotone in budget and deterministic") {
    auto plant = make_network_analog(7);
    Vec origin = Vec::Constant(31, 0.3);
    Vec mid = Vec::Constant(43, 0.5);
    double y_mid = plant->evaluate(origin, mid)[0];
    OutputBox box(v1(0.0), v1(2.0 * y_mid), v1(y_mid));

    BestControlResult small = best_control(*plant, origin, box, v1(1.0), 1500, 11);
    BestControlResult large = best_control(*plant, origin, box, v1(1.0), 3000, 11);
    CHECK(large.loss <= small.loss);

    BestControlResult again = best_control(*plant, origin, box, v1(1.0), 1500, 11);
    CHECK(vec_equal(again.control, small.control));
    CHECK(again.loss == small.loss);
    CHECK(again.evals_used == small.evals_used);
}

TEST_CASE("best_control beats a random-sampling oracle at equal budget") {
    auto plant = make_network_analog(7);
    Vec origin = Vec::Constant(31, 0.3);
    Vec mid = Vec::Constant(43, 0.5);
    double target = plant->evaluate(origin, mid)[0] * 0.8;
    OutputBox box(v1(0.0), v1(2.0 * target), v1(target));

    // oracle first: the best loss a 20000-point random control sample finds
    testoracle::TestRng rng(1234);
    const Box& cdom = plant->signature().control_domain;
    double oracle_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20000; ++i) {
        Vec c = rng.uniform_vec(cdom.lo, cdom.hi);
        double y = plant->evaluate(origin, c)[0];
        oracle_best = std::min(oracle_best, (y - target) * (y - target));
    }

    BestControlResult res = best_control(*plant, origin, box, v1(1.0), 20000, 7);
    CHECK(res.loss <= oracle_best);
}

TEST_CASE("cutoff_radius on the affine fixture") {
    auto plant = scalar_affine();
    OutputBox box(v1(-1), v1(1), v1(0));
    Vec control = v1(-2.0);
    NormalizedFrame frame(v1(2.0), v1(1.0));

    CutoffResult plus = cutoff_radius(*plant, control, Ray(frame, v1(1.0)), box, 1e-6, 0);
    CHECK(std::abs(plus.radius - 1.0) <= 1e-6);
    CHECK_FALSE(plus.clipped);
    CHECK(plus.bracket_width <= 1e-6);

    CutoffResult minus = cutoff_radius(*plant, control, Ray(frame, v1(-1.0)), box, 1e-6, 0);
    CHECK(std::abs(minus.radius - 1.0) <= 1e-6);
}

TEST_CASE("cutoff_radius clips at the domain fence") {
    auto plant = make_affine_plant(Mat::Identity(1, 1), Mat::Identity(1, 1), Vec::Zero(1),
                                   Box(v1(0.0), v1(2.5)), Box(v1(-10.0), v1(10.0)));
    OutputBox box(v1(-1), v1(1), v1(0));
    NormalizedFrame frame(v1(2.0), v1(1.0));
    CutoffResult res = cutoff_radius(*plant, v1(-2.0), Ray(frame, v1(1.0)), box, 1e-6, 4);
    CHECK(res.radius == doctest::Approx(0.5));
    CHECK(res.clipped);
}

TEST_CASE("cutoff_radius rejects an unacceptable origin") {
    auto plant = scalar_affine();
    OutputBox box(v1(-1), v1(1), v1(0));
    NormalizedFrame frame(v1(5.0), v1(1.0));
    CHECK_THROWS_AS(cutoff_radius(*plant, v1(0.0), Ray(frame, v1(1.0)), box, 1e-6, 4),
                    OriginNotAcceptable);
}

TEST_CASE("cutoff_radius detects the annulus hole through the center") {
    auto plant = make_annulus_plant(2);
    OutputBox box(v1(0.0), v1(0.25), v1(0.0));
    // unit scale of 2 physical units: the first bracketing step lands across
    // the ring, so the interior probes cover the hole
    NormalizedFrame frame(v2(1.0, 0.0), v2(2.0, 2.0));
    Ray through_center(frame, v2(-1.0, 0.0));
    CutoffResult res = cutoff_radius(*plant, v1(0.0), through_center, box, 1e-6, 16);
    CHECK(res.hole_detected);
    // after the shrink the radius stops at the near edge of the ring
    CHECK(res.radius == doctest::Approx(0.125).epsilon(1e-3));

    // oracle: a dense scan of the same acceptability function confirms an
    // interior gap within the pre-shrink span
    auto acceptable = [&](double t) {
        Vec x = frame.from_normalized(t * through_center.direction);
        return plant->evaluate(x, v1(0.0))[0] <= 0.25;
    };
    CHECK(testoracle::has_interior_gap(acceptable, 1.2));
}

TEST_CASE("cutoff bisection matches the independent scan oracle on the ellipse") {
    Vec weights = v2(4.0, 1.0);
    auto plant = make_ellipsoidal_plant(Vec::Zero(2), weights, nullptr,
                                        Box(v2(-3, -3), v2(3, 3)), Box(v1(-1), v1(1)));
    OutputBox box(v1(0.0), v1(1.0), v1(0.0));
    NormalizedFrame frame(v2(0, 0), v2(1, 1));
    testoracle::TestRng rng(77);
    for (int i = 0; i < 100; ++i) {
        Vec u = rng.unit_direction(2);
        CutoffResult res = cutoff_radius(*plant, v1(0.0), Ray(frame, u), box, 1e-9, 0);
        double expected = testoracle::ellipsoid_radius(weights, 1.0, u);
        CHECK(std::abs(res.radius - expected) <= 1e-8);
    }
}

TEST_CASE("cutoff hint bracket is used and falls back when stale") {
    auto plant = scalar_affine();
    OutputBox box(v1(-1), v1(1), v1(0));
    NormalizedFrame frame(v1(2.0), v1(1.0));
    Ray ray(frame, v1(1.0));

    CutoffResult hinted = cutoff_radius(*plant, v1(-2.0), ray, box, 1e-6, 0, 1.05);
    CHECK(std::abs(hinted.radius - 1.0) <= 1e-6);

    // wildly wrong hints still land on the boundary via the full search
    CutoffResult stale_lo = cutoff_radius(*plant, v1(-2.0), ray, box, 1e-6, 0, 0.01);
    CHECK(std::abs(stale_lo.radius - 1.0) <= 1e-6);
    CutoffResult stale_hi = cutoff_radius(*plant, v1(-2.0), ray, box, 1e-6, 0, 6.0);
    CHECK(std::abs(stale_hi.radius - 1.0) <= 1e-6);
}

TEST_CASE("cutoff results are deterministic") {
    auto plant = scalar_affine();
    OutputBox box(v1(-1), v1(1), v1(0));
    NormalizedFrame frame(v1(2.0), v1(1.0));
    CutoffResult a = cutoff_radius(*plant, v1(-2.0), Ray(frame, v1(1.0)), box, 1e-6, 8);
    CutoffResult b = cutoff_radius(*plant, v1(-2.0), Ray(frame, v1(1.0)), box, 1e-6, 8);
    CHECK(a.radius == b.radius);
    CHECK(a.bracket_width == b.bracket_width);
    CHECK(a.evals_used == b.evals_used);
}
