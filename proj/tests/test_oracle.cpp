#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "atlas/library.hpp"
#include "atlas/oracle.hpp"
#include "atlas/plant.hpp"
#include "oracle_helpers.hpp"

using namespace atlas;

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

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

PlantPtr sphere_plant() {
    return make_ellipsoidal_plant(Vec::Zero(2), v2(1, 1), nullptr, Box(v2(-3, -3), v2(3, 3)),
                                  Box(v1(-1), v1(1)));
}

PlantPtr ellipse_plant() {
    return make_ellipsoidal_plant(Vec::Zero(2), v2(4, 1), nullptr, Box(v2(-2, -2), v2(2, 2)),
                                  Box(v1(-1), v1(1)));
}

TrioConfig plain_cfg(std::uint64_t seed) {
    TrioConfig cfg;
    cfg.seed = seed;
    cfg.unit_scales = v2(1.0, 1.0);
    return cfg;
}

SolutionRecord interval_record_1d(double margin) {
    NormalizedFrame frame(v1(2.0), v1(1.0));
    std::vector<CutoffSample> samples = {{v1(1.0), 1.0, false, false},
                                         {v1(-1.0), 1.0, false, false}};
    SolutionRecord rec;
    rec.id = "interval";
    rec.surfaces.push_back(fit_radial_surface(samples, frame, 0, margin));
    rec.control = ControlRegion::from_vertices({v1(-2.0)});
    rec.box = OutputBox(v1(-1.0), v1(1.0), v1(0.0));
    return rec;
}

} // namespace

TEST_CASE("mc_audit on a near-perfect sphere fit") {
    auto plant = sphere_plant();
    OutputBox box(v1(0.0), v1(1.0), v1(0.0));
    SolutionRecord rec = learn_trio(*plant, v2(0, 0), box, plain_cfg(6), "sph-0");
    AuditReport report = mc_audit(*plant, rec, 10000, 99);
    CHECK(report.n_samples == 10000);
    CHECK(report.false_accept_rate <= 0.02);
    CHECK(report.false_accepts + (report.fitted_in - report.false_accepts) == report.fitted_in);

    // the analytic disk agrees with the plant-side audit: fitted region sits
    // inside the unit disk up to the margin band
    CHECK(report.volume_ratio_estimate > 0.5);
    CHECK(report.volume_ratio_estimate < 1.1);
}

TEST_CASE("lowering the margin never raises false acceptance") {
    auto plant = sphere_plant();
    OutputBox box(v1(0.0), v1(1.0), v1(0.0));
    SolutionRecord rec = learn_trio(*plant, v2(0, 0), box, plain_cfg(6), "sph-0");
    AuditReport at95 = mc_audit(*plant, rec, 4000, 123);
    SolutionRecord tighter = rec;
    tighter.surfaces.front().margin = 0.5;
    AuditReport at50 = mc_audit(*plant, tighter, 4000, 123);
    CHECK(at50.false_accept_rate <= at95.false_accept_rate);
}

TEST_CASE("single-sample audit reconciles") {
    auto plant = sphere_plant();
    OutputBox box(v1(0.0), v1(1.0), v1(0.0));
    SolutionRecord rec = learn_trio(*plant, v2(0, 0), box, plain_cfg(6), "sph-0");
    AuditReport one = mc_audit(*plant, rec, 1, 5);
    CHECK(one.n_samples == 1);
    CHECK((one.false_accept_rate == 0.0 || one.false_accept_rate == 1.0));
    CHECK((one.false_reject_rate == 0.0 || one.false_reject_rate == 1.0));
    CHECK(one.fitted_in + (1 - one.fitted_in) == 1);
}

TEST_CASE("grid_audit matches interval arithmetic in 1-D") {
    auto plant = make_affine_plant(Mat::Identity(1, 1), Mat::Identity(1, 1), Vec::Zero(1),
                                   Box(v1(0.0), v1(4.0)), Box(v1(-10.0), v1(10.0)));
    SolutionRecord rec = interval_record_1d(0.95);
    const int grid = 101;
    const double sphere = rec.surfaces.front().bounding_radius() * 1.5;
    AuditReport report = grid_audit(*plant, rec, grid);
    CHECK(report.false_accepts == 0);

    // interval-arithmetic oracle over the audited grid points: the plant
    // accepts x in [1, 3] (closed), the margin-shrunk region is [1.05, 2.95]
    std::uint64_t expected_fr = 0, audited = 0;
    for (int i = 0; i < grid; ++i) {
        double x = 4.0 * i / (grid - 1);
        if (std::abs(x - 2.0) > sphere) continue;
        ++audited;
        bool plant_ok = std::abs(x - 2.0) <= 1.0;
        bool fitted = std::abs(x - 2.0) <= 0.95;
        if (plant_ok && !fitted) ++expected_fr;
    }
    CHECK(report.n_samples == audited);
    CHECK(report.false_rejects == expected_fr);
    // the margin-excluded band is 0.1 long over an audited window of 2*sphere;
    // each of the four band edges can round by a full grid cell
    const double spacing = 4.0 / (grid - 1);
    CHECK(std::abs(report.false_reject_rate - 0.1 / (2.0 * sphere)) <=
          4.0 * spacing / (2.0 * sphere));
}

TEST_CASE("grid and mc audits agree on the ellipse") {
    auto plant = ellipse_plant();
    OutputBox box(v1(0.0), v1(1.0), v1(0.0));
    SolutionRecord rec = learn_trio(*plant, v2(0, 0), box, plain_cfg(7), "ell-0");
    AuditReport grid = grid_audit(*plant, rec, 201);
    AuditReport mc = mc_audit(*plant, rec, 10000, 31);
    CHECK(grid.false_accept_rate <= 0.02);
    CHECK(mc.false_accept_rate <= 0.02);
    CHECK(std::abs(grid.false_accept_rate - mc.false_accept_rate) <= 0.02);
    CHECK(std::abs(grid.false_reject_rate - mc.false_reject_rate) <= 0.02);
}

TEST_CASE("grid_audit refuses high dimensions") {
    auto plant = make_annulus_plant(4);
    NormalizedFrame frame(Vec::Zero(4), Vec::Ones(4));
    Rng rng(3);
    std::vector<CutoffSample> samples;
    for (int i = 0; i < 4; ++i) {
        samples.push_back({sample_unit_direction(rng, 4), 1.0, false, false});
    }
    SolutionRecord rec;
    rec.id = "hi";
    rec.surfaces.push_back(fit_radial_surface(samples, frame, 0, 0.95));
    rec.control = ControlRegion::from_vertices({v1(0.0)});
    rec.box = OutputBox(v1(0.0), v1(0.25), v1(0.0));
    CHECK_THROWS_AS(grid_audit(*plant, rec, 11), DimensionTooHigh);
}

TEST_CASE("mc_audit is deterministic and converges") {
    auto plant = ellipse_plant();
    OutputBox box(v1(0.0), v1(1.0), v1(0.0));
    SolutionRecord rec = learn_trio(*plant, v2(0, 0), box, plain_cfg(7), "ell-0");

    AuditReport a = mc_audit(*plant, rec, 2500, 11);
    AuditReport b = mc_audit(*plant, rec, 2500, 11);
    CHECK(a.false_accepts == b.false_accepts);
    CHECK(a.false_rejects == b.false_rejects);

    AuditReport big = mc_audit(*plant, rec, 10000, 11);
    double bound = 2.0 / std::sqrt(2500.0);
    CHECK(std::abs(big.false_accept_rate - a.false_accept_rate) < bound);
    CHECK(std::abs(big.false_reject_rate - a.false_reject_rate) < bound);
}

TEST_CASE("report formats") {
    AuditReport report;
    report.n_samples = 10;
    report.fitted_in = 4;
    report.plant_in = 5;
    report.false_accepts = 1;
    report.false_rejects = 2;
    report.false_accept_rate = 0.1;
    report.false_reject_rate = 0.2;
    report.volume_ratio_estimate = 0.8;

    std::ostringstream os;
    report.print(os);
    CHECK(os.str().find("false_accept_rate=0.1") != std::string::npos);
    CHECK(AuditReport::csv_header().rfind("record_id,", 0) == 0);
    CHECK(report.csv_row("r:mc").rfind("r:mc,10,4,5,1,2,", 0) == 0);
}
