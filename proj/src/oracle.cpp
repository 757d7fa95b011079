#include "atlas/oracle.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "atlas/parallel.hpp"
#include "atlas/rng.hpp"
#include "atlas/spaces.hpp"

namespace atlas {

namespace {

struct SampleOutcome {
    bool fitted_in = false;
    bool plant_in = false;
};

AuditReport reduce(std::vector<SampleOutcome>& outcomes) {
    AuditReport report;
    report.n_samples = outcomes.size();
    for (const SampleOutcome& o : outcomes) {
        if (o.fitted_in) ++report.fitted_in;
        if (o.plant_in) ++report.plant_in;
        if (o.fitted_in && !o.plant_in) ++report.false_accepts;
        if (!o.fitted_in && o.plant_in) ++report.false_rejects;
    }
    double n = report.n_samples > 0 ? static_cast<double>(report.n_samples) : 1.0;
    report.false_accept_rate = static_cast<double>(report.false_accepts) / n;
    report.false_reject_rate = static_cast<double>(report.false_rejects) / n;
    if (report.plant_in > 0) {
        report.volume_ratio_estimate =
            static_cast<double>(report.fitted_in) / static_cast<double>(report.plant_in);
    } else {
        report.volume_ratio_estimate =
            report.fitted_in == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return report;
}

} // namespace

AuditReport mc_audit(const Plant& plant, const SolutionRecord& record, std::uint64_t n,
                     std::uint64_t seed, int workers) {
    if (n < 1) throw DomainViolation("mc_audit needs at least one sample");
    if (record.surfaces.empty() || record.control.vertices.empty()) {
        throw DomainViolation("mc_audit needs a record with a surface and a control vertex");
    }
    const RadialSurface& s0 = record.surfaces.front();
    const Box& domain = plant.signature().input_domain;
    const Eigen::Index dim = s0.frame.dim();
    // The exterior band (x1.5) makes false rejection measurable.
    const double sphere = s0.bounding_radius() * 1.5;
    const Vec& control = record.control.vertices.front();

    // Points are drawn serially so the sample set is fixed by the seed; only
    // the plant probes run in parallel.
    // In high dimensions most of the sphere lies outside the domain, so the
    // rejection loop needs a deep attempt budget; an empty first stretch is
    // conclusive evidence the sphere misses the domain entirely.
    std::vector<Vec> points;
    points.reserve(n);
    Rng rng(mix_seed(seed ^ 0x6d634155ull));
    const std::uint64_t max_attempts = 10'000'000ull + 5000ull * n;
    for (std::uint64_t attempt = 1; points.size() < n; ++attempt) {
        if ((attempt > 200'000 && points.empty()) || attempt > max_attempts) {
            throw DomainViolation("audit sphere barely intersects the input domain (" +
                                  std::to_string(points.size()) + " of " + std::to_string(n) +
                                  " samples after " + std::to_string(attempt) + " attempts)");
        }
        Vec u = sample_unit_direction(rng, dim);
        double r = sphere * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
        Vec x = s0.frame.from_normalized(r * u);
        if (!domain.contains(x)) continue;
        points.push_back(std::move(x));
    }

    std::vector<SampleOutcome> outcomes(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) {
        outcomes[i].fitted_in = record.contains(points[i]);
        Vec y = plant.evaluate(points[i], control);
        outcomes[i].plant_in = in_output_box(record.box, y);
    });
    return reduce(outcomes);
}

AuditReport grid_audit(const Plant& plant, const SolutionRecord& record, int points_per_dim,
                       int workers) {
    const Eigen::Index dim = plant.signature().n_in;
    if (dim > 3) {
        throw DimensionTooHigh("grid_audit supports input dimensions up to 3, plant has " +
                               std::to_string(dim));
    }
    if (points_per_dim < 2) throw DomainViolation("grid_audit needs points_per_dim >= 2");
    if (record.surfaces.empty() || record.control.vertices.empty()) {
        throw DomainViolation("grid_audit needs a record with a surface and a control vertex");
    }
    const Box& domain = plant.signature().input_domain;
    const Vec& control = record.control.vertices.front();
    const RadialSurface& s0 = record.surfaces.front();
    // Same audited region as mc_audit: the x1.5 sphere, here swept by a full
    // grid over the domain instead of random draws.
    const double sphere = s0.bounding_radius() * 1.5;

    std::size_t total = 1;
    for (Eigen::Index i = 0; i < dim; ++i) total *= static_cast<std::size_t>(points_per_dim);

    std::vector<Vec> points;
    for (std::size_t flat = 0; flat < total; ++flat) {
        Vec x(dim);
        std::size_t rest = flat;
        for (Eigen::Index i = 0; i < dim; ++i) {
            std::size_t idx = rest % static_cast<std::size_t>(points_per_dim);
            rest /= static_cast<std::size_t>(points_per_dim);
            x[i] = domain.lo[i] +
                   domain.width(i) * static_cast<double>(idx) / (points_per_dim - 1);
        }
        if (s0.frame.to_normalized(x).norm() <= sphere) points.push_back(std::move(x));
    }
    if (points.empty()) {
        throw DomainViolation("audit sphere contains no grid points");
    }

    std::vector<SampleOutcome> outcomes(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) {
        outcomes[i].fitted_in = record.contains(points[i]);
        Vec y = plant.evaluate(points[i], control);
        outcomes[i].plant_in = in_output_box(record.box, y);
    });
    return reduce(outcomes);
}

void AuditReport::print(std::ostream& os) const {
    os << "n_samples=" << n_samples << "\n"
       << "fitted_in=" << fitted_in << "\n"
       << "plant_in=" << plant_in << "\n"
       << "false_accepts=" << false_accepts << "\n"
       << "false_rejects=" << false_rejects << "\n"
       << "false_accept_rate=" << false_accept_rate << "\n"
       << "false_reject_rate=" << false_reject_rate << "\n"
       << "volume_ratio_estimate=" << volume_ratio_estimate << "\n";
}

std::string AuditReport::csv_header() {
    return "record_id,n_samples,fitted_in,plant_in,false_accepts,false_rejects,"
           "false_accept_rate,false_reject_rate,volume_ratio_estimate";
}

std::string AuditReport::csv_row(const std::string& record_id) const {
    std::ostringstream os;
    os.precision(17);
    os << record_id << "," << n_samples << "," << fitted_in << "," << plant_in << ","
       << false_accepts << "," << false_rejects << "," << false_accept_rate << ","
       << false_reject_rate << "," << volume_ratio_estimate;
    return os.str();
}

} // namespace atlas
