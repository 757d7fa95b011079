#include "atlas/boundary.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include "atlas/parallel.hpp"
#include "atlas/rng.hpp"

namespace atlas {

namespace {

void gen_exponents(Eigen::Index n, int remaining, Eigen::Index pos, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
    if (pos == n - 1) {
        current[static_cast<std::size_t>(pos)] = remaining;
        out.push_back(current);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[static_cast<std::size_t>(pos)] = e;
        gen_exponents(n, remaining - e, pos + 1, current, out);
    }
}

double eval_monomial(const std::vector<int>& exponents, const Vec& u) {
    double v = 1.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        int e = exponents[i];
        double base = u[static_cast<Eigen::Index>(i)];
        for (int k = 0; k < e; ++k) v *= base;
    }
    return v;
}

} // namespace

std::vector<std::vector<int>> monomial_exponents(Eigen::Index n, int degree) {
    if (n < 1) throw DimensionMismatch("monomial basis needs at least one variable");
    if (degree < 0) throw DomainViolation("polynomial degree must be >= 0");
    std::vector<std::vector<int>> out;
    std::vector<int> current(static_cast<std::size_t>(n), 0);
    for (int total = 0; total <= degree; ++total) {
        gen_exponents(n, total, 0, current, out);
    }
    return out;
}

std::int64_t monomial_count(Eigen::Index n, int degree) {
    // C(n + degree, degree)
    std::int64_t count = 1;
    for (int k = 1; k <= degree; ++k) {
        count = count * (n + k) / k;
    }
    return count;
}

double RadialSurface::raw_radius(const Vec& u) const {
    double r = 0.0;
    for (std::size_t j = 0; j < monomials.size(); ++j) {
        r += coefficients[static_cast<Eigen::Index>(j)] * eval_monomial(monomials[j], u);
    }
    return r;
}

double RadialSurface::fitted_radius(const Vec& u) const {
    return std::max(raw_radius(u), min_radius_floor);
}

double RadialSurface::membership_radius(const Vec& u) const {
    return margin * fitted_radius(u);
}

ContainsResult RadialSurface::contains(const Vec& x) const {
    Vec v = frame.to_normalized(x);
    double rho = v.norm();
    if (rho == 0.0) return {true, 1.0};
    Vec u = v / rho;
    double r = membership_radius(u);
    if (!(r > 0.0)) return {false, -std::numeric_limits<double>::infinity()};
    double depth = 1.0 - rho / r;
    return {rho <= r, depth};
}

double RadialSurface::bounding_radius() const {
    const Eigen::Index n = frame.dim();
    double r_max = min_radius_floor;
    if (n == 1) {
        Vec u(1);
        u[0] = 1.0;
        r_max = std::max(r_max, fitted_radius(u));
        u[0] = -1.0;
        r_max = std::max(r_max, fitted_radius(u));
    } else {
        Rng rng(0xb0d5u);  // fixed probe stream keeps this deterministic
        for (int i = 0; i < 2048; ++i) {
            Vec u = sample_unit_direction(rng, n);
            r_max = std::max(r_max, fitted_radius(u));
        }
    }
    return margin * r_max * 1.05;
}

RadialSurface fit_radial_surface(const std::vector<CutoffSample>& samples,
                                 const NormalizedFrame& frame, int degree, double margin) {
    if (degree < 0) throw DomainViolation("polynomial degree must be >= 0");
    if (!(margin > 0.0 && margin <= 1.0)) {
        throw DomainViolation("margin must lie in (0, 1]");
    }
    const Eigen::Index n = frame.dim();

    std::vector<const CutoffSample*> rows;
    double min_radius = std::numeric_limits<double>::infinity();
    for (const CutoffSample& s : samples) {
        if (s.direction.size() != n) {
            throw DimensionMismatch("cutoff sample direction does not match frame");
        }
        min_radius = std::min(min_radius, s.radius);
        if (!s.clipped) rows.push_back(&s);  // clipped radii are lower bounds only
    }

    auto exponents = monomial_exponents(n, degree);
    const auto p = static_cast<Eigen::Index>(exponents.size());
    if (static_cast<Eigen::Index>(rows.size()) < p) {
        throw InsufficientSamples("need at least " + std::to_string(p) +
                                  " non-clipped samples for degree " + std::to_string(degree) +
                                  ", have " + std::to_string(rows.size()));
    }

    const auto m = static_cast<Eigen::Index>(rows.size());
    Mat design(m, p);
    Vec target(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const CutoffSample& s = *rows[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < p; ++j) {
            design(i, j) = eval_monomial(exponents[static_cast<std::size_t>(j)], s.direction);
        }
        target[i] = s.radius;
    }

    // Ridge-regularized normal equations; the trace scaling keeps lambda
    // meaningful across design-matrix magnitudes and breaks residual ties
    // toward minimum-norm coefficients. One refinement step removes the
    // O(lambda) shrink bias without reintroducing null-space components.
    Mat normal = design.transpose() * design;
    double lambda = 1e-8 * normal.trace() / static_cast<double>(p);
    normal.diagonal().array() += lambda;
    Eigen::LDLT<Mat> solver(normal);
    Vec rhs = design.transpose() * target;
    Vec coeff = solver.solve(rhs);
    coeff += solver.solve(rhs - design.transpose() * (design * coeff));
    if (!coeff.allFinite()) {
        throw DegenerateDirections("radius regression is rank-deficient beyond ridge rescue");
    }

    Vec residual = design * coeff - target;
    double rms = std::sqrt(residual.squaredNorm() / static_cast<double>(m));

    RadialSurface surface;
    surface.frame = frame;
    surface.degree = degree;
    surface.monomials = std::move(exponents);
    surface.coefficients = std::move(coeff);
    surface.rms_residual = rms;
    surface.margin = margin;
    surface.min_radius_floor = std::max(0.1 * min_radius, 1e-12);
    surface.sample_count = static_cast<std::int64_t>(samples.size());
    return surface;
}

namespace {

// Residual change below the cutoff-search tolerance is measurement noise,
// not a trend; the stabilization test treats it as converged.
bool stabilized_at(const FitTrace& trace, int window, double eps, double tol) {
    int w = std::max(window, 2);
    const auto& h = trace.history;
    if (static_cast<int>(h.size()) < w) return false;
    for (std::size_t j = h.size() - static_cast<std::size_t>(w) + 1; j < h.size(); ++j) {
        double prev = h[j - 1].rms_residual;
        double change = std::abs(h[j].rms_residual - prev);
        if (change > std::max(eps * prev, tol)) return false;
    }
    return true;
}

} // namespace

SurfaceLearnResult learn_surface(const Plant& plant, const Vec& control,
                                 const NormalizedFrame& frame, const OutputBox& box,
                                 const SurfaceLearnConfig& cfg) {
    const Eigen::Index n = frame.dim();
    if (n != plant.signature().n_in) {
        throw DimensionMismatch("frame dimension does not match plant input");
    }
    {
        Vec y0 = plant.evaluate(frame.origin, control);
        if (!in_output_box(box, y0)) {
            throw OriginNotAcceptable("control does not map the frame origin into the output box");
        }
    }

    const std::int64_t n_coeff = monomial_count(n, cfg.degree);
    const int batch_size =
        cfg.batch_size > 0 ? cfg.batch_size : static_cast<int>(4 * n_coeff);
    const int workers = resolve_workers(cfg.workers);

    SurfaceLearnResult result;
    result.evals_used = 1;  // the origin acceptance check above
    std::vector<CutoffSample>& samples = result.samples;
    bool have_surface = false;

    Rng dir_rng(mix_seed(cfg.seed ^ 0x72617973ull));
    for (int batch = 1; batch <= cfg.max_batches; ++batch) {
        std::vector<Vec> directions(static_cast<std::size_t>(batch_size));
        for (auto& u : directions) u = sample_unit_direction(dir_rng, n);

        std::vector<CutoffSample> batch_samples(directions.size());
        std::atomic<std::uint64_t> batch_evals{0};
        const RadialSurface* current = have_surface ? &result.surface : nullptr;
        parallel_for(directions.size(), workers, [&](std::size_t i) {
            Ray ray(frame, directions[i]);
            std::optional<double> hint;
            if (current) hint = current->fitted_radius(directions[i]);
            CutoffResult res =
                cutoff_radius(plant, control, ray, box, cfg.tol, cfg.probe_k, hint);
            batch_samples[i] = CutoffSample{directions[i], res.radius, res.clipped,
                                            res.hole_detected};
            batch_evals.fetch_add(res.evals_used, std::memory_order_relaxed);
        });
        result.evals_used += batch_evals.load(std::memory_order_relaxed);
        samples.insert(samples.end(), batch_samples.begin(), batch_samples.end());

        result.surface = fit_radial_surface(samples, frame, cfg.degree, cfg.margin);
        have_surface = true;
        result.trace.history.push_back(
            {static_cast<std::int64_t>(samples.size()), result.surface.rms_residual});

        if (stabilized_at(result.trace, cfg.stabilization_window, cfg.stabilization_eps,
                          cfg.tol)) {
            result.trace.stabilized = true;
            break;
        }
    }
    return result;
}

double convexity_violation_fraction(const RadialSurface& surface, int n_chords,
                                    std::uint64_t seed) {
    if (n_chords < 1) return 0.0;
    const Eigen::Index n = surface.frame.dim();
    Rng rng(mix_seed(seed ^ 0x63686f72ull));
    int violations = 0;
    for (int i = 0; i < n_chords; ++i) {
        Vec u = sample_unit_direction(rng, n);
        Vec v = sample_unit_direction(rng, n);
        Vec a = surface.membership_radius(u) * u;
        Vec b = surface.membership_radius(v) * v;
        Vec mid_physical = surface.frame.from_normalized(0.5 * (a + b));
        if (!surface.contains(mid_physical).inside) ++violations;
    }
    return static_cast<double>(violations) / static_cast<double>(n_chords);
}

namespace {

void open_or_throw(std::ofstream& os, const std::string& path) {
    os.open(path);
    if (!os) throw FileUnreadable("cannot open " + path + " for writing");
}

} // namespace

void export_boundary_csv(const RadialSurface& surface,
                         const std::vector<CutoffSample>& samples,
                         const std::string& samples_path, const std::string& fit_path) {
    const Eigen::Index n = surface.frame.dim();
    {
        std::ofstream os;
        open_or_throw(os, samples_path);
        os << std::setprecision(17);
        for (Eigen::Index i = 0; i < n; ++i) os << "d" << i << ",";
        os << "radius,clipped,hole\n";
        for (const CutoffSample& s : samples) {
            for (Eigen::Index i = 0; i < n; ++i) os << s.direction[i] << ",";
            os << s.radius << "," << (s.clipped ? 1 : 0) << "," << (s.hole_detected ? 1 : 0)
               << "\n";
        }
    }
    if (n > 3) return;  // the angle-grid file is for 2-D/3-D plotting only

    std::ofstream os;
    open_or_throw(os, fit_path);
    os << std::setprecision(17);
    constexpr double two_pi = 6.283185307179586476925286766559;
    constexpr double pi = 3.1415926535897932384626433832795;
    if (n == 1) {
        os << "theta,fitted_radius\n";
        Vec u(1);
        u[0] = 1.0;
        os << 0.0 << "," << surface.fitted_radius(u) << "\n";
        u[0] = -1.0;
        os << pi << "," << surface.fitted_radius(u) << "\n";
    } else if (n == 2) {
        os << "theta,fitted_radius\n";
        const int grid = 256;
        for (int i = 0; i < grid; ++i) {
            double theta = two_pi * i / grid;
            Vec u(2);
            u << std::cos(theta), std::sin(theta);
            os << theta << "," << surface.fitted_radius(u) << "\n";
        }
    } else {
        os << "theta,phi,fitted_radius\n";
        const int n_theta = 64, n_phi = 32;
        for (int i = 0; i < n_theta; ++i) {
            double theta = two_pi * i / n_theta;
            for (int j = 0; j < n_phi; ++j) {
                double phi = pi * (j + 0.5) / n_phi;
                Vec u(3);
                u << std::cos(theta) * std::sin(phi), std::sin(theta) * std::sin(phi),
                    std::cos(phi);
                os << theta << "," << phi << "," << surface.fitted_radius(u) << "\n";
            }
        }
    }
}

} // namespace atlas
