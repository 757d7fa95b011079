#include "atlas/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atlas/rng.hpp"

namespace atlas {

namespace {

constexpr int kRestarts = 8;
constexpr double kInitialStep = 0.25;   // in box-normalized control coordinates
constexpr double kMinStep = 1e-10;

struct LossEval {
    double loss;
    bool acceptable;
};

} // namespace

BestControlResult best_control(const Plant& plant, const Vec& origin, const OutputBox& box,
                               const Vec& weights, std::uint64_t budget, std::uint64_t seed) {
    const PlantSignature& sig = plant.signature();
    if (origin.size() != sig.n_in) {
        throw DimensionMismatch("origin dimension does not match plant input");
    }
    if (!sig.input_domain.contains(origin)) {
        throw DomainViolation("origin lies outside the plant input domain");
    }
    if (box.dim() != sig.n_out) {
        throw DimensionMismatch("output box dimension does not match plant output");
    }
    if (weights.size() != sig.n_out) {
        throw DimensionMismatch("loss weights dimension does not match plant output");
    }
    if (budget < 1) throw BudgetExhausted("best_control requires a budget of at least 1");

    const Eigen::Index m = sig.n_ctrl;
    const Vec& lo = sig.control_domain.lo;
    const Vec widths = sig.control_domain.widths();

    auto denorm = [&](const Vec& z) -> Vec { return lo + z.cwiseProduct(widths); };

    std::uint64_t evals = 0;
    Vec best_control_vec;
    double best_loss = std::numeric_limits<double>::infinity();
    bool best_acceptable = false;
    bool out_of_budget = false;

    // Returns nullopt once the budget is gone; the schedule below never
    // consults the budget otherwise, so a larger budget replays the same
    // evaluation prefix.
    auto try_eval = [&](const Vec& z) -> std::optional<LossEval> {
        if (evals >= budget) {
            out_of_budget = true;
            return std::nullopt;
        }
        Vec y = plant.evaluate(origin, denorm(z));
        ++evals;
        Vec d = y - box.target;
        double loss = weights.dot(d.cwiseProduct(d));
        bool ok = in_output_box(box, y);
        if (loss < best_loss) {
            best_loss = loss;
            best_control_vec = denorm(z);
            best_acceptable = ok;
        }
        return LossEval{loss, ok};
    };

    Rng rng(mix_seed(seed ^ 0x62657374ull));
    for (int restart = 0; restart < kRestarts && !out_of_budget; ++restart) {
        Vec z(m);
        if (restart == 0) {
            z.setConstant(0.5);  // domain center first
        } else {
            for (Eigen::Index i = 0; i < m; ++i) z[i] = rng.uniform01();
        }
        auto here = try_eval(z);
        if (!here) break;
        double f = here->loss;

        double step = kInitialStep;
        while (step >= kMinStep && !out_of_budget) {
            bool improved = false;
            for (Eigen::Index i = 0; i < m && !improved; ++i) {
                for (int sgn = 0; sgn < 2 && !improved; ++sgn) {
                    double delta = sgn == 0 ? step : -step;
                    double zi = std::clamp(z[i] + delta, 0.0, 1.0);
                    if (zi == z[i]) continue;
                    Vec cand = z;
                    cand[i] = zi;
                    auto res = try_eval(cand);
                    if (!res) break;
                    if (res->loss < f) {
                        z = cand;
                        f = res->loss;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
    }

    if (!best_acceptable) {
        throw NoAcceptableControl("best control found maps the origin outside the output box"
                                  " (loss " + std::to_string(best_loss) + ")");
    }
    BestControlResult result;
    result.control = best_control_vec;
    result.loss = best_loss;
    result.evals_used = evals;
    result.budget_exhausted = out_of_budget;
    return result;
}

namespace {

// Bisects an acceptability bracket [lo (acceptable), hi (unacceptable)] down
// to width tol. Returns the acceptable end.
struct BisectOut {
    double lo;
    double width;
};

template <typename Accept>
BisectOut bisect_boundary(Accept&& acceptable, double lo, double hi, double tol) {
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
        if (acceptable(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi - lo};
}

} // namespace

CutoffResult cutoff_radius(const Plant& plant, const Vec& control, const Ray& ray,
                           const OutputBox& box, double tol, int probe_k,
                           std::optional<double> hint) {
    if (!(tol > 0.0)) throw DomainViolation("cutoff tolerance must be positive");
    const Box& domain = plant.signature().input_domain;
    const double fence = max_domain_radius(ray, domain);

    std::uint64_t evals = 0;
    // Clamping guards against the fence point rounding a hair outside the
    // closed domain.
    auto acceptable = [&](double t) {
        Vec x = domain.clamp(point_on_ray(ray, t));
        Vec y = plant.evaluate(x, control);
        ++evals;
        return in_output_box(box, y);
    };

    if (!acceptable(0.0)) {
        throw OriginNotAcceptable("ray origin output is outside the output box");
    }

    CutoffResult result;
    bool bracketed = false;
    double lo = 0.0, hi = 0.0;

    if (hint && *hint > 0.0) {
        double h_lo = 0.5 * *hint;
        double h_hi = std::min(1.5 * *hint, fence);
        if (h_hi > h_lo) {
            if (acceptable(h_lo)) {
                if (h_hi >= fence && acceptable(fence)) {
                    result.radius = fence;
                    result.clipped = true;
                    result.bracket_width = 0.0;
                    bracketed = true;  // skip the full search; probes still run
                    lo = fence;
                } else if (!acceptable(h_hi)) {
                    lo = h_lo;
                    hi = h_hi;
                    bracketed = true;
                }
            }
        }
        // Otherwise the hinted bracket does not straddle the boundary; fall
        // back to the full search.
    }

    if (!bracketed) {
        double t = std::min(1.0, fence);
        double prev = 0.0;
        for (;;) {
            if (acceptable(t)) {
                prev = t;
                if (t >= fence) {
                    result.radius = fence;
                    result.clipped = true;
                    result.bracket_width = 0.0;
                    break;
                }
                t = std::min(2.0 * t, fence);
            } else {
                lo = prev;
                hi = t;
                bracketed = true;
                break;
            }
        }
    }

    if (bracketed && !result.clipped) {
        BisectOut b = bisect_boundary(acceptable, lo, hi, tol);
        result.radius = b.lo;
        result.bracket_width = b.width;
    }

    // Interior probes: the monotone-deterioration assumption is checked, not
    // trusted. A failing probe marks a hole and pulls the radius back to the
    // first crossing before it.
    if (probe_k > 0 && result.radius > 0.0) {
        double spacing = result.radius / (probe_k + 1);
        double last_ok = 0.0;
        for (int i = 1; i <= probe_k; ++i) {
            double t = spacing * i;
            if (acceptable(t)) {
                last_ok = t;
                continue;
            }
            BisectOut b = bisect_boundary(acceptable, last_ok, t, tol);
            result.radius = b.lo;
            result.bracket_width = b.width;
            result.hole_detected = true;
            result.clipped = false;
            break;
        }
    }

    result.evals_used = evals;
    return result;
}

} // namespace atlas
