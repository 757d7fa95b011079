#pragma once

// Test-only ground-truth helpers. Everything here is independent of the
// library's search/fit code paths: closed forms where the fixture has one,
// dense scans and plain bisection where it does not.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "atlas/core.hpp"

namespace testoracle {

// Exact cutoff radius of the ellipsoidal fixture along unit direction u:
// y = sum_i w_i (x_i - center_i)^2 + g <= h  =>  r = sqrt((h - g) / sum w_i u_i^2).
inline double ellipsoid_radius(const atlas::Vec& weights, double h_minus_g,
                               const atlas::Vec& u) {
    double q = weights.dot(u.cwiseProduct(u));
    return std::sqrt(h_minus_g / q);
}

// Exact membership of the ellipsoid {sum w_i (x_i - c_i)^2 <= h_minus_g}.
inline bool ellipsoid_member(const atlas::Vec& weights, double h_minus_g,
                             const atlas::Vec& center, const atlas::Vec& x) {
    atlas::Vec d = x - center;
    return weights.dot(d.cwiseProduct(d)) <= h_minus_g;
}

// Plain first-crossing finder: fine linear scan from 0 to fence, then
// bisection of the first bracket. Deliberately not the doubling search the
// implementation uses.
inline double scan_bisect_radius(const std::function<bool(double)>& acceptable, double fence,
                                 double tol, int scan_steps = 4096) {
    double prev = 0.0;
    double lo = fence, hi = fence;
    bool crossed = false;
    for (int i = 1; i <= scan_steps; ++i) {
        double t = fence * i / scan_steps;
        if (!acceptable(t)) {
            lo = prev;
            hi = t;
            crossed = true;
            break;
        }
        prev = t;
    }
    if (!crossed) return fence;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (acceptable(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

// Dense 1-D scan for an interior acceptability gap: true when an
// unacceptable stretch is followed by acceptable points again.
inline bool has_interior_gap(const std::function<bool(double)>& acceptable, double t_max,
                             int steps = 4096) {
    bool seen_gap = false;
    for (int i = 0; i <= steps; ++i) {
        double t = t_max * i / steps;
        if (!acceptable(t)) {
            seen_gap = true;
        } else if (seen_gap) {
            return true;
        }
    }
    return false;
}

// Test-side randomness, separate from the library's generator.
class TestRng {
public:
    explicit TestRng(unsigned seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    atlas::Vec uniform_vec(const atlas::Vec& lo, const atlas::Vec& hi) {
        atlas::Vec v(lo.size());
        for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
        return v;
    }

    atlas::Vec unit_direction(Eigen::Index n) {
        std::normal_distribution<double> normal;
        atlas::Vec v(n);
        do {
            for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(engine_);
        } while (v.norm() < 1e-12);
        return v / v.norm();
    }

private:
    std::mt19937 engine_;
};

} // namespace testoracle
