#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atlas/plant.hpp"
#include "atlas/search.hpp"
#include "atlas/spaces.hpp"

namespace atlas {

struct CutoffSample {
    Vec direction;      // unit vector in the normalized frame
    double radius = 0;  // normalized units
    bool clipped = false;
    bool hole_detected = false;
};

struct ContainsResult {
    bool inside = false;
    double depth = 0.0;  // 1 - rho/R: positive inside, negative outside
};

// Star-shaped bounded region around a frame origin: the radius along each
// unit direction is modeled by a polynomial in the direction components,
// floor-clamped and shrunk by a conservative margin for membership.
struct RadialSurface {
    NormalizedFrame frame;
    int degree = 0;
    std::vector<std::vector<int>> monomials;  // exponent rows, aligned with coefficients
    Vec coefficients;
    double rms_residual = 0.0;
    double margin = 1.0;             // in (0, 1]
    double min_radius_floor = 0.0;   // positive
    std::int64_t sample_count = 0;

    double raw_radius(const Vec& u) const;         // polynomial value
    double fitted_radius(const Vec& u) const;      // max(raw, floor)
    double membership_radius(const Vec& u) const;  // margin * fitted
    ContainsResult contains(const Vec& x) const;

    // Probe-based cover of the membership radius over the sphere; used to
    // size rejection-sampling and audit spheres. Deterministic.
    double bounding_radius() const;
};

struct FitTrace {
    struct Entry {
        std::int64_t sample_count = 0;
        double rms_residual = 0.0;
    };
    std::vector<Entry> history;
    bool stabilized = false;
};

// Exponent multi-indices of all monomials with total degree <= degree over
// n variables, in graded lexicographic order.
std::vector<std::vector<int>> monomial_exponents(Eigen::Index n, int degree);
std::int64_t monomial_count(Eigen::Index n, int degree);

// Ridge-regularized least squares of radius against direction monomials.
// Clipped samples are lower-bound witnesses: they shape the radius floor but
// stay out of the regression.
RadialSurface fit_radial_surface(const std::vector<CutoffSample>& samples,
                                 const NormalizedFrame& frame, int degree, double margin);

struct SurfaceLearnConfig {
    int batch_size = 0;  // 0: 4x the monomial coefficient count
    int degree = 2;
    double margin = 0.95;
    double stabilization_eps = 0.02;
    int stabilization_window = 3;
    int max_batches = 25;
    double tol = 1e-6;   // normalized units
    int probe_k = 8;
    std::uint64_t seed = 0;
    int workers = 0;     // 0: default pool size
};

struct SurfaceLearnResult {
    RadialSurface surface;
    FitTrace trace;
    std::vector<CutoffSample> samples;
    std::uint64_t evals_used = 0;
};

// Batched cutoff sampling and refitting until the least-squares residual
// stabilizes. Batches after the first seed each cutoff search near the
// current fitted radius.
SurfaceLearnResult learn_surface(const Plant& plant, const Vec& control,
                                 const NormalizedFrame& frame, const OutputBox& box,
                                 const SurfaceLearnConfig& cfg);

// Fraction of random boundary-to-boundary chord midpoints that fall outside
// the surface. Zero for a convex fitted region; reported as a diagnostic.
double convexity_violation_fraction(const RadialSurface& surface, int n_chords,
                                    std::uint64_t seed);

// One row per sample (direction components, radius, clipped, hole flag),
// 17 significant digits. For 2-D/3-D surfaces a companion file of
// (angle grid, fitted radius) is written to fit_path.
void export_boundary_csv(const RadialSurface& surface,
                         const std::vector<CutoffSample>& samples,
                         const std::string& samples_path, const std::string& fit_path);

} // namespace atlas
