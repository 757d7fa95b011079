#pragma once

#include <cstdint>
#include <optional>

#include "atlas/plant.hpp"
#include "atlas/spaces.hpp"

namespace atlas {

struct BestControlResult {
    Vec control;
    double loss = 0.0;            // weighted squared distance to the target output
    std::uint64_t evals_used = 0;
    bool budget_exhausted = false;  // stopped by the eval cap, best-so-far returned
};

// Derivative-free compass search over the control domain with multiplicative
// step shrinking and seeded random restarts. Deterministic under a fixed
// seed; the eval schedule is budget-independent, so a larger budget runs a
// strict superset of the same evaluations.
//
// Throws NoAcceptableControl if the best output found is not in the box.
BestControlResult best_control(const Plant& plant, const Vec& origin, const OutputBox& box,
                               const Vec& weights, std::uint64_t budget, std::uint64_t seed);

struct CutoffResult {
    double radius = 0.0;        // normalized units
    bool clipped = false;       // ray left the input domain while still acceptable
    bool hole_detected = false;
    double bracket_width = 0.0; // final bisection interval width
    std::uint64_t evals_used = 0;
};

// One-dimensional cutoff search along a ray: exponential bracketing from one
// normalized unit, bisection to width <= tol, then probe_k interior probes
// for acceptability gaps. A bracket hint (from a previous surface fit) seeds
// the search at [0.5*hint, 1.5*hint]; if that bracket does not straddle the
// boundary the full search runs instead.
//
// Throws OriginNotAcceptable if the ray origin itself fails the output box.
CutoffResult cutoff_radius(const Plant& plant, const Vec& control, const Ray& ray,
                           const OutputBox& box, double tol, int probe_k,
                           std::optional<double> hint = std::nullopt);

} // namespace atlas
