#pragma once

#include "atlas/core.hpp"
#include "atlas/rng.hpp"

namespace atlas {

// Origin-centered scaling between physical input coordinates and the
// dimensionless frame in which rays are cast and radii measured.
struct NormalizedFrame {
    Vec origin;       // physical units
    Vec unit_scales;  // physical units per 1.0 normalized unit, all > 0

    NormalizedFrame() = default;
    NormalizedFrame(Vec origin_, Vec unit_scales_);

    Eigen::Index dim() const { return origin.size(); }
    Vec to_normalized(const Vec& x) const;
    Vec from_normalized(const Vec& v) const;
};

// Per-dimension measure of 1/100 of the domain width (1.0 where the width
// is zero). Overridable via config.
Vec default_unit_scales(const Box& input_domain);

struct Ray {
    NormalizedFrame frame;
    Vec direction;  // unit vector in normalized coordinates

    Ray(NormalizedFrame frame_, Vec direction_);
};

// Closed box of acceptable outputs plus the desired target inside it.
struct OutputBox {
    Vec lo;
    Vec hi;
    Vec target;

    OutputBox() = default;
    OutputBox(Vec lo_, Vec hi_, Vec target_);

    Eigen::Index dim() const { return lo.size(); }
    bool contains(const Vec& y) const;
};

bool in_output_box(const OutputBox& box, const Vec& y);

// Isotropic unit vector (normalized standard-normal components).
Vec sample_unit_direction(Rng& rng, Eigen::Index n);

// Physical point at normalized radius t >= 0 along the ray.
Vec point_on_ray(const Ray& ray, double t);

// Largest t with point_on_ray(ray, t) inside the domain. The ray origin
// must be strictly inside.
double max_domain_radius(const Ray& ray, const Box& domain);

} // namespace atlas
