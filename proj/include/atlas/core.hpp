#pragma once

#include <Eigen/Dense>

#include "atlas/errors.hpp"

namespace atlas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Axis-aligned box with finite bounds, closed on both sides.
struct Box {
    Vec lo;
    Vec hi;

    Box() = default;
    Box(Vec lo_, Vec hi_);

    Eigen::Index dim() const { return lo.size(); }
    bool contains(const Vec& v) const;
    double width(Eigen::Index i) const { return hi[i] - lo[i]; }
    Vec widths() const { return hi - lo; }
    Vec center() const { return 0.5 * (lo + hi); }
    Vec clamp(const Vec& v) const;
};

bool vec_equal(const Vec& a, const Vec& b);
bool vec_close(const Vec& a, const Vec& b, double tol);

} // namespace atlas
