#include "atlas/core.hpp"

#include <cmath>
#include <sstream>

namespace atlas {

Box::Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) {
        throw DimensionMismatch("box bounds have different dimensions");
    }
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) {
            throw DomainViolation("box bounds must be finite");
        }
        if (lo[i] > hi[i]) {
            std::ostringstream msg;
            msg << "box lower bound exceeds upper bound at dimension " << i;
            throw DomainViolation(msg.str());
        }
    }
}

bool Box::contains(const Vec& v) const {
    if (v.size() != lo.size()) {
        throw DimensionMismatch("point dimension does not match box");
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v[i] >= lo[i] && v[i] <= hi[i])) return false;
    }
    return true;
}

Vec Box::clamp(const Vec& v) const {
    if (v.size() != lo.size()) {
        throw DimensionMismatch("point dimension does not match box");
    }
    return v.cwiseMax(lo).cwiseMin(hi);
}

bool vec_equal(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

bool vec_close(const Vec& a, const Vec& b, double tol) {
    if (a.size() != b.size()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

} // namespace atlas
