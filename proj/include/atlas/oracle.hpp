#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "atlas/library.hpp"
#include "atlas/plant.hpp"

namespace atlas {

// Ground-truth audit of a record: fitted membership versus direct plant
// acceptability under the record's first vertex control.
struct AuditReport {
    std::uint64_t n_samples = 0;
    std::uint64_t fitted_in = 0;
    std::uint64_t plant_in = 0;
    std::uint64_t false_accepts = 0;  // fitted in, plant unacceptable
    std::uint64_t false_rejects = 0;  // fitted out, plant acceptable
    double false_accept_rate = 0.0;
    double false_reject_rate = 0.0;
    double volume_ratio_estimate = 0.0;  // fitted-in fraction vs plant-in fraction

    void print(std::ostream& os) const;  // flat key=value block
    static std::string csv_header();
    std::string csv_row(const std::string& record_id) const;
};

// Uniform samples from the first surface's bounding sphere scaled by 1.5,
// restricted to the plant input domain. Deterministic under the seed.
AuditReport mc_audit(const Plant& plant, const SolutionRecord& record, std::uint64_t n,
                     std::uint64_t seed, int workers = 0);

// Full-factorial grid over the input domain, audited over the same sphere as
// mc_audit; input dimension must be <= 3. Exact within grid resolution.
AuditReport grid_audit(const Plant& plant, const SolutionRecord& record, int points_per_dim,
                       int workers = 0);

} // namespace atlas
