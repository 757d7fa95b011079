#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atlas/library.hpp"
#include "atlas/oracle.hpp"
#include "atlas/plant.hpp"
#include "atlas/runtime.hpp"

namespace atlas {

// Everything a pipeline run needs, parsed from one JSON config file so an
// experiment is reproducible from a single artifact.
struct RunConfig {
    // plant
    std::string plant_kind;  // affine | ellipsoidal | network_analog | annulus
    Mat affine_A, affine_B;
    Vec affine_bias;
    Vec ellipsoid_center, ellipsoid_weights, ellipsoid_g_linear, ellipsoid_g_quadratic;
    std::uint64_t network_seed = 0;
    int annulus_dim = 2;
    Box input_domain, control_domain;
    std::optional<std::uint64_t> eval_budget;

    // problem
    std::vector<Vec> origins;
    std::vector<OutputBox> boxes;  // one per origin, or a single shared box
    std::uint64_t seed = 0;
    bool seed_present = false;
    int workers = 0;

    TrioConfig trio;
    ExpansionConfig expansion;
    bool expand_requested = false;

    // trajectory
    Vec start_state;
    std::vector<OutputBox> waypoints;

    // simulate
    std::vector<Vec> sim_inputs;
    DispatchPolicy policy = DispatchPolicy::Centroid;
    FallbackMode fallback = FallbackMode::Halt;

    // audit
    std::uint64_t audit_n = 10000;
    int audit_grid_points = 0;  // 0: skip the grid audit

    // artifacts
    std::string library_in;            // input library for expand/simulate/audit/export
    std::string out_library = "library.json";
    std::string out_trace_csv = "trace.csv";
    std::string out_boundary_samples_csv = "boundary_samples.csv";
    std::string out_boundary_fit_csv = "boundary_fit.csv";
    std::string out_audit_csv = "audit.csv";
    std::string record_id;  // expand target; empty = first record
};

// All problems found, not just the first; an empty list means runnable.
std::vector<std::string> validate_config(const std::string& path);

// Parses and validates; throws ConfigInvalid listing every diagnostic.
RunConfig load_run_config(const std::string& path);

PlantPtr make_plant(const RunConfig& cfg);

} // namespace atlas
