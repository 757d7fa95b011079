#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atlas/boundary.hpp"
#include "atlas/plant.hpp"
#include "atlas/search.hpp"
#include "atlas/spaces.hpp"

namespace atlas {

// Validated control vectors plus their arithmetic mean. The hypothesized
// convex control subspace is the hull of the vertices.
struct ControlRegion {
    std::vector<Vec> vertices;
    Vec centroid;

    static ControlRegion from_vertices(std::vector<Vec> vertices);
    void recompute_centroid();
};

struct ValidationReport {
    double vertex_pass_rate = 0.0;
    double combo_pass_rate = 0.0;
    std::int64_t samples_used = 0;
};

struct TrioConfig {
    Vec weights;                      // per-output loss weights; empty = all ones
    std::uint64_t search_budget = 20000;
    SurfaceLearnConfig surface;
    std::optional<Vec> unit_scales;   // empty: 1/100 of each domain width
    std::uint64_t seed = 0;
    int workers = 0;
};

struct ExpansionLogEntry {
    std::string kind;     // "interior" | "proximal"
    Vec origin;
    bool accepted = false;
    std::string message;
};

struct Provenance {
    std::string plant_id;
    std::uint64_t master_seed = 0;
    TrioConfig cfg;
    std::uint64_t evals_best_control = 0;
    std::uint64_t evals_surface = 0;
    std::uint64_t evals_validation = 0;
    std::vector<FitTrace> fit_traces;
    std::int64_t hole_sample_count = 0;
    double convexity_violation_fraction = 0.0;
    std::vector<ExpansionLogEntry> expansion_log;
    std::string adapted_from;  // id of the record this one was adapted from
    std::optional<ValidationReport> validation;
};

// The memorized solution trio: intersected bounded input region (all
// surfaces must contain a member point), validated control region, and the
// bounded output box with its target.
struct SolutionRecord {
    std::string id;
    std::vector<RadialSurface> surfaces;
    ControlRegion control;
    OutputBox box;
    Provenance provenance;

    bool contains(const Vec& x) const;   // AND over surfaces
    double depth(const Vec& x) const;    // min over surfaces
};

struct SolutionLibrary {
    int format_version = 1;
    std::string plant_id;
    std::vector<SolutionRecord> records;

    const SolutionRecord* find(const std::string& id) const;
};

struct TrajectoryPlan {
    struct Waypoint {
        OutputBox box;
        SolutionRecord record;
    };
    std::vector<Waypoint> waypoints;
    bool state_feedback = true;
};

// Steps 1..7 for one origin: best control, then the fitted bounding surface
// for it. The record starts with one surface and a single-vertex control
// region. samples_out, when given, receives the cutoff samples behind the
// surface (they are not persisted with the record).
SolutionRecord learn_trio(const Plant& plant, const Vec& origin, const OutputBox& box,
                          const TrioConfig& cfg, const std::string& id = "rec-0",
                          std::vector<CutoffSample>* samples_out = nullptr);

struct ExpansionConfig {
    int n_interior = 4;
    int n_proximal = 0;
    double proximity_band = 0.1;
    int validation_samples = 1000;
    int validation_combos = 32;
};

// Grows the control region: new origins inside the running intersection and
// just outside it, each contributing a surface and a control vertex when the
// intersection stays witnessed. Ends with a validation pass stored in
// provenance. Returns the record unmodified (with a diagnostic) if the
// region has no witnesses.
SolutionRecord expand_control_region(const Plant& plant, const SolutionRecord& record,
                                     const TrioConfig& trio_cfg, const ExpansionConfig& cfg);

// Samples points from the record's intersection and checks every vertex
// control and random convex combinations of vertices against the output box.
ValidationReport validate_record(const Plant& plant, const SolutionRecord& record,
                                 int n_samples, int n_combos, std::uint64_t seed);

struct DecomposeSkip {
    std::size_t origin_index = 0;
    std::string error_kind;
    std::string message;
};

// One trio (plus optional expansion) per origin; failed origins are skipped
// and reported through skips_out. boxes must hold one box per origin, or a
// single box shared by all.
SolutionLibrary decompose(const Plant& plant, const std::vector<Vec>& origins,
                          const std::vector<OutputBox>& boxes, const TrioConfig& cfg,
                          const std::optional<ExpansionConfig>& expansion = std::nullopt,
                          std::vector<DecomposeSkip>* skips_out = nullptr);

// Chains trios along waypoint boxes in state-feedback mode (the achieved
// output is the next state): origin_0 = start_state, origin_{k+1} =
// waypoint_k target. An infeasible waypoint aborts with WaypointInfeasible;
// the steps planned so far are handed back through partial_out.
TrajectoryPlan plan_trajectory(const Plant& plant, const Vec& start_state,
                               const std::vector<OutputBox>& waypoints, const TrioConfig& cfg,
                               TrajectoryPlan* partial_out = nullptr);

// Relearns the trio at a new origin with the same box; the returned record
// links back to the source record and the source is left untouched.
SolutionRecord adapt(const Plant& plant, const SolutionRecord& record, const Vec& new_origin,
                     const TrioConfig& cfg);

// Lossless JSON persistence with sorted keys, shortest round-trip numbers,
// and a CRC32 checksum of the canonical record array.
void save_library(const SolutionLibrary& lib, const std::string& path);
SolutionLibrary load_library(const std::string& path);

// Canonical serialized form (used by the determinism tests) and exact
// field-for-field equality via it.
std::string canonical_json(const SolutionLibrary& lib);
std::string canonical_json(const SolutionRecord& record);
bool records_equal(const SolutionRecord& a, const SolutionRecord& b);
bool libraries_equal(const SolutionLibrary& a, const SolutionLibrary& b);

// Uniform points from the record's intersection by rejection from the first
// surface's bounding sphere, restricted to the given domain. May return
// fewer than count if the attempt budget runs out.
std::vector<Vec> sample_intersection_points(const SolutionRecord& record, const Box& domain,
                                            std::size_t count, std::uint64_t seed,
                                            std::size_t max_attempts);

} // namespace atlas
