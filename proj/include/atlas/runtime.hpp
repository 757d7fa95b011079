#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atlas/library.hpp"
#include "atlas/plant.hpp"

namespace atlas {

enum class DispatchPolicy { Centroid, FirstVertex, NearestVertex };
enum class FallbackMode { Halt, NearestRegion };

struct Dispatch {
    std::string record_id;
    Vec chosen_control;
    double depth = 0.0;
    bool fallback_used = false;
};

struct SimStep {
    Vec input;
    std::optional<Dispatch> dispatch;  // empty on a halted gap step
    Vec output;                        // empty when the plant was not evaluated
    bool in_box = false;
};

struct SimTrace {
    std::vector<SimStep> steps;
};

struct ClassifyResult {
    const SolutionRecord* record = nullptr;  // null: no region contains x
    double depth = 0.0;
};

// Membership depth over every record; returns the most interior match,
// ties broken by lowest record id.
ClassifyResult classify(const SolutionLibrary& lib, const Vec& x);

// previous_control feeds the NearestVertex continuity preference.
Vec dispatch_control(const SolutionRecord& record, DispatchPolicy policy,
                     const std::optional<Vec>& previous_control = std::nullopt);

// Per input: classify, dispatch, evaluate, log. Gaps either halt the trace
// or fall back to the nearest region with fallback_used flagged; the plant
// is never evaluated on a control-less step.
SimTrace simulate(const Plant& plant, const SolutionLibrary& lib,
                  const std::vector<Vec>& inputs, DispatchPolicy policy,
                  FallbackMode fallback);

// Executes a trajectory plan in state-feedback mode: each step dispatches
// the waypoint record's control from the current state and the achieved
// output becomes the next state. A state outside the waypoint's region is
// dispatched anyway with fallback_used flagged.
SimTrace run_trajectory(const Plant& plant, const TrajectoryPlan& plan, const Vec& start_state,
                        DispatchPolicy policy);

struct AdaptationRequest {
    Vec suggested_origin;  // componentwise median of the window's inputs
    double median_depth = 0.0;
};

// Emits a request when the median membership depth over the window falls
// below the threshold. Steps without a dispatch count as depth -1.
std::optional<AdaptationRequest> drift_monitor(const std::vector<SimStep>& window,
                                               double threshold_depth);

// step, input components, record id, control components, output components,
// in_box, depth, fallback_used.
void write_trace_csv(const SimTrace& trace, const std::string& path);

} // namespace atlas
