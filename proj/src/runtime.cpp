#include "atlas/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace atlas {

ClassifyResult classify(const SolutionLibrary& lib, const Vec& x) {
    ClassifyResult best;
    best.depth = -std::numeric_limits<double>::infinity();
    for (const SolutionRecord& rec : lib.records) {
        if (!rec.contains(x)) continue;
        double d = rec.depth(x);
        if (best.record == nullptr || d > best.depth ||
            (d == best.depth && rec.id < best.record->id)) {
            best.record = &rec;
            best.depth = d;
        }
    }
    if (best.record == nullptr) best.depth = 0.0;
    return best;
}

Vec dispatch_control(const SolutionRecord& record, DispatchPolicy policy,
                     const std::optional<Vec>& previous_control) {
    const auto& vertices = record.control.vertices;
    if (vertices.empty()) throw DomainViolation("record has no control vertices");
    switch (policy) {
        case DispatchPolicy::Centroid:
            return record.control.centroid;
        case DispatchPolicy::FirstVertex:
            return vertices.front();
        case DispatchPolicy::NearestVertex: {
            if (!previous_control) return vertices.front();
            std::size_t best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < vertices.size(); ++i) {
                double d = (vertices[i] - *previous_control).norm();
                if (d < best_dist) {  // ties keep the lowest index
                    best_dist = d;
                    best = i;
                }
            }
            return vertices[best];
        }
    }
    throw DomainViolation("unknown dispatch policy");
}

namespace {

// Deepest (least negative) region when nothing contains x.
const SolutionRecord* nearest_region(const SolutionLibrary& lib, const Vec& x, double* depth_out) {
    const SolutionRecord* best = nullptr;
    double best_depth = -std::numeric_limits<double>::infinity();
    for (const SolutionRecord& rec : lib.records) {
        double d = rec.depth(x);
        if (best == nullptr || d > best_depth || (d == best_depth && rec.id < best->id)) {
            best = &rec;
            best_depth = d;
        }
    }
    if (depth_out) *depth_out = best_depth;
    return best;
}

} // namespace

SimTrace simulate(const Plant& plant, const SolutionLibrary& lib,
                  const std::vector<Vec>& inputs, DispatchPolicy policy,
                  FallbackMode fallback) {
    SimTrace trace;
    std::optional<Vec> previous_control;
    for (const Vec& x : inputs) {
        SimStep step;
        step.input = x;
        ClassifyResult cls = classify(lib, x);
        const SolutionRecord* rec = cls.record;
        bool used_fallback = false;
        double depth = cls.depth;
        if (rec == nullptr) {
            if (fallback == FallbackMode::Halt) {
                // Logged gap: no control, no plant evaluation.
                trace.steps.push_back(std::move(step));
                break;
            }
            rec = nearest_region(lib, x, &depth);
            used_fallback = true;
            if (rec == nullptr) {  // empty library
                trace.steps.push_back(std::move(step));
                break;
            }
        }
        Dispatch dispatch;
        dispatch.record_id = rec->id;
        dispatch.chosen_control = dispatch_control(*rec, policy, previous_control);
        dispatch.depth = depth;
        dispatch.fallback_used = used_fallback;
        previous_control = dispatch.chosen_control;
        step.output = plant.evaluate(x, dispatch.chosen_control);
        step.in_box = in_output_box(rec->box, step.output);
        step.dispatch = std::move(dispatch);
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

SimTrace run_trajectory(const Plant& plant, const TrajectoryPlan& plan, const Vec& start_state,
                        DispatchPolicy policy) {
    const PlantSignature& sig = plant.signature();
    if (sig.n_out != sig.n_in) {
        throw StateFeedbackDimMismatch("trajectory execution needs n_out == n_in");
    }
    SimTrace trace;
    Vec state = start_state;
    std::optional<Vec> previous_control;
    for (const auto& wp : plan.waypoints) {
        SimStep step;
        step.input = state;
        Dispatch dispatch;
        dispatch.record_id = wp.record.id;
        dispatch.chosen_control = dispatch_control(wp.record, policy, previous_control);
        dispatch.depth = wp.record.depth(state);
        dispatch.fallback_used = !wp.record.contains(state);
        previous_control = dispatch.chosen_control;
        step.output = plant.evaluate(state, dispatch.chosen_control);
        step.in_box = in_output_box(wp.box, step.output);
        step.dispatch = std::move(dispatch);
        state = step.output;
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

std::optional<AdaptationRequest> drift_monitor(const std::vector<SimStep>& window,
                                               double threshold_depth) {
    if (window.empty()) throw DomainViolation("drift monitor window is empty");
    std::vector<double> depths;
    depths.reserve(window.size());
    for (const SimStep& s : window) {
        depths.push_back(s.dispatch ? s.dispatch->depth : -1.0);
    }
    double med = median_of(depths);
    if (med >= threshold_depth) return std::nullopt;

    AdaptationRequest req;
    req.median_depth = med;
    const Eigen::Index dim = window.front().input.size();
    req.suggested_origin = Vec(dim);
    std::vector<double> column(window.size());
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (std::size_t k = 0; k < window.size(); ++k) column[k] = window[k].input[i];
        req.suggested_origin[i] = median_of(column);
    }
    return req;
}

void write_trace_csv(const SimTrace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw FileUnreadable("cannot open " + path + " for writing");
    os << std::setprecision(17);

    Eigen::Index n_in = 0, n_ctrl = 0, n_out = 0;
    for (const SimStep& s : trace.steps) {
        n_in = std::max(n_in, s.input.size());
        if (s.dispatch) n_ctrl = std::max(n_ctrl, s.dispatch->chosen_control.size());
        n_out = std::max(n_out, s.output.size());
    }
    os << "step";
    for (Eigen::Index i = 0; i < n_in; ++i) os << ",x" << i;
    os << ",record_id";
    for (Eigen::Index i = 0; i < n_ctrl; ++i) os << ",c" << i;
    for (Eigen::Index i = 0; i < n_out; ++i) os << ",y" << i;
    os << ",in_box,depth,fallback_used\n";

    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const SimStep& s = trace.steps[k];
        os << k;
        for (Eigen::Index i = 0; i < n_in; ++i) {
            os << ",";
            if (i < s.input.size()) os << s.input[i];
        }
        os << "," << (s.dispatch ? s.dispatch->record_id : "");
        for (Eigen::Index i = 0; i < n_ctrl; ++i) {
            os << ",";
            if (s.dispatch && i < s.dispatch->chosen_control.size()) {
                os << s.dispatch->chosen_control[i];
            }
        }
        for (Eigen::Index i = 0; i < n_out; ++i) {
            os << ",";
            if (i < s.output.size()) os << s.output[i];
        }
        os << "," << (s.in_box ? 1 : 0) << ",";
        if (s.dispatch) os << s.dispatch->depth;
        os << "," << (s.dispatch && s.dispatch->fallback_used ? 1 : 0) << "\n";
    }
}

} // namespace atlas
