#include "atlas/library.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <zlib.h>

#include <nlohmann/json.hpp>

#include "atlas/rng.hpp"

namespace atlas {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Control region and record membership

ControlRegion ControlRegion::from_vertices(std::vector<Vec> vertices) {
    if (vertices.empty()) {
        throw DomainViolation("a control region needs at least one vertex");
    }
    ControlRegion region;
    region.vertices = std::move(vertices);
    region.recompute_centroid();
    return region;
}

void ControlRegion::recompute_centroid() {
    centroid = Vec::Zero(vertices.front().size());
    for (const Vec& v : vertices) centroid += v;
    centroid /= static_cast<double>(vertices.size());
}

bool SolutionRecord::contains(const Vec& x) const {
    if (surfaces.empty()) return false;
    for (const RadialSurface& s : surfaces) {
        if (!s.contains(x).inside) return false;
    }
    return true;
}

double SolutionRecord::depth(const Vec& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const RadialSurface& s : surfaces) {
        d = std::min(d, s.contains(x).depth);
    }
    return surfaces.empty() ? -std::numeric_limits<double>::infinity() : d;
}

const SolutionRecord* SolutionLibrary::find(const std::string& id) const {
    for (const SolutionRecord& r : records) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Learning

namespace {

void require_interior_origin(const Plant& plant, const Vec& origin) {
    const Box& domain = plant.signature().input_domain;
    if (origin.size() != domain.dim()) {
        throw DimensionMismatch("origin dimension does not match plant input");
    }
    for (Eigen::Index i = 0; i < origin.size(); ++i) {
        if (!(origin[i] > domain.lo[i] && origin[i] < domain.hi[i])) {
            throw OriginOutsideDomain("origin must be strictly inside the input domain");
        }
    }
}

Vec resolve_weights(const TrioConfig& cfg, Eigen::Index n_out) {
    if (cfg.weights.size() == 0) return Vec::Ones(n_out);
    if (cfg.weights.size() != n_out) {
        throw DimensionMismatch("loss weights dimension does not match plant output");
    }
    for (Eigen::Index i = 0; i < cfg.weights.size(); ++i) {
        if (!(cfg.weights[i] > 0.0)) throw DomainViolation("loss weights must be positive");
    }
    return cfg.weights;
}

std::int64_t count_holes(const std::vector<CutoffSample>& samples) {
    std::int64_t holes = 0;
    for (const CutoffSample& s : samples) {
        if (s.hole_detected) ++holes;
    }
    return holes;
}

} // namespace

SolutionRecord learn_trio(const Plant& plant, const Vec& origin, const OutputBox& box,
                          const TrioConfig& cfg, const std::string& id,
                          std::vector<CutoffSample>* samples_out) {
    require_interior_origin(plant, origin);
    const PlantSignature& sig = plant.signature();
    if (box.dim() != sig.n_out) {
        throw DimensionMismatch("output box dimension does not match plant output");
    }
    Vec weights = resolve_weights(cfg, sig.n_out);

    BestControlResult bc = best_control(plant, origin, box, weights, cfg.search_budget,
                                        derive_seed(cfg.seed, 1));

    Vec scales = cfg.unit_scales ? *cfg.unit_scales : default_unit_scales(sig.input_domain);
    NormalizedFrame frame(origin, scales);
    SurfaceLearnConfig scfg = cfg.surface;
    scfg.seed = derive_seed(cfg.seed, 2);
    if (cfg.workers != 0) scfg.workers = cfg.workers;
    SurfaceLearnResult ls = learn_surface(plant, bc.control, frame, box, scfg);

    SolutionRecord record;
    record.id = id;
    record.surfaces.push_back(ls.surface);
    record.control = ControlRegion::from_vertices({bc.control});
    record.box = box;
    record.provenance.plant_id = plant.id();
    record.provenance.master_seed = cfg.seed;
    record.provenance.cfg = cfg;
    record.provenance.evals_best_control = bc.evals_used;
    record.provenance.evals_surface = ls.evals_used;
    record.provenance.fit_traces.push_back(ls.trace);
    record.provenance.hole_sample_count = count_holes(ls.samples);
    record.provenance.convexity_violation_fraction =
        convexity_violation_fraction(ls.surface, 200, derive_seed(cfg.seed, 3));
    if (samples_out) *samples_out = std::move(ls.samples);
    return record;
}

std::vector<Vec> sample_intersection_points(const SolutionRecord& record, const Box& domain,
                                            std::size_t count, std::uint64_t seed,
                                            std::size_t max_attempts) {
    std::vector<Vec> out;
    if (record.surfaces.empty() || count == 0) return out;
    const RadialSurface& s0 = record.surfaces.front();
    const Eigen::Index n = s0.frame.dim();
    const double radius = s0.bounding_radius();
    Rng rng(mix_seed(seed ^ 0x73616d70ull));
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count; ++attempt) {
        Vec u = sample_unit_direction(rng, n);
        double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(n));
        Vec x = s0.frame.from_normalized(r * u);
        if (!domain.contains(x)) continue;
        if (!record.contains(x)) continue;
        out.push_back(std::move(x));
    }
    return out;
}

ValidationReport validate_record(const Plant& plant, const SolutionRecord& record,
                                 int n_samples, int n_combos, std::uint64_t seed) {
    if (record.control.vertices.empty()) {
        throw DomainViolation("record has no control vertices to validate");
    }
    if (n_samples < 1) throw DomainViolation("validation needs at least one sample");
    const Box& domain = plant.signature().input_domain;
    std::vector<Vec> points =
        sample_intersection_points(record, domain, static_cast<std::size_t>(n_samples),
                                   derive_seed(seed, 1),
                                   static_cast<std::size_t>(n_samples) * 1000);
    if (points.empty()) {
        throw EmptyIntersection("intersection witness sampler exhausted its attempt budget");
    }

    const auto& vertices = record.control.vertices;
    const Box& cdomain = plant.signature().control_domain;
    Rng combo_rng(derive_seed(seed, 2));
    std::int64_t vertex_pass = 0, vertex_total = 0;
    std::int64_t combo_pass = 0, combo_total = 0;
    for (const Vec& x : points) {
        for (const Vec& v : vertices) {
            Vec y = plant.evaluate(x, v);
            if (in_output_box(record.box, y)) ++vertex_pass;
            ++vertex_total;
        }
        for (int j = 0; j < n_combos; ++j) {
            // Dirichlet(1) weights over the vertices
            Vec lambda(static_cast<Eigen::Index>(vertices.size()));
            double sum = 0.0;
            for (Eigen::Index k = 0; k < lambda.size(); ++k) {
                lambda[k] = -std::log(combo_rng.uniform01_open_lo());
                sum += lambda[k];
            }
            lambda /= sum;
            Vec c = Vec::Zero(vertices.front().size());
            for (std::size_t k = 0; k < vertices.size(); ++k) {
                c += lambda[static_cast<Eigen::Index>(k)] * vertices[k];
            }
            Vec y = plant.evaluate(x, cdomain.clamp(c));
            if (in_output_box(record.box, y)) ++combo_pass;
            ++combo_total;
        }
    }

    ValidationReport report;
    report.vertex_pass_rate =
        vertex_total > 0 ? static_cast<double>(vertex_pass) / vertex_total : 0.0;
    report.combo_pass_rate =
        combo_total > 0 ? static_cast<double>(combo_pass) / combo_total : report.vertex_pass_rate;
    report.samples_used = static_cast<std::int64_t>(points.size());
    return report;
}

SolutionRecord expand_control_region(const Plant& plant, const SolutionRecord& record,
                                     const TrioConfig& trio_cfg, const ExpansionConfig& cfg) {
    if (record.surfaces.empty()) {
        throw DomainViolation("cannot expand a record without surfaces");
    }
    if (cfg.n_interior == 0 && cfg.n_proximal == 0) return record;  // identity

    SolutionRecord out = record;
    const Box& domain = plant.signature().input_domain;
    const std::uint64_t seed = trio_cfg.seed;
    const std::size_t witness_target =
        static_cast<std::size_t>(std::max(50, cfg.validation_samples / 10));

    struct Proposal {
        std::string kind;
        Vec origin;
    };
    std::vector<Proposal> proposals;

    if (cfg.n_interior > 0) {
        auto pts = sample_intersection_points(record, domain,
                                              static_cast<std::size_t>(cfg.n_interior),
                                              derive_seed(seed, 0x101),
                                              static_cast<std::size_t>(cfg.n_interior) * 2000);
        if (pts.empty()) {
            out.provenance.expansion_log.push_back(
                {"interior", Vec(), false, "EmptyIntersection: no interior witnesses found"});
            return out;  // region lost its witnesses; leave the record as-is
        }
        for (auto& p : pts) proposals.push_back({"interior", std::move(p)});
    }

    if (cfg.n_proximal > 0) {
        const RadialSurface& s0 = out.surfaces.front();
        const Eigen::Index n = s0.frame.dim();
        // Proximal origins sit just outside the margin-shrunk membership
        // region but inside the raw fitted surface, so they stay members of
        // every surface at margin 1.
        const double cap = std::min(1.0 + cfg.proximity_band, 0.999 / s0.margin);
        Rng prox_rng(derive_seed(seed, 0x102));
        for (int k = 0; k < cfg.n_proximal; ++k) {
            Vec u = sample_unit_direction(prox_rng, n);
            double factor = 1.0 + (cap - 1.0) * prox_rng.uniform01_open_lo();
            double extent = 0.0;
            for (int step = 64; step >= 1; --step) {
                double t = s0.membership_radius(u) * step / 64.0;
                Vec x = s0.frame.from_normalized(t * u);
                if (domain.contains(x) && record.contains(x)) {
                    extent = t;
                    break;
                }
            }
            if (extent <= 0.0) {
                out.provenance.expansion_log.push_back(
                    {"proximal", Vec(), false, "no member point found along the ray"});
                continue;
            }
            Vec cand = s0.frame.from_normalized(extent * factor * u);
            bool interior = true;
            for (Eigen::Index i = 0; i < cand.size(); ++i) {
                if (!(cand[i] > domain.lo[i] && cand[i] < domain.hi[i])) interior = false;
            }
            if (!interior) {
                out.provenance.expansion_log.push_back(
                    {"proximal", cand, false, "proximal origin left the input domain"});
                continue;
            }
            proposals.push_back({"proximal", std::move(cand)});
        }
    }

    // Candidates are learned and accepted in seed order so the result is
    // reproducible.
    for (std::size_t idx = 0; idx < proposals.size(); ++idx) {
        const Proposal& prop = proposals[idx];
        TrioConfig cand_cfg = trio_cfg;
        cand_cfg.seed = derive_seed(seed, 0x200 + idx);
        try {
            SolutionRecord cand =
                learn_trio(plant, prop.origin, record.box, cand_cfg, out.id + "-cand");
            SolutionRecord tentative = out;
            tentative.surfaces.push_back(cand.surfaces.front());
            auto witnesses = sample_intersection_points(
                tentative, domain, witness_target, derive_seed(seed, 0x300 + idx),
                witness_target * 2000);
            if (witnesses.size() < witness_target) {
                out.provenance.expansion_log.push_back(
                    {prop.kind, prop.origin, false,
                     "intersection witnesses dropped below " + std::to_string(witness_target)});
                continue;
            }
            out.surfaces.push_back(cand.surfaces.front());
            out.control.vertices.push_back(cand.control.vertices.front());
            out.control.recompute_centroid();
            out.provenance.evals_best_control += cand.provenance.evals_best_control;
            out.provenance.evals_surface += cand.provenance.evals_surface;
            out.provenance.fit_traces.push_back(cand.provenance.fit_traces.front());
            out.provenance.hole_sample_count += cand.provenance.hole_sample_count;
            out.provenance.expansion_log.push_back({prop.kind, prop.origin, true, ""});
        } catch (const Error& e) {
            out.provenance.expansion_log.push_back(
                {prop.kind, prop.origin, false, e.kind() + ": " + e.what()});
        }
    }

    try {
        ValidationReport report = validate_record(plant, out, cfg.validation_samples,
                                                  cfg.validation_combos,
                                                  derive_seed(seed, 0x400));
        out.provenance.validation = report;
        out.provenance.evals_validation =
            static_cast<std::uint64_t>(report.samples_used) *
            (out.control.vertices.size() + static_cast<std::size_t>(cfg.validation_combos));
    } catch (const EmptyIntersection& e) {
        out.provenance.expansion_log.push_back({"validation", Vec(), false,
                                                std::string("EmptyIntersection: ") + e.what()});
    }
    return out;
}

SolutionLibrary decompose(const Plant& plant, const std::vector<Vec>& origins,
                          const std::vector<OutputBox>& boxes, const TrioConfig& cfg,
                          const std::optional<ExpansionConfig>& expansion,
                          std::vector<DecomposeSkip>* skips_out) {
    if (origins.empty()) throw ConfigInvalid("decompose requires at least one origin");
    if (boxes.size() != 1 && boxes.size() != origins.size()) {
        throw DimensionMismatch("boxes must be one per origin or a single shared box");
    }
    SolutionLibrary lib;
    lib.plant_id = plant.id();
    for (std::size_t i = 0; i < origins.size(); ++i) {
        const OutputBox& box = boxes.size() == 1 ? boxes.front() : boxes[i];
        TrioConfig per = cfg;
        per.seed = derive_seed(cfg.seed, i);
        try {
            SolutionRecord rec =
                learn_trio(plant, origins[i], box, per, "rec-" + std::to_string(i));
            if (expansion) rec = expand_control_region(plant, rec, per, *expansion);
            lib.records.push_back(std::move(rec));
        } catch (const Error& e) {
            if (skips_out) skips_out->push_back({i, e.kind(), e.what()});
        }
    }
    if (lib.records.empty()) {
        throw AllOriginsFailed("every origin failed to produce a record");
    }
    return lib;
}

TrajectoryPlan plan_trajectory(const Plant& plant, const Vec& start_state,
                               const std::vector<OutputBox>& waypoints, const TrioConfig& cfg,
                               TrajectoryPlan* partial_out) {
    const PlantSignature& sig = plant.signature();
    if (sig.n_out != sig.n_in) {
        throw StateFeedbackDimMismatch(
            "state-feedback trajectories need n_out == n_in, plant has " +
            std::to_string(sig.n_out) + " outputs and " + std::to_string(sig.n_in) + " inputs");
    }
    if (waypoints.empty()) throw ConfigInvalid("trajectory requires at least one waypoint");

    TrajectoryPlan plan;
    plan.state_feedback = true;
    Vec origin = start_state;
    for (std::size_t k = 0; k < waypoints.size(); ++k) {
        TrioConfig per = cfg;
        per.seed = derive_seed(cfg.seed, 0x500 + k);
        try {
            SolutionRecord rec =
                learn_trio(plant, origin, waypoints[k], per, "wp-" + std::to_string(k));
            plan.waypoints.push_back({waypoints[k], std::move(rec)});
        } catch (const Error& e) {
            if (partial_out) *partial_out = plan;
            throw WaypointInfeasible(static_cast<int>(k),
                                     "waypoint " + std::to_string(k) + " infeasible after " +
                                         std::to_string(plan.waypoints.size()) +
                                         " planned steps: " + e.what());
        }
        origin = waypoints[k].target;  // predicted post-step state
    }
    return plan;
}

SolutionRecord adapt(const Plant& plant, const SolutionRecord& record, const Vec& new_origin,
                     const TrioConfig& cfg) {
    SolutionRecord rec = learn_trio(plant, new_origin, record.box, cfg, record.id);
    rec.provenance.adapted_from = record.id;
    return rec;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (const auto& x : a) v[i++] = x.get<double>();
    return v;
}

json box_to_json(const OutputBox& box) {
    return json{{"lo", vec_to_json(box.lo)},
                {"hi", vec_to_json(box.hi)},
                {"target", vec_to_json(box.target)}};
}

OutputBox box_from_json(const json& j) {
    return OutputBox(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")),
                     vec_from_json(j.at("target")));
}

json surface_to_json(const RadialSurface& s) {
    json coeffs = json::array();
    for (std::size_t i = 0; i < s.monomials.size(); ++i) {
        coeffs.push_back(json{{"monomial", s.monomials[i]},
                              {"value", s.coefficients[static_cast<Eigen::Index>(i)]}});
    }
    return json{{"origin", vec_to_json(s.frame.origin)},
                {"scales", vec_to_json(s.frame.unit_scales)},
                {"degree", s.degree},
                {"coefficients", coeffs},
                {"rms_residual", s.rms_residual},
                {"margin", s.margin},
                {"floor", s.min_radius_floor},
                {"sample_count", s.sample_count}};
}

RadialSurface surface_from_json(const json& j) {
    RadialSurface s;
    s.frame = NormalizedFrame(vec_from_json(j.at("origin")), vec_from_json(j.at("scales")));
    s.degree = j.at("degree").get<int>();
    const json& coeffs = j.at("coefficients");
    s.coefficients = Vec(static_cast<Eigen::Index>(coeffs.size()));
    Eigen::Index i = 0;
    for (const auto& c : coeffs) {
        s.monomials.push_back(c.at("monomial").get<std::vector<int>>());
        s.coefficients[i++] = c.at("value").get<double>();
    }
    s.rms_residual = j.at("rms_residual").get<double>();
    s.margin = j.at("margin").get<double>();
    s.min_radius_floor = j.at("floor").get<double>();
    s.sample_count = j.at("sample_count").get<std::int64_t>();
    return s;
}

json trio_cfg_to_json(const TrioConfig& cfg) {
    json surface{{"batch_size", cfg.surface.batch_size},
                 {"degree", cfg.surface.degree},
                 {"margin", cfg.surface.margin},
                 {"stabilization_eps", cfg.surface.stabilization_eps},
                 {"stabilization_window", cfg.surface.stabilization_window},
                 {"max_batches", cfg.surface.max_batches},
                 {"tol", cfg.surface.tol},
                 {"probe_k", cfg.surface.probe_k}};
    return json{{"weights", vec_to_json(cfg.weights)},
                {"search_budget", cfg.search_budget},
                {"surface", surface},
                {"unit_scales", cfg.unit_scales ? vec_to_json(*cfg.unit_scales) : json()},
                {"seed", cfg.seed}};
}

TrioConfig trio_cfg_from_json(const json& j) {
    TrioConfig cfg;
    cfg.weights = vec_from_json(j.at("weights"));
    cfg.search_budget = j.at("search_budget").get<std::uint64_t>();
    const json& s = j.at("surface");
    cfg.surface.batch_size = s.at("batch_size").get<int>();
    cfg.surface.degree = s.at("degree").get<int>();
    cfg.surface.margin = s.at("margin").get<double>();
    cfg.surface.stabilization_eps = s.at("stabilization_eps").get<double>();
    cfg.surface.stabilization_window = s.at("stabilization_window").get<int>();
    cfg.surface.max_batches = s.at("max_batches").get<int>();
    cfg.surface.tol = s.at("tol").get<double>();
    cfg.surface.probe_k = s.at("probe_k").get<int>();
    if (!j.at("unit_scales").is_null()) cfg.unit_scales = vec_from_json(j.at("unit_scales"));
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

json provenance_to_json(const Provenance& p) {
    json traces = json::array();
    for (const FitTrace& t : p.fit_traces) {
        json hist = json::array();
        for (const auto& e : t.history) hist.push_back(json::array({e.sample_count, e.rms_residual}));
        traces.push_back(json{{"history", hist}, {"stabilized", t.stabilized}});
    }
    json expansion = json::array();
    for (const auto& e : p.expansion_log) {
        expansion.push_back(json{{"kind", e.kind},
                                 {"origin", vec_to_json(e.origin)},
                                 {"accepted", e.accepted},
                                 {"message", e.message}});
    }
    json validation;
    if (p.validation) {
        validation = json{{"vertex_pass_rate", p.validation->vertex_pass_rate},
                          {"combo_pass_rate", p.validation->combo_pass_rate},
                          {"samples_used", p.validation->samples_used}};
    }
    return json{{"plant_id", p.plant_id},
                {"master_seed", p.master_seed},
                {"cfg", trio_cfg_to_json(p.cfg)},
                {"eval_counts", json{{"best_control", p.evals_best_control},
                                     {"surface", p.evals_surface},
                                     {"validation", p.evals_validation}}},
                {"fit_traces", traces},
                {"hole_sample_count", p.hole_sample_count},
                {"convexity_violation_fraction", p.convexity_violation_fraction},
                {"expansion", expansion},
                {"adapted_from", p.adapted_from},
                {"validation", validation}};
}

Provenance provenance_from_json(const json& j) {
    Provenance p;
    p.plant_id = j.at("plant_id").get<std::string>();
    p.master_seed = j.at("master_seed").get<std::uint64_t>();
    p.cfg = trio_cfg_from_json(j.at("cfg"));
    const json& counts = j.at("eval_counts");
    p.evals_best_control = counts.at("best_control").get<std::uint64_t>();
    p.evals_surface = counts.at("surface").get<std::uint64_t>();
    p.evals_validation = counts.at("validation").get<std::uint64_t>();
    for (const auto& t : j.at("fit_traces")) {
        FitTrace trace;
        for (const auto& e : t.at("history")) {
            trace.history.push_back({e.at(0).get<std::int64_t>(), e.at(1).get<double>()});
        }
        trace.stabilized = t.at("stabilized").get<bool>();
        p.fit_traces.push_back(std::move(trace));
    }
    p.hole_sample_count = j.at("hole_sample_count").get<std::int64_t>();
    p.convexity_violation_fraction = j.at("convexity_violation_fraction").get<double>();
    for (const auto& e : j.at("expansion")) {
        p.expansion_log.push_back({e.at("kind").get<std::string>(),
                                   vec_from_json(e.at("origin")),
                                   e.at("accepted").get<bool>(),
                                   e.at("message").get<std::string>()});
    }
    p.adapted_from = j.at("adapted_from").get<std::string>();
    if (!j.at("validation").is_null()) {
        const json& v = j.at("validation");
        ValidationReport report;
        report.vertex_pass_rate = v.at("vertex_pass_rate").get<double>();
        report.combo_pass_rate = v.at("combo_pass_rate").get<double>();
        report.samples_used = v.at("samples_used").get<std::int64_t>();
        p.validation = report;
    }
    return p;
}

json record_to_json(const SolutionRecord& r) {
    json surfaces = json::array();
    for (const RadialSurface& s : r.surfaces) surfaces.push_back(surface_to_json(s));
    json vertices = json::array();
    for (const Vec& v : r.control.vertices) vertices.push_back(vec_to_json(v));
    return json{{"id", r.id},
                {"box", box_to_json(r.box)},
                {"surfaces", surfaces},
                {"control", json{{"vertices", vertices},
                                 {"centroid", vec_to_json(r.control.centroid)}}},
                {"provenance", provenance_to_json(r.provenance)}};
}

SolutionRecord record_from_json(const json& j) {
    SolutionRecord r;
    r.id = j.at("id").get<std::string>();
    r.box = box_from_json(j.at("box"));
    for (const auto& s : j.at("surfaces")) r.surfaces.push_back(surface_from_json(s));
    const json& control = j.at("control");
    std::vector<Vec> vertices;
    for (const auto& v : control.at("vertices")) vertices.push_back(vec_from_json(v));
    r.control = ControlRegion::from_vertices(std::move(vertices));
    r.control.centroid = vec_from_json(control.at("centroid"));
    r.provenance = provenance_from_json(j.at("provenance"));
    return r;
}

json records_to_json(const SolutionLibrary& lib) {
    json records = json::array();
    for (const SolutionRecord& r : lib.records) records.push_back(record_to_json(r));
    return records;
}

std::uint32_t crc32_of(const std::string& s) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(s.data()),
                  static_cast<uInt>(s.size()));
    return static_cast<std::uint32_t>(crc);
}

void check_unique_ids(const SolutionLibrary& lib) {
    for (std::size_t i = 0; i < lib.records.size(); ++i) {
        for (std::size_t k = i + 1; k < lib.records.size(); ++k) {
            if (lib.records[i].id == lib.records[k].id) {
                throw DomainViolation("duplicate record id: " + lib.records[i].id);
            }
        }
    }
}

} // namespace

std::string canonical_json(const SolutionRecord& record) {
    return record_to_json(record).dump();
}

std::string canonical_json(const SolutionLibrary& lib) {
    json records = records_to_json(lib);
    json doc{{"format_version", lib.format_version},
             {"plant_id", lib.plant_id},
             {"records", records},
             {"checksum", crc32_of(records.dump())}};
    return doc.dump();
}

bool records_equal(const SolutionRecord& a, const SolutionRecord& b) {
    return canonical_json(a) == canonical_json(b);
}

bool libraries_equal(const SolutionLibrary& a, const SolutionLibrary& b) {
    return canonical_json(a) == canonical_json(b);
}

void save_library(const SolutionLibrary& lib, const std::string& path) {
    check_unique_ids(lib);
    json records = records_to_json(lib);
    json doc{{"format_version", lib.format_version},
             {"plant_id", lib.plant_id},
             {"records", records},
             {"checksum", crc32_of(records.dump())}};
    std::ofstream os(path);
    if (!os) throw FileUnreadable("cannot open " + path + " for writing");
    os << doc.dump(2) << "\n";
    if (!os) throw FileUnreadable("failed while writing " + path);
}

SolutionLibrary load_library(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FileUnreadable("cannot open " + path + " for reading");
    json doc = json::parse(is, nullptr, false);
    if (doc.is_discarded()) throw CorruptFile("library file is not valid JSON: " + path);
    if (!doc.contains("format_version") || !doc.contains("records") ||
        !doc.contains("checksum") || !doc.contains("plant_id")) {
        throw CorruptFile("library file is missing required top-level fields");
    }
    int version = doc.at("format_version").get<int>();
    if (version != 1) {
        throw FormatVersionMismatch("library format_version " + std::to_string(version) +
                                    " is not supported (expected 1)");
    }
    std::uint32_t expected = doc.at("checksum").get<std::uint32_t>();
    std::uint32_t actual = crc32_of(doc.at("records").dump());
    if (expected != actual) {
        throw CorruptFile("library checksum mismatch: file says " + std::to_string(expected) +
                          ", records hash to " + std::to_string(actual));
    }
    SolutionLibrary lib;
    lib.format_version = version;
    lib.plant_id = doc.at("plant_id").get<std::string>();
    try {
        for (const auto& r : doc.at("records")) lib.records.push_back(record_from_json(r));
    } catch (const json::exception& e) {
        throw CorruptFile(std::string("malformed record in library file: ") + e.what());
    }
    check_unique_ids(lib);
    return lib;
}

} // namespace atlas
