#include "atlas/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace atlas {

using nlohmann::json;

namespace {

json parse_file(const std::string& path, std::vector<std::string>& diags) {
    std::ifstream is(path);
    if (!is) throw FileUnreadable("cannot open config file: " + path);
    json doc = json::parse(is, nullptr, false);
    if (doc.is_discarded()) {
        diags.push_back("config file is not valid JSON");
        return json::object();
    }
    if (!doc.is_object()) {
        diags.push_back("config root must be a JSON object");
        return json::object();
    }
    return doc;
}

bool is_number_array(const json& a) {
    if (!a.is_array()) return false;
    for (const auto& x : a) {
        if (!x.is_number()) return false;
    }
    return true;
}

Vec read_vec(const json& parent, const std::string& key, std::vector<std::string>& diags,
             bool required = true) {
    if (!parent.contains(key)) {
        if (required) diags.push_back(key + ": required field is missing");
        return Vec();
    }
    const json& a = parent.at(key);
    if (!is_number_array(a)) {
        diags.push_back(key + ": expected an array of numbers");
        return Vec();
    }
    Vec v(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (const auto& x : a) v[i++] = x.get<double>();
    return v;
}

Mat read_mat(const json& parent, const std::string& key, std::vector<std::string>& diags) {
    if (!parent.contains(key)) {
        diags.push_back(key + ": required field is missing");
        return Mat();
    }
    const json& rows = parent.at(key);
    if (!rows.is_array() || rows.empty()) {
        diags.push_back(key + ": expected a nonempty array of rows");
        return Mat();
    }
    std::size_t cols = 0;
    for (const auto& row : rows) {
        if (!is_number_array(row)) {
            diags.push_back(key + ": every row must be an array of numbers");
            return Mat();
        }
        if (cols == 0) cols = row.size();
        if (row.size() != cols || cols == 0) {
            diags.push_back(key + ": rows have inconsistent lengths");
            return Mat();
        }
    }
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (const auto& x : row) m(r, c++) = x.get<double>();
        ++r;
    }
    return m;
}

std::optional<Box> read_box(const json& parent, const std::string& key,
                            std::vector<std::string>& diags) {
    if (!parent.contains(key)) {
        diags.push_back(key + ": required field is missing");
        return std::nullopt;
    }
    const json& j = parent.at(key);
    Vec lo = read_vec(j, "lo", diags);
    Vec hi = read_vec(j, "hi", diags);
    if (lo.size() == 0 || hi.size() == 0) return std::nullopt;
    try {
        return Box(lo, hi);
    } catch (const Error& e) {
        diags.push_back(key + ": " + e.what());
        return std::nullopt;
    }
}

std::optional<OutputBox> read_output_box(const json& j, const std::string& label,
                                         std::vector<std::string>& diags) {
    Vec lo = read_vec(j, "lo", diags);
    Vec hi = read_vec(j, "hi", diags);
    Vec target = read_vec(j, "target", diags);
    if (lo.size() == 0 || hi.size() == 0 || target.size() == 0) return std::nullopt;
    try {
        return OutputBox(lo, hi, target);
    } catch (const Error& e) {
        diags.push_back(label + ": " + e.what());
        return std::nullopt;
    }
}

void read_plant(const json& doc, RunConfig& cfg, std::vector<std::string>& diags) {
    if (!doc.contains("plant") || !doc.at("plant").is_object()) {
        diags.push_back("plant: required object is missing");
        return;
    }
    const json& p = doc.at("plant");
    cfg.plant_kind = p.value("kind", std::string());
    if (cfg.plant_kind == "affine") {
        cfg.affine_A = read_mat(p, "A", diags);
        cfg.affine_B = read_mat(p, "B", diags);
        cfg.affine_bias = read_vec(p, "bias", diags);
        auto in = read_box(p, "input_domain", diags);
        auto ctrl = read_box(p, "control_domain", diags);
        if (in) cfg.input_domain = *in;
        if (ctrl) cfg.control_domain = *ctrl;
        if (cfg.affine_A.size() > 0 && cfg.affine_B.size() > 0 &&
            cfg.affine_A.rows() != cfg.affine_B.rows()) {
            diags.push_back("plant.A and plant.B: row counts differ");
        }
        if (cfg.affine_A.size() > 0 && cfg.affine_bias.size() > 0 &&
            cfg.affine_A.rows() != cfg.affine_bias.size()) {
            diags.push_back("plant.bias: length must match the A/B row count");
        }
        if (in && cfg.affine_A.size() > 0 && in->dim() != cfg.affine_A.cols()) {
            diags.push_back("plant.input_domain: dimension must match the A column count");
        }
        if (ctrl && cfg.affine_B.size() > 0 && ctrl->dim() != cfg.affine_B.cols()) {
            diags.push_back("plant.control_domain: dimension must match the B column count");
        }
    } else if (cfg.plant_kind == "ellipsoidal") {
        cfg.ellipsoid_center = read_vec(p, "center", diags);
        cfg.ellipsoid_weights = read_vec(p, "weights", diags);
        cfg.ellipsoid_g_linear = read_vec(p, "g_linear", diags, false);
        cfg.ellipsoid_g_quadratic = read_vec(p, "g_quadratic", diags, false);
        auto in = read_box(p, "input_domain", diags);
        auto ctrl = read_box(p, "control_domain", diags);
        if (in) cfg.input_domain = *in;
        if (ctrl) cfg.control_domain = *ctrl;
        if (cfg.ellipsoid_center.size() > 0 && cfg.ellipsoid_weights.size() > 0 &&
            cfg.ellipsoid_center.size() != cfg.ellipsoid_weights.size()) {
            diags.push_back("plant.weights: length must match plant.center");
        }
        for (Eigen::Index i = 0; i < cfg.ellipsoid_weights.size(); ++i) {
            if (!(cfg.ellipsoid_weights[i] > 0.0)) {
                diags.push_back("plant.weights: entry " + std::to_string(i) +
                                " must be positive");
                break;
            }
        }
        if (in && cfg.ellipsoid_center.size() > 0 && in->dim() != cfg.ellipsoid_center.size()) {
            diags.push_back("plant.input_domain: dimension must match plant.center");
        }
    } else if (cfg.plant_kind == "network_analog") {
        if (p.contains("seed") && p.at("seed").is_number_unsigned()) {
            cfg.network_seed = p.at("seed").get<std::uint64_t>();
        } else {
            diags.push_back("plant.seed: network_analog requires an unsigned seed");
        }
    } else if (cfg.plant_kind == "annulus") {
        cfg.annulus_dim = p.value("dim", 2);
        if (cfg.annulus_dim < 1) diags.push_back("plant.dim: must be >= 1");
    } else {
        diags.push_back("plant.kind: expected affine | ellipsoidal | network_analog | annulus");
    }
    if (p.contains("eval_budget")) {
        if (p.at("eval_budget").is_number_unsigned()) {
            cfg.eval_budget = p.at("eval_budget").get<std::uint64_t>();
        } else {
            diags.push_back("plant.eval_budget: must be an unsigned integer");
        }
    }
}

struct PlantDims {
    Eigen::Index n_in = 0, n_ctrl = 0, n_out = 0;
    bool known = false;
};

PlantDims plant_dims(const RunConfig& cfg) {
    PlantDims d;
    if (cfg.plant_kind == "affine" && cfg.affine_A.size() > 0 && cfg.affine_B.size() > 0) {
        d = {cfg.affine_A.cols(), cfg.affine_B.cols(), cfg.affine_A.rows(), true};
    } else if (cfg.plant_kind == "ellipsoidal" && cfg.ellipsoid_center.size() > 0 &&
               cfg.control_domain.dim() > 0) {
        d = {cfg.ellipsoid_center.size(), cfg.control_domain.dim(), 1, true};
    } else if (cfg.plant_kind == "network_analog") {
        d = {31, 43, 1, true};
    } else if (cfg.plant_kind == "annulus") {
        d = {cfg.annulus_dim, 1, 1, true};
    }
    return d;
}

Box plant_input_domain(const RunConfig& cfg) {
    if (cfg.plant_kind == "network_analog") return Box(Vec::Zero(31), Vec::Ones(31));
    if (cfg.plant_kind == "annulus") {
        return Box(Vec::Constant(cfg.annulus_dim, -2.0), Vec::Constant(cfg.annulus_dim, 2.0));
    }
    return cfg.input_domain;
}

void read_problem(const json& doc, RunConfig& cfg, std::vector<std::string>& diags) {
    if (doc.contains("seed") && doc.at("seed").is_number_unsigned()) {
        cfg.seed = doc.at("seed").get<std::uint64_t>();
        cfg.seed_present = true;
    } else {
        diags.push_back("seed: required field is missing (no wall-clock default)");
    }
    cfg.workers = doc.value("workers", 0);

    if (doc.contains("origin")) {
        Vec o = read_vec(doc, "origin", diags);
        if (o.size() > 0) cfg.origins.push_back(o);
    }
    if (doc.contains("origins")) {
        const json& list = doc.at("origins");
        if (!list.is_array()) {
            diags.push_back("origins: expected an array of points");
        } else {
            for (std::size_t i = 0; i < list.size(); ++i) {
                if (!is_number_array(list.at(i))) {
                    diags.push_back("origins[" + std::to_string(i) +
                                    "]: expected an array of numbers");
                    continue;
                }
                Vec o(static_cast<Eigen::Index>(list.at(i).size()));
                Eigen::Index k = 0;
                for (const auto& x : list.at(i)) o[k++] = x.get<double>();
                cfg.origins.push_back(std::move(o));
            }
        }
    }

    if (doc.contains("box")) {
        auto b = read_output_box(doc.at("box"), "box", diags);
        if (b) cfg.boxes.push_back(*b);
    }
    if (doc.contains("boxes")) {
        const json& list = doc.at("boxes");
        if (!list.is_array()) {
            diags.push_back("boxes: expected an array");
        } else {
            for (std::size_t i = 0; i < list.size(); ++i) {
                auto b = read_output_box(list.at(i), "boxes[" + std::to_string(i) + "]", diags);
                if (b) cfg.boxes.push_back(*b);
            }
        }
    }

    cfg.trio.weights = read_vec(doc, "weights", diags, false);
    Vec scales = read_vec(doc, "unit_scales", diags, false);
    if (scales.size() > 0) {
        cfg.trio.unit_scales = scales;
        for (Eigen::Index i = 0; i < scales.size(); ++i) {
            if (!(scales[i] > 0.0)) {
                diags.push_back("unit_scales: entry " + std::to_string(i) +
                                " must be positive");
                break;
            }
        }
    }

    if (doc.contains("search")) {
        const json& s = doc.at("search");
        cfg.trio.search_budget = s.value("budget", cfg.trio.search_budget);
        cfg.trio.surface.tol = s.value("tol", cfg.trio.surface.tol);
        cfg.trio.surface.probe_k = s.value("probe_k", cfg.trio.surface.probe_k);
        if (!(cfg.trio.surface.tol > 0.0)) diags.push_back("search.tol: must be positive");
        if (cfg.trio.search_budget < 1) diags.push_back("search.budget: must be >= 1");
    }
    if (doc.contains("boundary")) {
        const json& b = doc.at("boundary");
        cfg.trio.surface.degree = b.value("degree", cfg.trio.surface.degree);
        cfg.trio.surface.batch_size = b.value("batch_size", cfg.trio.surface.batch_size);
        cfg.trio.surface.margin = b.value("margin", cfg.trio.surface.margin);
        cfg.trio.surface.stabilization_eps =
            b.value("stabilization_eps", cfg.trio.surface.stabilization_eps);
        cfg.trio.surface.stabilization_window =
            b.value("stabilization_window", cfg.trio.surface.stabilization_window);
        cfg.trio.surface.max_batches = b.value("max_batches", cfg.trio.surface.max_batches);
        if (cfg.trio.surface.degree < 0) diags.push_back("boundary.degree: must be >= 0");
        if (!(cfg.trio.surface.margin > 0.0 && cfg.trio.surface.margin <= 1.0)) {
            diags.push_back("boundary.margin: must lie in (0, 1]");
        }
        if (cfg.trio.surface.max_batches < 1) {
            diags.push_back("boundary.max_batches: must be >= 1");
        }
    }
    if (doc.contains("expand")) {
        cfg.expand_requested = true;
        const json& e = doc.at("expand");
        cfg.expansion.n_interior = e.value("n_interior", cfg.expansion.n_interior);
        cfg.expansion.n_proximal = e.value("n_proximal", cfg.expansion.n_proximal);
        cfg.expansion.proximity_band = e.value("proximity_band", cfg.expansion.proximity_band);
        cfg.expansion.validation_samples =
            e.value("validation_samples", cfg.expansion.validation_samples);
        cfg.expansion.validation_combos =
            e.value("validation_combos", cfg.expansion.validation_combos);
        if (cfg.expansion.n_interior < 0 || cfg.expansion.n_proximal < 0) {
            diags.push_back("expand: candidate counts must be >= 0");
        }
    }
    if (doc.contains("trajectory")) {
        const json& t = doc.at("trajectory");
        cfg.start_state = read_vec(t, "start_state", diags);
        if (!t.contains("waypoints") || !t.at("waypoints").is_array()) {
            diags.push_back("trajectory.waypoints: required array is missing");
        } else {
            const json& wps = t.at("waypoints");
            for (std::size_t i = 0; i < wps.size(); ++i) {
                auto b = read_output_box(wps.at(i),
                                         "trajectory.waypoints[" + std::to_string(i) + "]",
                                         diags);
                if (b) cfg.waypoints.push_back(*b);
            }
        }
    }
    if (doc.contains("simulate")) {
        const json& s = doc.at("simulate");
        if (s.contains("inputs") && s.at("inputs").is_array()) {
            for (const auto& row : s.at("inputs")) {
                if (!is_number_array(row)) {
                    diags.push_back("simulate.inputs: every entry must be an array of numbers");
                    break;
                }
                Vec x(static_cast<Eigen::Index>(row.size()));
                Eigen::Index k = 0;
                for (const auto& v : row) x[k++] = v.get<double>();
                cfg.sim_inputs.push_back(std::move(x));
            }
        }
        std::string policy = s.value("policy", "centroid");
        if (policy == "centroid") {
            cfg.policy = DispatchPolicy::Centroid;
        } else if (policy == "first_vertex") {
            cfg.policy = DispatchPolicy::FirstVertex;
        } else if (policy == "nearest_vertex") {
            cfg.policy = DispatchPolicy::NearestVertex;
        } else {
            diags.push_back("simulate.policy: expected centroid | first_vertex | nearest_vertex");
        }
        std::string fallback = s.value("fallback", "halt");
        if (fallback == "halt") {
            cfg.fallback = FallbackMode::Halt;
        } else if (fallback == "nearest_region") {
            cfg.fallback = FallbackMode::NearestRegion;
        } else {
            diags.push_back("simulate.fallback: expected halt | nearest_region");
        }
    }
    if (doc.contains("audit")) {
        const json& a = doc.at("audit");
        cfg.audit_n = a.value("n", cfg.audit_n);
        cfg.audit_grid_points = a.value("grid_points_per_dim", 0);
    }
    cfg.library_in = doc.value("library", std::string());
    cfg.record_id = doc.value("record_id", std::string());
    if (doc.contains("out") && doc.at("out").is_object()) {
        const json& o = doc.at("out");
        cfg.out_library = o.value("library", cfg.out_library);
        cfg.out_trace_csv = o.value("trace_csv", cfg.out_trace_csv);
        cfg.out_boundary_samples_csv =
            o.value("boundary_samples_csv", cfg.out_boundary_samples_csv);
        cfg.out_boundary_fit_csv = o.value("boundary_fit_csv", cfg.out_boundary_fit_csv);
        cfg.out_audit_csv = o.value("audit_csv", cfg.out_audit_csv);
    }
}

void cross_validate(const RunConfig& cfg, std::vector<std::string>& diags) {
    PlantDims dims = plant_dims(cfg);
    if (!dims.known) return;  // plant diagnostics already emitted

    Box input_domain = plant_input_domain(cfg);
    for (std::size_t k = 0; k < cfg.origins.size(); ++k) {
        const Vec& o = cfg.origins[k];
        if (o.size() != dims.n_in) {
            diags.push_back("origin[" + std::to_string(k) + "]: dimension " +
                            std::to_string(o.size()) + " does not match plant input " +
                            std::to_string(dims.n_in));
            continue;
        }
        if (input_domain.dim() != dims.n_in) continue;
        for (Eigen::Index i = 0; i < o.size(); ++i) {
            if (!(o[i] > input_domain.lo[i] && o[i] < input_domain.hi[i])) {
                diags.push_back("origin[" + std::to_string(k) + "]: component " +
                                std::to_string(i) + " lies outside the input domain interior");
                break;
            }
        }
    }
    for (std::size_t k = 0; k < cfg.boxes.size(); ++k) {
        if (cfg.boxes[k].dim() != dims.n_out) {
            diags.push_back("box[" + std::to_string(k) + "]: dimension does not match plant"
                            " output " + std::to_string(dims.n_out));
        }
    }
    if (cfg.trio.weights.size() > 0 && cfg.trio.weights.size() != dims.n_out) {
        diags.push_back("weights: length must match the plant output dimension");
    }
    if (cfg.trio.unit_scales && cfg.trio.unit_scales->size() != dims.n_in) {
        diags.push_back("unit_scales: length must match the plant input dimension");
    }
    for (std::size_t k = 0; k < cfg.waypoints.size(); ++k) {
        if (cfg.waypoints[k].dim() != dims.n_out) {
            diags.push_back("trajectory.waypoints[" + std::to_string(k) +
                            "]: dimension does not match plant output");
        }
    }
    if (cfg.start_state.size() > 0 && cfg.start_state.size() != dims.n_in) {
        diags.push_back("trajectory.start_state: dimension does not match plant input");
    }
    for (std::size_t k = 0; k < cfg.sim_inputs.size(); ++k) {
        if (cfg.sim_inputs[k].size() != dims.n_in) {
            diags.push_back("simulate.inputs[" + std::to_string(k) +
                            "]: dimension does not match plant input");
        }
    }
}

RunConfig parse_config(const std::string& path, std::vector<std::string>& diags) {
    RunConfig cfg;
    json doc = parse_file(path, diags);
    if (!diags.empty()) return cfg;
    read_plant(doc, cfg, diags);
    read_problem(doc, cfg, diags);
    cross_validate(cfg, diags);
    cfg.trio.seed = cfg.seed;
    cfg.trio.workers = cfg.workers;
    return cfg;
}

} // namespace

std::vector<std::string> validate_config(const std::string& path) {
    std::vector<std::string> diags;
    parse_config(path, diags);
    return diags;
}

RunConfig load_run_config(const std::string& path) {
    std::vector<std::string> diags;
    RunConfig cfg = parse_config(path, diags);
    if (!diags.empty()) {
        std::ostringstream msg;
        msg << "config has " << diags.size() << " problem(s):";
        for (const std::string& d : diags) msg << " [" << d << "]";
        throw ConfigInvalid(msg.str());
    }
    return cfg;
}

PlantPtr make_plant(const RunConfig& cfg) {
    PlantPtr plant;
    if (cfg.plant_kind == "affine") {
        plant = make_affine_plant(cfg.affine_A, cfg.affine_B, cfg.affine_bias,
                                  cfg.input_domain, cfg.control_domain);
    } else if (cfg.plant_kind == "ellipsoidal") {
        Vec lin = cfg.ellipsoid_g_linear;
        Vec quad = cfg.ellipsoid_g_quadratic;
        Eigen::Index n_ctrl = cfg.control_domain.dim();
        if (lin.size() == 0) lin = Vec::Zero(n_ctrl);
        if (quad.size() == 0) quad = Vec::Zero(n_ctrl);
        if (lin.size() != n_ctrl || quad.size() != n_ctrl) {
            throw ConfigInvalid("g_linear/g_quadratic must match the control dimension");
        }
        auto offset = [lin, quad](const Vec& c) {
            return lin.dot(c) + quad.dot(c.cwiseProduct(c));
        };
        plant = make_ellipsoidal_plant(cfg.ellipsoid_center, cfg.ellipsoid_weights, offset,
                                       cfg.input_domain, cfg.control_domain);
    } else if (cfg.plant_kind == "network_analog") {
        plant = make_network_analog(cfg.network_seed);
    } else if (cfg.plant_kind == "annulus") {
        plant = make_annulus_plant(cfg.annulus_dim);
    } else {
        throw ConfigInvalid("unknown plant kind: " + cfg.plant_kind);
    }
    if (cfg.eval_budget) plant->set_eval_budget(*cfg.eval_budget);
    return plant;
}

} // namespace atlas
