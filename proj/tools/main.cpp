#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atlas/config.hpp"
#include "atlas/library.hpp"
#include "atlas/oracle.hpp"
#include "atlas/runtime.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::optional<std::uint64_t> seed_override;
};

std::string joined(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

atlas::RunConfig load_config(const Options& opts) {
    atlas::RunConfig cfg = atlas::load_run_config(opts.config_path);
    if (opts.seed_override) {
        cfg.seed = *opts.seed_override;
        cfg.trio.seed = *opts.seed_override;
    }
    if (opts.workers > 0) {
        cfg.workers = opts.workers;
        cfg.trio.workers = opts.workers;
    }
    fs::create_directories(opts.out_dir);
    return cfg;
}

void print_record_summary(const atlas::SolutionRecord& rec) {
    const atlas::Provenance& p = rec.provenance;
    std::cout << "record " << rec.id << ": surfaces=" << rec.surfaces.size()
              << " vertices=" << rec.control.vertices.size()
              << " rms_residual=" << rec.surfaces.front().rms_residual
              << " stabilized=" << (p.fit_traces.front().stabilized ? "yes" : "no")
              << " holes=" << p.hole_sample_count
              << " evals=" << (p.evals_best_control + p.evals_surface + p.evals_validation)
              << "\n";
    if (p.validation) {
        std::cout << "  validation: vertex_pass_rate=" << p.validation->vertex_pass_rate
                  << " combo_pass_rate=" << p.validation->combo_pass_rate << "\n";
    }
}

int cmd_learn(const Options& opts) {
    atlas::RunConfig cfg = load_config(opts);
    if (cfg.origins.size() != 1 || cfg.boxes.size() != 1) {
        throw atlas::ConfigInvalid("learn requires exactly one origin and one box");
    }
    atlas::PlantPtr plant = atlas::make_plant(cfg);
    std::vector<atlas::CutoffSample> samples;
    atlas::SolutionRecord rec = atlas::learn_trio(*plant, cfg.origins.front(),
                                                  cfg.boxes.front(), cfg.trio, "rec-0",
                                                  &samples);

    atlas::SolutionLibrary lib;
    lib.plant_id = plant->id();
    lib.records.push_back(rec);
    std::string lib_path = joined(opts.out_dir, cfg.out_library);
    atlas::save_library(lib, lib_path);
    atlas::export_boundary_csv(rec.surfaces.front(), samples,
                               joined(opts.out_dir, cfg.out_boundary_samples_csv),
                               joined(opts.out_dir, cfg.out_boundary_fit_csv));
    std::cout << "library written to " << lib_path << "\n";
    print_record_summary(rec);
    std::cout << "control:";
    for (Eigen::Index i = 0; i < rec.control.centroid.size(); ++i) {
        std::cout << " " << rec.control.centroid[i];
    }
    std::cout << "\nplant evals total: " << plant->evals_used() << "\n";
    return 0;
}

int cmd_expand(const Options& opts) {
    atlas::RunConfig cfg = load_config(opts);
    if (cfg.library_in.empty()) {
        throw atlas::ConfigInvalid("expand requires a 'library' input path");
    }
    atlas::PlantPtr plant = atlas::make_plant(cfg);
    atlas::SolutionLibrary lib = atlas::load_library(cfg.library_in);
    if (lib.records.empty()) throw atlas::ConfigInvalid("input library is empty");
    std::size_t index = 0;
    if (!cfg.record_id.empty()) {
        const atlas::SolutionRecord* found = lib.find(cfg.record_id);
        if (!found) throw atlas::ConfigInvalid("record_id not found: " + cfg.record_id);
        index = static_cast<std::size_t>(found - lib.records.data());
    }
    lib.records[index] =
        atlas::expand_control_region(*plant, lib.records[index], cfg.trio, cfg.expansion);
    std::string lib_path = joined(opts.out_dir, cfg.out_library);
    atlas::save_library(lib, lib_path);
    std::cout << "library written to " << lib_path << "\n";
    print_record_summary(lib.records[index]);
    return 0;
}

int cmd_decompose(const Options& opts) {
    atlas::RunConfig cfg = load_config(opts);
    if (cfg.origins.empty() || cfg.boxes.empty()) {
        throw atlas::ConfigInvalid("decompose requires origins and at least one box");
    }
    atlas::PlantPtr plant = atlas::make_plant(cfg);
    std::vector<atlas::DecomposeSkip> skips;
    std::optional<atlas::ExpansionConfig> expansion;
    if (cfg.expand_requested) expansion = cfg.expansion;
    atlas::SolutionLibrary lib =
        atlas::decompose(*plant, cfg.origins, cfg.boxes, cfg.trio, expansion, &skips);
    std::string lib_path = joined(opts.out_dir, cfg.out_library);
    atlas::save_library(lib, lib_path);
    std::cout << "library written to " << lib_path << " (" << lib.records.size()
              << " records, " << skips.size() << " skipped)\n";
    for (const auto& s : skips) {
        std::cout << "skipped origin " << s.origin_index << ": " << s.error_kind << " "
                  << s.message << "\n";
    }
    for (const auto& rec : lib.records) print_record_summary(rec);
    std::cout << "plant evals total: " << plant->evals_used() << "\n";
    return 0;
}

int cmd_trajectory(const Options& opts) {
    atlas::RunConfig cfg = load_config(opts);
    if (cfg.start_state.size() == 0 || cfg.waypoints.empty()) {
        throw atlas::ConfigInvalid("trajectory requires trajectory.start_state and waypoints");
    }
    atlas::PlantPtr plant = atlas::make_plant(cfg);
    atlas::TrajectoryPlan plan =
        atlas::plan_trajectory(*plant, cfg.start_state, cfg.waypoints, cfg.trio);
    atlas::SimTrace trace =
        atlas::run_trajectory(*plant, plan, cfg.start_state, cfg.policy);

    atlas::SolutionLibrary lib;
    lib.plant_id = plant->id();
    for (const auto& wp : plan.waypoints) lib.records.push_back(wp.record);
    std::string lib_path = joined(opts.out_dir, cfg.out_library);
    atlas::save_library(lib, lib_path);
    std::string trace_path = joined(opts.out_dir, cfg.out_trace_csv);
    atlas::write_trace_csv(trace, trace_path);

    std::size_t in_box = 0;
    for (const auto& s : trace.steps) in_box += s.in_box ? 1 : 0;
    std::cout << "plan of " << plan.waypoints.size() << " waypoints written to " << lib_path
              << "\ntrace written to " << trace_path << " (" << in_box << "/"
              << trace.steps.size() << " steps in box)\n";
    return 0;
}

int cmd_simulate(const Options& opts) {
    atlas::RunConfig cfg = load_config(opts);
    if (cfg.library_in.empty()) {
        throw atlas::ConfigInvalid("simulate requires a 'library' input path");
    }
    if (cfg.sim_inputs.empty()) {
        throw atlas::ConfigInvalid("simulate requires simulate.inputs");
    }
    atlas::PlantPtr plant = atlas::make_plant(cfg);
    atlas::SolutionLibrary lib = atlas::load_library(cfg.library_in);
    atlas::SimTrace trace =
        atlas::simulate(*plant, lib, cfg.sim_inputs, cfg.policy, cfg.fallback);
    std::string trace_path = joined(opts.out_dir, cfg.out_trace_csv);
    atlas::write_trace_csv(trace, trace_path);
    std::size_t in_box = 0, fallbacks = 0;
    for (const auto& s : trace.steps) {
        in_box += s.in_box ? 1 : 0;
        fallbacks += (s.dispatch && s.dispatch->fallback_used) ? 1 : 0;
    }
    std::cout << "trace written to " << trace_path << " (" << trace.steps.size() << " steps, "
              << in_box << " in box, " << fallbacks << " fallbacks)\n";
    return 0;
}

int cmd_audit(const Options& opts) {
    atlas::RunConfig cfg = load_config(opts);
    if (cfg.library_in.empty()) {
        throw atlas::ConfigInvalid("audit requires a 'library' input path");
    }
    atlas::PlantPtr plant = atlas::make_plant(cfg);
    atlas::SolutionLibrary lib = atlas::load_library(cfg.library_in);
    std::string csv_path = joined(opts.out_dir, cfg.out_audit_csv);
    std::ofstream csv(csv_path);
    if (!csv) throw atlas::FileUnreadable("cannot open " + csv_path + " for writing");
    csv << atlas::AuditReport::csv_header() << "\n";
    for (const auto& rec : lib.records) {
        atlas::AuditReport mc = atlas::mc_audit(*plant, rec, cfg.audit_n,
                                                atlas::derive_seed(cfg.seed, 0xau),
                                                cfg.workers);
        std::cout << "mc_audit " << rec.id << ":\n";
        mc.print(std::cout);
        csv << mc.csv_row(rec.id + ":mc") << "\n";
        if (cfg.audit_grid_points >= 2 && plant->signature().n_in <= 3) {
            atlas::AuditReport grid =
                atlas::grid_audit(*plant, rec, cfg.audit_grid_points, cfg.workers);
            std::cout << "grid_audit " << rec.id << ":\n";
            grid.print(std::cout);
            csv << grid.csv_row(rec.id + ":grid") << "\n";
        }
    }
    std::cout << "audit rows written to " << csv_path << "\n";
    return 0;
}

int cmd_export(const Options& opts) {
    atlas::RunConfig cfg = load_config(opts);
    if (cfg.library_in.empty()) {
        throw atlas::ConfigInvalid("export requires a 'library' input path");
    }
    atlas::SolutionLibrary lib = atlas::load_library(cfg.library_in);
    // Surfaces are self-contained: the fitted-radius grid is re-emitted
    // without plant access. Raw samples exist only at learning time.
    for (const auto& rec : lib.records) {
        for (std::size_t si = 0; si < rec.surfaces.size(); ++si) {
            std::string stem = rec.id + (rec.surfaces.size() > 1 ? "-s" + std::to_string(si) : "");
            std::string samples_path =
                joined(opts.out_dir, stem + "-" + cfg.out_boundary_samples_csv);
            std::string fit_path = joined(opts.out_dir, stem + "-" + cfg.out_boundary_fit_csv);
            atlas::export_boundary_csv(rec.surfaces[si], {}, samples_path, fit_path);
            std::cout << "exported " << fit_path << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded-atlas: learns libraries of bounded-input / bounded-control / "
                 "bounded-output solution records from a black-box plant and replays them "
                 "at runtime"};
    app.require_subcommand(1);

    Options opts;
    std::vector<std::pair<std::string, int (*)(const Options&)>> commands = {
        {"learn", cmd_learn},         {"expand", cmd_expand},
        {"decompose", cmd_decompose}, {"trajectory", cmd_trajectory},
        {"simulate", cmd_simulate},   {"audit", cmd_audit},
        {"export", cmd_export},
    };
    for (auto& [name, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "path to the JSON run config")
            ->required();
        sub->add_option("--out", opts.out_dir, "output directory for artifacts");
        sub->add_option("--workers", opts.workers, "worker pool size")
            ->envname("BOUNDED_ATLAS_WORKERS");
        sub->add_option("--seed", opts.seed_override, "override the config master seed");
        int (*run)(const Options&) = fn;
        sub->callback([&opts, run] {
            int rc = run(opts);
            if (rc != 0) throw CLI::RuntimeError(rc);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const atlas::ConfigInvalid& e) {
        std::cerr << "error kind=" << e.kind() << " message=\"" << e.what() << "\"\n";
        return 2;
    } catch (const atlas::FileUnreadable& e) {
        std::cerr << "error kind=" << e.kind() << " message=\"" << e.what() << "\"\n";
        return 2;
    } catch (const atlas::Error& e) {
        std::cerr << "error kind=" << e.kind() << " message=\"" << e.what() << "\"\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error kind=Internal message=\"" << e.what() << "\"\n";
        return 1;
    }
    return 0;
}
