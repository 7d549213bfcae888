#pragma once

// Command implementations behind the fsvd tool. Every command writes its
// artefacts into the output directory and returns a process exit code:
//
//   0 success, 1 validation, 2 format, 3 non-convergence, 4 infeasible plan

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsvd/cgh.hpp"
#include "fsvd/device.hpp"
#include "fsvd/energy.hpp"
#include "fsvd/error.hpp"
#include "fsvd/field.hpp"
#include "fsvd/io.hpp"
#include "fsvd/optics.hpp"
#include "fsvd/ora.hpp"
#include "fsvd/pgm.hpp"
#include "fsvd/plan_json.hpp"
#include "fsvd/scheduler.hpp"

namespace fsvd::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kFormat = 2, kNotConverged = 3, kInfeasible = 4 };

struct RunConfig {
    HologramGeometry geometry;
    OraParams ora;
    std::string device_profile = "system_a";
    std::string medium = "air";
    std::optional<double> pulse_width;       // s, overrides the profile's laser
    std::optional<double> pulse_energy;      // J, overrides the profile's laser
    std::optional<double> breakdown_energy;  // J, overrides preset / derived E_lbd
    double frame_time = 0.1;                 // s
    double horizon = 1.0;                    // s
    PlannerOptions planner;
    ExposureLimits exposure;
    std::string output_dir = ".";

    void validate() const {
        geometry.validate();
        ora.validate();
        parse_medium(medium);
        if (pulse_width) detail::require(*pulse_width > 0, "pulse_width_s must be > 0");
        if (pulse_energy) detail::require(*pulse_energy > 0, "pulse_energy_j must be > 0");
        if (breakdown_energy) detail::require(*breakdown_energy > 0, "breakdown_energy_j must be > 0");
        detail::require(frame_time > 0, "frame_time_s must be > 0");
        detail::require(horizon > 0, "horizon_s must be > 0");
        exposure.validate();
    }
};

/// Reads a JSON run config. Keys are optional; unknown keys are rejected.
///
///   {"schema_version": 1, "grid_size": 256, "pixel_pitch_m": 2e-5,
///    "wavelength_m": 8e-7, "ora": {"max_iterations": 100, ...},
///    "device_profile": "system_a", "medium": "air", "frame_time_s": 0.1, ...}
inline RunConfig parse_config(const std::string& text) {
    const ojson j = parse_json(text);
    if (!j.is_object()) throw FormatError("run config must be a JSON object");
    RunConfig c;
    try {
        if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
            throw FormatError("run config needs \"schema_version\": " + std::to_string(kSchemaVersion));
        for (const auto& [key, v] : j.items()) {
            if (key == "schema_version") continue;
            else if (key == "grid_size") c.geometry.size_n = v.get<std::size_t>();
            else if (key == "pixel_pitch_m") c.geometry.pixel_pitch = v.get<double>();
            else if (key == "wavelength_m") c.geometry.wavelength = v.get<double>();
            else if (key == "device_profile") c.device_profile = v.get<std::string>();
            else if (key == "medium") c.medium = v.get<std::string>();
            else if (key == "pulse_width_s") c.pulse_width = v.get<double>();
            else if (key == "pulse_energy_j") c.pulse_energy = v.get<double>();
            else if (key == "breakdown_energy_j") c.breakdown_energy = v.get<double>();
            else if (key == "frame_time_s") c.frame_time = v.get<double>();
            else if (key == "horizon_s") c.horizon = v.get<double>();
            else if (key == "output_dir") c.output_dir = v.get<std::string>();
            else if (key == "ora") {
                for (const auto& [k, o] : v.items()) {
                    if (k == "max_iterations") c.ora.max_iterations = o.get<int>();
                    else if (k == "uniformity_tolerance") c.ora.uniformity_tolerance = o.get<double>();
                    else if (k == "alpha") c.ora.alpha = o.get<double>();
                    else if (k == "threads") c.ora.threads = o.get<unsigned>();
                    else if (k == "seed") c.ora.rng_seed = o.get<std::uint64_t>();
                    else throw FormatError("unknown ora key '" + k + "'");
                }
            } else if (key == "planner") {
                for (const auto& [k, o] : v.items()) {
                    if (k == "layer_thickness_m") c.planner.layer_thickness = o.get<double>();
                    else if (k == "pattern_quantum_m") c.planner.pattern_quantum = o.get<double>();
                    else if (k == "allow_hologram_change") c.planner.allow_hologram_change = o.get<bool>();
                    else throw FormatError("unknown planner key '" + k + "'");
                }
            } else if (key == "exposure") {
                for (const auto& [k, o] : v.items()) {
                    if (k == "max_dwell_s") c.exposure.max_dwell = o.get<double>();
                    else if (k == "contact_shutoff_s") c.exposure.contact_shutoff = o.get<double>();
                    else if (k == "cell_size_m") c.exposure.cell_size = o.get<double>();
                    else throw FormatError("unknown exposure key '" + k + "'");
                }
            } else {
                throw FormatError("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed run config: ") + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::string& path) { return parse_config(io::read_text(path)); }

namespace detail {

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir.empty() ? "." : cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    fsvd::detail::require(fs::is_directory(dir), "output directory '" + dir.string() + "' is not writable");
    return dir / name;
}

inline void write_output(const RunConfig& cfg, const std::string& name, const std::string& text) {
    const auto path = output_path(cfg, name);
    std::ofstream out(path, std::ios::binary);
    fsvd::detail::require(static_cast<bool>(out), "cannot write '" + path.string() + "'");
    out << text;
}

inline ojson header(const char* kind) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    return j;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Energy budget shared by budget / plan / simulate

struct BudgetContext {
    DeviceProfile profile;
    Medium medium = Medium::air;
    FocalSpot spot;
    BreakdownEstimate breakdown;
    EnergyBudget energy;
};

inline BudgetContext resolve_budget(const RunConfig& cfg) {
    BudgetContext b;
    b.profile = load_profile(cfg.device_profile);
    if (cfg.pulse_width) b.profile.laser.pulse_width = *cfg.pulse_width;
    if (cfg.pulse_energy) b.profile.laser.pulse_energy = *cfg.pulse_energy;
    b.profile.validate();
    b.medium = parse_medium(cfg.medium);
    b.spot = focal_spot(b.profile.train);
    b.breakdown = cfg.breakdown_energy ? BreakdownEstimate{*cfg.breakdown_energy, "config"}
                                       : breakdown_energy(b.medium, b.profile.laser.pulse_width, b.spot.area_cm2);
    b.energy = {b.profile.laser.pulse_energy, b.breakdown.energy, b.profile.slm_efficiency, b.profile.train_efficiency};
    return b;
}

// ---------------------------------------------------------------------------
// Commands

/// Spots file -> phase.pgm + synth_report.json.
inline int cmd_synth(const std::string& spots_file, const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto targets = io::read_spots(spots_file);
    auto result = ora_optimize(targets, cfg.geometry, cfg.ora);

    // A global phase offset is unobservable; remove it so equal fields give equal maps.
    cplx mean{0, 0};
    for (double p : result.hologram.phases()) mean += std::polar(1.0, p);
    const double piston = std::abs(mean) > 0 ? std::arg(mean) : 0.0;
    std::vector<double> phases(result.hologram.phases().begin(), result.hologram.phases().end());
    for (double& p : phases) p -= piston;
    const PhaseHologram holo(cfg.geometry.size_n, cfg.geometry.pixel_pitch, std::move(phases));

    const auto img = pgm::from_phase(holo);
    detail::write_output(cfg, "phase.pgm", pgm::encode(img));

    // Far field of the map as written (16-bit quantised).
    const auto rec = reconstruct(pgm::to_phase(img, cfg.geometry.pixel_pitch));
    const auto& r = result.report;
    ojson j = detail::header("synth_report");
    j["grid_size"] = cfg.geometry.size_n;
    j["seed"] = cfg.ora.rng_seed;
    j["alpha"] = cfg.ora.alpha;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["uniformity"] = r.uniformity;
    j["max_relative_error"] = r.max_relative_error;
    j["efficiency"] = r.efficiency;
    j["axial_terms_applied"] = r.axial_terms_applied;
    j["objective"] = r.objective;
    std::vector<double> quantised;
    j["targets"] = ojson::array();
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double q = rec.intensity(static_cast<std::size_t>(targets[i].vx), static_cast<std::size_t>(targets[i].vy));
        quantised.push_back(q);
        j["targets"].push_back({{"vx_px", targets[i].vx},
                                {"vy_px", targets[i].vy},
                                {"desired", targets[i].desired_intensity},
                                {"achieved", r.target_intensities[i]},
                                {"achieved_quantised", q}});
    }
    j["uniformity_quantised"] = uniformity(quantised);
    detail::write_output(cfg, "synth_report.json", dump_json(j));

    out << "synth: " << targets.size() << " spots, " << r.iterations << " iterations, uniformity " << r.uniformity
        << (r.converged ? ", converged\n" : ", NOT converged\n");
    return r.converged ? kOk : kNotConverged;
}

/// phase.pgm -> intensity.pgm (DC centred) + reconstruct_report.json.
inline int cmd_reconstruct(const std::string& phase_file, const std::optional<std::string>& spots_file,
                           const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto holo = pgm::read_phase(phase_file, cfg.geometry.pixel_pitch);
    std::vector<SpotTarget> targets;
    if (spots_file) {
        targets = io::read_spots(*spots_file);
        validate_targets(targets, holo.size());
    }
    const auto rec = reconstruct(holo);
    const auto intensity = rec.intensities();
    const auto shifted = fftshift(intensity);
    pgm::Image img;
    const double peak = pgm::from_intensity(shifted, img);
    detail::write_output(cfg, "intensity.pgm", pgm::encode(img));

    const std::size_t n = holo.size();
    std::size_t best = 0;
    for (std::size_t i = 1; i < intensity.values().size(); ++i)
        if (intensity.values()[i] > intensity.values()[best]) best = i;
    const std::size_t px = best % n, py = best / n;

    ojson j = detail::header("reconstruct_report");
    j["grid_size"] = n;
    j["total_energy"] = rec.total_energy();
    j["peak_intensity"] = peak;
    j["peak_px"] = {px, py};
    j["peak_shifted_px"] = {(px + n / 2) % n, (py + n / 2) % n};
    j["intensity_map_scale"] = peak > 0 ? peak / 65535.0 : 0.0;
    if (spots_file) {
        j["targets"] = ojson::array();
        std::vector<double> got;
        for (const auto& t : targets) {
            const double v = rec.intensity(static_cast<std::size_t>(t.vx), static_cast<std::size_t>(t.vy));
            got.push_back(v);
            j["targets"].push_back({{"vx_px", t.vx}, {"vy_px", t.vy}, {"desired", t.desired_intensity}, {"intensity", v}});
        }
        j["uniformity"] = uniformity(got);
    }
    detail::write_output(cfg, "reconstruct_report.json", dump_json(j));
    out << "reconstruct: peak at (" << px << ", " << py << "), total energy " << rec.total_energy() << "\n";
    return kOk;
}

/// Energy and throughput budget for a device profile -> budget.json (also
/// printed to out).
inline int cmd_budget(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto b = resolve_budget(cfg);
    const auto& laser = b.profile.laser;
    const long long n_energy = dots_per_pulse(b.energy);
    const long long n_dot = addressable_dots_per_pulse(b.energy, b.profile);
    const double threshold = MediumThresholds{}(b.medium);
    const double full_peak = peak_intensity(laser, b.spot.area_cm2);
    const double delivered_peak = peak_intensity({b.energy.delivered_energy(), laser.pulse_width, laser.repetition_rate,
                                                  laser.wavelength},
                                                 b.spot.area_cm2);

    ojson j = detail::header("budget_report");
    j["profile"] = b.profile.name;
    j["medium"] = std::string(to_string(b.medium));
    j["laser"] = {{"pulse_energy_j", laser.pulse_energy},
                  {"pulse_width_s", laser.pulse_width},
                  {"repetition_rate_hz", laser.repetition_rate},
                  {"wavelength_m", laser.wavelength},
                  {"average_power_w", laser.average_power()}};
    j["focal_spot"] = {{"lateral_diameter_m", b.spot.lateral_diameter_wf},
                       {"axial_length_m", b.spot.axial_length_wd},
                       {"area_cm2", b.spot.area_cm2}};
    j["breakdown_energy_j"] = b.breakdown.energy;
    j["breakdown_source"] = b.breakdown.source;
    j["efficiency"] = {{"slm", b.energy.slm_efficiency},
                       {"train", b.energy.train_efficiency},
                       {"delivered_energy_j", b.energy.delivered_energy()}};
    j["has_slm"] = b.profile.has_slm;
    j["n_dot_energy"] = n_energy;
    j["n_dot"] = n_dot;
    j["dots_per_second"] = static_cast<double>(n_dot) * laser.repetition_rate;
    j["dpf"] = ojson::array();
    for (double fps : {60.0, 30.0, 10.0}) {
        const double tf = 1.0 / fps;
        const double dpf = n_dot > 0 ? dots_per_frame({n_dot, laser.repetition_rate, tf}) : 0.0;
        j["dpf"].push_back({{"frame_time_s", tf},
                            {"pulses_per_frame", per_frame_rate_limit(laser.repetition_rate, fps)},
                            {"dpf", dpf}});
    }
    j["threshold_w_cm2"] = threshold;
    j["peak_intensity_w_cm2"] = full_peak;
    j["delivered_peak_intensity_w_cm2"] = delivered_peak;
    j["threshold_margin"] = delivered_peak / threshold;
    j["exceeds_threshold"] = exceeds_plasma_threshold(delivered_peak, b.medium);
    std::string message;
    if (n_energy == 0)
        message = "delivered pulse energy " + io::format_number(b.energy.delivered_energy()) +
                  " J is below the breakdown energy " + io::format_number(b.breakdown.energy) + " J; no voxel can ignite";
    else if (n_dot < n_energy)
        message = "energy allows " + std::to_string(n_energy) + " voxels per pulse but without an SLM only one focus exists";
    j["message"] = message;

    const std::string text = dump_json(j);
    detail::write_output(cfg, "budget.json", text);
    out << text;
    return kOk;
}

/// Cloud CSV -> plan.json.
inline int cmd_plan(const std::string& cloud_file, const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const auto b = resolve_budget(cfg);
    const auto cloud = io::read_cloud(cloud_file, b.profile.workspace);
    const auto plan = plan_frame(cloud, b.profile, b.energy, cfg.frame_time, cfg.planner);
    detail::write_output(cfg, "plan.json", plan_to_string(plan));
    out << "plan: " << plan.voxel_count << " voxels, " << plan.slots.size() << " slots, " << plan.holograms.size()
        << " holograms, duration " << plan.duration() << " s\n";
    return kOk;
}

/// Plan (from --plan, or planned from the cloud) -> sim_report.json +
/// timeline.csv. With a cloud, per-voxel exposure runs through the guard.
inline int cmd_simulate(const std::optional<std::string>& cloud_file, const std::optional<std::string>& plan_file,
                        const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    fsvd::detail::require(cloud_file || plan_file, "simulate needs a cloud file or --plan");
    const auto b = resolve_budget(cfg);
    std::optional<VoxelCloud> cloud;
    if (cloud_file) cloud = io::read_cloud(*cloud_file, b.profile.workspace);
    FramePlan plan;
    if (plan_file) {
        plan = plan_from_string(io::read_text(*plan_file));
        if (cloud)
            fsvd::detail::require(cloud->points.size() == plan.voxel_count, "plan and cloud voxel counts differ");
    } else {
        plan = plan_frame(*cloud, b.profile, b.energy, cfg.frame_time, cfg.planner);
        detail::write_output(cfg, "plan.json", plan_to_string(plan));
    }
    const auto report = simulate(plan, b.profile, cfg.horizon);

    ojson j = detail::header("sim_report");
    j["profile"] = b.profile.name;
    j["horizon_s"] = report.horizon;
    j["pulses"] = report.pulses;
    j["dots"] = report.dots;
    j["frames_started"] = report.frames_started;
    j["frames_completed"] = report.frames_completed;
    j["dots_per_second"] = report.dots_per_second;
    j["frames_per_second"] = report.frames_per_second;
    j["window_s"] = report.window;
    j["max_window_dots_per_second"] = report.max_window_dots_per_second;
    j["busy_time_s"] = report.busy_time;
    j["violations"] = report.violations;
    if (cloud) {
        ExposureGuard guard(cfg.exposure);
        const auto verdicts = forward_exposure(report, *cloud, guard);
        double worst = 0;
        std::size_t exceeded = 0;
        for (const auto& v : verdicts) {
            worst = std::max(worst, v.accumulated);
            if (v.limit_exceeded) ++exceeded;
        }
        j["exposure"] = {{"max_dwell_s", cfg.exposure.max_dwell},
                         {"max_accumulated_s", worst},
                         {"cells", guard.ledger().size()},
                         {"limit_exceeded_voxels", exceeded}};
    }
    detail::write_output(cfg, "sim_report.json", dump_json(j));

    std::string csv = "frame,slot,time_s,dots\n";
    for (const auto& e : report.timeline)
        csv += std::to_string(e.frame) + ',' + std::to_string(e.slot) + ',' + io::format_number(e.time) + ',' +
               std::to_string(e.dots) + '\n';
    detail::write_output(cfg, "timeline.csv", csv);

    out << "simulate: " << report.dots << " dots in " << report.horizon << " s (" << report.dots_per_second
        << " dots/s, " << report.frames_per_second << " fps), " << report.violations.size() << " violations\n";
    return report.violations.empty() ? kOk : kValidation;
}

/// Grayscale PGM -> spots.txt.
inline int cmd_image2spots(const std::string& image_file, std::size_t max_spots, double threshold, const RunConfig& cfg,
                           std::ostream& out, std::ostream& err) {
    cfg.validate();
    const auto img = pgm::read(image_file);
    const auto spots = io::image_to_spots(img, max_spots, threshold);
    detail::write_output(cfg, "spots.txt", io::format_spots(spots));
    if (spots.empty()) err << "warning: no pixel above threshold " << threshold << "; spots file is empty\n";
    out << "image2spots: " << spots.size() << " spots\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// Argument parsing

/// Runs fn, mapping library exceptions onto exit codes.
inline int guarded(const std::function<int()>& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const InfeasibleError& e) {
        err << "error: infeasible plan, bottleneck " << e.bottleneck() << ": " << e.what() << "\n";
        return kInfeasible;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kFormat;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Hologram synthesis and scan planning for laser-plasma volumetric displays", "fsvd"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::string out_dir;
    };
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON run config");
        sub->add_option("--seed", common.seed, "random seed");
        sub->add_option("--out", common.out_dir, "output directory");
    };

    std::string input, spots, plan_file, profile, medium;
    std::optional<double> pulse_width, pulse_energy, breakdown, frame_time, horizon;
    std::optional<std::size_t> grid;
    std::optional<int> threads;
    std::size_t max_spots = 64;
    double threshold = 0.5;
    bool allow_change = false;

    auto* synth = app.add_subcommand("synth", "spots file -> phase-only hologram");
    synth->add_option("spots", input, "spots file")->required();
    synth->add_option("--grid", grid, "hologram size N");
    synth->add_option("--threads", threads, "worker threads");

    auto* recon = app.add_subcommand("reconstruct", "phase map -> far-field intensity");
    recon->add_option("phase", input, "16-bit PGM phase map")->required();
    recon->add_option("--spots", spots, "spots file for per-target intensities");

    auto* budget = app.add_subcommand("budget", "energy and throughput budget");
    auto* plan = app.add_subcommand("plan", "voxel cloud -> frame plan");
    plan->add_option("cloud", input, "cloud CSV")->required();
    auto* sim = app.add_subcommand("simulate", "replay a frame plan on the timing model");
    sim->add_option("cloud", input, "cloud CSV");
    sim->add_option("--plan", plan_file, "frame plan JSON");
    sim->add_option("--horizon-s", horizon, "simulated time");

    for (auto* sub : {budget, plan, sim}) {
        sub->add_option("--profile,--preset", profile, "device profile name or file");
        sub->add_option("--medium", medium, "air, water or fluorescent");
        sub->add_option("--pulse-width-s", pulse_width, "override laser pulse width");
        sub->add_option("--pulse-energy-j", pulse_energy, "override laser pulse energy");
        sub->add_option("--breakdown-energy-j", breakdown, "override breakdown energy");
    }
    for (auto* sub : {plan, sim}) {
        sub->add_option("--frame-time-s", frame_time, "frame time");
        sub->add_flag("--allow-hologram-change", allow_change, "permit SLM updates within a frame");
    }

    auto* i2s = app.add_subcommand("image2spots", "grayscale PGM -> spots file");
    i2s->add_option("image", input, "grayscale PGM")->required();
    i2s->add_option("--max-spots", max_spots, "maximum number of spots")->check(CLI::PositiveNumber);
    i2s->add_option("--threshold", threshold, "relative brightness threshold in [0, 1)");

    for (auto* sub : {synth, recon, budget, plan, sim, i2s}) add_common(sub);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    return guarded(
        [&]() -> int {
            RunConfig cfg = common.config.empty() ? RunConfig{} : load_config(common.config);
            if (common.seed) cfg.ora.rng_seed = *common.seed;
            if (!common.out_dir.empty()) cfg.output_dir = common.out_dir;
            if (grid) cfg.geometry.size_n = *grid;
            if (threads) {
                fsvd::detail::require(*threads >= 1, "threads must be >= 1");
                cfg.ora.threads = static_cast<unsigned>(*threads);
            }
            if (!profile.empty()) cfg.device_profile = profile;
            if (!medium.empty()) cfg.medium = medium;
            if (pulse_width) cfg.pulse_width = pulse_width;
            if (pulse_energy) cfg.pulse_energy = pulse_energy;
            if (breakdown) cfg.breakdown_energy = breakdown;
            if (frame_time) cfg.frame_time = *frame_time;
            if (horizon) cfg.horizon = *horizon;
            if (allow_change) cfg.planner.allow_hologram_change = true;

            if (synth->parsed()) return cmd_synth(input, cfg, out);
            if (recon->parsed())
                return cmd_reconstruct(input, spots.empty() ? std::nullopt : std::optional<std::string>(spots), cfg, out);
            if (budget->parsed()) return cmd_budget(cfg, out);
            if (plan->parsed()) return cmd_plan(input, cfg, out);
            if (sim->parsed())
                return cmd_simulate(input.empty() ? std::nullopt : std::optional<std::string>(input),
                                    plan_file.empty() ? std::nullopt : std::optional<std::string>(plan_file), cfg, out);
            return cmd_image2spots(input, max_spots, threshold, cfg, out, err);
        },
        err);
}

} // namespace fsvd::cli
