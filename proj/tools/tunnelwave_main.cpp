// Experiment driver: config in, CSV/JSON artifacts out.
// Exit codes: 0 success, 1 config error, 2 numeric failure, 3 acceptance failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tunnelwave/acceptance.hpp"
#include "tunnelwave/actions.hpp"
#include "tunnelwave/compare.hpp"
#include "tunnelwave/config.hpp"
#include "tunnelwave/csvio.hpp"
#include "tunnelwave/density.hpp"
#include "tunnelwave/errors.hpp"
#include "tunnelwave/packets.hpp"
#include "tunnelwave/potential.hpp"
#include "tunnelwave/scattering.hpp"
#include "tunnelwave/tdse.hpp"

namespace {

using nlohmann::json;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Session {
    tw::ExperimentConfig config;
    std::vector<std::pair<std::string, double>> timings;

    explicit Session(const std::string& path) : config(tw::load_config(path)) {
        tw::ensure_dir(config.output_dir);
    }
    std::string out(const std::string& name) const {
        return config.output_dir + "/" + name;
    }
    void finish() { tw::write_manifest(config.output_dir, config, timings); }
};

// File-safe tag for one hbar value.
std::string hbar_tag(double hbar) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "h%.10g", hbar);
    return buf;
}

std::vector<double> hbars_or_default(const tw::ExperimentConfig& config) {
    if (!config.hbar_list.empty()) return config.hbar_list;
    return {1.0 / 32};
}

tw::ActionProfile build_profile(const tw::ExperimentConfig& config) {
    return tw::ActionProfile(config.potential, config.window, config.density.to_gj(), 64,
                             tw::worker_count());
}

int cmd_validate(Session& session) {
    const double t0 = now_seconds();
    const tw::ValidityReport rep =
        tw::verify_hypotheses(session.config.potential, session.config.window, 1.0);
    session.timings.emplace_back("validate", now_seconds() - t0);
    const auto line = [](const char* name, bool ok) {
        std::printf("%-28s %s\n", name, ok ? "pass" : "FAIL");
    };
    line("decay rate", rep.decay_ok);
    line("two sign changes", rep.two_zeros_ok);
    line("simple zeros", rep.simple_zeros_ok);
    line("window below barrier top", rep.window_below_top);
    line("window above asymptotics", rep.asymptotics_below_window);
    if (!rep.detail.empty()) std::printf("%s\n", rep.detail.c_str());
    session.finish();
    if (!rep.all_ok()) throw tw::ConfigError("hypothesis checks failed");
    return 0;
}

int cmd_actions(Session& session) {
    const double t0 = now_seconds();
    const tw::ActionProfile profile = build_profile(session.config);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < profile.size(); ++i) {
        const auto r = profile.row(i);
        rows.push_back({r.E, r.K, r.Kp, r.Kpp, r.omega, r.omega_p, r.omega_pp, r.rho,
                        r.rho_p, r.rho_pp, r.alpha, r.alpha_p, r.alpha_pp, r.kappa,
                        r.kappa_p, r.kappa_pp, r.k_minus, r.k_plus});
    }
    tw::write_csv(session.out("actions.csv"),
                  {"E", "K", "Kp", "Kpp", "omega", "omega_p", "omega_pp", "rho", "rho_p",
                   "rho_pp", "alpha", "alpha_p", "alpha_pp", "kappa", "kappa_p",
                   "kappa_pp", "k_minus", "k_plus"},
                  rows);
    session.timings.emplace_back("actions", now_seconds() - t0);
    std::printf("wrote %s (%d rows)\n", session.out("actions.csv").c_str(),
                profile.size());
    session.finish();
    return 0;
}

int cmd_estar(Session& session) {
    const double t0 = now_seconds();
    const tw::ActionProfile profile = build_profile(session.config);
    const tw::SaddleData saddle = tw::find_e_star(profile, session.config.density);
    session.timings.emplace_back("estar", now_seconds() - t0);
    std::printf("E*        = %s\n", tw::format_g17(saddle.e_star).c_str());
    std::printf("alpha(E*) = %s\n", tw::format_g17(saddle.alpha_star).c_str());
    std::printf("alpha''   = %s\n", tw::format_g17(saddle.alpha_pp).c_str());
    std::printf("k*        = %s\n", tw::format_g17(saddle.k_star).c_str());
    tw::write_csv(session.out("estar.csv"), {"e_star", "alpha_star", "alpha_pp", "k_star"},
                  {{saddle.e_star, saddle.alpha_star, saddle.alpha_pp, saddle.k_star}});
    session.finish();
    return 0;
}

int cmd_transmission(Session& session) {
    const double t0 = now_seconds();
    std::vector<double> energies = session.config.transmission_energies;
    if (energies.empty()) {
        const auto& w = session.config.window;
        for (int i = 0; i < 21; ++i)
            energies.push_back(w.e1 + (w.e2 - w.e1) * i / 20.0);
    }
    std::vector<std::vector<double>> rows;
    for (double hbar : hbars_or_default(session.config)) {
        for (double e : energies) {
            const tw::ScatteringSolution sol =
                tw::solve_stationary(session.config.potential, e, hbar);
            const double defect = tw::connection_defect(session.config.potential, e, hbar);
            rows.push_back({e, hbar, sol.t_amp.real(), sol.t_amp.imag(),
                            std::norm(sol.t_amp), defect});
        }
    }
    tw::write_csv(session.out("transmission.csv"),
                  {"E", "hbar", "re_t", "im_t", "abs_t2", "connection_defect"}, rows);
    session.timings.emplace_back("transmission", now_seconds() - t0);
    std::printf("wrote %s (%zu rows)\n", session.out("transmission.csv").c_str(),
                rows.size());
    session.finish();
    return 0;
}

int cmd_trajectory(Session& session) {
    const double t0 = now_seconds();
    const tw::ActionProfile profile = build_profile(session.config);
    const tw::SaddleData saddle = tw::find_e_star(profile, session.config.density);
    std::vector<double> times = session.config.approx_times;
    if (times.empty()) {
        const double tau_min = -(tw::rho_dE(session.config.potential, saddle.e_star) +
                                 session.config.density.Jp(saddle.e_star));
        for (int i = 0; i <= 120; ++i) times.push_back(tau_min + 0.5 + 0.5 * i);
    }
    std::vector<std::vector<double>> rows;
    for (double t : times) {
        const tw::TrajectoryPoint p = tw::classical_trajectory(
            session.config.potential, saddle, session.config.density, t);
        rows.push_back({p.t, p.q, p.qdot});
    }
    tw::write_csv(session.out("trajectory.csv"), {"t", "q_t", "qdot_t"}, rows);
    session.timings.emplace_back("trajectory", now_seconds() - t0);
    std::printf("wrote %s (%zu rows)\n", session.out("trajectory.csv").c_str(),
                rows.size());
    session.finish();
    return 0;
}

// Grid for an approximant snapshot: configured, or packet-centered with the
// envelope scale sqrt(hbar p^2 alpha'') and clear of the barrier exit.
tw::GridSpec approx_grid_for(const tw::ExperimentConfig& config,
                             const tw::SaddleData& saddle, double t, double hbar) {
    if (config.approx_grid.n > 0) return config.approx_grid;
    const tw::TrajectoryPoint p =
        tw::classical_trajectory(config.potential, saddle, config.density, t);
    const double sigma =
        std::sqrt(hbar * p.qdot * p.qdot * std::max(saddle.alpha_pp, 1.0));
    const double x1 = tw::turning_points(config.potential, config.window.e2).x1;
    const double lo = std::max(x1 + 0.5, p.q - 10.0 * sigma);
    const double hi = p.q + 10.0 * sigma;
    const int n = 2048;
    return tw::GridSpec{lo, (hi - lo) / (n - 1), n};
}

int cmd_approx(Session& session) {
    const tw::ExperimentConfig& config = session.config;
    const double t0 = now_seconds();
    const tw::ActionProfile profile = build_profile(config);
    const tw::SaddleData saddle = tw::find_e_star(profile, config.density);
    std::vector<std::string> names = config.approximants;
    if (names.empty()) names = {"gauss", "mod", "gauss_inf"};
    std::vector<double> times = config.approx_times;
    if (times.empty()) times = {40.0};

    json sidecar = json::array();
    for (double hbar : hbars_or_default(config)) {
        for (double t : times) {
            const tw::GridSpec grid = approx_grid_for(config, saddle, t, hbar);
            for (const std::string& name : names) {
                tw::WaveField field;
                if (name == "gauss") {
                    field = tw::chi_gauss(config.potential, saddle, config.density, grid,
                                          t, hbar);
                } else if (name == "mod") {
                    field = tw::chi_mod(config.potential, saddle, config.density, grid, t,
                                        hbar, config.chi_mod_C, config.chi_mod_beta);
                } else if (name == "gauss_inf") {
                    field = tw::chi_gauss_infinity(saddle, profile, config.density, grid,
                                                   t, hbar);
                } else { // "superposition", validated at load time
                    field = tw::chi_superposition(config.potential, profile,
                                                  config.density, saddle, grid, t, hbar);
                }
                char fname[96];
                std::snprintf(fname, sizeof fname, "approx_%s_%s_t%.10g.csv",
                              name.c_str(), hbar_tag(hbar).c_str(), t);
                tw::write_wavefield_csv(session.out(fname), field);
                sidecar.push_back({{"file", fname},
                                   {"approximant", name},
                                   {"t", t},
                                   {"hbar", hbar},
                                   {"meta", field.meta},
                                   {"norm", field.norm()}});
            }
        }
    }
    std::ofstream side(session.out("approx_index.json"));
    side << sidecar.dump(2) << "\n";
    session.timings.emplace_back("approx", now_seconds() - t0);
    std::printf("wrote %zu approximant snapshots under %s\n", sidecar.size(),
                config.output_dir.c_str());
    session.finish();
    return 0;
}

// Shared by evolve and compare: run the TDSE at one hbar.
tw::EvolutionTrace run_tdse(const tw::ExperimentConfig& config, double hbar) {
    tw::SimulationConfig sim = config.evolution;
    sim.window = config.window;
    const tw::WaveField init =
        tw::synthesize_initial(config.potential, config.density, hbar, sim);
    return tw::evolve(config.potential, init, sim);
}

void write_trace(Session& session, const std::string& dir,
                 const tw::EvolutionTrace& trace, double hbar) {
    tw::ensure_dir(dir);
    std::vector<std::string> files;
    for (size_t i = 0; i < trace.snapshots.size(); ++i) {
        char fname[64];
        if (session.config.binary_snapshots) {
            std::snprintf(fname, sizeof fname, "snapshot_%03zu.bin", i);
            tw::write_wavefield_binary(dir + "/" + fname, trace.snapshots[i]);
        } else {
            std::snprintf(fname, sizeof fname, "snapshot_%03zu.csv", i);
            tw::write_wavefield_csv(dir + "/" + fname, trace.snapshots[i]);
        }
        files.emplace_back(fname);
    }
    std::vector<std::vector<double>> rows;
    for (size_t s = 0; s < trace.norm_history.size(); ++s) {
        rows.push_back({static_cast<double>(s + 1), trace.t0 + trace.dt * (s + 1),
                        trace.norm_history[s], trace.transmitted_history[s]});
    }
    tw::write_csv(dir + "/history.csv", {"step", "t", "norm", "transmitted_norm2"}, rows);
    json meta = {{"hbar", hbar},
                 {"dt", trace.dt},
                 {"steps", trace.steps},
                 {"t0", trace.t0},
                 {"transmitted_cut", trace.transmitted_cut},
                 {"snapshots", files}};
    std::ofstream out(dir + "/trace.json");
    out << meta.dump(2) << "\n";
}

int cmd_evolve(Session& session) {
    for (double hbar : hbars_or_default(session.config)) {
        const double t0 = now_seconds();
        const tw::EvolutionTrace trace = run_tdse(session.config, hbar);
        write_trace(session, session.out("evolve_" + hbar_tag(hbar)), trace, hbar);
        session.timings.emplace_back("evolve_" + hbar_tag(hbar), now_seconds() - t0);
        std::printf("%s: %d steps, final norm %.12g\n", hbar_tag(hbar).c_str(),
                    trace.steps, trace.norm_history.back());
    }
    session.finish();
    return 0;
}

int cmd_compare(Session& session) {
    const tw::ExperimentConfig& config = session.config;
    const tw::ActionProfile profile = build_profile(config);
    const tw::SaddleData saddle = tw::find_e_star(profile, config.density);

    std::vector<double> hbars = hbars_or_default(config);
    std::sort(hbars.begin(), hbars.end(), std::greater<double>());

    json report = json::array();
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> sweep_pts;
    bool all_pass = true;
    double prev_err = -1.0;
    for (double hbar : hbars) {
        const double t0 = now_seconds();
        const tw::EvolutionTrace trace = run_tdse(config, hbar);
        const tw::WaveField chi_num = tw::extract_transmitted(
            trace, config.potential, config.window, config.evolution.buffer_tol);
        const tw::WaveField chi_ref =
            tw::chi_gauss(config.potential, saddle, config.density,
                          tw::GridSpec{chi_num.x_min, chi_num.dx, chi_num.n},
                          chi_num.t, hbar);
        const tw::GaugeResult gauge = tw::l2_compare(chi_num, chi_ref, true);
        const tw::MomentumStats stats = tw::momentum_stats(chi_num);
        const double norm_ratio = chi_ref.norm() / chi_num.norm();
        bool pass = gauge.gauged_err <= config.compare_gauged_tol;
        if (config.compare_require_decreasing && prev_err >= 0.0 &&
            gauge.gauged_err >= prev_err)
            pass = false;
        prev_err = gauge.gauged_err;
        all_pass = all_pass && pass;
        sweep_pts.emplace_back(hbar, gauge.gauged_err);
        const double seconds = now_seconds() - t0;
        session.timings.emplace_back("compare_" + hbar_tag(hbar), seconds);
        report.push_back({{"hbar", hbar},
                          {"t", chi_num.t},
                          {"raw_err", gauge.raw_err},
                          {"gauged_err", gauge.gauged_err},
                          {"phase_offset", gauge.phase_offset},
                          {"time_offset", gauge.time_offset},
                          {"norm_ratio", norm_ratio},
                          {"mean_k", stats.mean_k},
                          {"var_k", stats.var_k},
                          {"gauss_fit_residual", stats.gauss_fit_residual},
                          {"pass", pass}});
        rows.push_back({hbar, chi_num.t, gauge.raw_err, gauge.gauged_err,
                        gauge.phase_offset, gauge.time_offset, norm_ratio, stats.mean_k,
                        stats.var_k, stats.gauss_fit_residual, pass ? 1.0 : 0.0});
        std::printf("%s: gauged_err %.6g (%s)\n", hbar_tag(hbar).c_str(),
                    gauge.gauged_err, pass ? "pass" : "FAIL");
    }
    json doc = {{"rows", report}};
    if (sweep_pts.size() >= 4) {
        const tw::ScalingFit fit = tw::scaling_study(sweep_pts);
        doc["scaling"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    }
    std::ofstream out(session.out("compare_report.json"));
    out << doc.dump(2) << "\n";
    tw::write_csv(session.out("compare.csv"),
                  {"hbar", "t", "raw_err", "gauged_err", "phase_offset", "time_offset",
                   "norm_ratio", "mean_k", "var_k", "gauss_fit_residual", "pass"},
                  rows);
    session.finish();
    if (!all_pass) throw tw::AcceptanceFailure("comparison flags failed");
    return 0;
}

int cmd_sweep(const std::string& out_dir, const std::vector<int>& only) {
    tw::ensure_dir(out_dir);
    bool all_pass = true;
    const auto results = tw::run_acceptance(
        out_dir,
        [&](const tw::CriterionResult& r) {
            std::printf("[%2d] %-58s %s  (%.1f s)\n", r.id, r.name.c_str(),
                        r.pass ? "PASS" : "FAIL", r.seconds);
            if (!r.pass && !r.detail.empty()) std::printf("     %s\n", r.detail.c_str());
            std::fflush(stdout);
            all_pass = all_pass && r.pass;
        },
        only);
    std::printf("%zu criteria, %s\n", results.size(), all_pass ? "all pass" : "FAILURES");
    if (!all_pass) throw tw::AcceptanceFailure("acceptance criteria failed");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical tunneling wave toolkit"};
    app.require_subcommand(1);

    std::string config_path, sweep_out = "out";
    std::vector<int> sweep_only;

    CLI::App* validate = app.add_subcommand("validate", "check potential hypotheses");
    CLI::App* actions = app.add_subcommand("actions", "dump the action profile CSV");
    CLI::App* estar = app.add_subcommand("estar", "locate the dominant energy");
    CLI::App* transmission =
        app.add_subcommand("transmission", "stationary transmission table");
    CLI::App* approx = app.add_subcommand("approx", "write approximant wave fields");
    CLI::App* trajectory =
        app.add_subcommand("trajectory", "classical exit trajectory CSV");
    CLI::App* evolve = app.add_subcommand("evolve", "run the time-dependent solver");
    CLI::App* compare =
        app.add_subcommand("compare", "TDSE vs approximant comparison report");
    CLI::App* sweep = app.add_subcommand("sweep", "full acceptance pipeline");

    for (CLI::App* sub :
         {validate, actions, estar, transmission, approx, trajectory, evolve, compare})
        sub->add_option("-c,--config", config_path, "experiment config JSON")->required();
    sweep->add_option("-c,--config", config_path, "experiment config JSON (output_dir)");
    sweep->add_option("-o,--out", sweep_out, "output directory");
    sweep->add_option("--only", sweep_only, "criterion ids to run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            std::string out_dir = sweep_out;
            if (!config_path.empty()) out_dir = tw::load_config(config_path).output_dir;
            return cmd_sweep(out_dir, sweep_only);
        }
        Session session(config_path);
        if (validate->parsed()) return cmd_validate(session);
        if (actions->parsed()) return cmd_actions(session);
        if (estar->parsed()) return cmd_estar(session);
        if (transmission->parsed()) return cmd_transmission(session);
        if (approx->parsed()) return cmd_approx(session);
        if (trajectory->parsed()) return cmd_trajectory(session);
        if (evolve->parsed()) return cmd_evolve(session);
        if (compare->parsed()) return cmd_compare(session);
    } catch (const tw::AcceptanceFailure& e) {
        std::fprintf(stderr, "acceptance failure: %s\n", e.what());
        return 3;
    } catch (const tw::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
