#include "tunnelwave/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tunnelwave/actions.hpp"
#include "tunnelwave/compare.hpp"
#include "tunnelwave/csvio.hpp"
#include "tunnelwave/density.hpp"
#include "tunnelwave/errors.hpp"
#include "tunnelwave/packets.hpp"
#include "tunnelwave/potential.hpp"
#include "tunnelwave/scattering.hpp"
#include "tunnelwave/tdse.hpp"

namespace tw {
namespace {

constexpr double kPi = 3.14159265358979323846;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Closed-form sech^2 transmission probability (unit mass, barrier height v0,
// length scale a). Independent of the scattering integrators.
double sech2_t2(double E, double hbar, double v0, double a) {
    const double s = std::sinh(kPi * std::sqrt(2.0 * E) / (hbar * a));
    const double c =
        std::cosh(0.5 * kPi * std::sqrt(8.0 * v0 / (hbar * hbar * a * a) - 1.0));
    return s * s / (s * s + c * c);
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

// One TDSE production run of the canonical tunneling experiment plus all the
// derived quantities the sweep criteria consume.
struct SweepRow {
    double hbar = 0;
    double raw_err = 0, gauged_err = 0, phase_offset = 0, time_offset = 0;
    double t_meas = 0, t2_floor = 0;
    double mean_k_in = 0, mean_k_out = 0, dev_k = 0;
    double resid_out = 0;
    double field_t = 0;
};

struct Ctx {
    PotentialModel model = make_eckart();
    DensityParams params = make_canonical_density();
    EnergyWindow window{0.7, 0.9};
    std::string out_dir;

    std::unique_ptr<ActionProfile> profile_;
    bool have_saddle = false;
    SaddleData saddle_{};
    std::vector<SweepRow> sweep_;
    std::string sweep_error_;

    const ActionProfile& profile() {
        if (!profile_)
            profile_ = std::make_unique<ActionProfile>(model, window, params.to_gj(), 64, 1);
        return *profile_;
    }

    const SaddleData& saddle() {
        if (!have_saddle) {
            saddle_ = find_e_star(profile(), params);
            have_saddle = true;
        }
        return saddle_;
    }

    // Shared production sweep for the convergence and flux criteria. A
    // failure is cached so the second consumer does not redo a long run.
    const std::vector<SweepRow>& sweep() {
        if (!sweep_error_.empty()) throw std::runtime_error(sweep_error_);
        if (!sweep_.empty()) return sweep_;
        try {
            run_sweep();
        } catch (const std::exception& e) {
            sweep_ = {};
            sweep_error_ = std::string("tunneling sweep failed: ") + e.what();
            throw std::runtime_error(sweep_error_);
        }
        return sweep_;
    }

    void run_sweep() {
        // Grid sizes keep at least 12 points per shortest wavelength; the
        // finer grids at small hbar also shrink dt through the step bound.
        const std::pair<double, int> plan[] = {
            {1.0 / 16, 1 << 14},
            {1.0 / 24, 1 << 14},
            {1.0 / 32, 1 << 15},
            {1.0 / 48, 1 << 15},
        };
        std::vector<std::vector<double>> rows;
        for (const auto& [hbar, n] : plan) {
            SimulationConfig sim;
            sim.L = 100.0;
            sim.n = n;
            sim.t_final = 62.0;
            sim.hbar = hbar;
            sim.x_c = -45.0;
            sim.window = window;
            // The transmitted spectrum is clipped at the window top, so the
            // packet drags an algebraic 1/distance tail; 0.023 of the peak
            // sits in the buffer at this geometry. A non-separated body
            // measures O(0.3) there, an order of magnitude above this gate.
            sim.buffer_tol = 0.05;

            const WaveField init = synthesize_initial(model, params, hbar, sim);
            const double norm0 = init.norm();
            const MomentumStats in_stats = momentum_stats(init);
            const EvolutionTrace trace = evolve(model, init, sim);
            const WaveField chi =
                extract_transmitted(trace, model, window, sim.buffer_tol);

            const GridSpec grid{chi.x_min, chi.dx, chi.n};
            const WaveField gauss = chi_gauss(model, saddle(), params, grid, chi.t, hbar);
            const GaugeResult g = l2_compare(chi, gauss, true);
            const MomentumStats out_stats = momentum_stats(chi);

            SweepRow row;
            row.hbar = hbar;
            row.raw_err = g.raw_err;
            row.gauged_err = g.gauged_err;
            row.phase_offset = g.phase_offset;
            row.time_offset = g.time_offset;
            const double tn = trace.transmitted_history.back() / norm0;
            row.t_meas = tn * tn;
            row.t2_floor = std::norm(solve_stationary(model, params.e0, hbar).t_amp);
            row.mean_k_in = in_stats.mean_k;
            row.mean_k_out = out_stats.mean_k;
            row.dev_k = std::abs(out_stats.mean_k - saddle().k_star);
            row.resid_out = out_stats.gauss_fit_residual;
            row.field_t = chi.t;
            sweep_.push_back(row);

            rows.push_back({hbar, g.raw_err, g.gauged_err, g.phase_offset, g.time_offset,
                            row.t_meas, row.t2_floor, row.mean_k_in, row.mean_k_out,
                            row.dev_k, 0.5 * std::sqrt(hbar), row.resid_out});
        }
        if (!out_dir.empty())
            write_csv(out_dir + "/tdse_sweep.csv",
                      {"hbar", "raw_err", "gauged_err", "phase_offset", "time_offset",
                       "t_meas", "t2_stationary", "mean_k_in", "mean_k_out", "dev_k",
                       "dev_bound", "gauss_fit_residual"},
                      rows);
    }
};

using Body = std::function<void(CriterionResult&)>;

void run_one(int id, const char* name, std::vector<CriterionResult>& out,
             const std::function<void(const CriterionResult&)>& on_done,
             const std::vector<int>& only, const Body& body) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
    CriterionResult r;
    r.id = id;
    r.name = name;
    const double t0 = now_seconds();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = now_seconds() - t0;
    out.push_back(r);
    if (on_done) on_done(r);
}

} // namespace

std::vector<CriterionResult> run_acceptance(
    const std::string& out_dir,
    const std::function<void(const CriterionResult&)>& on_done,
    const std::vector<int>& only) {
    Ctx ctx;
    ctx.out_dir = out_dir;
    if (!out_dir.empty()) ensure_dir(out_dir);
    std::vector<CriterionResult> results;
    auto run = [&](int id, const char* name, const Body& body) {
        run_one(id, name, results, on_done, only, body);
    };

    run(1, "barrier action integral matches the closed form", [&](CriterionResult& r) {
        std::vector<std::vector<double>> rows;
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double e = 0.7 + 0.2 * i / 19.0;
            const double w = agmon_action(ctx.model, e);
            const double w_closed = kPi * std::sqrt(2.0) * (1.0 - std::sqrt(e));
            const double rel = std::abs(w - w_closed) / w_closed;
            worst = std::max(worst, rel);
            rows.push_back({e, w, w_closed, rel});
        }
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/action_closed_form.csv",
                      {"E", "action", "closed_form", "rel_dev"}, rows);
        r.pass = worst <= 1e-9;
        r.detail = "max rel dev " + fmt(worst, 3) + " over 20 energies (tol 1e-9)";
    });

    run(2, "stationary transmission matches the closed form", [&](CriterionResult& r) {
        std::vector<std::vector<double>> rows;
        double worst_rel = 0.0, worst_pair = 0.0;
        for (double hbar : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
            const ScatteringSolution nu =
                solve_stationary(ctx.model, 0.8, hbar, {}, Integrator::numerov);
            const ScatteringSolution rk =
                solve_stationary(ctx.model, 0.8, hbar, {}, Integrator::rk);
            const double t2 = std::norm(nu.t_amp);
            const double t2_closed = sech2_t2(0.8, hbar, ctx.model.v0, ctx.model.a);
            const double rel = std::abs(t2 - t2_closed) / t2_closed;
            const double pair = std::abs(nu.t_amp - rk.t_amp) / std::abs(nu.t_amp);
            worst_rel = std::max(worst_rel, rel);
            worst_pair = std::max(worst_pair, pair);
            rows.push_back({hbar, t2, t2_closed, rel, pair});
        }
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/transmission_closed_form.csv",
                      {"hbar", "t2", "t2_closed", "rel_dev", "integrator_rel_diff"}, rows);
        r.pass = worst_rel <= 1e-6 && worst_pair <= 1e-8;
        r.detail = "max rel dev " + fmt(worst_rel, 3) + " (tol 1e-6), integrators differ by " +
                   fmt(worst_pair, 3) + " (tol 1e-8)";
    });

    run(3, "connection defect vanishes linearly in hbar", [&](CriterionResult& r) {
        const double hbars[] = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 48};
        std::vector<std::pair<double, double>> pts;
        std::vector<std::vector<double>> rows;
        for (double hbar : hbars) {
            const double d = connection_defect(ctx.model, 0.8, hbar);
            pts.emplace_back(hbar, d);
            rows.push_back({hbar, d});
        }
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/connection_defect.csv", {"hbar", "defect"}, rows);
        bool mono = true;
        for (size_t i = 1; i < pts.size(); ++i) mono = mono && pts[i].second < pts[i - 1].second;
        const ScalingFit fit = scaling_study(pts);
        r.pass = mono && fit.slope >= 0.7 && fit.slope <= 1.3;
        r.detail = std::string(mono ? "decreasing" : "NOT decreasing") + ", log-log slope " +
                   fmt(fit.slope, 4) + " (band [0.7,1.3]), r2 " + fmt(fit.r2, 4);
    });

    run(4, "tunneling amplitudes decay at the action rate", [&](CriterionResult& r) {
        const double hbars[] = {1.0 / 8, 1.0 / 16, 1.0 / 24, 1.0 / 32, 1.0 / 48};
        std::vector<std::vector<double>> rows;
        // Least squares of ln|t| against 1/hbar; the prefactor goes to the
        // intercept and its hbar-dependence only bends the fit at O(hbar).
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int m = 5;
        for (double hbar : hbars) {
            const ScatteringSolution sol = solve_stationary(ctx.model, 0.8, hbar);
            const double x = 1.0 / hbar;
            const double y = std::log(std::abs(sol.t_amp));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            rows.push_back({hbar, x, y});
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double target = -agmon_action(ctx.model, 0.8);
        const double rel = std::abs(slope - target) / std::abs(target);
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/decay_rate.csv", {"hbar", "inv_hbar", "ln_abs_t"}, rows);
        r.pass = rel <= 0.01;
        r.detail = "slope " + fmt(slope, 8) + " vs action rate " + fmt(target, 8) +
                   ", rel dev " + fmt(rel, 3) + " (tol 0.01)";
    });

    run(5, "asymptotic gaussian norm matches its closed form", [&](CriterionResult& r) {
        const double hbar = 1.0 / 32, t = 80.0;
        const TrajectoryPoint tp = classical_trajectory(ctx.model, ctx.saddle(), ctx.params, t);
        const int n = 1 << 14;
        const GridSpec grid{tp.q - 40.0, 80.0 / n, n};
        const WaveField f =
            chi_gauss_infinity(ctx.saddle(), ctx.profile(), ctx.params, grid, t, hbar);
        const double n2 = f.norm() * f.norm();
        const double closed = chi_gauss_infinity_norm(ctx.saddle(), ctx.profile(), ctx.params, hbar);
        const double n2_closed = closed * closed;
        const double rel = std::abs(n2 - n2_closed) / n2_closed;
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/asymptotic_norm.csv",
                      {"hbar", "t", "norm2_grid", "norm2_closed", "rel_dev"},
                      {{hbar, t, n2, n2_closed, rel}});
        r.pass = rel <= 1e-6;
        r.detail = "norm^2 rel dev " + fmt(rel, 3) + " at t=80, hbar=1/32 (tol 1e-6)";
    });

    run(6, "classical trajectory obeys its equation of motion", [&](CriterionResult& r) {
        const double e_star = ctx.saddle().e_star;
        const double tau_min = -(rho_dE(ctx.model, e_star) + ctx.params.Jp(e_star));
        const double t_lo = tau_min + 1.0, t_hi = 100.0;
        std::vector<std::vector<double>> rows;
        double worst = 0.0;
        auto q_at = [&](double t) {
            return classical_trajectory(ctx.model, ctx.saddle(), ctx.params, t).q;
        };
        for (int i = 0; i < 50; ++i) {
            const double t = t_lo + (t_hi - t_lo) * i / 49.0;
            // Richardson-extrapolated central difference of the root-solved
            // q_t, checked against the momentum at that point.
            const double h = 1e-3;
            const double d1 = (q_at(t + h) - q_at(t - h)) / (2.0 * h);
            const double d2 = (q_at(t + h / 2) - q_at(t - h / 2)) / h;
            const double dq = (4.0 * d2 - d1) / 3.0;
            const double p = momentum(ctx.model, q_at(t), e_star);
            const double resid = std::abs(dq - p);
            worst = std::max(worst, resid);
            rows.push_back({t, q_at(t), dq, p, resid});
        }
        const double slope = (q_at(100.0) - q_at(95.0)) / 5.0;
        const double slope_dev = std::abs(slope - ctx.saddle().k_star);
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/trajectory_ode.csv",
                      {"t", "q", "dq_dt", "momentum", "residual"}, rows);
        r.pass = worst <= 1e-6 && slope_dev <= 1e-6;
        r.detail = "max |dq/dt - p(q)| " + fmt(worst, 3) + " (tol 1e-6), late slope off k* by " +
                   fmt(slope_dev, 3) + " (tol 1e-6)";
    });

    run(7, "windowed approximants agree within tolerance", [&](CriterionResult& r) {
        // chi_mod against the trajectory gaussian at moderate distance, and
        // against the asymptotic gaussian far out where both forms hold.
        // C = 100 keeps the far window inside chi_mod's validity range.
        const double C = 100.0, beta = 0.25;
        const double t_mod = 30.0, t_far = 100.0;
        const int n = 2048;
        std::vector<std::vector<double>> rows;
        double e_mod[2], e_far[2];
        const double hbars[] = {1.0 / 32, 1.0 / 48};
        for (int i = 0; i < 2; ++i) {
            const double hbar = hbars[i];
            const double q_mod =
                classical_trajectory(ctx.model, ctx.saddle(), ctx.params, t_mod).q;
            const GridSpec g_mod{q_mod - 8.0, 16.0 / n, n};
            const WaveField a_mod =
                chi_mod(ctx.model, ctx.saddle(), ctx.params, g_mod, t_mod, hbar, C, beta);
            const WaveField b_mod =
                chi_gauss(ctx.model, ctx.saddle(), ctx.params, g_mod, t_mod, hbar);
            e_mod[i] = l2_compare(a_mod, b_mod, true).gauged_err;

            const double q_far =
                classical_trajectory(ctx.model, ctx.saddle(), ctx.params, t_far).q;
            const GridSpec g_far{q_far - 8.0, 16.0 / n, n};
            const WaveField a_far =
                chi_mod(ctx.model, ctx.saddle(), ctx.params, g_far, t_far, hbar, C, beta);
            const WaveField b_far =
                chi_gauss_infinity(ctx.saddle(), ctx.profile(), ctx.params, g_far, t_far, hbar);
            e_far[i] = l2_compare(a_far, b_far, true).gauged_err;
            rows.push_back({hbar, e_mod[i], e_far[i]});
        }
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/window_agreement.csv",
                      {"hbar", "err_vs_gauss_moderate", "err_vs_gauss_infinity_far"}, rows);
        r.pass = e_mod[0] <= 0.05 && e_far[0] <= 0.05 && e_mod[1] < e_mod[0] &&
                 e_far[1] < e_far[0];
        r.detail = "moderate " + fmt(e_mod[0], 3) + " -> " + fmt(e_mod[1], 3) + ", far " +
                   fmt(e_far[0], 3) + " -> " + fmt(e_far[1], 3) +
                   " (tol 0.05 at 1/32, smaller at 1/48)";
    });

    run(8, "extracted transmitted wave converges to the gaussian model",
        [&](CriterionResult& r) {
            const auto& sw = ctx.sweep();
            bool mono = true;
            std::vector<std::pair<double, double>> pts;
            std::string seq;
            for (size_t i = 0; i < sw.size(); ++i) {
                pts.emplace_back(sw[i].hbar, sw[i].gauged_err);
                if (i) mono = mono && sw[i].gauged_err < sw[i - 1].gauged_err;
                seq += (i ? ", " : "") + fmt(sw[i].gauged_err, 3);
            }
            const ScalingFit fit = scaling_study(pts);
            const bool halved = sw.back().gauged_err <= 0.5 * sw.front().gauged_err;
            r.pass = mono && fit.slope > 0.0 && fit.r2 > 0.9 && halved;
            r.detail = "gauged err [" + seq + "]" + (mono ? "" : " NOT decreasing") +
                       ", slope " + fmt(fit.slope, 3) + ", r2 " + fmt(fit.r2, 4) +
                       (halved ? ", halved" : ", NOT halved");
        });

    run(9, "transmitted flux beats the stationary floor at the saddle momentum",
        [&](CriterionResult& r) {
            const auto& sw = ctx.sweep();
            bool flux_ok = true, gain_ok = true, k_ok = true;
            std::string seq;
            for (const SweepRow& row : sw) {
                flux_ok = flux_ok && row.t_meas > row.t2_floor;
                gain_ok = gain_ok && row.mean_k_out > row.mean_k_in;
                k_ok = k_ok && row.dev_k <= 0.5 * std::sqrt(row.hbar);
                seq += (seq.empty() ? "" : ", ") + fmt(row.dev_k / std::sqrt(row.hbar), 3);
            }
            r.pass = flux_ok && gain_ok && k_ok;
            r.detail = std::string("flux > stationary floor: ") + (flux_ok ? "yes" : "NO") +
                       ", mean k raised: " + (gain_ok ? "yes" : "NO") +
                       ", |mean_k - k*|/sqrt(hbar) [" + seq + "] (bound 0.5)";
        });

    run(10, "node-bearing launches gaussianize after transmission", [&](CriterionResult& r) {
        const double eta = k_minus(ctx.model, ctx.params.e0);
        const std::pair<double, int> plan[] = {
            {1.0 / 16, 1 << 13},
            {1.0 / 32, 1 << 14},
            {1.0 / 48, 1 << 15},
        };
        std::vector<std::vector<double>> rows;
        bool ok = true;
        std::string seq;
        for (int j = 0; j <= 2; ++j) {
            const DensityParams dens = hermite_density(j, eta, ctx.model, ctx.window);
            double prev = 0.0;
            seq += (j ? " | j" : "j") + std::to_string(j) + ":";
            for (size_t i = 0; i < 3; ++i) {
                const auto& [hbar, n] = plan[i];
                SimulationConfig sim;
                sim.L = 150.0;
                sim.n = n;
                sim.t_final = 115.0;
                sim.hbar = hbar;
                sim.x_c = -30.0;
                sim.window = ctx.window;
                sim.buffer_tol = 0.05;
                const WaveField init = synthesize_initial(ctx.model, dens, hbar, sim);
                const EvolutionTrace trace = evolve(ctx.model, init, sim);
                const WaveField chi =
                    extract_transmitted(trace, ctx.model, ctx.window, sim.buffer_tol);
                const double resid = momentum_stats(chi).gauss_fit_residual;
                rows.push_back({static_cast<double>(j), hbar, resid});
                if (i) ok = ok && resid < prev;
                prev = resid;
                seq += " " + fmt(resid, 3);
            }
        }
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/hermite_sweep.csv", {"j", "hbar", "gauss_fit_residual"},
                      rows);
        r.pass = ok;
        r.detail = std::string("fit residual per j over hbar {1/16,1/32,1/48}: ") + seq +
                   (ok ? " (each decreasing)" : " (NOT decreasing)");
    });

    run(11, "time stepping is unitary and second order", [&](CriterionResult& r) {
        // Unitarity: fixed dt chosen so exactly 1e4 steps cover the run.
        SimulationConfig sim;
        sim.L = 40.0;
        sim.n = 4096;
        sim.hbar = 1.0 / 16;
        sim.x_c = -15.0;
        sim.window = ctx.window;
        sim.dt = 0.003;
        sim.t_final = 30.0;
        const WaveField init = synthesize_initial(ctx.model, ctx.params, sim.hbar, sim);
        const EvolutionTrace trace = evolve(ctx.model, init, sim);
        const double norm0 = init.norm();
        double drift = 0.0;
        for (double nrm : trace.norm_history)
            drift = std::max(drift, std::abs(nrm - norm0) / norm0);

        // Order: halving dt must cut the error by ~4. Against a dt0/8
        // reference the ideal ratio is (1 - 1/64)/((1 - 4/64)/4) = 4.2.
        SimulationConfig fine = sim;
        fine.t_final = 2.0;
        fine.n = 2048;
        const WaveField start = synthesize_initial(ctx.model, ctx.params, sim.hbar, fine);
        auto final_field = [&](double dt) {
            SimulationConfig c = fine;
            c.dt = dt;
            return evolve(ctx.model, start, c).snapshots.back();
        };
        const double dt0 = 0.002;
        const WaveField ref = final_field(dt0 / 8);
        const double e1 = l2_compare(ref, final_field(dt0), false).raw_err;
        const double e2 = l2_compare(ref, final_field(dt0 / 2), false).raw_err;
        const double ratio = e1 / e2;
        if (!ctx.out_dir.empty())
            write_csv(ctx.out_dir + "/unitarity.csv",
                      {"steps", "norm_drift", "err_dt0", "err_dt0_half", "ratio"},
                      {{static_cast<double>(trace.steps), drift, e1, e2, ratio}});
        r.pass = drift < 1e-12 && ratio >= 3.6 && ratio <= 4.4;
        r.detail = "norm drift " + fmt(drift, 3) + " over " + std::to_string(trace.steps) +
                   " steps (tol 1e-12), dt-halving ratio " + fmt(ratio, 4) + " (band [3.6,4.4])";
    });

    return results;
}

} // namespace tw
