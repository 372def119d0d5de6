#include "tunnelwave/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tunnelwave/quadrature.hpp"

namespace tw {

namespace {

constexpr double kFlatTol = 1e-13;  // |V - V(inf)| defining the flat region
constexpr double kPhaseTarget = 1e-9;
constexpr double kFrameP2 = 0.08;   // min 2(E-V) for frame projections

// \int_{x1}^{x} p dy with the sqrt kink at x1 removed by y = x1 + s^2.
double theta_exit(const PotentialModel& model, double E, double x1, double x) {
    auto g = [&](double s) { return momentum(model, x1 + s * s, E) * 2.0 * s; };
    if (x <= x1 + 4.0) return integrate_adaptive(g, 0.0, std::sqrt(x - x1), 1e-11);
    const double head = integrate_adaptive(g, 0.0, 2.0, 1e-11);
    auto f = [&](double y) { return momentum(model, y, E); };
    return head + integrate_adaptive(f, x1 + 4.0, x, 1e-11);
}

// \int_{x}^{x0} p dy for x < x0, kink at x0 removed by y = x0 - s^2.
double theta_enter(const PotentialModel& model, double E, double x0, double x) {
    auto g = [&](double s) { return momentum(model, x0 - s * s, E) * 2.0 * s; };
    if (x >= x0 - 4.0) return integrate_adaptive(g, 0.0, std::sqrt(x0 - x), 1e-11);
    const double head = integrate_adaptive(g, 0.0, 2.0, 1e-11);
    auto f = [&](double y) { return momentum(model, y, E); };
    return head + integrate_adaptive(f, x, x0 - 4.0, 1e-11);
}

double auto_edge(const PotentialModel& model, int side, double beyond) {
    const double v_inf = side < 0 ? model.v_minus_inf : model.v_plus_inf;
    for (double x = std::max(4.0, beyond); x <= 64.0; x += 0.5)
        if (std::abs(model.value(side * x) - v_inf) < kFlatTol) return x;
    throw ResolutionError(
        "potential has not reached its asymptote by |x|=64; set the grid edges "
        "explicitly");
}

struct MarchResult {
    std::vector<cplx> zeta, dzeta; // raw values at the store grid
};

// Numerov three-term march from the outgoing boundary on the right down to
// x_left, O(h^4) global phase error. Derivatives at store points come from
// the five-point central difference, so the march runs two fine steps past
// both ends of the store grid.
MarchResult numerov_march(const PotentialModel& model, double E, double hbar,
                          double x_left, double x_right, int n_store, double h_fine) {
    const double dx_store = (x_right - x_left) / (n_store - 1);
    const long m = std::max(1L, std::lround(std::ceil(dx_store / h_fine)));
    const double h = dx_store / m;
    const long n_fine = (n_store - 1) * m + 1;
    auto xof = [&](long i) { return x_left + i * h; };
    const double hb2 = hbar * hbar;
    auto fcoef = [&](long i) {
        return 1.0 + h * h * (2.0 * (E - model.value(xof(i))) / hb2) / 12.0;
    };

    MarchResult out;
    out.zeta.assign(n_store, cplx(0));
    out.dzeta.assign(n_store, cplx(0));

    const TurningPoints tp = turning_points(model, E);
    const cplx iu(0.0, 1.0);
    // Exact outgoing data on the flat stretch for the two topmost points.
    const double theta_top = theta_exit(model, E, tp.x1, xof(n_fine + 1));
    auto flat_wave = [&](long i) {
        const double p = momentum(model, xof(i), E);
        const double theta =
            theta_top - integrate_panels([&](double y) { return momentum(model, y, E); },
                                         xof(i), xof(n_fine + 1), 1);
        return std::exp(iu * theta / hbar) / std::sqrt(p);
    };
    cplx z2 = flat_wave(n_fine + 1); // zeta at j+2
    cplx z1 = flat_wave(n_fine);     // zeta at j+1
    double f2 = fcoef(n_fine + 1), f1 = fcoef(n_fine);

    std::array<cplx, 5> w{}; // w[k] = zeta at j+k once filled
    w[0] = z1;
    w[1] = z2;
    int filled = 2;
    for (long j = n_fine - 1; j >= -2; --j) {
        const double fj = fcoef(j);
        const cplx zj = ((12.0 - 10.0 * f1) * z1 - f2 * z2) / fj;
        for (int k = 4; k > 0; --k) w[k] = w[k - 1];
        w[0] = zj;
        ++filled;
        if (j % m == 0 && j >= 0 && j < n_fine) out.zeta[j / m] = zj;
        const long c = j + 2;
        if (filled >= 5 && c % m == 0 && c >= 0 && c < n_fine)
            out.dzeta[c / m] = (w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]) / (12.0 * h);
        z2 = z1;
        z1 = zj;
        f2 = f1;
        f1 = fj;
    }
    return out;
}

// Dormand-Prince 5(4) on (zeta, zeta'), marching right to left with local
// relative control. Independent of the Numerov path; used for cross-checks.
MarchResult rk_march(const PotentialModel& model, double E, double hbar, double x_left,
                     double x_right, int n_store) {
    const double dx_store = (x_right - x_left) / (n_store - 1);
    const double hb2 = hbar * hbar;
    auto Q = [&](double x) { return 2.0 * (E - model.value(x)) / hb2; };

    const TurningPoints tp = turning_points(model, E);
    const cplx iu(0.0, 1.0);
    const double p_r = momentum(model, x_right, E);
    cplx z = std::exp(iu * theta_exit(model, E, tp.x1, x_right) / hbar) / std::sqrt(p_r);
    cplx zp = iu * p_r / hbar * z;

    MarchResult out;
    out.zeta.assign(n_store, cplx(0));
    out.dzeta.assign(n_store, cplx(0));
    out.zeta[n_store - 1] = z;
    out.dzeta[n_store - 1] = zp;

    const double rtol = 1e-12;
    double x = x_right;
    double h_free = 1e-3 * hbar; // controller's preferred step size
    long n_steps = 0;
    for (int target = n_store - 2; target >= 0; --target) {
        const double x_goal = x_left + target * dx_store;
        while (x > x_goal + 1e-12) {
            if (++n_steps > 50'000'000)
                throw ConvergenceFailure("adaptive integrator exceeded its step budget");
            const double hstep = -std::min(h_free, x - x_goal);
            // stage derivatives
            auto rhs = [&](double xs, cplx y, cplx yp, cplx& dy, cplx& dyp) {
                dy = yp;
                dyp = -Q(xs) * y;
            };
            cplx k1, k1p, k2, k2p, k3, k3p, k4, k4p, k5, k5p, k6, k6p, k7, k7p;
            rhs(x, z, zp, k1, k1p);
            rhs(x + 0.2 * hstep, z + hstep * 0.2 * k1, zp + hstep * 0.2 * k1p, k2, k2p);
            rhs(x + 0.3 * hstep, z + hstep * (3.0 / 40 * k1 + 9.0 / 40 * k2),
                zp + hstep * (3.0 / 40 * k1p + 9.0 / 40 * k2p), k3, k3p);
            rhs(x + 0.8 * hstep,
                z + hstep * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3),
                zp + hstep * (44.0 / 45 * k1p - 56.0 / 15 * k2p + 32.0 / 9 * k3p), k4,
                k4p);
            rhs(x + 8.0 / 9 * hstep,
                z + hstep * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                             64448.0 / 6561 * k3 - 212.0 / 729 * k4),
                zp + hstep * (19372.0 / 6561 * k1p - 25360.0 / 2187 * k2p +
                              64448.0 / 6561 * k3p - 212.0 / 729 * k4p),
                k5, k5p);
            rhs(x + hstep,
                z + hstep * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 +
                             46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                             5103.0 / 18656 * k5),
                zp + hstep * (9017.0 / 3168 * k1p - 355.0 / 33 * k2p +
                              46732.0 / 5247 * k3p + 49.0 / 176 * k4p -
                              5103.0 / 18656 * k5p),
                k6, k6p);
            const cplx z5 = z + hstep * (35.0 / 384 * k1 + 500.0 / 1113 * k3 +
                                         125.0 / 192 * k4 - 2187.0 / 6784 * k5 +
                                         11.0 / 84 * k6);
            const cplx z5p = zp + hstep * (35.0 / 384 * k1p + 500.0 / 1113 * k3p +
                                           125.0 / 192 * k4p - 2187.0 / 6784 * k5p +
                                           11.0 / 84 * k6p);
            rhs(x + hstep, z5, z5p, k7, k7p);
            const cplx ez = hstep * (71.0 / 57600 * k1 - 71.0 / 16695 * k3 +
                                     71.0 / 1920 * k4 - 17253.0 / 339200 * k5 +
                                     22.0 / 525 * k6 - 1.0 / 40 * k7);
            const cplx ezp = hstep * (71.0 / 57600 * k1p - 71.0 / 16695 * k3p +
                                      71.0 / 1920 * k4p - 17253.0 / 339200 * k5p +
                                      22.0 / 525 * k6p - 1.0 / 40 * k7p);
            const double kappa = std::sqrt(std::max(std::abs(Q(x)), 1.0));
            const double sc = std::abs(z) + std::abs(zp) / kappa + 1e-280;
            const double err =
                (std::abs(ez) + std::abs(ezp) / kappa) / (rtol * sc);
            const bool clamped = std::abs(hstep) < h_free;
            if (err <= 1.0) {
                x += hstep;
                z = z5;
                zp = z5p;
            }
            if (!clamped || err > 1.0) {
                const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h_free = std::abs(hstep) * std::clamp(grow, 0.2, 5.0);
            }
            if (h_free < 1e-14)
                throw ConvergenceFailure("step collapse in the adaptive integrator");
        }
        out.zeta[target] = z;
        out.dzeta[target] = zp;
    }
    return out;
}

} // namespace

cplx ScatteringSolution::psi_at(const PotentialModel& model, double x) const {
    if (c_x.empty() || x < c_x.front())
        throw DomainError("psi_at covers only the transmitted-side frame region");
    const cplx iu(0.0, 1.0);
    auto pf = [&](double y) { return momentum(model, y, E); };
    cplx a, b;
    double theta;
    if (x >= c_x.back()) {
        const size_t n = c_x.size() - 1;
        const int panels = std::max(1, static_cast<int>(std::ceil((x - c_x[n]) / 4)));
        theta = c_theta[n] + integrate_panels(pf, c_x[n], x, panels);
        a = c1[n];
        b = c2[n];
    } else {
        const size_t j =
            std::upper_bound(c_x.begin(), c_x.end(), x) - c_x.begin() - 1;
        const double t = (x - c_x[j]) / (c_x[j + 1] - c_x[j]);
        a = c1[j] * (1.0 - t) + c1[j + 1] * t;
        b = c2[j] * (1.0 - t) + c2[j + 1] * t;
        theta = c_theta[j] + integrate_panels(pf, c_x[j], x, 1);
    }
    const double p = momentum(model, x, E);
    return (a * std::exp(-iu * theta / hbar) + b * std::exp(iu * theta / hbar)) /
           std::sqrt(p) / a_in;
}

ScatteringSolution solve_stationary(const PotentialModel& model, double E, double hbar,
                                    const StationaryGrid& grid, Integrator method) {
    if (hbar <= 0) throw ConfigError("hbar must be positive");
    const double barrier = 2.0 * agmon_action(model, E) / hbar;
    if (barrier > 280.0 * std::log(10.0)) {
        std::ostringstream msg;
        msg << "barrier factor exp(" << barrier
            << ") would overflow; raise hbar or lower the barrier";
        throw OverflowGuard(msg.str());
    }

    const TurningPoints tp = turning_points(model, E);
    double x_right = grid.x_right, x_left = grid.x_left;
    if (x_right == 0.0) x_right = auto_edge(model, +1, tp.x1 + 5.0);
    if (x_left == 0.0) x_left = -auto_edge(model, -1, -tp.x0 + 5.0);
    if (x_left >= tp.x0 - 4.0 || x_right <= tp.x1 + 4.0)
        throw ConfigError("grid edges must lie well outside the turning points");
    const int n_store = std::max(grid.n_store, 64);

    // Fine step from the phase-error target; kappa is the largest local
    // wavenumber over the grid.
    double v_min = std::min(model.v_minus_inf, model.v_plus_inf);
    for (int i = 0; i <= 4096; ++i)
        v_min = std::min(v_min, model.value(x_left + (x_right - x_left) * i / 4096.0));
    const double kappa_max = std::sqrt(2.0 * std::abs(E - v_min)) / hbar;
    const double L = x_right - x_left;
    double h_fine =
        std::pow(480.0 * kPhaseTarget / (std::pow(kappa_max, 5) * L), 0.25);
    if (grid.h > 0) h_fine = std::min(h_fine, grid.h);

    const MarchResult raw = method == Integrator::numerov
                                ? numerov_march(model, E, hbar, x_left, x_right,
                                                n_store, h_fine)
                                : rk_march(model, E, hbar, x_left, x_right, n_store);

    ScatteringSolution sol;
    sol.E = E;
    sol.hbar = hbar;
    sol.x_left = x_left;
    sol.dx_store = (x_right - x_left) / (n_store - 1);
    sol.x0 = tp.x0;
    sol.x1 = tp.x1;

    // Frame projections where the local momentum is healthy.
    const cplx iu(0.0, 1.0);
    auto pf = [&](double y) { return momentum(model, y, E); };
    std::vector<int> c_idx, d_idx;
    for (int i = 0; i < n_store; ++i) {
        const double x = x_left + i * sol.dx_store;
        const double p2 = 2.0 * (E - model.value(x));
        if (p2 < kFrameP2) continue;
        if (x > tp.x1)
            c_idx.push_back(i);
        else if (x < tp.x0)
            d_idx.push_back(i);
    }
    if (c_idx.empty() || d_idx.empty())
        throw ResolutionError("no usable frame samples; grid too coarse or too tight");

    auto project = [&](double x, double theta, cplx z, cplx dz, cplx& lo, cplx& hi) {
        const double p = momentum(model, x, E);
        const double sp = std::sqrt(p);
        const cplx ph = std::exp(iu * theta / hbar);
        hi = (sp * z - iu * hbar * dz / sp) / (2.0 * ph); // rightward coefficient
        lo = ph * (sp * z + iu * hbar * dz / sp) / 2.0;   // leftward coefficient
    };

    // Right frame: theta anchored at the first sample by quadrature from x1,
    // then accumulated exactly panel by panel.
    sol.c_x.resize(c_idx.size());
    sol.c_theta.resize(c_idx.size());
    sol.c1.resize(c_idx.size());
    sol.c2.resize(c_idx.size());
    for (size_t j = 0; j < c_idx.size(); ++j)
        sol.c_x[j] = x_left + c_idx[j] * sol.dx_store;
    sol.c_theta[0] = theta_exit(model, E, tp.x1, sol.c_x[0]);
    for (size_t j = 1; j < c_idx.size(); ++j)
        sol.c_theta[j] =
            sol.c_theta[j - 1] + integrate_panels(pf, sol.c_x[j - 1], sol.c_x[j], 1);
    for (size_t j = 0; j < c_idx.size(); ++j)
        project(sol.c_x[j], sol.c_theta[j], raw.zeta[c_idx[j]], raw.dzeta[c_idx[j]],
                sol.c1[j], sol.c2[j]);

    // Left frame: theta0 anchored at the sample nearest x0.
    sol.d_x.resize(d_idx.size());
    sol.d1.resize(d_idx.size());
    sol.d2.resize(d_idx.size());
    std::vector<double> theta0(d_idx.size());
    for (size_t j = 0; j < d_idx.size(); ++j)
        sol.d_x[j] = x_left + d_idx[j] * sol.dx_store;
    const size_t last = d_idx.size() - 1;
    theta0[last] = -theta_enter(model, E, tp.x0, sol.d_x[last]);
    for (size_t j = last; j > 0; --j)
        theta0[j - 1] = theta0[j] - integrate_panels(pf, sol.d_x[j - 1], sol.d_x[j], 1);
    for (size_t j = 0; j < d_idx.size(); ++j)
        project(sol.d_x[j], theta0[j], raw.zeta[d_idx[j]], raw.dzeta[d_idx[j]],
                sol.d1[j], sol.d2[j]);

    // Transmission data from the phase integrals and the left-edge frame.
    const OmegaRho wr = omega_rho(model, E);
    const double km = k_minus(model, E);
    const cplx d2_left = sol.d2.front();
    sol.t_amp = std::exp(-iu * wr.omega / hbar) / d2_left;
    sol.r_amp = sol.d1.front() / d2_left * std::exp(-2.0 * iu * wr.rho / hbar);
    sol.a_in = d2_left * std::exp(iu * wr.rho / hbar) / std::sqrt(km);

    sol.zeta.resize(n_store);
    for (int i = 0; i < n_store; ++i) sol.zeta[i] = raw.zeta[i] / sol.a_in;
    return sol;
}

double connection_defect(const PotentialModel& model, double E, double hbar) {
    const ScatteringSolution sol = solve_stationary(model, E, hbar);
    const double ratio = k_plus(model, E) / k_minus(model, E);
    return std::abs(std::abs(sol.t_amp) * std::exp(agmon_action(model, E) / hbar) *
                        std::sqrt(ratio) -
                    1.0);
}

cplx next_order_correction(const PotentialModel& model, double x, double E,
                           double hbar) {
    const TurningPoints tp = turning_points(model, E);
    if (x <= tp.x1) throw DomainError("correction defined on the transmitted side");
    auto g = [&](double y) {
        const double p = momentum(model, y, E);
        const double vp = model.deriv(y);
        return vp * vp / (8.0 * std::pow(p, 5));
    };
    double cut = x + 16.0;
    while (std::abs(g(cut)) > 1e-18 && cut < 1e5) cut *= 2;
    const double integral = integrate_adaptive(g, x, cut, 1e-10);
    return cplx(1.0, hbar * integral);
}

double stationary_transmission_average(const PotentialModel& model,
                                       const DensityParams& params, double hbar,
                                       int n_nodes) {
    const GaussRule& rule = gauss_legendre(n_nodes);
    const double mid = 0.5 * (params.window.e1 + params.window.e2);
    const double half = 0.5 * (params.window.e2 - params.window.e1);
    double num = 0, den = 0;
    for (int i = 0; i < n_nodes; ++i) {
        const double E = mid + half * rule.x[i];
        const double w = std::norm(q_density(params, E, hbar)) * rule.w[i];
        const ScatteringSolution sol = solve_stationary(model, E, hbar);
        num += w * std::norm(sol.t_amp);
        den += w;
    }
    return num / den;
}

} // namespace tw
