#include "tunnelwave/packets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tunnelwave/errors.hpp"
#include "tunnelwave/fft.hpp"
#include "tunnelwave/quadrature.hpp"

namespace tw {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

double gl16(const std::function<double(double)>& f, double a, double b) {
    return integrate_panels(f, a, b, 1, 16);
}

// Normalized psi on an ascending uniform grid: one anchor evaluation of the
// phase integral, then cumulative single-panel increments. Matches psi_at up
// to quadrature roundoff but costs O(1) potential evaluations per point.
std::vector<cplx> psi_on_grid(const ScatteringSolution& sol, const PotentialModel& model,
                              const GridSpec& grid) {
    if (sol.c_x.empty() || grid.x_min < sol.c_x.front()) {
        std::ostringstream msg;
        msg << "grid start " << grid.x_min << " is left of the transmitted frame region "
            << (sol.c_x.empty() ? 0.0 : sol.c_x.front());
        throw DomainError(msg.str());
    }
    auto pf = [&](double y) { return momentum(model, y, sol.E); };

    const size_t j0 =
        std::upper_bound(sol.c_x.begin(), sol.c_x.end(), grid.x_min) - sol.c_x.begin() - 1;
    double theta = sol.c_theta[j0] + gl16(pf, sol.c_x[j0], grid.x_min);

    std::vector<cplx> out(static_cast<size_t>(grid.n));
    size_t j = j0;
    const size_t last = sol.c_x.size() - 1;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x_min + grid.dx * i;
        while (j < last && sol.c_x[j + 1] <= x) ++j;
        cplx a, b;
        if (j >= last) {
            a = sol.c1[last];
            b = sol.c2[last];
        } else {
            const double s = (x - sol.c_x[j]) / (sol.c_x[j + 1] - sol.c_x[j]);
            a = sol.c1[j] * (1.0 - s) + sol.c1[j + 1] * s;
            b = sol.c2[j] * (1.0 - s) + sol.c2[j + 1] * s;
        }
        const double p = momentum(model, x, sol.E);
        out[static_cast<size_t>(i)] =
            (a * std::exp(-kI * theta / sol.hbar) + b * std::exp(kI * theta / sol.hbar)) /
            std::sqrt(p) / sol.a_in;
        if (i + 1 < grid.n) theta += gl16(pf, x, x + grid.dx);
    }
    return out;
}

// Inverse-momentum integral from the exit turning point, with the endpoint
// substitution y = x1 + s^2 that removes the 1/sqrt singularity. Within
// delta of the exit point, E - V(y) loses precision to cancellation, so the
// quadratic local model is integrated in closed form instead: with
// a1 = -V'(x1), a2 = -V''(x1),
//   \int_0^u dv / sqrt(2 a1 v + a2 v^2) = sqrt(2u/a1) (1 - a2 u/(12 a1)) + O(u^{5/2}).
double exit_time_integral(const PotentialModel& model, double E, double x1, double q) {
    const double a1 = -model.deriv(x1);
    const double a2 = -richardson_second_derivative(
        [&model](double y) { return model.value(y); }, x1, 1e-4);
    auto local = [&](double u) {
        return std::sqrt(2.0 * u / a1) * (1.0 - a2 * u / (12.0 * a1));
    };
    const double delta = 1e-4;
    if (q <= x1 + delta) return local(q - x1);

    double total = local(delta);
    const double head_end = std::min(q, x1 + 4.0);
    auto head = [&](double s) {
        const double y = x1 + s * s;
        return 2.0 * s / momentum(model, y, E);
    };
    total += integrate_adaptive(head, std::sqrt(delta), std::sqrt(head_end - x1), 1e-11);
    if (q > head_end) {
        total += integrate_adaptive([&](double y) { return 1.0 / momentum(model, y, E); },
                                    head_end, q, 1e-11);
    }
    return total;
}

struct MarchState {
    double S;       // phase function at the current point
    double Sp[5];   // dS/dE at E*, E*+-1e-4, E*+-5e-5
};

double richardson_combine(const double sp[5], double h1, double h2) {
    const double d1 = (sp[1] - sp[2]) / (2.0 * h1);
    const double d2 = (sp[3] - sp[4]) / (2.0 * h2);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace

double WaveField::norm() const {
    double acc = 0.0;
    for (const cplx& v : values) acc += std::norm(v);
    return std::sqrt(dx * acc);
}

double WaveField::peak_abs() const {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
}

WaveField WaveField::zeros(const GridSpec& g, double t, double hbar, std::string meta) {
    WaveField f;
    f.x_min = g.x_min;
    f.dx = g.dx;
    f.n = g.n;
    f.values.assign(static_cast<size_t>(g.n), cplx(0.0, 0.0));
    f.t = t;
    f.hbar = hbar;
    f.meta = std::move(meta);
    return f;
}

WaveField chi_superposition(const PotentialModel& model, const ActionProfile& profile,
                            const DensityParams& params, const SaddleData& saddle,
                            const GridSpec& grid, double t, double hbar) {
    const EnergyWindow win = profile.window();
    const double x1_max = turning_points(model, win.e1).x1;
    if (grid.x_min <= x1_max) {
        std::ostringstream msg;
        msg << "grid start " << grid.x_min << " must lie right of the widest exit point "
            << x1_max;
        throw DomainError(msg.str());
    }

    // Panel count from the largest phase slope |dS/dE| over the window corners
    // and from the node-coverage floor around the saddle.
    const GJModel gj = profile.gj();
    const double x_max = grid.x_min + grid.dx * (grid.n - 1);
    double slope = 0.0;
    for (double e : {win.e1, 0.5 * (win.e1 + win.e2), win.e2}) {
        for (double x : {grid.x_min, x_max}) {
            slope = std::max(slope, std::abs(eikonal_dE(model, gj, x, t, e)));
        }
    }
    const double width = win.e2 - win.e1;
    int panels = static_cast<int>(std::ceil(1.5 * slope * width / hbar / (kPi / 4.0)));
    const double gpp = std::max(params.Gpp(saddle.e_star), 1e-12);
    const double sigma = std::sqrt(hbar / gpp);
    const double covered = std::min(win.e2, saddle.e_star + 6.0 * sigma) -
                           std::max(win.e1, saddle.e_star - 6.0 * sigma);
    if (covered > 0.0) {
        panels = std::max(panels,
                          static_cast<int>(std::ceil(200.0 / 16.0 * width / covered)));
    }
    panels = std::max(panels, 8);
    if (panels > 20000) {
        std::ostringstream msg;
        msg << "superposition would need " << panels
            << " energy panels; reduce t or the window";
        throw ResolutionError(msg.str());
    }

    WaveField field = WaveField::zeros(grid, t, hbar, "chi_superposition");
    const GaussRule& rule = gauss_legendre(16);
    const double h = width / panels;
    for (int k = 0; k < panels; ++k) {
        const double a = win.e1 + h * k;
        for (size_t m = 0; m < rule.x.size(); ++m) {
            const double E = a + 0.5 * h * (rule.x[m] + 1.0);
            const double w = 0.5 * h * rule.w[m];
            const ScatteringSolution sol = solve_stationary(model, E, hbar);
            const std::vector<cplx> psi = psi_on_grid(sol, model, grid);
            const cplx coeff =
                w * q_density(params, E, hbar) * std::exp(-kI * t * E / hbar);
            for (int i = 0; i < grid.n; ++i) {
                field.values[static_cast<size_t>(i)] += coeff * psi[static_cast<size_t>(i)];
            }
        }
    }
    return field;
}

WaveField chi_gauss_infinity(const SaddleData& saddle, const ActionProfile& profile,
                             const DensityParams& params, const GridSpec& grid,
                             double t, double hbar) {
    const ActionDerivs der = derivatives(profile, saddle.e_star);
    const double ks = saddle.k_star;
    const double km = k_minus(profile.model(), saddle.e_star);
    const double kappa_star = profile.kappa(saddle.e_star);
    const cplx z = der.d2alpha_dk2 + kI * (t + der.d2kappa_dk2);
    const double center = ks * (t + der.kappa_p);
    const cplx amp = std::sqrt(2.0 * kPi * hbar * ks * km) *
                     params.P(saddle.e_star, hbar) *
                     std::exp(-saddle.alpha_star / hbar) / std::sqrt(z);

    WaveField field = WaveField::zeros(grid, t, hbar, "chi_gauss_infinity");
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x_min + grid.dx * i;
        const cplx phase =
            std::exp(-kI * (t * saddle.e_star + kappa_star - ks * x) / hbar);
        const double d = x - center;
        field.values[static_cast<size_t>(i)] =
            amp * phase * std::exp(-d * d / (2.0 * hbar * z));
    }
    return field;
}

double chi_gauss_infinity_norm(const SaddleData& saddle, const ActionProfile& profile,
                               const DensityParams& params, double hbar) {
    const ActionDerivs der = derivatives(profile, saddle.e_star);
    const double ks = saddle.k_star;
    const double km = k_minus(profile.model(), saddle.e_star);
    const double p2 = std::norm(params.P(saddle.e_star, hbar));
    const double n2 = 2.0 * kPi * hbar * ks * km * p2 *
                      std::exp(-2.0 * saddle.alpha_star / hbar) *
                      std::sqrt(kPi * hbar / der.d2alpha_dk2);
    return std::sqrt(n2);
}

TrajectoryPoint classical_trajectory(const PotentialModel& model,
                                     const SaddleData& saddle,
                                     const DensityParams& params, double t) {
    const double es = saddle.e_star;
    const double tau = t + rho_dE(model, es) + params.Jp(es);
    if (tau <= 0.0) {
        std::ostringstream msg;
        msg << "trajectory not yet emerged: t = " << t << " is below tau_min = "
            << (t - tau);
        throw NoRoot(msg.str());
    }
    const double x1 = turning_points(model, es).x1;
    auto f = [&](double q) { return exit_time_integral(model, es, x1, q) - tau; };

    // The integral grows at least like (q - x1)/k+, so doubling the offset
    // reaches a sign change quickly.
    double b = x1 + std::max(1.0, k_plus(model, es) * tau);
    int guard = 0;
    while (f(b) < 0.0) {
        b = x1 + 2.0 * (b - x1);
        if (++guard > 60) throw ConvergenceFailure("trajectory bracket expansion failed");
    }
    const std::function<double(double)> df = [&](double q) {
        return 1.0 / momentum(model, q, es);
    };
    const double q = find_root(f, x1 + 1e-12, b, 1e-12, &df);
    return {t, q, momentum(model, q, es)};
}

WaveField chi_mod(const PotentialModel& model, const SaddleData& saddle,
                  const DensityParams& params, const GridSpec& grid, double t,
                  double hbar, double C, double beta) {
    const double x_max = grid.x_min + grid.dx * (grid.n - 1);
    const double bound = C * std::pow(hbar, -beta);
    if (grid.x_min <= 1.0 || x_max >= bound) {
        std::ostringstream msg;
        msg << "chi_mod valid on 1 < x < " << bound << "; grid spans [" << grid.x_min
            << ", " << x_max << "]";
        throw DomainError(msg.str());
    }

    const GJModel gj = params.to_gj();
    const double es = saddle.e_star;
    const double h1 = 1e-4, h2 = 5e-5;
    const double ej[5] = {es, es + h1, es - h1, es + h2, es - h2};

    MarchState st;
    st.S = eikonal(model, gj, grid.x_min, t, es);
    for (int j = 0; j < 5; ++j) st.Sp[j] = eikonal_dE(model, gj, grid.x_min, t, ej[j]);

    const cplx pref = params.P(es, hbar) * std::sqrt(k_minus(model, es)) *
                      std::sqrt(2.0 * kPi * hbar);
    WaveField field = WaveField::zeros(grid, t, hbar, "chi_mod");
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x_min + grid.dx * i;
        const double p = momentum(model, x, es);
        const double spp = richardson_combine(st.Sp, h1, h2);
        const cplx z = saddle.alpha_pp + kI * spp;
        field.values[static_cast<size_t>(i)] =
            pref / std::sqrt(p) / std::sqrt(z) *
            std::exp(-(saddle.alpha_star + kI * st.S) / hbar) *
            std::exp(-st.Sp[0] * st.Sp[0] / (2.0 * hbar * z));
        if (i + 1 < grid.n) {
            st.S -= gl16([&](double y) { return momentum(model, y, es); }, x, x + grid.dx);
            for (int j = 0; j < 5; ++j) {
                st.Sp[j] -=
                    gl16([&](double y) { return 1.0 / momentum(model, y, ej[j]); }, x,
                         x + grid.dx);
            }
        }
    }
    return field;
}

WaveField chi_gauss(const PotentialModel& model, const SaddleData& saddle,
                    const DensityParams& params, const GridSpec& grid, double t,
                    double hbar) {
    const GJModel gj = params.to_gj();
    const double es = saddle.e_star;
    const TrajectoryPoint traj = classical_trajectory(model, saddle, params, t);
    const double spp_q = eikonal_d2E(model, gj, traj.q, es);
    const double p_q = momentum(model, traj.q, es);
    const cplx z = saddle.alpha_pp + kI * spp_q;
    const cplx width = 2.0 * hbar * p_q * p_q * z;
    const cplx pref = params.P(es, hbar) * std::sqrt(k_minus(model, es)) / std::sqrt(p_q) *
                      std::sqrt(2.0 * kPi * hbar) / std::sqrt(z);

    double S = eikonal(model, gj, grid.x_min, t, es);
    WaveField field = WaveField::zeros(grid, t, hbar, "chi_gauss");
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x_min + grid.dx * i;
        const double d = x - traj.q;
        field.values[static_cast<size_t>(i)] =
            pref * std::exp(-(saddle.alpha_star + kI * S) / hbar) *
            std::exp(-d * d / width);
        if (i + 1 < grid.n) {
            S -= gl16([&](double y) { return momentum(model, y, es); }, x, x + grid.dx);
        }
    }
    return field;
}

MomentumStats momentum_stats(const WaveField& field) {
    if (field.n < 16) throw ConfigError("momentum_stats needs at least 16 samples");
    if (field.hbar <= 0.0) throw ConfigError("momentum_stats needs the field's hbar");
    const double peak = field.peak_abs();
    if (peak <= 0.0) throw ConfigError("momentum_stats of an all-zero field");
    const size_t n = field.values.size();
    const double edge = std::max(std::abs(field.values.front()),
                                 std::abs(field.values.back()));
    if (edge > 1e-3 * peak) {
        std::ostringstream msg;
        msg << "field has not decayed at the grid ends: edge/peak = " << edge / peak;
        throw LeakageError(msg.str());
    }

    // Half-cosine ramps over the sub-1e-6 margins remove the residual edge
    // dust so the periodic transform sees a smooth field.
    size_t i_first = 0, i_last = n - 1;
    while (i_first < n && std::abs(field.values[i_first]) <= 1e-6 * peak) ++i_first;
    while (i_last > 0 && std::abs(field.values[i_last]) <= 1e-6 * peak) --i_last;
    std::vector<cplx> v(field.values);
    for (size_t i = 0; i < i_first; ++i) {
        v[i] *= 0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / i_first));
    }
    for (size_t i = i_last + 1; i < n; ++i) {
        v[i] *= 0.5 * (1.0 - std::cos(kPi * static_cast<double>(n - 1 - i) /
                                      (n - 1 - i_last)));
    }
    fft_forward(v);

    double s0 = 0.0, s1 = 0.0;
    for (size_t m = 0; m < n; ++m) {
        const double k = field.hbar * fft_wavenumber(static_cast<int>(m),
                                                     static_cast<int>(n), field.dx);
        const double w = std::norm(v[m]);
        s0 += w;
        s1 += w * k;
    }
    const double mean = s1 / s0;
    double s2 = 0.0;
    for (size_t m = 0; m < n; ++m) {
        const double k = field.hbar * fft_wavenumber(static_cast<int>(m),
                                                     static_cast<int>(n), field.dx);
        const double d = k - mean;
        s2 += std::norm(v[m]) * d * d;
    }
    const double var = s2 / s0;

    // Weighted quadratic fit of log|psi_hat| over the bins above 1e-3 of the
    // spectral peak; the residual vanishes for a Gaussian profile.
    double vmax = 0.0;
    for (const cplx& c : v) vmax = std::max(vmax, std::abs(c));
    double mom[5] = {0, 0, 0, 0, 0};
    double rhs[3] = {0, 0, 0};
    std::vector<std::pair<double, double>> pts; // (u, log|psi_hat|), weight |psi_hat|^2
    std::vector<double> wts;
    for (size_t m = 0; m < n; ++m) {
        const double a = std::abs(v[m]);
        if (a <= 1e-3 * vmax) continue;
        const double k = field.hbar * fft_wavenumber(static_cast<int>(m),
                                                     static_cast<int>(n), field.dx);
        const double u = k - mean;
        const double y = std::log(a);
        const double w = a * a;
        double up = 1.0;
        for (int d = 0; d <= 4; ++d) {
            mom[d] += w * up;
            if (d <= 2) rhs[d] += w * y * up;
            up *= u;
        }
        pts.push_back({u, y});
        wts.push_back(w);
    }
    double m3[3][4] = {{mom[0], mom[1], mom[2], rhs[0]},
                       {mom[1], mom[2], mom[3], rhs[1]},
                       {mom[2], mom[3], mom[4], rhs[2]}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m3[r][col]) > std::abs(m3[piv][col])) piv = r;
        }
        std::swap(m3[col], m3[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col || m3[col][col] == 0.0) continue;
            const double f = m3[r][col] / m3[col][col];
            for (int c = col; c < 4; ++c) m3[r][c] -= f * m3[col][c];
        }
    }
    double coef[3] = {0, 0, 0};
    for (int r = 0; r < 3; ++r) {
        coef[r] = (m3[r][r] != 0.0) ? m3[r][3] / m3[r][r] : 0.0;
    }
    double wsum = 0.0, rsum = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const double u = pts[i].first;
        const double fit = coef[0] + coef[1] * u + coef[2] * u * u;
        const double r = pts[i].second - fit;
        rsum += wts[i] * r * r;
        wsum += wts[i];
    }
    const double residual = (wsum > 0.0) ? std::sqrt(rsum / wsum) : 0.0;
    return {mean, var, residual};
}

} // namespace tw
