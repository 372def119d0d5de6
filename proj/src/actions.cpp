#include "tunnelwave/actions.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "tunnelwave/quadrature.hpp"

namespace tw {

double momentum(const PotentialModel& model, double x, double E) {
    return std::sqrt(2.0 * std::abs(E - model.value(x)));
}

double k_plus(const PotentialModel& model, double E) {
    if (E <= model.v_plus_inf) throw DomainError("E at or below V(+inf)");
    return std::sqrt(2.0 * (E - model.v_plus_inf));
}

double k_minus(const PotentialModel& model, double E) {
    if (E <= model.v_minus_inf) throw DomainError("E at or below V(-inf)");
    return std::sqrt(2.0 * (E - model.v_minus_inf));
}

namespace {

constexpr double kQuadTol = 1e-11;

// Outermost |x| beyond which |f(x)| stays under eps, found by doubling.
double find_cut(const std::function<double(double)>& f, double start, double eps) {
    for (double X = start; X <= 5e8; X *= 2) {
        if (std::abs(f(X)) < eps) return X;
    }
    throw QuadratureFailure("asymptotic tail did not reach the truncation threshold");
}

// Improper integral of f from a turning point out to infinity, with the
// sqrt-type kink at the edge removed by y = edge + sign s^2 on the first
// stretch and the tail truncated where |f| < 1e-14. `sign` +1 integrates to
// the right from x1, -1 to the left from x0.
double tail_integral(const std::function<double(double)>& f, double edge, int sign) {
    auto g = [&](double s) { return f(edge + sign * s * s) * 2.0 * s; };
    double total = integrate_adaptive(g, 0.0, 2.0, kQuadTol);
    const double cut = find_cut([&](double X) { return f(sign * X); }, 16.0, 1e-14);
    if (sign > 0)
        total += integrate_adaptive(f, edge + 4.0, cut, kQuadTol);
    else
        total += integrate_adaptive(f, -cut, edge - 4.0, kQuadTol);
    return total;
}

// p - k and 1/p - 1/k written without the sqrt difference, which loses seven
// digits once V is down to 1e-9; these forms are exact identities and stay
// fully accurate in the far tails.
std::function<double(double)> diff_p_k(const PotentialModel& model, double E, double k,
                                       double v_inf) {
    return [&model, E, k, v_inf](double y) {
        const double p = momentum(model, y, E);
        return 2.0 * (v_inf - model.value(y)) / (p + k);
    };
}

std::function<double(double)> diff_inv_p_k(const PotentialModel& model, double E,
                                           double k, double v_inf) {
    return [&model, E, k, v_inf](double y) {
        const double p = momentum(model, y, E);
        return 2.0 * (model.value(y) - v_inf) / (p * k * (p + k));
    };
}

} // namespace

double agmon_action(const PotentialModel& model, double E) {
    const TurningPoints tp = turning_points(model, E);
    const double mid = 0.5 * (tp.x0 + tp.x1);
    const double half = 0.5 * (tp.x1 - tp.x0);
    auto g = [&](double theta) {
        const double y = mid + half * std::sin(theta);
        const double h = 2.0 * (model.value(y) - E);
        return std::sqrt(std::max(h, 0.0)) * half * std::cos(theta);
    };
    return integrate_adaptive(g, -M_PI / 2, M_PI / 2, 1e-11);
}

double agmon_action_dE(const PotentialModel& model, double E) {
    const TurningPoints tp = turning_points(model, E);
    const double mid = 0.5 * (tp.x0 + tp.x1);
    auto piece = [&](double edge, int sign) {
        // y = edge + sign*s^2 removes the 1/sqrt endpoint of 1/sqrt(2(V-E)).
        auto g = [&](double s) {
            const double y = edge + sign * s * s;
            const double h = 2.0 * (model.value(y) - E);
            return 2.0 * s / std::sqrt(std::max(h, 1e-300));
        };
        return integrate_adaptive(g, 0.0, std::sqrt(std::abs(mid - edge)), kQuadTol);
    };
    return -(piece(tp.x0, +1) + piece(tp.x1, -1));
}

OmegaRho omega_rho(const PotentialModel& model, double E) {
    const TurningPoints tp = turning_points(model, E);
    const double km = k_minus(model, E), kp = k_plus(model, E);
    const double i0 = tail_integral(diff_p_k(model, E, km, model.v_minus_inf), tp.x0, -1);
    const double i1 = tail_integral(diff_p_k(model, E, kp, model.v_plus_inf), tp.x1, +1);
    OmegaRho out;
    out.omega = -i0 - i1 + km * (tp.x1 - tp.x0);
    out.rho = -i0 - km * tp.x0;
    return out;
}

double omega_dE(const PotentialModel& model, double E) {
    const TurningPoints tp = turning_points(model, E);
    const double km = k_minus(model, E), kp = k_plus(model, E);
    const double tl =
        tail_integral(diff_inv_p_k(model, E, km, model.v_minus_inf), tp.x0, -1);
    const double tr =
        tail_integral(diff_inv_p_k(model, E, kp, model.v_plus_inf), tp.x1, +1);
    return -tl - tr + (tp.x1 - tp.x0) / km + (km - kp) / model.deriv(tp.x1);
}

double rho_dE(const PotentialModel& model, double E) {
    const TurningPoints tp = turning_points(model, E);
    const double km = k_minus(model, E);
    const double tl =
        tail_integral(diff_inv_p_k(model, E, km, model.v_minus_inf), tp.x0, -1);
    return -tl - tp.x0 / km;
}

namespace {

// \int_{x1}^{x} f(p) dy for x > x1, kink at x1 removed by substitution.
double from_exit_integral(const PotentialModel& model, double E, double x1, double x,
                          const std::function<double(double)>& f) {
    auto g = [&](double s) { return f(momentum(model, x1 + s * s, E)) * 2.0 * s; };
    if (x <= x1 + 4.0) return integrate_adaptive(g, 0.0, std::sqrt(x - x1), kQuadTol);
    double total = integrate_adaptive(g, 0.0, 2.0, kQuadTol);
    auto h = [&](double y) { return f(momentum(model, y, E)); };
    return total + integrate_adaptive(h, x1 + 4.0, x, kQuadTol);
}

} // namespace

double eikonal(const PotentialModel& model, const GJModel& gj, double x, double t,
               double E) {
    const TurningPoints tp = turning_points(model, E);
    if (x <= tp.x1) {
        std::ostringstream msg;
        msg << "phase function needs x > x1(E)=" << tp.x1 << ", got x=" << x;
        throw DomainError(msg.str());
    }
    const double theta =
        from_exit_integral(model, E, tp.x1, x, [](double p) { return p; });
    const OmegaRho wr = omega_rho(model, E);
    return -theta + wr.rho + gj.J(E) + E * t;
}

double eikonal_dE(const PotentialModel& model, const GJModel& gj, double x, double t,
                  double E) {
    const TurningPoints tp = turning_points(model, E);
    if (x <= tp.x1) throw DomainError("phase derivative needs x > x1(E)");
    const double itheta =
        from_exit_integral(model, E, tp.x1, x, [](double p) { return 1.0 / p; });
    return t + rho_dE(model, E) + gj.Jp(E) - itheta;
}

double eikonal_d2E(const PotentialModel& model, const GJModel& gj, double x, double E) {
    auto f = [&](double e) { return eikonal_dE(model, gj, x, 0.0, e); };
    return richardson_derivative(f, E, 1e-4);
}

ActionProfile::ActionProfile(const PotentialModel& model, const EnergyWindow& window,
                             const GJModel& gj, int nodes, int workers)
    : model_(model), window_(window), gj_(gj) {
    if (nodes < 8) throw ConfigError("action profile needs at least 8 nodes");
    if (!(window.e1 < window.e2)) throw ConfigError("energy window is empty");
    const double mid = 0.5 * (window.e1 + window.e2);
    const double half = 0.5 * (window.e2 - window.e1);
    e_.resize(nodes);
    for (int j = 0; j < nodes; ++j)
        e_[j] = mid - half * std::cos(M_PI * (2 * j + 1) / (2.0 * nodes)); // ascending

    // Generic barycentric weights, rescaled against overflow.
    w_.assign(nodes, 1.0);
    const double scale = 2.0 / (e_.back() - e_.front());
    for (int j = 0; j < nodes; ++j)
        for (int i = 0; i < nodes; ++i)
            if (i != j) w_[j] /= (e_[j] - e_[i]) * scale;

    K_.resize(nodes);
    Kp_.resize(nodes);
    Kpp_.resize(nodes);
    om_.resize(nodes);
    omp_.resize(nodes);
    ompp_.resize(nodes);
    rho_.resize(nodes);
    rhop_.resize(nodes);
    rhopp_.resize(nodes);

    auto fill = [&](int j) {
        const double E = e_[j];
        K_[j] = 2.0 * agmon_action(model_, E);
        Kp_[j] = 2.0 * agmon_action_dE(model_, E);
        const OmegaRho wr = omega_rho(model_, E);
        om_[j] = wr.omega;
        rho_[j] = wr.rho;
        omp_[j] = omega_dE(model_, E);
        rhop_[j] = rho_dE(model_, E);
        Kpp_[j] = richardson_derivative(
            [&](double e) { return 2.0 * agmon_action_dE(model_, e); }, E, 1e-4);
        ompp_[j] = richardson_derivative([&](double e) { return omega_dE(model_, e); },
                                         E, 1e-4);
        rhopp_[j] = richardson_derivative([&](double e) { return rho_dE(model_, e); },
                                          E, 1e-4);
    };

    if (workers <= 1) {
        for (int j = 0; j < nodes; ++j) fill(j);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int j = next.fetch_add(1); j < nodes; j = next.fetch_add(1))
                    fill(j);
            });
        for (auto& th : pool) th.join();
    }
}

double ActionProfile::interp(const std::vector<double>& f, double E) const {
    double num = 0, den = 0;
    for (size_t j = 0; j < e_.size(); ++j) {
        const double d = E - e_[j];
        if (std::abs(d) < 1e-14) return f[j];
        const double c = w_[j] / d;
        num += c * f[j];
        den += c;
    }
    return num / den;
}

double ActionProfile::K(double E) const { return interp(K_, E); }
double ActionProfile::omega(double E) const { return interp(om_, E); }
double ActionProfile::rho(double E) const { return interp(rho_, E); }
double ActionProfile::alpha(double E) const { return gj_.G(E) + 0.5 * interp(K_, E); }
double ActionProfile::kappa(double E) const { return gj_.J(E) + interp(om_, E); }
double ActionProfile::alpha_p(double E) const {
    return gj_.Gp(E) + 0.5 * interp(Kp_, E);
}

ActionProfile::Row ActionProfile::row(int i) const {
    Row r;
    const double E = e_[i];
    r.E = E;
    r.K = K_[i];
    r.Kp = Kp_[i];
    r.Kpp = Kpp_[i];
    r.omega = om_[i];
    r.omega_p = omp_[i];
    r.omega_pp = ompp_[i];
    r.rho = rho_[i];
    r.rho_p = rhop_[i];
    r.rho_pp = rhopp_[i];
    r.alpha = gj_.G(E) + 0.5 * K_[i];
    r.alpha_p = gj_.Gp(E) + 0.5 * Kp_[i];
    r.alpha_pp = gj_.Gpp(E) + 0.5 * Kpp_[i];
    r.kappa = gj_.J(E) + om_[i];
    r.kappa_p = gj_.Jp(E) + omp_[i];
    r.kappa_pp = gj_.Jpp(E) + ompp_[i];
    r.k_minus = k_minus(model_, E);
    r.k_plus = k_plus(model_, E);
    return r;
}

ActionDerivs derivatives(const ActionProfile& profile, double E) {
    const PotentialModel& model = profile.model();
    const GJModel& gj = profile.gj();
    ActionDerivs d;
    d.Kp = 2.0 * agmon_action_dE(model, E);
    d.Kpp = richardson_derivative(
        [&](double e) { return 2.0 * agmon_action_dE(model, e); }, E, 1e-4);
    d.omega_p = omega_dE(model, E);
    d.omega_pp =
        richardson_derivative([&](double e) { return omega_dE(model, e); }, E, 1e-4);
    d.alpha_p = gj.Gp(E) + 0.5 * d.Kp;
    d.alpha_pp = gj.Gpp(E) + 0.5 * d.Kpp;
    d.kappa_p = gj.Jp(E) + d.omega_p;
    d.kappa_pp = gj.Jpp(E) + d.omega_pp;
    const double k = k_plus(model, E);
    d.d2alpha_dk2 = d.alpha_pp * k * k + d.alpha_p;
    d.d2kappa_dk2 = d.kappa_pp * k * k + d.kappa_p;
    return d;
}

} // namespace tw
