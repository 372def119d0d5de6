#include "tunnelwave/density.hpp"

#include <cmath>
#include <sstream>

#include "tunnelwave/quadrature.hpp"

namespace tw {

namespace {

double hermite_k(double E, double v_minus_inf) {
    if (E <= v_minus_inf) throw DomainError("E at or below V(-inf) in momentum map");
    return std::sqrt(2.0 * (E - v_minus_inf));
}

} // namespace

double DensityParams::G(double E) const {
    if (p_kind == PProfile::hermite) {
        const double d = hermite_k(E, v_minus_inf) - hermite_eta;
        return 0.5 * d * d;
    }
    const double u = E - e0;
    return 0.5 * g * u * u + g_cubic * u * u * u;
}

double DensityParams::Gp(double E) const {
    if (p_kind == PProfile::hermite) {
        const double k = hermite_k(E, v_minus_inf);
        return (k - hermite_eta) / k;
    }
    const double u = E - e0;
    return g * u + 3.0 * g_cubic * u * u;
}

double DensityParams::Gpp(double E) const {
    if (p_kind == PProfile::hermite) {
        const double k = hermite_k(E, v_minus_inf);
        return hermite_eta / (k * k * k);
    }
    return g + 6.0 * g_cubic * (E - e0);
}

double DensityParams::J(double E) const {
    if (p_kind == PProfile::hermite) return 0.0;
    double u = E - e0, acc = 0.0, pw = 1.0;
    for (double c : j_coeffs) {
        acc += c * pw;
        pw *= u;
    }
    return acc;
}

double DensityParams::Jp(double E) const {
    if (p_kind == PProfile::hermite) return 0.0;
    double u = E - e0, acc = 0.0, pw = 1.0;
    for (size_t m = 1; m < j_coeffs.size(); ++m) {
        acc += m * j_coeffs[m] * pw;
        pw *= u;
    }
    return acc;
}

std::complex<double> DensityParams::P(double E, double hbar) const {
    switch (p_kind) {
        case PProfile::constant:
            return 1.0;
        case PProfile::smooth:
            if (!p_smooth) throw ConfigError("smooth amplitude profile not set");
            return p_smooth(E, hbar);
        case PProfile::hermite: {
            const double k = hermite_k(E, v_minus_inf);
            double fact = 1.0;
            for (int i = 2; i <= hermite_j; ++i) fact *= i;
            const double norm = std::pow(2.0, -0.5 * hermite_j) / std::sqrt(fact) *
                                std::pow(M_PI, -0.25) * std::pow(hbar, -0.25);
            return norm * hermite_poly(hermite_j, (k - hermite_eta) / std::sqrt(hbar)) /
                   k;
        }
    }
    return 1.0;
}

GJModel DensityParams::to_gj() const {
    GJModel gj;
    gj.G = [*this](double E) { return G(E); };
    gj.Gp = [*this](double E) { return Gp(E); };
    gj.Gpp = [*this](double E) { return Gpp(E); };
    gj.J = [*this](double E) { return J(E); };
    gj.Jp = [*this](double E) { return Jp(E); };
    gj.Jpp = [*this](double E) {
        // Polynomial J: closed-form second derivative; hermite J is zero.
        if (p_kind == PProfile::hermite) return 0.0;
        double u = E - e0, acc = 0.0, pw = 1.0;
        for (size_t m = 2; m < j_coeffs.size(); ++m) {
            acc += m * (m - 1) * j_coeffs[m] * pw;
            pw *= u;
        }
        return acc;
    };
    return gj;
}

void DensityParams::validate() const {
    if (!(window.e1 < window.e2)) throw ConfigError("density window is empty");
    const double zero = p_kind == PProfile::hermite
                            ? 0.5 * hermite_eta * hermite_eta + v_minus_inf
                            : e0;
    if (Gpp(zero) <= 0.0) throw ConfigError("G''(e0) must be positive");
    if (std::abs(G(zero)) > 1e-14) throw ConfigError("G(e0) must vanish");
    const int n = 64;
    const double span = window.e2 - window.e1;
    for (int i = 0; i <= n; ++i) {
        const double e = window.e1 + span * i / n;
        if (std::abs(e - zero) < span / n) continue;
        if (G(e) <= 0.0) {
            std::ostringstream msg;
            msg << "G(" << e << ") = " << G(e) << " is not positive away from e0";
            throw ConfigError(msg.str());
        }
    }
}

DensityParams make_canonical_density() { return DensityParams{}; }

std::complex<double> q_density(const DensityParams& params, double E, double hbar) {
    const std::complex<double> i(0.0, 1.0);
    return std::exp(-params.G(E) / hbar) * std::exp(-i * params.J(E) / hbar) *
           params.P(E, hbar);
}

double hermite_poly(int j, double u) {
    if (j < 0 || j > 8) throw ConfigError("hermite order must be in [0, 8]");
    double h0 = 1.0;
    if (j == 0) return h0;
    double h1 = 2.0 * u;
    for (int n = 1; n < j; ++n) {
        const double h2 = 2.0 * u * h1 - 2.0 * n * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

DensityParams hermite_density(int j, double eta, const PotentialModel& model,
                              const EnergyWindow& window) {
    if (j < 0 || j > 8) throw ConfigError("hermite order must be in [0, 8]");
    const double k1 = hermite_k(window.e1, model.v_minus_inf);
    const double k2 = hermite_k(window.e2, model.v_minus_inf);
    if (eta < k1 || eta > k2) {
        std::ostringstream msg;
        msg << "hermite center eta=" << eta << " outside momentum range [" << k1
            << ", " << k2 << "]";
        throw DomainError(msg.str());
    }
    DensityParams params;
    params.p_kind = PProfile::hermite;
    params.hermite_j = j;
    params.hermite_eta = eta;
    params.v_minus_inf = model.v_minus_inf;
    params.window = window;
    params.e0 = 0.5 * eta * eta + model.v_minus_inf;
    params.g = params.Gpp(params.e0);
    return params;
}

SaddleData find_e_star(const ActionProfile& profile, const DensityParams& params) {
    const PotentialModel& model = profile.model();
    const int n = profile.size();
    double lo = 0, hi = 0;
    bool found = false;
    double ap_first = profile.row(0).alpha_p;
    double ap_last = profile.row(n - 1).alpha_p;
    for (int i = 0; i + 1 < n; ++i) {
        const double a = profile.row(i).alpha_p;
        const double b = profile.row(i + 1).alpha_p;
        if (a < 0.0 && b >= 0.0) { // minimum-type crossing
            lo = profile.nodes()[i];
            hi = profile.nodes()[i + 1];
            found = true;
            break;
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "alpha' has no minimum-type sign change in the window: alpha'("
            << profile.window().e1 << ")~" << ap_first << ", alpha'("
            << profile.window().e2 << ")~" << ap_last;
        throw NoInteriorMinimum(msg.str());
    }
    auto alpha_p_exact = [&](double E) {
        return params.Gp(E) + agmon_action_dE(model, E);
    };
    const double e_star = find_root(alpha_p_exact, lo, hi, 1e-13);
    SaddleData s;
    s.e_star = e_star;
    s.alpha_star = params.G(e_star) + agmon_action(model, e_star);
    s.alpha_pp =
        params.Gpp(e_star) +
        richardson_derivative([&](double e) { return agmon_action_dE(model, e); },
                              e_star, 1e-4);
    s.k_star = k_plus(model, e_star);
    return s;
}

} // namespace tw
