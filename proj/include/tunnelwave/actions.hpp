#pragma once

#include <functional>
#include <vector>

#include "tunnelwave/potential.hpp"

namespace tw {

// Local classical momentum sqrt(2|E - V(x)|), valid on both sides of the
// turning points.
double momentum(const PotentialModel& model, double x, double E);

// Asymptotic momenta sqrt(2(E - V(+-inf))).
double k_plus(const PotentialModel& model, double E);
double k_minus(const PotentialModel& model, double E);

// Barrier integral \int_{x0}^{x1} sqrt(2(V-E)) dy, evaluated with the sine
// substitution that removes the sqrt endpoint vanishing. Relative accuracy
// 1e-10. The loop action K(E) used by ActionProfile is twice this value.
double agmon_action(const PotentialModel& model, double E);

// d/dE of the barrier integral: -\int_{x0}^{x1} dy / sqrt(2(V-E)), with the
// inverse-sqrt endpoints removed by one-sided quadratic substitutions.
double agmon_action_dE(const PotentialModel& model, double E);

struct OmegaRho {
    double omega, rho;
};

// Scattering phase integrals:
//   omega = -\int_{x1}^{inf}(p - k+) - \int_{-inf}^{x0}(p - k-) + k-(x1 - x0)
//   rho   = -\int_{-inf}^{x0}(p - k-) - k- * x0
// Improper tails are truncated where |p - k| < 1e-14 and the declared decay
// bounds the remainder.
OmegaRho omega_rho(const PotentialModel& model, double E);
double omega_dE(const PotentialModel& model, double E);
double rho_dE(const PotentialModel& model, double E);

// Energy weight exponent G and phase J with two derivatives each. The
// density module provides constructors; a zero model gives alpha = K/2 and
// kappa = omega.
struct GJModel {
    std::function<double(double)> G = [](double) { return 0.0; };
    std::function<double(double)> Gp = [](double) { return 0.0; };
    std::function<double(double)> Gpp = [](double) { return 0.0; };
    std::function<double(double)> J = [](double) { return 0.0; };
    std::function<double(double)> Jp = [](double) { return 0.0; };
    std::function<double(double)> Jpp = [](double) { return 0.0; };
};

// Phase function S(x,t,E) = -\int_{x1(E)}^{x} p dy + rho(E) + J(E) + E t for
// x > x1(E); DomainError otherwise.
double eikonal(const PotentialModel& model, const GJModel& gj, double x, double t,
               double E);
// dS/dE = t + rho'(E) + J'(E) - \int_{x1}^{x} dy/p (integrable singularity).
double eikonal_dE(const PotentialModel& model, const GJModel& gj, double x, double t,
                  double E);
// d2S/dE2 by Richardson differences of eikonal_dE, step 1e-4 with one
// extrapolation. Independent of t.
double eikonal_d2E(const PotentialModel& model, const GJModel& gj, double x, double E);

struct ActionDerivs {
    double Kp, Kpp;
    double omega_p, omega_pp;
    double alpha_p, alpha_pp;
    double kappa_p, kappa_pp;
    double d2alpha_dk2, d2kappa_dk2;
};

// Cached action profile over the energy window: Chebyshev nodes with
// barycentric interpolation for cheap smooth lookups; construction
// parallelizes over nodes (worker count from config). K is the loop action
// 2 * agmon_action, alpha = G + K/2, kappa = J + omega.
class ActionProfile {
  public:
    ActionProfile(const PotentialModel& model, const EnergyWindow& window,
                  const GJModel& gj, int nodes = 64, int workers = 1);

    const PotentialModel& model() const { return model_; }
    const EnergyWindow& window() const { return window_; }
    const GJModel& gj() const { return gj_; }

    // Interpolated values at E.
    double K(double E) const;
    double omega(double E) const;
    double rho(double E) const;
    double alpha(double E) const;
    double kappa(double E) const;
    double alpha_p(double E) const; // interpolated first derivative, used for bracketing

    // Tabulated node data, in ascending E order.
    const std::vector<double>& nodes() const { return e_; }
    struct Row {
        double E, K, Kp, Kpp, omega, omega_p, omega_pp, rho, rho_p, rho_pp, alpha,
            alpha_p, alpha_pp, kappa, kappa_p, kappa_pp, k_minus, k_plus;
    };
    Row row(int i) const;
    int size() const { return static_cast<int>(e_.size()); }

  private:
    PotentialModel model_;
    EnergyWindow window_;
    GJModel gj_;
    std::vector<double> e_, w_; // nodes and barycentric weights
    std::vector<double> K_, Kp_, Kpp_, om_, omp_, ompp_, rho_, rhop_, rhopp_;
    double interp(const std::vector<double>& f, double E) const;
};

// Exact derivative bundle at E: first derivatives by direct quadrature,
// second by Richardson differences (steps 1e-4, 5e-5). k-derivatives by the
// chain rule with dE/dk = k at k = k_plus(E).
ActionDerivs derivatives(const ActionProfile& profile, double E);

} // namespace tw
