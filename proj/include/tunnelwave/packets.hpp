#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tunnelwave/actions.hpp"
#include "tunnelwave/density.hpp"
#include "tunnelwave/scattering.hpp"

namespace tw {

struct GridSpec {
    double x_min = 0;
    double dx = 0;
    int n = 0;
};

struct WaveField {
    double x_min = 0, dx = 0;
    int n = 0;
    std::vector<cplx> values;
    double t = 0;
    double hbar = 0;
    std::string meta;

    double x(int i) const { return x_min + dx * i; }
    double x_max() const { return x_min + dx * (n - 1); }
    double norm() const;  // sqrt(dx sum |v|^2)
    double peak_abs() const;

    static WaveField zeros(const GridSpec& g, double t, double hbar, std::string meta);
};

// Superposition over the window: integral of Q(E,hbar) e^{-i t E/hbar}
// psi(x,E,hbar) dE with psi from solve_stationary, on Gauss-Legendre panels
// fine enough that the oscillatory phase advances < pi/4 per panel and at
// least 200 nodes cover +-6 sqrt(hbar/g) around e_star. Panel sums are
// accumulated in a fixed order. The grid must lie right of max x1 over the
// window.
WaveField chi_superposition(const PotentialModel& model, const ActionProfile& profile,
                            const DensityParams& params, const SaddleData& saddle,
                            const GridSpec& grid, double t, double hbar);

// Closed-form transmitted Gaussian for asymptotic times.
WaveField chi_gauss_infinity(const SaddleData& saddle, const ActionProfile& profile,
                             const DensityParams& params, const GridSpec& grid,
                             double t, double hbar);

// Closed-form L2 norm of chi_gauss_infinity.
double chi_gauss_infinity_norm(const SaddleData& saddle, const ActionProfile& profile,
                               const DensityParams& params, double hbar);

struct TrajectoryPoint {
    double t, q, qdot;
};

// q_t solves \int_{x1(e*)}^{q} dy/p(y,e*) = t + rho'(e*) + J'(e*); monotone
// bracketing plus Newton. NoRoot below tau_min = -(rho' + J').
TrajectoryPoint classical_trajectory(const PotentialModel& model,
                                     const SaddleData& saddle,
                                     const DensityParams& params, double t);

// Moderate-distance form with exact phase S and the S'-Gaussian. Valid for
// 1 < x < C hbar^{-beta}; DomainError outside.
WaveField chi_mod(const PotentialModel& model, const SaddleData& saddle,
                  const DensityParams& params, const GridSpec& grid, double t,
                  double hbar, double C = 10.0, double beta = 0.25);

// Trajectory-centered Gaussian of the corollary: same phase exponential,
// envelope width p(q_t)^2 (alpha'' + i S''(q_t)).
WaveField chi_gauss(const PotentialModel& model, const SaddleData& saddle,
                    const DensityParams& params, const GridSpec& grid, double t,
                    double hbar);

struct MomentumStats {
    double mean_k, var_k, gauss_fit_residual;
};

// Fourier-side statistics of a localized field: mean/variance of |psi_hat|^2
// over physical momentum hbar*kappa, and the weighted residual of a
// quadratic fit to log|psi_hat| (Gaussianity measure). The field must have
// decayed below 1e-3 of its peak at both grid ends (LeakageError); a cosine
// taper is applied where |field| > 1e-6 peak before the transform.
MomentumStats momentum_stats(const WaveField& field);

} // namespace tw
