#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "tunnelwave/actions.hpp"
#include "tunnelwave/potential.hpp"

namespace tw {

enum class PProfile { constant, smooth, hermite };

// Energy weight Q(E,hbar) = exp(-G/hbar) exp(-i J/hbar) P(E,hbar).
// Polynomial form: G = g (E-e0)^2/2 + g_cubic (E-e0)^3, J given by
// coefficients in (E-e0). The hermite profile replaces G and J with the
// push-forward of a Hermite momentum profile through k = k(E).
struct DensityParams {
    double g = 30.0;
    double e0 = 0.78;
    double g_cubic = 0.0;
    std::vector<double> j_coeffs; // J = sum j_coeffs[m] (E-e0)^m
    PProfile p_kind = PProfile::constant;
    std::function<std::complex<double>(double, double)> p_smooth; // (E, hbar)
    int hermite_j = 0;
    double hermite_eta = 0.0;
    double v_minus_inf = 0.0; // for k(E) in hermite mode
    EnergyWindow window{0.7, 0.9};

    double G(double E) const;
    double Gp(double E) const;
    double Gpp(double E) const;
    double J(double E) const;
    double Jp(double E) const;
    std::complex<double> P(double E, double hbar) const;
    GJModel to_gj() const;

    // (C1)-(C3) checks: G >= 0 with unique zero at e0, G''(e0) > 0. Throws
    // ConfigError on violation.
    void validate() const;
};

DensityParams make_canonical_density();

std::complex<double> q_density(const DensityParams& params, double E, double hbar);

// Physicists' Hermite polynomial H_j, j <= 8.
double hermite_poly(int j, double u);

// Density whose momentum profile is the normalized Hermite packet
// 2^{-j/2} (j!)^{-1/2} pi^{-1/4} hbar^{-1/4} H_j((k-eta)/sqrt(hbar))
//   * exp(-(k-eta)^2 / 2 hbar),
// pushed to the energy axis with Jacobian dk/dE = 1/k. DomainError if eta is
// outside the window's momentum range.
DensityParams hermite_density(int j, double eta, const PotentialModel& model,
                              const EnergyWindow& window);

struct SaddleData {
    double e_star;    // interior minimizer of alpha = G + K/2
    double alpha_star;
    double alpha_pp;
    double k_star;    // k_plus(e_star)
};

// Bracketed root finding on alpha'(E): the profile's cached derivative
// locates the sign change, direct quadrature refines it to an interval of
// width 1e-13. NoInteriorMinimum when alpha' does not change sign inside
// the window.
SaddleData find_e_star(const ActionProfile& profile, const DensityParams& params);

} // namespace tw
