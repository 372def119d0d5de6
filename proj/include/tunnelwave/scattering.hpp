#pragma once

#include <complex>
#include <vector>

#include "tunnelwave/actions.hpp"
#include "tunnelwave/density.hpp"
#include "tunnelwave/potential.hpp"

namespace tw {

using cplx = std::complex<double>;

enum class Integrator { numerov, rk };

// Grid request for the stationary solve. The integrator picks its own fine
// step; psi and the frame coefficients are stored at n_store uniform
// locations. x_left/x_right of 0 means auto-placement where
// |V - V(+-inf)| < 1e-13.
struct StationaryGrid {
    double x_left = 0.0;
    double x_right = 0.0;
    int n_store = 1024;
    double h = 0.0; // 0: choose from the phase-error target
};

// One stationary solve at (E, hbar), boundary data an outgoing wave on the
// right. zeta holds the incoming-normalized eigenfunction psi (unit incoming
// plane-wave amplitude after dividing by the incoming coefficient). The
// frame coefficients c (right side) and d (left side) follow the boundary
// normalization c2(x_right) = 1.
struct ScatteringSolution {
    double E = 0, hbar = 0;
    double x_left = 0, dx_store = 0;
    std::vector<cplx> zeta; // normalized psi at the store grid

    std::vector<double> c_x, d_x;      // sample abscissas of the two frames
    std::vector<cplx> c1, c2, d1, d2;  // boundary-normalized coefficients
    std::vector<double> c_theta;       // phase integral from x1 at c_x
    cplx a_in = 1.0;                   // incoming normalizer (c-convention / psi)
    cplx t_amp = 0, r_amp = 0;         // flux-normalized amplitudes
    double x0 = 0, x1 = 0;             // turning points

    // Normalized psi at arbitrary x right of the first c sample, using the
    // slowly varying coefficients plus an exact local phase integral.
    cplx psi_at(const PotentialModel& model, double x) const;
};

ScatteringSolution solve_stationary(const PotentialModel& model, double E, double hbar,
                                    const StationaryGrid& grid = {},
                                    Integrator method = Integrator::numerov);

// | |t| e^{K/2hbar} sqrt(k+/k-) - 1 |: deviation of the computed
// transmission from the leading connection-formula value; O(hbar).
double connection_defect(const PotentialModel& model, double E, double hbar);

// 1 + i hbar \int_x^inf (dp/dy)^2 / (8 p^3) dy: first correction to the
// right-side coefficient c2(x) relative to its value at +inf.
cplx next_order_correction(const PotentialModel& model, double x, double E,
                           double hbar);

// Weighted stationary transmission \int |Q|^2 |t|^2 dE / \int |Q|^2 dE over
// the window, for the TDSE cross-check.
double stationary_transmission_average(const PotentialModel& model,
                                       const DensityParams& params, double hbar,
                                       int n_nodes = 64);

} // namespace tw
