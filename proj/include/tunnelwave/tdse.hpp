#pragma once

#include <string>
#include <vector>

#include "tunnelwave/density.hpp"
#include "tunnelwave/packets.hpp"
#include "tunnelwave/potential.hpp"

namespace tw {

// Grid and evolution parameters. Invariants: dx = 2L/n at least 5 points
// per shortest wavelength 2 pi hbar / k_max (2.5x Nyquist headroom),
// dt <= dx/(4 k_max). Times are wall-clock from launch; fields carry the
// matching superposition time t0 + tau so approximants can be evaluated at
// a field's own t.
struct SimulationConfig {
    double L = 300.0;
    int n = 1 << 16;
    double dt = 0.0; // 0: use the dt invariant bound
    double t_final = 150.0;
    double hbar = 1.0 / 32;
    double x_c = -120.0;
    EnergyWindow window{0.7, 0.9}; // sets k_max and the transmitted cut
    std::string absorber = "none"; // or "cosine"
    double absorber_width = 0.0;
    double absorber_strength = 0.0;
    std::vector<double> snapshot_times; // wall clock; final time always kept
    double placement_tol = 1e-12; // barrier-overlap fraction of the norm
    double buffer_tol = 1e-8;     // separation threshold vs transmitted peak
    int norm_check_stride = 1000;
};

// Launch-time superposition: Psi at superposition time t0 = x_c / k-(e0),
// synthesized in momentum space as Q(E(k)) * (dE/dk) * e^{-i t0 E/hbar} over
// the window's momentum range, then brought to the grid by Gauss-Legendre
// panels in k. The returned field has t = t0. PlacementError if the packet
// overlaps the barrier region beyond placement_tol of its norm.
WaveField synthesize_initial(const PotentialModel& model, const DensityParams& params,
                             double hbar, const SimulationConfig& config);

struct EvolutionTrace {
    std::vector<WaveField> snapshots;
    std::vector<double> norm_history;        // per step, after the step
    std::vector<double> transmitted_history; // norm restricted to x > x1(e2)+2
    double dt = 0;
    int steps = 0;
    double t0 = 0;
    double transmitted_cut = 0;
};

// Strang splitting: half potential phase, full kinetic step in Fourier
// space, half potential phase. Unitary up to roundoff without absorber;
// StabilityError if the norm drifts by more than 1e-9.
EvolutionTrace evolve(const PotentialModel& model, const WaveField& initial,
                      const SimulationConfig& config);

// Final-time transmitted component: requires |Psi| below buffer_tol times
// the transmitted peak throughout the buffer [x1(e2)+1, x1(e2)+2]
// (NotSeparated otherwise); returns the field right of the buffer with a
// cosine taper across it.
WaveField extract_transmitted(const EvolutionTrace& trace, const PotentialModel& model,
                              const EnergyWindow& window, double buffer_tol = 1e-8);

} // namespace tw
