#pragma once

#include <utility>
#include <vector>

#include "tunnelwave/packets.hpp"

namespace tw {

struct GaugeResult {
    double raw_err = 0;      // ||ref - approx|| / ||ref||
    double gauged_err = 0;   // after the optimal global phase and time shift
    double phase_offset = 0; // phase by which approx leads ref
    double time_offset = 0;  // free-propagation time aligning approx with ref
};

// L2 comparison on a common grid. Grids must agree exactly or approx must
// cover ref's span, in which case approx is resampled by band-limited
// interpolation; GridMismatch otherwise. With fit_gauge the error is
// minimized over one global phase and one time offset (free spectral
// propagator), searched by coarse scan plus golden-section refinement.
GaugeResult l2_compare(const WaveField& ref, const WaveField& approx, bool fit_gauge,
                       double time_search_halfwidth = 4.0);

// Windowed-sinc resampling of a well-oversampled field onto the target grid.
// Norm-preserving to 1e-10 for band-limited inputs.
WaveField resample_to(const WaveField& src, const GridSpec& target);

struct ScalingFit {
    double slope, intercept, r2;
};

// Least-squares fit of log(err) against log(hbar); needs >= 4 points
// (InsufficientData otherwise).
ScalingFit scaling_study(const std::vector<std::pair<double, double>>& hbar_err);

} // namespace tw
