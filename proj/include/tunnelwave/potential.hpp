#pragma once

#include <functional>
#include <string>

#include "tunnelwave/errors.hpp"

namespace tw {

enum class PotentialKind { eckart, gaussian_bump, rational, custom };

// Analytic single-bump barrier. Immutable after construction; evaluation is
// pure and thread-safe. `nu` is the declared algebraic decay exponent
// (|V - V(inf)| <= C/|x|^{2+nu}); exponentially decaying kinds may declare
// any nu. `custom` requires a closed-form derivative.
struct PotentialModel {
    PotentialKind kind = PotentialKind::eckart;
    double v0 = 1.0;
    double a = 1.0;
    int m = 1; // rational exponent
    double v_minus_inf = 0.0;
    double v_plus_inf = 0.0;
    double nu = 8.0;
    double barrier_top = 1.0;
    std::function<double(double)> custom_v;
    std::function<double(double)> custom_vp;

    double value(double x) const;
    double deriv(double x) const;
    bool symmetric() const;
    std::string describe() const;
};

PotentialModel make_eckart(double v0 = 1.0, double a = 1.0);
PotentialModel make_gaussian_bump(double v0, double a);
PotentialModel make_rational(double v0, int m);
PotentialModel make_custom(std::function<double(double)> v,
                           std::function<double(double)> vp, double v_minus_inf,
                           double v_plus_inf, double nu, double barrier_top);

struct EnergyWindow {
    double e1, e2;
};

struct ValidityReport {
    bool decay_ok = false;
    bool two_zeros_ok = false;
    bool simple_zeros_ok = false;
    bool window_below_top = false;
    bool asymptotics_below_window = false;
    std::string detail;
    bool all_ok() const {
        return decay_ok && two_zeros_ok && simple_zeros_ok && window_below_top &&
               asymptotics_below_window;
    }
};

// Numerical checks of the standing hypotheses: declared decay rate on a
// log-log sample over |x| in [10, 1e4], exactly two simple sign changes of
// V - E for E in {e1, mid, e2}, and window placement between the asymptotic
// values and the barrier top. Violations are reported, not thrown.
ValidityReport verify_hypotheses(const PotentialModel& model, const EnergyWindow& window,
                                 double strip_alpha);

struct TurningPoints {
    double x0, x1;
};

// Roots of V(x) = E bracketing the forbidden region, located by a 2048-point
// scan over [-10, 10] refined with bisection plus a few Newton steps.
// Residual |V(xi) - E| <= 1e-12 * |E|.
TurningPoints turning_points(const PotentialModel& model, double E);

} // namespace tw
