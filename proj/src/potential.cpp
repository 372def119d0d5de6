#include "tunnelwave/potential.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "tunnelwave/quadrature.hpp"

namespace tw {

double PotentialModel::value(double x) const {
    switch (kind) {
        case PotentialKind::eckart: {
            const double c = std::cosh(a * x);
            return v0 / (c * c);
        }
        case PotentialKind::gaussian_bump: {
            const double u = a * x;
            return v0 * std::exp(-u * u);
        }
        case PotentialKind::rational: {
            double denom = 1.0, base = 1.0 + x * x;
            for (int i = 0; i < m; ++i) denom *= base;
            return v0 / denom;
        }
        case PotentialKind::custom:
            return custom_v(x);
    }
    return 0.0;
}

double PotentialModel::deriv(double x) const {
    switch (kind) {
        case PotentialKind::eckart: {
            const double c = std::cosh(a * x);
            return -2.0 * a * v0 * std::tanh(a * x) / (c * c);
        }
        case PotentialKind::gaussian_bump: {
            const double u = a * x;
            return -2.0 * a * u * v0 * std::exp(-u * u);
        }
        case PotentialKind::rational: {
            double denom = 1.0, base = 1.0 + x * x;
            for (int i = 0; i <= m; ++i) denom *= base;
            return -2.0 * m * x * v0 / denom;
        }
        case PotentialKind::custom:
            return custom_vp(x);
    }
    return 0.0;
}

bool PotentialModel::symmetric() const {
    for (double x : {0.37, 1.13, 2.91, 6.4}) {
        const double l = value(-x), r = value(x);
        if (std::abs(l - r) > 1e-12 * std::max(1.0, std::abs(r))) return false;
    }
    return v_minus_inf == v_plus_inf;
}

std::string PotentialModel::describe() const {
    std::ostringstream s;
    switch (kind) {
        case PotentialKind::eckart:
            s << "eckart(v0=" << v0 << ", a=" << a << ")";
            break;
        case PotentialKind::gaussian_bump:
            s << "gaussian_bump(v0=" << v0 << ", a=" << a << ")";
            break;
        case PotentialKind::rational:
            s << "rational(v0=" << v0 << ", m=" << m << ")";
            break;
        case PotentialKind::custom:
            s << "custom(v-=" << v_minus_inf << ", v+=" << v_plus_inf << ", nu=" << nu
              << ")";
            break;
    }
    return s.str();
}

PotentialModel make_eckart(double v0, double a) {
    PotentialModel p;
    p.kind = PotentialKind::eckart;
    p.v0 = v0;
    p.a = a;
    p.nu = 1e9; // exponential decay beats any declared power
    p.barrier_top = v0;
    return p;
}

PotentialModel make_gaussian_bump(double v0, double a) {
    PotentialModel p;
    p.kind = PotentialKind::gaussian_bump;
    p.v0 = v0;
    p.a = a;
    p.nu = 1e9;
    p.barrier_top = v0;
    return p;
}

PotentialModel make_rational(double v0, int m) {
    if (m < 1) throw ConfigError("rational barrier needs exponent m >= 1");
    PotentialModel p;
    p.kind = PotentialKind::rational;
    p.v0 = v0;
    p.m = m;
    p.nu = 2.0 * m - 2.0;
    p.barrier_top = v0;
    return p;
}

PotentialModel make_custom(std::function<double(double)> v,
                           std::function<double(double)> vp, double v_minus_inf,
                           double v_plus_inf, double nu, double barrier_top) {
    if (!v || !vp) throw ConfigError("custom barrier needs V and V' callables");
    PotentialModel p;
    p.kind = PotentialKind::custom;
    p.custom_v = std::move(v);
    p.custom_vp = std::move(vp);
    p.v_minus_inf = v_minus_inf;
    p.v_plus_inf = v_plus_inf;
    p.nu = nu;
    p.barrier_top = barrier_top;
    return p;
}

namespace {

// Sign-change brackets of V - E on a uniform scan grid.
std::vector<std::pair<double, double>> scan_brackets(const PotentialModel& model,
                                                     double E, double lo, double hi,
                                                     int n) {
    std::vector<std::pair<double, double>> brackets;
    double xp = lo, fp = model.value(lo) - E;
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double f = model.value(x) - E;
        if (fp == 0.0) fp = (f > 0) ? -1e-300 : 1e-300; // nudge exact zeros
        if ((f > 0) != (fp > 0)) brackets.emplace_back(xp, x);
        xp = x;
        fp = f;
    }
    return brackets;
}

double refine_root(const PotentialModel& model, double E, double lo, double hi) {
    auto f = [&](double x) { return model.value(x) - E; };
    std::function<double(double)> df = [&](double x) { return model.deriv(x); };
    double x = find_root(f, lo, hi, 1e-14, &df);
    if (std::abs(f(x)) > 1e-12 * std::max(std::abs(E), 1e-3))
        throw ConvergenceFailure("turning point residual above tolerance");
    return x;
}

} // namespace

ValidityReport verify_hypotheses(const PotentialModel& model, const EnergyWindow& window,
                                 double strip_alpha) {
    ValidityReport rep;
    std::ostringstream detail;
    detail << model.describe() << ", window [" << window.e1 << ", " << window.e2
           << "], declared analyticity strip half-width " << strip_alpha << ". ";

    // Declared decay: log-log slope of |V - V(+-inf)| over |x| in [10, 1e4]
    // must not exceed -(2 + nu). Samples that underflow count as decayed.
    rep.decay_ok = true;
    for (int side = 0; side < 2; ++side) {
        const double sign = side == 0 ? -1.0 : 1.0;
        const double vinf = side == 0 ? model.v_minus_inf : model.v_plus_inf;
        std::vector<double> lx, ly;
        bool underflow = false;
        for (int i = 0; i <= 12; ++i) {
            const double x = 10.0 * std::pow(10.0, 3.0 * i / 12.0);
            const double d = std::abs(model.value(sign * x) - vinf);
            if (d < 1e-280) {
                underflow = true;
                break;
            }
            lx.push_back(std::log(x));
            ly.push_back(std::log(d));
        }
        if (underflow) continue; // faster than any power law
        const LineFit fit = fit_line(lx, ly);
        const double required = -(2.0 + std::min(model.nu, 1e6));
        if (fit.slope > required + 0.05) {
            rep.decay_ok = false;
            detail << (side == 0 ? "left" : "right") << " tail slope " << fit.slope
                   << " misses declared " << required << ". ";
        }
    }

    // Exactly two simple crossings of V = E across the window.
    rep.two_zeros_ok = true;
    rep.simple_zeros_ok = true;
    for (double E : {window.e1, 0.5 * (window.e1 + window.e2), window.e2}) {
        auto brackets = scan_brackets(model, E, -10.0, 10.0, 2048);
        if (brackets.size() != 2) {
            rep.two_zeros_ok = false;
            detail << "V=E at E=" << E << " has " << brackets.size()
                   << " crossings, expected 2. ";
            continue;
        }
        for (auto& [lo, hi] : brackets) {
            const double x = refine_root(model, E, lo, hi);
            if (std::abs(model.deriv(x)) < 1e-8) {
                rep.simple_zeros_ok = false;
                detail << "degenerate crossing near x=" << x << " at E=" << E << ". ";
            }
        }
    }

    rep.window_below_top = window.e1 < window.e2 && window.e2 < model.barrier_top;
    if (!rep.window_below_top) detail << "window not strictly below the barrier top. ";

    rep.asymptotics_below_window =
        std::max(model.v_minus_inf, model.v_plus_inf) < window.e1;
    if (!rep.asymptotics_below_window)
        detail << "asymptotic levels not strictly below the window. ";

    rep.detail = detail.str();
    return rep;
}

TurningPoints turning_points(const PotentialModel& model, double E) {
    auto brackets = scan_brackets(model, E, -10.0, 10.0, 2048);
    if (brackets.size() != 2) {
        std::ostringstream msg;
        msg << "expected 2 crossings of V=E at E=" << E << ", found " << brackets.size();
        throw NoTurningPoints(msg.str());
    }
    TurningPoints tp;
    tp.x0 = refine_root(model, E, brackets[0].first, brackets[0].second);
    tp.x1 = refine_root(model, E, brackets[1].first, brackets[1].second);
    return tp;
}

} // namespace tw
