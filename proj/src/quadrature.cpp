#include "tunnelwave/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "tunnelwave/errors.hpp"

namespace tw {

namespace {

GaussRule compute_rule(int order) {
    // Newton on P_n with the three-term recurrence; nodes seeded by the
    // Chebyshev-like asymptotic angles.
    GaussRule rule;
    rule.x.resize(order);
    rule.w.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.x[i] = -x;
        rule.w[i] = w;
        rule.x[order - 1 - i] = x;
        rule.w[order - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double width = (b - a) / panels;
    double total = 0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        double acc = 0;
        for (int i = 0; i < order; ++i) acc += rule.w[i] * f(mid + 0.5 * width * rule.x[i]);
        total += acc * 0.5 * width;
    }
    return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_panels) {
    if (a == b) return 0.0;
    double prev = integrate_panels(f, a, b, 1);
    for (int panels = 2; panels <= max_panels; panels *= 2) {
        double cur = integrate_panels(f, a, b, panels);
        double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    std::ostringstream msg;
    msg << "quadrature did not settle to rel_tol=" << rel_tol << " on [" << a << ", "
        << b << "] within " << max_panels << " panels";
    throw QuadratureFailure(msg.str());
}

double richardson_derivative(const std::function<double(double)>& f, double x, double h) {
    auto diff = [&](double step) { return (f(x + step) - f(x - step)) / (2 * step); };
    const double d1 = diff(h);
    const double d2 = diff(h / 2);
    return (4 * d2 - d1) / 3;
}

double richardson_second_derivative(const std::function<double(double)>& f, double x,
                                    double h) {
    auto diff2 = [&](double step) {
        return (f(x + step) - 2 * f(x) + f(x - step)) / (step * step);
    };
    const double d1 = diff2(h);
    const double d2 = diff2(h / 2);
    return (4 * d2 - d1) / 3;
}

double find_root(const std::function<double(double)>& f, double a, double b,
                 double x_tol, const std::function<double(double)>* df) {
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if ((fa > 0) == (fb > 0)) {
        std::ostringstream msg;
        msg << "no sign change on [" << a << ", " << b << "]: f(a)=" << fa
            << " f(b)=" << fb;
        throw NoRoot(msg.str());
    }
    while (b - a > x_tol) {
        double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break; // step below double resolution
        double fm = f(mid);
        if (fm == 0) {
            a = b = mid;
            break;
        }
        if ((fm > 0) == (fa > 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    double x = 0.5 * (a + b);
    if (df) {
        for (int i = 0; i < 5; ++i) {
            double d = (*df)(x);
            if (d == 0) break;
            double step = f(x) / d;
            double nx = x - step;
            if (nx < a || nx > b) break; // keep the bracket
            x = nx;
            if (std::abs(step) < x_tol * 1e-3) break;
        }
    }
    return x;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientData("line fit needs at least 2 matched points");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw InsufficientData("line fit with degenerate abscissas");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

} // namespace tw
