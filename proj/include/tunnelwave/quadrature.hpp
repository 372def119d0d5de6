#pragma once

#include <functional>
#include <vector>

namespace tw {

// Gauss-Legendre nodes/weights on [-1,1]. Computed once per order by Newton
// iteration on the Legendre polynomial; cached thread-safely.
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int order);

// Integrate f over [a,b] with a fixed panel count, Gauss-Legendre per panel.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, int order = 16);

// Adaptive composite: doubles the panel count until two refinements agree to
// rel_tol (relative to the larger scale of the two). Throws QuadratureFailure
// if max_panels is exceeded.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_panels = 1 << 16);

// Richardson-extrapolated central difference: (4 D(h/2) - D(h)) / 3 with
// D(h) the symmetric difference quotient. Error O(h^4) when f is C^5.
double richardson_derivative(const std::function<double(double)>& f, double x, double h);

// Same extrapolation for the second derivative from central second
// differences.
double richardson_second_derivative(const std::function<double(double)>& f, double x,
                                    double h);

// Bracketed root finding: bisection until the interval shrinks below x_tol,
// optionally polished by Newton when df is supplied. Requires a sign change
// on [a,b]; throws NoRoot otherwise.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double x_tol,
                 const std::function<double(double)>* df = nullptr);

// Least-squares line fit y = slope*x + intercept; r2 is the coefficient of
// determination. Throws InsufficientData for fewer than 2 points.
struct LineFit {
    double slope, intercept, r2;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace tw
