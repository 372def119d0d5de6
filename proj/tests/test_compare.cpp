#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "tunnelwave/compare.hpp"
#include "tunnelwave/errors.hpp"
#include "tunnelwave/fft.hpp"
#include "tunnelwave/packets.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;
using cd = std::complex<double>;

// Gaussian packet exp(i k0 x / hbar) exp(-(x-x0)^2 / (4 sigma^2)), normalized.
tw::WaveField gaussian_field(double x_min, double dx, int n, double hbar, double x0,
                             double sigma, double k0) {
    tw::WaveField f;
    f.x_min = x_min;
    f.dx = dx;
    f.n = n;
    f.hbar = hbar;
    f.values.resize(static_cast<size_t>(n));
    const double amp = std::pow(2.0 * kPi * sigma * sigma, -0.25);
    for (int j = 0; j < n; ++j) {
        const double x = f.x(j);
        const double d = x - x0;
        f.values[static_cast<size_t>(j)] =
            amp * std::exp(cd(-d * d / (4.0 * sigma * sigma), k0 * x / hbar));
    }
    return f;
}

// Exact free evolution by t: diagonal phase in k-space.
tw::WaveField free_propagate(const tw::WaveField& f, double t) {
    tw::WaveField out = f;
    tw::fft_forward(out.values);
    for (int m = 0; m < out.n; ++m) {
        const double kappa = tw::fft_wavenumber(m, out.n, out.dx);
        out.values[static_cast<size_t>(m)] *=
            std::polar(1.0 / out.n, -0.5 * out.hbar * kappa * kappa * t);
    }
    tw::fft_backward(out.values);
    out.t += t;
    return out;
}

} // namespace

TEST_CASE("identical fields compare at zero error") {
    const tw::WaveField f = gaussian_field(-20.0, 40.0 / 2048, 2048, 1.0 / 16, -5.0, 1.5, 1.2);
    const tw::GaugeResult r = tw::l2_compare(f, f, true);
    CHECK(r.raw_err == 0.0);
    CHECK(r.gauged_err <= 1e-12);
    CHECK(std::abs(r.phase_offset) < 1e-10);
    CHECK(std::abs(r.time_offset) < 1e-10);
}

TEST_CASE("a global phase is recovered exactly") {
    const tw::WaveField f = gaussian_field(-20.0, 40.0 / 2048, 2048, 1.0 / 16, -5.0, 1.5, 1.2);
    const double theta = 0.7;
    tw::WaveField g = f;
    for (auto& v : g.values) v *= std::polar(1.0, theta);

    const tw::GaugeResult raw = tw::l2_compare(f, g, false);
    CHECK(raw.raw_err > 0.5); // the raw distance sees the phase

    const tw::GaugeResult r = tw::l2_compare(f, g, true);
    CHECK(r.gauged_err <= 1e-12);
    CHECK(std::abs(r.phase_offset - theta) < 1e-10);
}

TEST_CASE("a free-propagation time offset is recovered") {
    const tw::WaveField f = gaussian_field(-20.0, 40.0 / 2048, 2048, 1.0 / 16, -5.0, 1.5, 1.2);
    const tw::WaveField g = free_propagate(f, -0.8); // approx lags ref by 0.8

    const tw::GaugeResult r = tw::l2_compare(f, g, true);
    CHECK(r.gauged_err <= 1e-11);
    CHECK(std::abs(r.time_offset - 0.8) < 1e-9);
    CHECK(std::abs(r.phase_offset) < 1e-7);
}

TEST_CASE("the gauged distance is symmetric between the two fields") {
    const tw::WaveField a = gaussian_field(-20.0, 40.0 / 2048, 2048, 1.0 / 16, -6.0, 1.5, 1.2);
    tw::WaveField b = gaussian_field(-20.0, 40.0 / 2048, 2048, 1.0 / 16, -4.5, 1.8, 1.35);
    for (auto& v : b.values) v *= 1.7; // distinct norms exercise the identity

    const double na = a.norm(), nb = b.norm();
    const tw::GaugeResult ab = tw::l2_compare(a, b, true);
    const tw::GaugeResult ba = tw::l2_compare(b, a, true);
    // Both products equal the absolute gauged minimum, symmetric because the
    // gauge family is a group of unitaries.
    CHECK(ab.gauged_err * na == doctest::Approx(ba.gauged_err * nb).epsilon(1e-12));
    CHECK(ab.gauged_err < ab.raw_err + 1e-15);
}

TEST_CASE("resampling preserves the norm of a band-limited field") {
    const tw::WaveField src = gaussian_field(-20.0, 40.0 / 4096, 4096, 1.0 / 16, -2.0, 1.5, 1.2);
    const tw::GridSpec target{-18.0, 36.0 / 5000, 5000};
    const tw::WaveField out = tw::resample_to(src, target);
    CHECK(out.norm() / src.norm() == doctest::Approx(1.0).epsilon(1e-10));

    // Pointwise agreement with the closed form on the new nodes.
    const double amp = std::pow(2.0 * kPi * 1.5 * 1.5, -0.25);
    double worst = 0.0;
    for (int j = 0; j < out.n; ++j) {
        const double x = out.x(j);
        const double d = x + 2.0;
        const cd exact = amp * std::exp(cd(-d * d / 9.0, 1.2 * x * 16.0));
        worst = std::max(worst, std::abs(out.values[static_cast<size_t>(j)] - exact));
    }
    CHECK(worst < 1e-10 * amp);
}

TEST_CASE("comparison across different grids resamples transparently") {
    const tw::WaveField a = gaussian_field(-20.0, 40.0 / 4096, 4096, 1.0 / 16, -2.0, 1.5, 1.2);
    const tw::WaveField b = gaussian_field(-21.0, 42.0 / 4096, 4096, 1.0 / 16, -2.0, 1.5, 1.2);
    const tw::GaugeResult r = tw::l2_compare(a, b, false);
    CHECK(r.raw_err < 1e-9);
}

TEST_CASE("a target grid outside the source span is rejected") {
    const tw::WaveField src = gaussian_field(-20.0, 40.0 / 1024, 1024, 1.0 / 16, -2.0, 1.5, 1.2);
    CHECK_THROWS_AS(tw::resample_to(src, tw::GridSpec{-30.0, 0.05, 100}), tw::GridMismatch);
    CHECK_THROWS_AS(tw::resample_to(src, tw::GridSpec{15.0, 0.1, 100}), tw::GridMismatch);

    tw::WaveField other = src;
    other.hbar = 1.0 / 32;
    CHECK_THROWS_AS(tw::l2_compare(src, other, false), tw::GridMismatch);
}

TEST_CASE("scaling fits recover exact power laws") {
    std::vector<std::pair<double, double>> pts;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 24, 1.0 / 32, 1.0 / 48})
        pts.emplace_back(h, h);
    tw::ScalingFit fit = tw::scaling_study(pts);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

    for (auto& [h, e] : pts) e = 3.0 * std::pow(h, 0.75);
    fit = tw::scaling_study(pts);
    CHECK(fit.slope == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    for (auto& [h, e] : pts) e = 0.37;
    fit = tw::scaling_study(pts);
    CHECK(std::abs(fit.slope) < 1e-12);
}

TEST_CASE("scaling fit input guards") {
    std::vector<std::pair<double, double>> pts = {{0.5, 0.1}, {0.25, 0.05}, {0.125, 0.02}};
    CHECK_THROWS_AS(tw::scaling_study(pts), tw::InsufficientData);
    pts.emplace_back(0.0625, 0.0);
    CHECK_THROWS_AS(tw::scaling_study(pts), tw::DomainError);
    pts.back() = {0.5, 0.01}; // duplicate hbar values leave no spread? they do; use equal xs
    std::vector<std::pair<double, double>> flat(4, {0.25, 0.1});
    CHECK_THROWS_AS(tw::scaling_study(flat), tw::DomainError);
}
