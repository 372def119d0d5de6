#include <doctest.h>

#include <cmath>

#include "tunnelwave/actions.hpp"
#include "tunnelwave/density.hpp"
#include "tunnelwave/quadrature.hpp"

using namespace tw;

namespace {
const PotentialModel kEckart = make_eckart();
const EnergyWindow kWindow{0.7, 0.9};
} // namespace

TEST_CASE("barrier integral matches closed form pi sqrt(2) (1 - sqrt(E))") {
    struct Case {
        double E, W;
    };
    const Case cases[] = {
        {0.5, 1.3012902845685730086},  {0.7, 0.72570038123099601087},
        {0.8, 0.46904763183992575324}, {0.82, 0.41968132529000936809},
        {0.9, 0.22799409953393041112},
    };
    for (const Case& c : cases) {
        CHECK(agmon_action(kEckart, c.E) == doctest::Approx(c.W).epsilon(1e-10));
        const double closed = M_PI * std::sqrt(2.0) * (1.0 - std::sqrt(c.E));
        CHECK(agmon_action(kEckart, c.E) == doctest::Approx(closed).epsilon(1e-10));
    }
}

TEST_CASE("barrier integral derivative: quadrature vs closed form") {
    // d/dE of pi sqrt(2) (1 - sqrt(E)) is -pi/(sqrt(2) sqrt(E))
    CHECK(agmon_action_dE(kEckart, 0.8) ==
          doctest::Approx(-2.4836470664490253086).epsilon(1e-10));
    for (double E : {0.55, 0.72, 0.88}) {
        const double closed = -M_PI / (std::sqrt(2.0) * std::sqrt(E));
        CHECK(agmon_action_dE(kEckart, E) == doctest::Approx(closed).epsilon(1e-9));
    }
}

TEST_CASE("barrier integral derivative consistent with finite differences") {
    const PotentialModel gauss = make_gaussian_bump(1.0, 0.9);
    const double E = 0.6, h = 1e-5;
    const double fd =
        (agmon_action(gauss, E + h) - agmon_action(gauss, E - h)) / (2 * h);
    CHECK(agmon_action_dE(gauss, E) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("phase integrals omega and rho against frozen values") {
    const OmegaRho wr = omega_rho(kEckart, 0.8);
    CHECK(wr.omega == doctest::Approx(2.3296786608068720173).epsilon(1e-10));
    CHECK(wr.rho == doctest::Approx(1.1648393304034360086).epsilon(1e-10));
    CHECK(omega_dE(kEckart, 0.8) ==
          doctest::Approx(-1.095961922146706501).epsilon(1e-9));
    CHECK(rho_dE(kEckart, 0.8) ==
          doctest::Approx(-0.54798096107335325051).epsilon(1e-9));
}

TEST_CASE("symmetric barrier: rho is half of omega") {
    for (double E : {0.72, 0.8, 0.88}) {
        const OmegaRho wr = omega_rho(kEckart, E);
        CHECK(wr.rho == doctest::Approx(wr.omega / 2).epsilon(1e-10));
        CHECK(rho_dE(kEckart, E) ==
              doctest::Approx(omega_dE(kEckart, E) / 2).epsilon(1e-9));
    }
}

TEST_CASE("phase integral derivatives consistent with finite differences") {
    const double E = 0.8, h = 1e-5;
    const double om_fd =
        (omega_rho(kEckart, E + h).omega - omega_rho(kEckart, E - h).omega) / (2 * h);
    CHECK(omega_dE(kEckart, E) == doctest::Approx(om_fd).epsilon(1e-6));
    const double rho_fd =
        (omega_rho(kEckart, E + h).rho - omega_rho(kEckart, E - h).rho) / (2 * h);
    CHECK(rho_dE(kEckart, E) == doctest::Approx(rho_fd).epsilon(1e-6));
}

TEST_CASE("eikonal phase and its energy derivatives") {
    const GJModel gj; // zero weight model
    const double E = 0.8, x = 5.0, t = 2.0;
    // S(x,t,E) = -\int_{x1}^{x} p + rho + E t
    const double theta = integrate_adaptive(
        [&](double s) {
            const double y = turning_points(kEckart, E).x1 + s * s;
            return momentum(kEckart, y, E) * 2.0 * s;
        },
        0.0, std::sqrt(x - turning_points(kEckart, E).x1), 1e-11);
    const double expect = -theta + omega_rho(kEckart, E).rho + E * t;
    CHECK(eikonal(kEckart, gj, x, t, E) == doctest::Approx(expect).epsilon(1e-10));

    // t enters linearly with unit coefficient
    const double s0 = eikonal(kEckart, gj, x, 0.0, E);
    const double s1 = eikonal(kEckart, gj, x, 3.0, E);
    CHECK(s1 - s0 == doctest::Approx(3.0 * E).epsilon(1e-12));

    // dS/dE by finite differences
    const double h = 1e-5;
    const double fd =
        (eikonal(kEckart, gj, x, t, E + h) - eikonal(kEckart, gj, x, t, E - h)) /
        (2 * h);
    CHECK(eikonal_dE(kEckart, gj, x, t, E) == doctest::Approx(fd).epsilon(1e-6));

    // d2S/dE2 is independent of t by construction
    const double d2 = eikonal_d2E(kEckart, gj, x, E);
    const double fd2 = (eikonal_dE(kEckart, gj, x, t, E + h) -
                        eikonal_dE(kEckart, gj, x, t, E - h)) /
                       (2 * h);
    CHECK(d2 == doctest::Approx(fd2).epsilon(1e-5));
    CHECK_THROWS_AS(eikonal(kEckart, gj, 0.0, 0.0, E), DomainError);
}

TEST_CASE("action profile interpolates node quantities smoothly") {
    const GJModel gj;
    const ActionProfile profile(kEckart, kWindow, gj, 24);
    CHECK(profile.size() == 24);
    for (double E : {0.73, 0.8, 0.87}) {
        CHECK(profile.K(E) == doctest::Approx(2 * agmon_action(kEckart, E)).epsilon(1e-9));
        CHECK(profile.omega(E) ==
              doctest::Approx(omega_rho(kEckart, E).omega).epsilon(1e-9));
        CHECK(profile.rho(E) ==
              doctest::Approx(omega_rho(kEckart, E).rho).epsilon(1e-9));
        CHECK(profile.alpha(E) == doctest::Approx(agmon_action(kEckart, E)).epsilon(1e-9));
        CHECK(profile.kappa(E) == doctest::Approx(profile.omega(E)).epsilon(1e-12));
    }
    // node rows are ordered and internally consistent
    for (int i = 0; i + 1 < profile.size(); ++i)
        CHECK(profile.nodes()[i] < profile.nodes()[i + 1]);
    const ActionProfile::Row row = profile.row(profile.size() / 2);
    CHECK(row.alpha == doctest::Approx(row.K / 2).epsilon(1e-13));
    CHECK(row.kappa == doctest::Approx(row.omega).epsilon(1e-13));
    CHECK(row.k_minus == doctest::Approx(std::sqrt(2 * row.E)).epsilon(1e-13));
}

TEST_CASE("parallel profile construction matches serial") {
    const GJModel gj;
    const ActionProfile serial(kEckart, kWindow, gj, 12, 1);
    const ActionProfile parallel(kEckart, kWindow, gj, 12, 4);
    for (int i = 0; i < serial.size(); ++i) {
        CHECK(serial.row(i).K == doctest::Approx(parallel.row(i).K).epsilon(1e-14));
        CHECK(serial.row(i).omega_p ==
              doctest::Approx(parallel.row(i).omega_p).epsilon(1e-14));
    }
}

TEST_CASE("derivative bundle: chain rule to momentum variable") {
    const DensityParams params = make_canonical_density();
    const ActionProfile profile(kEckart, kWindow, params.to_gj(), 24);
    const double estar = 0.85985480594640397548;
    const ActionDerivs d = derivatives(profile, estar);
    CHECK(d.alpha_p == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(d.alpha_pp == doctest::Approx(31.393051572093814241).epsilon(1e-6));
    CHECK(d.d2alpha_dk2 == doctest::Approx(53.986932535176357793).epsilon(1e-6));
    CHECK(d.d2kappa_dk2 == doctest::Approx(-10.882388524423197655).epsilon(1e-6));
    CHECK(d.kappa_p == doctest::Approx(-1.3833432887013303744).epsilon(1e-8));
}

TEST_CASE("gauss bump profile: no closed form, internal consistency only") {
    const PotentialModel gauss = make_gaussian_bump(1.0, 0.9);
    const EnergyWindow window{0.5, 0.7};
    const GJModel gj;
    const ActionProfile profile(gauss, window, gj, 16);
    const double E = 0.6;
    CHECK(profile.K(E) == doctest::Approx(2 * agmon_action(gauss, E)).epsilon(1e-8));
    const OmegaRho wr = omega_rho(gauss, E);
    CHECK(wr.rho == doctest::Approx(wr.omega / 2).epsilon(1e-9)); // symmetric
    const double h = 1e-5;
    const double om_fd =
        (omega_rho(gauss, E + h).omega - omega_rho(gauss, E - h).omega) / (2 * h);
    CHECK(omega_dE(gauss, E) == doctest::Approx(om_fd).epsilon(1e-6));
}
