#include <doctest.h>

#include <cmath>

#include "tunnelwave/density.hpp"

using namespace tw;

namespace {
const PotentialModel kEckart = make_eckart();
const EnergyWindow kWindow{0.7, 0.9};
} // namespace

TEST_CASE("canonical weight: values and saddle data") {
    const DensityParams params = make_canonical_density();
    params.validate();
    CHECK(params.G(0.78) == doctest::Approx(0.0));
    CHECK(params.Gpp(0.8) == doctest::Approx(30.0));
    CHECK(params.J(0.8) == doctest::Approx(0.0));
    CHECK(std::abs(q_density(params, 0.8, 1.0 / 32)) ==
          doctest::Approx(0.82530686849168238665).epsilon(1e-12));

    const ActionProfile profile(kEckart, kWindow, params.to_gj(), 32);
    const SaddleData s = find_e_star(profile, params);
    CHECK(s.e_star == doctest::Approx(0.85985480594640397548).epsilon(1e-10));
    CHECK(s.alpha_star == doctest::Approx(0.41872246839345758723).epsilon(1e-10));
    CHECK(s.alpha_pp == doctest::Approx(31.393051572093814241).epsilon(1e-6));
    CHECK(s.k_star == doctest::Approx(1.3113769907592583466).epsilon(1e-10));
}

TEST_CASE("phase coefficients enter the weight as a pure phase") {
    DensityParams params = make_canonical_density();
    params.j_coeffs = {0.0, 0.5, -1.25};
    const double u = 0.82 - 0.78;
    CHECK(params.J(0.82) == doctest::Approx(0.5 * u - 1.25 * u * u).epsilon(1e-14));
    CHECK(params.Jp(0.82) == doctest::Approx(0.5 - 2.5 * u).epsilon(1e-14));
    const auto q0 = q_density(make_canonical_density(), 0.82, 1.0 / 16);
    const auto q1 = q_density(params, 0.82, 1.0 / 16);
    CHECK(std::abs(q1) == doctest::Approx(std::abs(q0)).epsilon(1e-13));
    CHECK(std::arg(q1) == doctest::Approx(-params.J(0.82) * 16).epsilon(1e-12));
}

TEST_CASE("weight validation rejects broken configurations") {
    DensityParams negative = make_canonical_density();
    negative.g = -3.0;
    CHECK_THROWS_AS(negative.validate(), ConfigError);

    DensityParams doublezero = make_canonical_density();
    doublezero.g = 1.0;
    doublezero.g_cubic = -40.0; // second zero of G inside the window
    CHECK_THROWS_AS(doublezero.validate(), ConfigError);
}

TEST_CASE("saddle disappears when the weight is too shallow") {
    // alpha' = G' + K'/2 stays negative across the window for small G''
    DensityParams params = make_canonical_density();
    params.g = 1.0;
    const ActionProfile profile(kEckart, kWindow, params.to_gj(), 16);
    CHECK_THROWS_AS(find_e_star(profile, params), NoInteriorMinimum);
}

TEST_CASE("hermite polynomials") {
    CHECK(hermite_poly(0, 0.3) == doctest::Approx(1.0));
    CHECK(hermite_poly(1, 0.3) == doctest::Approx(0.6));
    CHECK(hermite_poly(2, 0.3) == doctest::Approx(4 * 0.09 - 2).epsilon(1e-13));
    CHECK(hermite_poly(3, -0.7) ==
          doctest::Approx(8 * std::pow(-0.7, 3) - 12 * (-0.7)).epsilon(1e-13));
    CHECK_THROWS_AS(hermite_poly(9, 0.0), ConfigError);
    CHECK_THROWS_AS(hermite_poly(-1, 0.0), ConfigError);
}

TEST_CASE("hermite profile pushes to the energy axis") {
    const double eta = 1.2489995996796796412; // k at E = 0.78
    const DensityParams hd = hermite_density(1, eta, kEckart, kWindow);
    hd.validate();
    CHECK(hd.G(0.78) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hd.Gpp(0.78) == doctest::Approx(0.64102564102564102564).epsilon(1e-10));
    CHECK(hd.J(0.8) == doctest::Approx(0.0));
    // H_1 vanishes at k = eta, so the amplitude profile has a node at e0
    CHECK(std::abs(hd.P(0.78, 1.0 / 16)) < 1e-10);
    // full weight equals the momentum profile divided by k (Jacobian dk/dE)
    const double E = 0.8, hb = 1.0 / 16;
    const double k = std::sqrt(2 * E);
    const double u = (k - eta) / std::sqrt(hb);
    const double momentum_profile = std::pow(2.0, -0.5) * std::pow(M_PI, -0.25) *
                                    std::pow(hb, -0.25) * hermite_poly(1, u) *
                                    std::exp(-0.5 * u * u);
    CHECK(std::abs(q_density(hd, E, hb)) ==
          doctest::Approx(std::abs(momentum_profile) / k).epsilon(1e-12));
    CHECK_THROWS_AS(hermite_density(1, 0.4, kEckart, kWindow), DomainError);
    CHECK_THROWS_AS(hermite_density(12, eta, kEckart, kWindow), ConfigError);
}

TEST_CASE("no interior saddle for the hermite-pushed weight on this window") {
    // G'' ~ 0.64 is far below the ~2.4 needed to turn alpha' positive by 0.9
    const double eta = 1.2489995996796796412;
    const DensityParams hd = hermite_density(0, eta, kEckart, kWindow);
    const ActionProfile profile(kEckart, kWindow, hd.to_gj(), 16);
    CHECK_THROWS_AS(find_e_star(profile, hd), NoInteriorMinimum);
}
