#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "boundwave/basis.hpp"
#include "boundwave/errors.hpp"
#include "boundwave/resonance.hpp"
#include "boundwave/wkb.hpp"

using namespace boundwave;

namespace {

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = lo + (hi - lo) * i / (n - 1);
    return x;
}

}  // namespace

TEST_SUITE("wkb") {

TEST_CASE("exact curves are the 2x2 eigenvalues")
{
    const double omega = 0.1, v = 10.0;
    const auto b = basis::BindingBasis::harmonic(omega, 3);
    const basis::MirrorConfig m{v, v};
    const auto x = linspace(-12.0, 12.0, 241);
    const auto c = wkb::adiabatic_potentials(omega, v, x);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto V = basis::coupling_matrix(b, m, x[i]);
        Eigen::Matrix2d h;
        h << b.eigenenergy(0) + V(0, 0), V(0, 2), V(2, 0), b.eigenenergy(2) + V(2, 2);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
        worst = std::max(worst, std::abs(es.eigenvalues()(0) - c.v_minus[i]));
        worst = std::max(worst, std::abs(es.eigenvalues()(1) - c.v_plus[i]));
        CHECK(c.v_minus[i] <= c.v_plus[i]);
    }
    CHECK(worst < 1e-12 * 20.0);
}

TEST_CASE("bare thresholds far from the mirror")
{
    const double omega = 5.0;
    const auto c = wkb::adiabatic_potentials(omega, 30.0, {-40.0, 40.0});
    for (int i = 0; i < 2; ++i) {
        CHECK(c.v_minus[i] == doctest::Approx(omega).epsilon(1e-12));
        CHECK(c.v_plus[i] == doctest::Approx(5.0 * omega).epsilon(1e-12));
    }
    CHECK_THROWS_AS(wkb::adiabatic_potentials(omega, 0.0, {0.0}), DomainError);
    CHECK_THROWS_AS(wkb::adiabatic_potentials(omega, -1.0, {0.0}), DomainError);
}

TEST_CASE("asymptotic forms")
{
    const auto a = wkb::asymptotic_potentials(0.1, 10.0, {0.0, 1e4});
    CHECK(a.v_minus[0] == doctest::Approx(0.3666666666666667).epsilon(1e-12));
    CHECK(a.v_plus[0] == doctest::Approx(10.7047446969166270).epsilon(1e-12));
    CHECK(a.v_minus[1] == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(a.v_plus[1] == 0.0);
}

TEST_CASE("double well above, single shallow well below")
{
    const auto x = linspace(-12.0, 12.0, 1201);
    const auto c = wkb::adiabatic_potentials(0.1, 10.0, x);
    const auto plus = wkb::local_minima(c.v_plus);
    const auto minus = wkb::local_minima(c.v_minus);
    REQUIRE(plus.size() == 2);
    CHECK(x[plus[0]] == doctest::Approx(-x[plus[1]]));
    REQUIRE(minus.size() == 1);
    CHECK(std::abs(x[minus[0]]) < 1e-12);
}

TEST_CASE("resonance estimate structure")
{
    CHECK(wkb::strong_mirror(0.1, 10.0));
    CHECK_FALSE(wkb::strong_mirror(5.0, 15.0));
    const auto e = wkb::resonance_estimate(0.1, 10.0);
    CHECK(e.v_min == doctest::Approx(3.7947331922020552).epsilon(1e-12));
    CHECK(e.regime_ok);
    CHECK(e.e_sym.imag() < 0.0);
    CHECK(e.e_sym.imag() == e.e_anti.imag());
    const wkb::cplx split = e.e_sym - e.e_anti;
    CHECK(split.imag() == 0.0);
    CHECK(split.real() > 0.0);
    CHECK(split.real() == doctest::Approx(2.0 * e.omega_level / std::numbers::pi * std::exp(-e.alpha)));
    CHECK(e.omega_level == doctest::Approx(2.14 * std::pow(0.1, 0.75) * std::sqrt(10.0)));
    CHECK_FALSE(wkb::resonance_estimate(5.0, 15.0).regime_ok);
}

TEST_CASE("well constants from the asymptotic curve")
{
    for (const auto& [omega, v] : {std::pair{0.1, 10.0}, std::pair{5.0, 30.0}, std::pair{2.0, 300.0}}) {
        const auto r = wkb::validate_constants(omega, v);
        CHECK(r.u_star == doctest::Approx(0.79289321881345248).epsilon(1e-8));
        CHECK(r.x_star == doctest::Approx(std::sqrt(r.u_star / omega)).epsilon(1e-8));
        CHECK(r.depth_coefficient == doctest::Approx(1.19647936633897701).epsilon(1e-8));
        CHECK(r.stiffness_coefficient == doctest::Approx(2.14024158923502681).epsilon(1e-5));
        CHECK(std::abs(r.depth_coefficient - 1.20) < 0.01);
        CHECK(std::abs(r.stiffness_coefficient - 2.14) < 0.02);
    }
}

TEST_CASE("asymptotic curve matches the exact one in the well region")
{
    for (double omega : {0.1, 1.0, 5.0}) {
        const double v = 100.0 * std::sqrt(omega);
        const double xs = wkb::validate_constants(omega, v).x_star;
        const auto x = linspace(-2.0 * xs, 2.0 * xs, 801);
        const auto c = wkb::adiabatic_potentials(omega, v, x);
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            worst = std::max(worst, std::abs(c.v_plus[i] - c.v_plus_asym[i]) / c.v_plus[i]);
        CHECK(worst < 0.05);
    }
}

TEST_CASE("estimated width against complex scaling of the {0, 2} model")
{
    // nearest theta-stable pole to the estimate's real part
    const double omega = 0.1, v = 10.0;
    const auto e = wkb::resonance_estimate(omega, v);
    resonance::ScanOptions opts;
    opts.channels = {0, 2};
    const auto scan = resonance::find_resonances(basis::BindingBasis::harmonic(omega, 3), basis::MirrorConfig{v, v},
                                                 {0.3, 0.35}, 36.0 / std::sqrt(omega), 400, 1e-3, opts);
    REQUIRE_FALSE(scan.resonances.empty());
    const auto near = std::min_element(scan.resonances.begin(), scan.resonances.end(), [&](auto& a, auto& b) {
        return std::abs(a.E.real() - e.e_sym.real()) < std::abs(b.E.real() - e.e_sym.real());
    });
    const double ratio = e.e_sym.imag() / near->E.imag();
    CHECK(ratio > 1.0 / 3.0);
    CHECK(ratio < 3.0);
}

TEST_CASE("local minima helper")
{
    CHECK(wkb::local_minima({3.0, 1.0, 2.0, 0.5, 4.0}) == std::vector<std::size_t>{1, 3});
    CHECK(wkb::local_minima({1.0, 2.0, 3.0}).empty());
}

}
