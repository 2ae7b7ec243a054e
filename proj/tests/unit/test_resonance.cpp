#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "boundwave/errors.hpp"
#include "boundwave/resonance.hpp"

using namespace boundwave;
using basis::BindingBasis;
using basis::MirrorConfig;
using resonance::cplx;

TEST_SUITE("resonance") {

TEST_CASE("lifetimes")
{
    CHECK(resonance::lifetime({29.0, -0.0089}) == doctest::Approx(56.18).epsilon(1e-4));
    CHECK(resonance::lifetime({1.0, -0.5}) == doctest::Approx(1.0));
    CHECK(resonance::lifetime({1.0, -5e-4}) == doctest::Approx(1000.0));
    CHECK_THROWS_AS(resonance::lifetime({1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(resonance::lifetime({1.0, 0.2}), DomainError);
}

TEST_CASE("argument checks")
{
    const auto b = BindingBasis::harmonic(5.0, 2);
    const MirrorConfig m{1.0, 1.0};
    CHECK_THROWS_AS(resonance::build_scaled_hamiltonian(b, m, std::numbers::pi / 4.0, 10.0, 100), DomainError);
    CHECK_THROWS_AS(resonance::build_scaled_hamiltonian(b, m, -0.1, 10.0, 100), DomainError);
    CHECK_THROWS_AS(resonance::build_scaled_hamiltonian(b, m, 0.1, 10.0, 99), DomainError);
    CHECK_THROWS_AS(resonance::build_scaled_hamiltonian(BindingBasis::hardwall(1.0, 2), m, 0.1, 10.0, 100),
                    DomainError);
    CHECK_THROWS_AS(resonance::build_scaled_hamiltonian(b, m, 0.1, 10.0, 100, {0, 2}), DomainError);

    const auto big = resonance::build_scaled_hamiltonian(BindingBasis::harmonic(5.0, 3), m, 0.1, 10.0, 200);
    CHECK_THROWS_AS(resonance::complex_spectrum(big, 500), CapacityError);
    CHECK_THROWS_AS(resonance::find_resonances(b, m, {0.1}, 10.0, 100, 1e-3), DomainError);
}

TEST_CASE("unrotated matrix is Hermitian")
{
    const auto b = BindingBasis::harmonic(5.0, 4);
    const auto H = resonance::build_scaled_hamiltonian(b, MirrorConfig{0.0, 30.0}, 0.0, 16.0, 120);
    CHECK(H.H.rows() == 480);
    CHECK((H.H - H.H.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    const auto eig = resonance::complex_spectrum(H);
    CHECK(eig.size() == 480u);
    double worst = 0.0;
    for (cplx e : eig)
        worst = std::max(worst, std::abs(e.imag()));
    CHECK(worst < 1e-10);

    const auto R = resonance::build_scaled_hamiltonian(b, MirrorConfig{0.0, 30.0}, 0.1, 16.0, 120);
    CHECK((R.H - R.H.adjoint()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("continued coupling at zero angle equals the real table")
{
    const auto b = BindingBasis::harmonic(5.0, 8);
    const MirrorConfig m{3.0, 17.0};
    for (double x : {-1.7, -0.2, 0.0, 0.55, 2.4})
        CHECK((basis::coupling_matrix(b, m, cplx(x, 0.0)) - basis::coupling_matrix(b, m, x).cast<cplx>())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
}

TEST_CASE("free box ladder")
{
    const auto b = BindingBasis::harmonic(5.0, 3);
    const double L = 10.0;
    const int N = 150;
    const auto H = resonance::build_scaled_hamiltonian(b, MirrorConfig{}, 0.0, L, N);
    auto eig = resonance::complex_spectrum(H);
    std::vector<double> got, want;
    for (cplx e : eig)
        got.push_back(e.real());
    for (int n = 0; n < 3; ++n)
        for (int m = 1; m <= N; ++m)
            want.push_back(b.eigenenergy(n) + std::pow(std::numbers::pi * m / L, 2));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("free continua rotate by -2 theta")
{
    const auto b = BindingBasis::harmonic(5.0, 4);
    for (double theta : {0.1, 0.2, 0.35}) {
        const auto H = resonance::build_scaled_hamiltonian(b, MirrorConfig{}, theta, 16.0, 300);
        const auto eig = resonance::complex_spectrum(H);
        CHECK(resonance::median_ray_deviation(eig, H.thresholds, theta) < 0.02);
        const auto cls = resonance::classify_continuum(eig, H.thresholds, theta);
        CHECK(cls.candidates.empty());
        CHECK(cls.continuum.size() == eig.size());
    }
}

TEST_CASE("parity sectors")
{
    CHECK(resonance::parity_sector(8, 0) == std::vector<int>{0, 2, 4, 6});
    CHECK(resonance::parity_sector(7, 1) == std::vector<int>{1, 3, 5});
}

TEST_CASE("no resonances without a mirror")
{
    const auto b = BindingBasis::harmonic(5.0, 4);
    const auto scan = resonance::find_resonances(b, MirrorConfig{}, {0.1, 0.15}, 16.0, 150, 1e-3);
    CHECK(scan.resonances.empty());
    for (const auto& s : scan.spectra)
        CHECK(s.candidates.empty());
}

TEST_CASE("symmetric even sector: stable, narrow, tolerance-robust")
{
    const auto b = BindingBasis::harmonic(5.0, 8);
    const MirrorConfig m{30.0, 30.0};
    resonance::ScanOptions opts;
    opts.channels = resonance::parity_sector(8, 0);
    const double L = 36.0 / std::sqrt(5.0);
    const auto scan = resonance::find_resonances(b, m, {0.1, 0.15}, L, 300, 1e-3, opts);
    REQUIRE_FALSE(scan.resonances.empty());
    for (const auto& r : scan.resonances) {
        CHECK(r.E.imag() < 0.0);
        CHECK(r.tau > 0.0);
        CHECK(r.stability < 1e-3);
        CHECK(r.E.real() > r.threshold_below);
    }

    // halving the angular tolerance keeps the stable set
    opts.angle_tol = 0.025;
    const auto finer = resonance::find_resonances(b, m, {0.1, 0.15}, L, 300, 1e-3, opts);
    REQUIRE(finer.resonances.size() == scan.resonances.size());
    for (std::size_t i = 0; i < scan.resonances.size(); ++i)
        CHECK(std::abs(finer.resonances[i].E - scan.resonances[i].E) < 1e-12);
}

}
