#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "boundwave/errors.hpp"
#include "boundwave/evolution.hpp"
#include "boundwave/observables.hpp"

using namespace boundwave;
using basis::BindingBasis;
using basis::MirrorConfig;
using evolution::Propagator;
using evolution::WavepacketSpec;
using cplx = std::complex<double>;

namespace {

// Free packet under i f_t = -f_xx from (2/(pi s^2))^{1/4} e^{iPx - (x-x0)^2/s^2}.
cplx free_packet(double x, double t, const WavepacketSpec& s)
{
    const double a = 1.0 / (s.sigma * s.sigma);
    const cplx d(1.0, 4.0 * a * t);
    const double u = x - s.x0;
    const cplx num = -a * u * u + cplx(0.0, s.P * u) - cplx(0.0, s.P * s.P * t);
    return std::pow(2.0 / (std::numbers::pi * s.sigma * s.sigma), 0.25) / std::sqrt(d) * std::exp(num / d) *
           std::exp(cplx(0.0, s.P * s.x0));
}

double mean_x(const evolution::ChannelField& f, const SpatialGrid& g)
{
    return observables::moments(f, g).mean_x;
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("grid layout")
{
    const SpatialGrid g(80.0, 1024);
    CHECK(g.dx() == 80.0 / 1024);
    CHECK(g.x()[512] == 0.0);
    CHECK(g.x()[0] == -40.0);
    CHECK(g.k_max() * g.dx() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    CHECK_THROWS_AS(SpatialGrid(80.0, 1000), DomainError);
    CHECK(evolution::default_dt(g) == doctest::Approx(0.25 * g.dx() * g.dx() / std::numbers::pi));
}

TEST_CASE("initial packet")
{
    const SpatialGrid g(80.0, 4096);
    const auto b = BindingBasis::harmonic(10.0, 8);
    const WavepacketSpec s{10.0, 0.5, -10.0, 0};
    const auto f = evolution::init_wavepacket(g, b, s, 2.5);
    CHECK(f.norm(g.dx()) == doctest::Approx(1.0).epsilon(1e-10));
    const auto pop = observables::populations(f, g.dx());
    CHECK(pop[0] == doctest::Approx(1.0).epsilon(1e-10));
    for (int n = 1; n < 8; ++n)
        CHECK(pop[n] == 0.0);
    const auto m = observables::moments(f, g);
    CHECK(std::abs(m.mean_k - 10.0) < 1e-6);
    CHECK(std::abs(m.mean_x + 10.0) < 1e-6);
    CHECK(std::abs(m.var_x - 0.25 * 0.25) < 1e-6);
}

TEST_CASE("packet placement is validated")
{
    const SpatialGrid g(40.0, 1024);
    const auto b = BindingBasis::harmonic(10.0, 4);
    CHECK_THROWS_AS(evolution::init_wavepacket(g, b, {10.0, 0.5, 1.0, 0}, 2.0), ConfigError);
    CHECK_THROWS_AS(evolution::init_wavepacket(g, b, {10.0, 0.5, -19.0, 0}, 2.0), ConfigError);
    CHECK_THROWS_AS(evolution::init_wavepacket(g, b, {10.0, 0.5, -2.5, 0}, 2.0), ConfigError);
    CHECK_THROWS_AS(evolution::init_wavepacket(g, b, {10.0, 0.5, -8.0, 4}, 2.0), ConfigError);
    CHECK_THROWS_AS(evolution::init_wavepacket(g, b, {10.0, 0.0, -8.0, 0}, 2.0), ConfigError);
    CHECK_NOTHROW(evolution::init_wavepacket(g, b, {10.0, 0.5, -8.0, 3}, 2.0));
}

TEST_CASE("free spreading matches the closed form")
{
    const SpatialGrid g(80.0, 1024);
    const auto b = BindingBasis::harmonic(1.0, 1);
    const WavepacketSpec s{5.0, 1.0, -10.0, 0};
    auto f = evolution::init_wavepacket(g, b, s, 0.0);
    Propagator prop(g, b, MirrorConfig{}, 1e-3);
    prop.evolve(f, 1.0);
    CHECK(f.t == 1.0);
    const double eps0 = b.eigenenergy(0);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const cplx ref = free_packet(g.x()[j], 1.0, s) * std::exp(cplx(0.0, -eps0));
        worst = std::max(worst, std::abs(f.f(j, 0) - ref));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("mirror-free run transmits everything in channel n0")
{
    const SpatialGrid g(160.0, 2048);
    const auto b = BindingBasis::harmonic(10.0, 4);
    auto f = evolution::init_wavepacket(g, b, {10.0, 2.0, -10.0, 0}, 0.0);
    Propagator prop(g, b, MirrorConfig{}, evolution::default_dt(g));
    prop.evolve(f, 1.5);
    const auto p = observables::side_probabilities(f, g);
    CHECK(p.right[0] > 1.0 - 1e-10);
    for (int n = 1; n < 4; ++n)
        CHECK(p.left[n] + p.right[n] == 0.0);
}

TEST_CASE("second-order convergence in dt")
{
    const SpatialGrid g(40.0, 512);
    const auto b = BindingBasis::harmonic(10.0, 4);
    const MirrorConfig m{0.0, 11.0};
    const double cut = basis::coupling_cutoff(b, m);
    const WavepacketSpec s{10.0, 0.5, -5.0, 0};
    std::vector<double> xs;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        auto f = evolution::init_wavepacket(g, b, s, cut);
        Propagator prop(g, b, m, dt);
        prop.evolve(f, 0.4);
        xs.push_back(mean_x(f, g));
    }
    const double ratio = (xs[0] - xs[1]) / (xs[1] - xs[2]);
    CHECK(ratio > 3.6);
    CHECK(ratio < 4.4);
}

TEST_CASE("norm after ten thousand steps")
{
    const SpatialGrid g(40.0, 512);
    const auto b = BindingBasis::harmonic(10.0, 6);
    const MirrorConfig m{0.0, 11.0};
    const double cut = basis::coupling_cutoff(b, m);
    auto f = evolution::init_wavepacket(g, b, {10.0, 0.5, -5.0, 0}, cut);
    const double n0 = f.norm(g.dx());
    Propagator prop(g, b, m, 5e-5);
    for (int i = 0; i < 10000; ++i)
        prop.step(f);
    CHECK(std::abs(f.norm(g.dx()) - n0) < 1e-10);
}

TEST_CASE("evolve lands exactly on t_final")
{
    const SpatialGrid g(40.0, 256);
    const auto b = BindingBasis::harmonic(10.0, 2);
    auto f = evolution::init_wavepacket(g, b, {5.0, 0.5, -5.0, 0}, 0.0);
    Propagator prop(g, b, MirrorConfig{}, 0.0137);
    int calls = 0;
    prop.evolve(f, 0.5, [&](const evolution::ChannelField&) { ++calls; }, 4);
    CHECK(f.t == 0.5);
    CHECK(prop.dt() == 0.0137);
    CHECK(calls >= 10);
    CHECK_THROWS_AS(prop.evolve(f, 0.4), DomainError);
}

TEST_CASE("wrap-around is detected")
{
    const SpatialGrid g(20.0, 512);
    const auto b = BindingBasis::harmonic(10.0, 2);
    const WavepacketSpec s{10.0, 0.5, -5.0, 0};
    auto f = evolution::init_wavepacket(g, b, s, 0.0);
    const double bound = evolution::max_wrap_free_time(g, s);
    CHECK(bound == doctest::Approx((10.0 - 5.0) / (2.0 * (10.0 + 8.0))));
    Propagator prop(g, b, MirrorConfig{}, evolution::default_dt(g));
    CHECK_THROWS_AS(prop.evolve(f, 1.0), NumericalError);
}

TEST_CASE("populations frozen away from the mirror")
{
    const SpatialGrid g(60.0, 1024);
    const auto b = BindingBasis::harmonic(10.0, 4);
    const MirrorConfig m{0.0, 11.0};
    const double cut = basis::coupling_cutoff(b, m);
    auto f = evolution::init_wavepacket(g, b, {10.0, 0.5, -12.0, 0}, cut);
    Propagator prop(g, b, m, evolution::default_dt(g));
    const auto before = observables::populations(f, g.dx());
    prop.evolve(f, 0.1);
    CHECK(observables::region_probability(f, g, cut) < 1e-12);
    const auto after = observables::populations(f, g.dx());
    for (int n = 0; n < 4; ++n)
        CHECK(std::abs(after[n] - before[n]) < 1e-10);
}

TEST_CASE("bad time step")
{
    const SpatialGrid g(40.0, 256);
    const auto b = BindingBasis::harmonic(10.0, 2);
    CHECK_THROWS_AS(Propagator(g, b, MirrorConfig{}, 0.0), DomainError);
}

}
