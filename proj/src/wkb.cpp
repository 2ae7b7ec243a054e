#include "boundwave/wkb.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "boundwave/basis.hpp"
#include "boundwave/errors.hpp"

namespace boundwave::wkb {

namespace {

void check(double omega, double v)
{
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError("wkb", "Omega must be positive");
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("wkb", "mirror strength V must be positive, got " + std::to_string(v));
}

double v_plus_asym(double omega, double v, double x)
{
    const double u = omega * x * x;
    return 2.0 * std::sqrt(omega) * v / std::sqrt(std::numbers::pi) * std::exp(-u) * (3.0 - 4.0 * u + 4.0 * u * u);
}

double v_minus_asym(double omega, double x)
{
    const double u = omega * x * x;
    return omega * (11.0 - 4.0 * u + 4.0 * u * u) / (3.0 - 4.0 * u + 4.0 * u * u);
}

}  // namespace

bool strong_mirror(double omega, double v) { return v >= 10.0 * std::sqrt(omega); }

AsymptoticCurves asymptotic_potentials(double omega, double v, const std::vector<double>& x)
{
    check(omega, v);
    AsymptoticCurves out;
    out.v_minus.reserve(x.size());
    out.v_plus.reserve(x.size());
    for (double xi : x) {
        out.v_minus.push_back(v_minus_asym(omega, xi));
        out.v_plus.push_back(v_plus_asym(omega, v, xi));
    }
    return out;
}

WkbCurves adiabatic_potentials(double omega, double v, const std::vector<double>& x)
{
    check(omega, v);
    const auto b = basis::BindingBasis::harmonic(omega, 3);
    const double e0 = b.eigenenergy(0), e2 = b.eigenenergy(2);
    WkbCurves c;
    c.x = x;
    double phi[3];
    for (double xi : x) {
        b.eigenfunctions(xi, phi);
        const double p0 = phi[0] * phi[0], p2 = phi[2] * phi[2];
        const double mean = e0 + e2 + 4.0 * v * (p0 + p2);
        const double diff = e0 - e2 + 4.0 * v * (p0 - p2);
        const double root = std::sqrt(diff * diff + 64.0 * v * v * p0 * p2);
        c.v_plus.push_back(0.5 * (mean + root));
        c.v_minus.push_back(0.5 * (mean - root));
    }
    auto asym = asymptotic_potentials(omega, v, x);
    c.v_plus_asym = std::move(asym.v_plus);
    c.v_minus_asym = std::move(asym.v_minus);
    return c;
}

ResonanceEstimate resonance_estimate(double omega, double v)
{
    check(omega, v);
    ResonanceEstimate r;
    r.regime_ok = strong_mirror(omega, v);
    const double s = std::pow(omega, -0.25) * std::sqrt(v);
    r.v_min = 1.20 * std::sqrt(omega) * v;
    r.omega_level = 2.14 * std::pow(omega, 0.75) * std::sqrt(v);
    r.alpha = -1.20 + 1.22 * s;
    r.beta = -1.91 + 0.45 * s;
    const double w = r.omega_level / std::numbers::pi;
    const double split = w * std::exp(-r.alpha);
    const double width = w * std::exp(-2.0 * r.beta);
    r.e_sym = {r.v_min + r.omega_level + split, -width};
    r.e_anti = {r.v_min + r.omega_level - split, -width};
    return r;
}

ConstantsReport validate_constants(double omega, double v)
{
    check(omega, v);
    const double root = std::sqrt(omega);
    auto f = [&](double x) { return v_plus_asym(omega, v, x); };
    // The minimum sits between the central maximum and the outer barrier,
    // both well inside u in (0.3, 1.8).
    const auto [xm, fm] = boost::math::tools::brent_find_minima(f, std::sqrt(0.3) / root, std::sqrt(1.8) / root,
                                                                std::numeric_limits<double>::digits / 2);
    if (!std::isfinite(xm) || !std::isfinite(fm))
        throw NumericalError("wkb", "minimization of V+ failed");

    ConstantsReport r;
    r.x_star = xm;
    r.u_star = omega * xm * xm;
    r.depth = fm;
    // Richardson-extrapolated central second difference.
    auto d2 = [&](double h) { return (f(xm + h) - 2.0 * f(xm) + f(xm - h)) / (h * h); };
    const double h = 1e-3 / root;
    r.curvature = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
    if (!(r.curvature > 0.0))
        throw NumericalError("wkb", "V+ curvature at the minimum is not positive");
    r.depth_coefficient = r.depth / (root * v);
    r.stiffness_coefficient = std::sqrt(r.curvature / 2.0) / (std::pow(omega, 0.75) * std::sqrt(v));
    return r;
}

std::vector<std::size_t> local_minima(const std::vector<double>& y)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] < y[i - 1] && y[i] <= y[i + 1])
            out.push_back(i);
    return out;
}

}  // namespace boundwave::wkb
