#pragma once

#include <complex>
#include <vector>

namespace boundwave::wkb {

using cplx = std::complex<double>;

/// Adiabatic potentials of the two-channel {0, 2} model for a symmetric
/// mirror of strength V, together with the large-V asymptotic forms.
struct WkbCurves {
    std::vector<double> x;
    std::vector<double> v_plus;
    std::vector<double> v_minus;
    std::vector<double> v_plus_asym;
    std::vector<double> v_minus_asym;
};

/// Exact V+- and asymptotic curves; V <= 0 or Omega <= 0 is a domain error.
WkbCurves adiabatic_potentials(double omega, double v, const std::vector<double>& x);

struct AsymptoticCurves {
    std::vector<double> v_minus;
    std::vector<double> v_plus;
};
AsymptoticCurves asymptotic_potentials(double omega, double v, const std::vector<double>& x);

/// True when V >= 10 sqrt(Omega), the regime the asymptotic forms assume.
bool strong_mirror(double omega, double v);

struct ResonanceEstimate {
    double v_min = 0.0;
    double omega_level = 0.0;  // omega in the level formula
    double alpha = 0.0;
    double beta = 0.0;
    cplx e_sym;
    cplx e_anti;
    bool regime_ok = true;
};

/// E^{S/A} = V_min + w +- (w/pi) e^{-alpha} - i (w/pi) e^{-2 beta}.
ResonanceEstimate resonance_estimate(double omega, double v);

struct ConstantsReport {
    double u_star = 0.0;            // Omega x*^2 at the V+ asymptotic minimum
    double x_star = 0.0;
    double depth = 0.0;             // V+_asym(x*)
    double curvature = 0.0;         // V+_asym''(x*)
    double depth_coefficient = 0.0;      // depth / (Omega^{1/2} V)
    double stiffness_coefficient = 0.0;  // sqrt(V''/2) / (Omega^{3/4} V^{1/2})
};

/// Numerical minimization and curvature of V+_asym.
ConstantsReport validate_constants(double omega, double v);

/// Interior local minima of a sampled curve (indices).
std::vector<std::size_t> local_minima(const std::vector<double>& y);

}  // namespace boundwave::wkb
