#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "boundwave/basis.hpp"

namespace boundwave::resonance {

using basis::BindingBasis;
using basis::MirrorConfig;
using cplx = std::complex<double>;

/// H(theta) = e^{-2i theta} T + eps + V(x e^{i theta}) on a Dirichlet box of
/// length L_r with N_r interior points. T is the sine-DVR kinetic matrix,
/// exact for the box: eigenvalues (pi m / L_r)^2.
struct ScaledHamiltonian {
    double theta = 0.0;
    double L_r = 0.0;
    int N_r = 0;
    std::vector<int> channels;        // channel indices included, in block order
    std::vector<double> thresholds;   // eps_n of the included channels
    Eigen::MatrixXcd H;
};

/// Empty `channels` selects all basis channels.
ScaledHamiltonian build_scaled_hamiltonian(const BindingBasis& basis, const MirrorConfig& mirror, double theta,
                                           double L_r, int N_r, std::vector<int> channels = {});

inline constexpr int default_dense_capacity = 4096;

/// All eigenvalues via LAPACK zgeev.
std::vector<cplx> complex_spectrum(const ScaledHamiltonian& H, int capacity = default_dense_capacity);

struct Classification {
    std::vector<cplx> continuum;
    std::vector<cplx> candidates;
};

/// Continuum: |arg(E - eps_n) + 2 theta| < angle_tol for some eps_n < Re E.
Classification classify_continuum(const std::vector<cplx>& eigs, const std::vector<double>& thresholds, double theta,
                                  double angle_tol = 0.05);

/// Median of min_n |arg(E - eps_n) + 2 theta| over the given eigenvalues
/// (those with Re E above the lowest threshold).
double median_ray_deviation(const std::vector<cplx>& eigs, const std::vector<double>& thresholds, double theta);

/// tau = -1 / (2 Im E); Im E >= 0 is a domain error.
double lifetime(cplx e_res);

struct ResonanceCandidate {
    cplx E;
    double tau = 0.0;
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    double stability = 0.0;
    double threshold_below = 0.0;
    bool ambiguous = false;
};

struct ScanOptions {
    std::vector<int> channels;     // empty: all
    double angle_tol = 0.05;
    double e_max = 0.0;            // 0: highest threshold + 4 (V1 + V2) sqrt(Omega/pi)
    int capacity = default_dense_capacity;
};

struct ThetaSpectrum {
    double theta = 0.0;
    std::vector<cplx> eigenvalues;
    std::vector<cplx> candidates;  // off the rays, Im E < 0, Re E inside the window
};

struct ResonanceScan {
    std::vector<ThetaSpectrum> spectra;
    std::vector<ResonanceCandidate> resonances;  // theta-stable, sorted by Re E
    std::vector<std::string> flags;
    double e_lo = 0.0;
    double e_hi = 0.0;

    /// Candidate with the smallest |Im E| at spectra[i], if any.
    [[nodiscard]] const cplx* narrowest_candidate(std::size_t i) const;
};

/// Greedy nearest-neighbour pairing of candidates across the theta list with
/// pairing radius 10 stability_tol; total drift below stability_tol marks a
/// resonance. Two partners inside the radius flag the candidate as ambiguous.
ResonanceScan find_resonances(const BindingBasis& basis, const MirrorConfig& mirror,
                              const std::vector<double>& theta_list, double L_r, int N_r, double stability_tol,
                              const ScanOptions& opts = {});

/// Channels of one parity (0 even, 1 odd) below n_ch.
std::vector<int> parity_sector(int n_ch, int parity);

}  // namespace boundwave::resonance
