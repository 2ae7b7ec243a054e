#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "boundwave/evolution.hpp"

namespace boundwave::observables {

using evolution::ChannelField;

struct SideProbabilities {
    std::vector<double> left;
    std::vector<double> right;

    [[nodiscard]] double total_left() const;
    [[nodiscard]] double total_right() const;
};

/// p_{n,L/R}; the x = 0 point is split evenly between the sides.
SideProbabilities side_probabilities(const ChannelField& state, const SpatialGrid& grid);

/// Channel populations p_n = integral |f_n|^2.
std::vector<double> populations(const ChannelField& state, double dx);

/// Gram matrix G_nm = integral conj(f_m) f_n dx.
Eigen::MatrixXcd gram_matrix(const ChannelField& state, double dx);

/// Von Neumann entropy (nats) of the normalized reduced center-of-mass state,
/// from the Gram-matrix spectrum.
double entanglement_entropy(const ChannelField& state, double dx);

/// Largest grid the dense rho_cm(x, x') is built for.
inline constexpr std::size_t max_density_points = 4096;

/// rho(x_i, x_j) = sum_n conj(f_n(x_i)) f_n(x_j) on every `stride`-th point.
Eigen::MatrixXcd reduced_density_matrix(const ChannelField& state, std::size_t stride = 1);

/// Entropy from the dense rho_cm; measure dx is the spacing of its points.
double entropy_from_density_matrix(const Eigen::MatrixXcd& rho, double dx);

struct Energies {
    double e_cm = 0.0;
    double e_rel = 0.0;
    double e_cm_left = 0.0;
    double e_cm_right = 0.0;
    double e_rel_left = 0.0;
    double e_rel_right = 0.0;
};

/// E_cm from the spectrum, E_rel = sum eps_n p_n. Side-resolved E_cm applies a
/// sharp half-line window before the transform.
Energies energies(const ChannelField& state, const SpatialGrid& grid, const basis::BindingBasis& basis);

/// <V> = sum_j dx f_j^dagger V(x_j) f_j.
double mirror_energy(const ChannelField& state, const evolution::Propagator& prop);

/// Mean and spread of the packet in position and momentum (all channels).
struct Moments {
    double mean_x = 0.0;
    double var_x = 0.0;
    double mean_k = 0.0;
    double var_k = 0.0;
};
Moments moments(const ChannelField& state, const SpatialGrid& grid);

/// Probability in |x| < cut.
double region_probability(const ChannelField& state, const SpatialGrid& grid, double cut);

struct ObservableRecord {
    double t = 0.0;
    double norm = 0.0;
    double entropy = 0.0;
    Energies energy;
    double e_mirror = 0.0;
    double e_total = 0.0;
    double trapped = 0.0;  // probability inside the coupling region
    std::vector<double> p_left;
    std::vector<double> p_right;
};

ObservableRecord record(const ChannelField& state, const evolution::Propagator& prop, double mirror_cut);

}  // namespace boundwave::observables
