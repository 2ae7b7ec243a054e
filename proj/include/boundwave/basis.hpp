#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace boundwave::basis {

using cplx = std::complex<double>;

enum class BasisKind { Harmonic, Hardwall };

/// Mirror strengths acting on particle 1 (V1) and particle 2 (V2).
struct MirrorConfig {
    double v1 = 0.0;
    double v2 = 0.0;

    [[nodiscard]] bool symmetric() const { return v1 == v2; }
    [[nodiscard]] bool free() const { return v1 == 0.0 && v2 == 0.0; }
};

/// Internal-mode eigenbasis of the binding potential, in the relative
/// coordinate x_rel = x1 - x2.
class BindingBasis {
public:
    static BindingBasis harmonic(double omega, int n_ch);
    static BindingBasis hardwall(double a, int n_ch);

    [[nodiscard]] BasisKind kind() const { return kind_; }
    [[nodiscard]] double omega() const { return omega_; }
    [[nodiscard]] double half_width() const { return a_; }
    [[nodiscard]] int n_ch() const { return n_ch_; }
    [[nodiscard]] const std::vector<double>& energies() const { return eps_; }

    [[nodiscard]] double eigenenergy(int n) const;
    [[nodiscard]] double eigenfunction(int n, double x) const;

    /// phi_0(x) .. phi_{N_ch-1}(x) in one recurrence sweep.
    void eigenfunctions(double x, std::span<double> out) const;

    /// Analytic continuation to complex argument (harmonic only).
    void eigenfunctions(cplx z, std::span<cplx> out) const;

private:
    BindingBasis(BasisKind kind, double omega, double a, int n_ch);
    void check_index(int n) const;

    BasisKind kind_;
    double omega_ = 0.0;
    double a_ = 0.0;
    int n_ch_ = 0;
    std::vector<double> eps_;
};

/// Largest channel count the Hermite recurrence is trusted for.
inline constexpr int max_harmonic_channels = 1000;

double effective_potential(const BindingBasis& b, const MirrorConfig& m, int n, int mm, double x_cm);

/// N_ch x N_ch matrix V_nm(x_cm).
Eigen::MatrixXd coupling_matrix(const BindingBasis& b, const MirrorConfig& m, double x_cm);

/// V_nm(e^{i theta} x) for the complex-scaled Hamiltonian.
Eigen::MatrixXcd coupling_matrix(const BindingBasis& b, const MirrorConfig& m, cplx z_cm);

/// |x| beyond which every |V_nm| stays below tol.
double coupling_cutoff(const BindingBasis& b, const MirrorConfig& m, double tol = 1e-12);

/// Dense V_nm tabulation on a set of points; entries (n, m, j) at
/// data[(j * N_ch + m) * N_ch + n].
class PotentialTable {
public:
    PotentialTable() = default;
    PotentialTable(const BindingBasis& b, const MirrorConfig& m, std::span<const double> x);

    [[nodiscard]] int n_ch() const { return n_ch_; }
    [[nodiscard]] std::size_t n_points() const { return n_points_; }
    [[nodiscard]] double operator()(int n, int m, std::size_t j) const
    {
        return data_[(j * n_ch_ + m) * n_ch_ + n];
    }
    [[nodiscard]] Eigen::Map<const Eigen::MatrixXd> at(std::size_t j) const
    {
        return {data_.data() + j * n_ch_ * n_ch_, n_ch_, n_ch_};
    }

private:
    int n_ch_ = 0;
    std::size_t n_points_ = 0;
    std::vector<double> data_;
};

/// Upper bound on doubles held by one PotentialTable (~1 GiB).
inline constexpr std::size_t max_table_entries = std::size_t{1} << 27;

PotentialTable potential_matrix(const BindingBasis& b, const MirrorConfig& m, std::span<const double> x);

}  // namespace boundwave::basis
