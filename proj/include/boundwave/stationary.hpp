#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "boundwave/basis.hpp"
#include "boundwave/evolution.hpp"

namespace boundwave::stationary {

using basis::BindingBasis;
using basis::MirrorConfig;
using cplx = std::complex<double>;

/// Channel amplitudes at total energy E for incidence from the left in each
/// open channel m. Raw amplitudes: f_n = t(n, m) e^{i k_n x} on the right,
/// f_n = delta_nm e^{i k_m x} + r(n, m) e^{-i k_n x} on the left. Rows of
/// closed channels hold evanescent coefficients at the matching points.
struct ScatteringMatrix {
    double E = 0.0;
    std::vector<int> open;          // channel indices with E > eps_n
    std::vector<double> k;          // sqrt(|E - eps_n|) for every channel
    Eigen::MatrixXcd t;             // N_ch x N_open
    Eigen::MatrixXcd r;             // N_ch x N_open
    double rcond = 0.0;             // reciprocal condition of the matching system

    [[nodiscard]] int n_open() const { return static_cast<int>(open.size()); }
    /// Flux-normalized amplitudes sqrt(k_n/k_m) t_nm over open channels.
    [[nodiscard]] Eigen::MatrixXcd t_flux() const;
    [[nodiscard]] Eigen::MatrixXcd r_flux() const;
    /// max_m |sum_n (|t_nm|^2 + |r_nm|^2) k_n/k_m - 1|.
    [[nodiscard]] double unitarity_defect() const;
};

struct SolverOptions {
    double x_cut = 0.0;         // 0 selects the coupling envelope bound
    double envelope_tol = 1e-12;
    double step_scale = 0.025;  // h <= step_scale / k_max
    double min_rcond = 1e-13;
};

/// Fixed-step RK4 coupled-channel solver on [-X, X]; the coupling tables are
/// built once for the largest energy the solver will be asked about.
class SmatrixSolver {
public:
    SmatrixSolver(const BindingBasis& basis, const MirrorConfig& mirror, double e_max, SolverOptions opts = {});

    [[nodiscard]] ScatteringMatrix solve(double E) const;
    [[nodiscard]] double x_cut() const { return x_cut_; }
    [[nodiscard]] int n_steps() const { return n_steps_; }

private:
    BindingBasis basis_;
    MirrorConfig mirror_;
    SolverOptions opts_;
    double e_max_;
    double x_cut_;
    double h_;
    int n_steps_;
    std::vector<Eigen::MatrixXd> v_;  // V at x_i = X - i h/2, i = 0..2 n_steps
};

/// One-shot solve for left incidence.
ScatteringMatrix solve_smatrix(double E, const BindingBasis& basis, const MirrorConfig& mirror,
                               SolverOptions opts = {});

/// Incidence from the right, obtained from the mirror image problem.
ScatteringMatrix solve_smatrix_right(double E, const BindingBasis& basis, const MirrorConfig& mirror,
                                     SolverOptions opts = {});

struct PacketPrediction {
    std::vector<double> p_left;
    std::vector<double> p_right;
    double below_threshold = 0.0;  // momentum weight with k <= 0, not propagated
    double max_unitarity_defect = 0.0;
    int n_energies = 0;
    std::vector<std::string> warnings;
};

/// Folds flux-normalized |t_{n,n0}|^2, |r_{n,n0}|^2 with the packet's momentum
/// density over P +- 6/sigma. The window is cut at the channel thresholds and
/// into panels no wider than 1/sigma; each panel gets `nodes` Gauss-Legendre
/// points after a cosine map that clusters them at the panel edges, where the
/// square-root threshold behaviour sits.
PacketPrediction wavepacket_prediction(const evolution::WavepacketSpec& spec, const BindingBasis& basis,
                                       const MirrorConfig& mirror, int nodes = 20, SolverOptions opts = {});

}  // namespace boundwave::stationary
