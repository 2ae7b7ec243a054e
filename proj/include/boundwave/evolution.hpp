#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "boundwave/basis.hpp"
#include "boundwave/grid.hpp"

namespace boundwave::evolution {

using basis::BindingBasis;
using basis::MirrorConfig;

struct WavepacketSpec {
    double P = 10.0;
    double sigma = 0.5;
    double x0 = -10.0;
    int n0 = 0;
};

/// Coupled amplitudes f_n(x_j, t); column n holds channel n so each channel is
/// contiguous for the FFT.
struct ChannelField {
    double t = 0.0;
    Eigen::MatrixXcd f;

    [[nodiscard]] int n_ch() const { return static_cast<int>(f.cols()); }
    [[nodiscard]] double norm(double dx) const { return f.squaredNorm() * dx; }
};

/// Initial packet (2/(pi sigma^2))^{1/4} e^{iPx - (x-x0)^2/sigma^2} in channel n0.
/// mirror_cut is the |x| beyond which the coupling is negligible; the packet
/// must not reach it, nor the grid edge.
ChannelField init_wavepacket(const SpatialGrid& grid, const BindingBasis& basis, const WavepacketSpec& spec,
                             double mirror_cut);

/// Largest t_final the no-wrap bound L/2 > |x0| + 2 (P + 4/sigma) t allows.
double max_wrap_free_time(const SpatialGrid& grid, const WavepacketSpec& spec);

/// Default time step 0.25 dx^2 / pi.
double default_dt(const SpatialGrid& grid);

/// Grid points where the channel coupling is not negligible, with the
/// eigendecomposition eps + V(x_j) = U diag(lambda) U^T at each.
struct LocalCoupling {
    std::vector<std::size_t> index;
    std::vector<Eigen::MatrixXd> v;
    std::vector<Eigen::MatrixXd> u;
    std::vector<Eigen::VectorXd> lambda;
};

struct PropagatorOptions {
    double coupling_floor = 1e-14;   // |V_nm| below this counts as zero
    bool absorbing_mask = false;
    double mask_width = 0.1;         // fraction of L on each side
    int edge_points = 5;
    double edge_tolerance = 1e-8;
};

using Observer = std::function<void(const ChannelField&)>;

class Propagator {
public:
    Propagator(const SpatialGrid& grid, const BindingBasis& basis, const MirrorConfig& mirror, double dt,
               PropagatorOptions opts = {});
    ~Propagator();
    Propagator(const Propagator&) = delete;
    Propagator& operator=(const Propagator&) = delete;

    [[nodiscard]] const SpatialGrid& grid() const { return grid_; }
    [[nodiscard]] const BindingBasis& basis() const { return basis_; }
    [[nodiscard]] const MirrorConfig& mirror() const { return mirror_; }
    [[nodiscard]] const LocalCoupling& coupling() const { return coupling_; }
    [[nodiscard]] double dt() const { return dt_; }
    void set_dt(double dt);

    /// One Strang step: half local map, full kinetic e^{-ik^2 dt}, half local map.
    void step(ChannelField& state) const;

    /// Steps until t_final (the last step is shortened or all steps uniformly
    /// adjusted so the run lands exactly on t_final), calling the observer
    /// on the initial state, every `stride` steps, and on the final state.
    void evolve(ChannelField& state, double t_final, const Observer& observer = {}, int stride = 0);

    /// Sum of |f_n|^2 over the edge points on both sides.
    [[nodiscard]] double edge_density(const ChannelField& state) const;

private:
    void apply_local(ChannelField& state) const;
    void apply_kinetic(ChannelField& state) const;
    void update_phases();

    SpatialGrid grid_;
    BindingBasis basis_;
    MirrorConfig mirror_;
    PropagatorOptions opts_;
    double dt_;
    LocalCoupling coupling_;
    std::vector<std::size_t> inactive_;
    Eigen::MatrixXcd local_phase_;      // per active point, per eigenvalue
    Eigen::VectorXcd free_phase_;       // e^{-i eps_n dt/2}
    Eigen::VectorXcd kinetic_phase_;    // e^{-i k^2 dt} / N
    Eigen::VectorXd mask_;
    struct Fft;
    std::unique_ptr<Fft> fft_;
};

}  // namespace boundwave::evolution
