#include "boundwave/evolution.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <fftw3.h>

#include "boundwave/errors.hpp"

namespace boundwave::evolution {

using cplx = std::complex<double>;

ChannelField init_wavepacket(const SpatialGrid& grid, const BindingBasis& basis, const WavepacketSpec& spec,
                             double mirror_cut)
{
    if (spec.n0 < 0 || spec.n0 >= basis.n_ch())
        throw ConfigError("initial channel n0=" + std::to_string(spec.n0) + " outside [0, N_ch)");
    if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma))
        throw ConfigError("packet width sigma must be positive");
    if (!std::isfinite(spec.P) || !std::isfinite(spec.x0))
        throw ConfigError("packet momentum and center must be finite");
    if (!(spec.x0 < 0.0))
        throw ConfigError("packet center x0 must lie left of the mirror (x0 < 0)");
    if (std::abs(spec.x0) + 4.0 * spec.sigma >= grid.length() / 2.0)
        throw ConfigError("packet support |x0| + 4 sigma reaches the grid edge; enlarge L or move x0");
    // Probability of the packet inside |x| < mirror_cut.
    const double gap = -mirror_cut - spec.x0;
    const double overlap = gap <= 0.0 ? 1.0 : 0.5 * std::erfc(std::numbers::sqrt2 * gap / spec.sigma);
    if (overlap >= 1e-12) {
        std::ostringstream os;
        os << "initial packet overlaps the mirror region (overlap " << overlap << ", coupling reaches |x| = "
           << mirror_cut << "); move x0 further left";
        throw ConfigError(os.str());
    }

    ChannelField out;
    out.f = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(grid.size()), basis.n_ch());
    const double amp = std::pow(2.0 / (std::numbers::pi * spec.sigma * spec.sigma), 0.25);
    const auto& x = grid.x();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double d = x[j] - spec.x0;
        out.f(static_cast<Eigen::Index>(j), spec.n0) =
            amp * std::exp(-d * d / (spec.sigma * spec.sigma)) * std::polar(1.0, spec.P * x[j]);
    }
    return out;
}

double max_wrap_free_time(const SpatialGrid& grid, const WavepacketSpec& spec)
{
    const double room = grid.length() / 2.0 - std::abs(spec.x0);
    return room / (2.0 * (std::abs(spec.P) + 4.0 / spec.sigma));
}

double default_dt(const SpatialGrid& grid) { return 0.25 * grid.dx() * grid.dx() / std::numbers::pi; }

struct Propagator::Fft {
    Eigen::MatrixXcd scratch;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    int alignment = 0;

    Fft(int n, int howmany) : scratch(n, howmany)
    {
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        forward = fftw_plan_many_dft(1, &n, howmany, p, nullptr, 1, n, p, nullptr, 1, n, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_many_dft(1, &n, howmany, p, nullptr, 1, n, p, nullptr, 1, n, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!forward || !backward)
            throw NumericalError("evolution", "FFTW planning failed");
        alignment = fftw_alignment_of(reinterpret_cast<double*>(p));
    }
    ~Fft()
    {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
};

Propagator::Propagator(const SpatialGrid& grid, const BindingBasis& basis, const MirrorConfig& mirror, double dt,
                       PropagatorOptions opts)
    : grid_(grid), basis_(basis), mirror_(mirror), opts_(opts), dt_(dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw DomainError("evolution", "time step must be positive");
    const int n_ch = basis.n_ch();
    const auto& x = grid.x();
    const Eigen::VectorXd eps = Eigen::Map<const Eigen::VectorXd>(basis.energies().data(), n_ch);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        Eigen::MatrixXd v = basis::coupling_matrix(basis, mirror, x[j]);
        if (v.cwiseAbs().maxCoeff() <= opts.coupling_floor) {
            inactive_.push_back(j);
            continue;
        }
        Eigen::MatrixXd h = v;
        h.diagonal() += eps;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success)
            throw NumericalError("evolution", "local channel eigendecomposition failed at x=" + std::to_string(x[j]));
        coupling_.index.push_back(j);
        coupling_.v.push_back(std::move(v));
        coupling_.u.push_back(es.eigenvectors());
        coupling_.lambda.push_back(es.eigenvalues());
    }
    if (opts.absorbing_mask) {
        mask_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid.size()));
        const double half = grid.length() / 2.0, w = opts.mask_width * grid.length();
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double depth = std::abs(x[j]) - (half - w);
            if (depth > 0.0)
                mask_(static_cast<Eigen::Index>(j)) = std::pow(std::cos(0.5 * std::numbers::pi * depth / w), 0.125);
        }
    }
    fft_ = std::make_unique<Fft>(static_cast<int>(grid.size()), n_ch);
    update_phases();
}

Propagator::~Propagator() = default;

void Propagator::set_dt(double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw DomainError("evolution", "time step must be positive");
    dt_ = dt;
    update_phases();
}

void Propagator::update_phases()
{
    const int n_ch = basis_.n_ch();
    const auto n_active = static_cast<Eigen::Index>(coupling_.index.size());
    local_phase_.resize(n_active, n_ch);
    for (Eigen::Index a = 0; a < n_active; ++a)
        for (int i = 0; i < n_ch; ++i)
            local_phase_(a, i) = std::polar(1.0, -coupling_.lambda[a](i) * dt_ / 2.0);
    free_phase_.resize(n_ch);
    for (int n = 0; n < n_ch; ++n)
        free_phase_(n) = std::polar(1.0, -basis_.energies()[n] * dt_ / 2.0);
    const auto& k = grid_.k();
    const double inv_n = 1.0 / static_cast<double>(grid_.size());
    kinetic_phase_.resize(static_cast<Eigen::Index>(k.size()));
    for (std::size_t j = 0; j < k.size(); ++j)
        kinetic_phase_(static_cast<Eigen::Index>(j)) = inv_n * std::polar(1.0, -k[j] * k[j] * dt_);
}

void Propagator::apply_local(ChannelField& state) const
{
    auto& f = state.f;
    for (int n = 0; n < f.cols(); ++n) {
        const cplx ph = free_phase_(n);
        for (std::size_t j : inactive_)
            f(static_cast<Eigen::Index>(j), n) *= ph;
    }
    const int n_ch = basis_.n_ch();
    Eigen::VectorXd re(n_ch), im(n_ch), a(n_ch), b(n_ch);
    for (std::size_t p = 0; p < coupling_.index.size(); ++p) {
        const auto j = static_cast<Eigen::Index>(coupling_.index[p]);
        const Eigen::MatrixXd& u = coupling_.u[p];
        re = f.row(j).real().transpose();
        im = f.row(j).imag().transpose();
        a.noalias() = u.transpose() * re;
        b.noalias() = u.transpose() * im;
        for (int i = 0; i < n_ch; ++i) {
            const cplx c = cplx{a(i), b(i)} * local_phase_(static_cast<Eigen::Index>(p), i);
            a(i) = c.real();
            b(i) = c.imag();
        }
        re.noalias() = u * a;
        im.noalias() = u * b;
        for (int i = 0; i < n_ch; ++i)
            f(j, i) = cplx{re(i), im(i)};
    }
}

void Propagator::apply_kinetic(ChannelField& state) const
{
    auto* p = reinterpret_cast<fftw_complex*>(state.f.data());
    const bool direct = fftw_alignment_of(reinterpret_cast<double*>(p)) == fft_->alignment;
    fftw_complex* buf = p;
    if (!direct) {
        fft_->scratch = state.f;
        buf = reinterpret_cast<fftw_complex*>(fft_->scratch.data());
    }
    fftw_execute_dft(fft_->forward, buf, buf);
    Eigen::Map<Eigen::MatrixXcd> spec(reinterpret_cast<cplx*>(buf), state.f.rows(), state.f.cols());
    spec.array().colwise() *= kinetic_phase_.array();
    fftw_execute_dft(fft_->backward, buf, buf);
    if (!direct)
        state.f = fft_->scratch;
}

void Propagator::step(ChannelField& state) const
{
    if (state.f.rows() != static_cast<Eigen::Index>(grid_.size()) || state.f.cols() != basis_.n_ch())
        throw DomainError("evolution", "field shape does not match grid and basis");
    apply_local(state);
    apply_kinetic(state);
    apply_local(state);
    if (opts_.absorbing_mask)
        state.f.array().colwise() *= mask_.array().cast<cplx>();
    state.t += dt_;
    const double nrm = state.f.squaredNorm();
    if (!std::isfinite(nrm)) {
        std::ostringstream os;
        os << "non-finite field after step at t=" << state.t << " (max |f| = " << state.f.cwiseAbs().maxCoeff()
           << ")";
        throw NumericalError("evolution", os.str());
    }
}

double Propagator::edge_density(const ChannelField& state) const
{
    const Eigen::Index n = state.f.rows(), e = opts_.edge_points;
    return state.f.topRows(e).squaredNorm() + state.f.bottomRows(std::min(e, n)).squaredNorm();
}

void Propagator::evolve(ChannelField& state, double t_final, const Observer& observer, int stride)
{
    if (!(t_final > state.t))
        throw DomainError("evolution", "t_final must exceed the current time");
    const double t0 = state.t;
    const double span = t_final - t0;
    const auto n_steps = static_cast<long>(std::ceil(span / dt_ - 1e-9));
    const double dt_saved = dt_;
    const double dt_eff = span / static_cast<double>(n_steps);
    if (dt_eff != dt_)
        set_dt(dt_eff);

    if (observer)
        observer(state);
    for (long i = 1; i <= n_steps; ++i) {
        step(state);
        state.t = t0 + static_cast<double>(i) * dt_eff;
        if (!opts_.absorbing_mask) {
            const double edge = edge_density(state);
            if (edge > opts_.edge_tolerance) {
                std::ostringstream os;
                os << "wrap-around: edge density " << edge << " exceeds " << opts_.edge_tolerance << " at t="
                   << state.t << "; enlarge L or shorten t_final";
                if (dt_eff != dt_saved)
                    set_dt(dt_saved);
                throw NumericalError("evolution", os.str());
            }
        }
        if (observer && ((stride > 0 && i % stride == 0) || i == n_steps))
            observer(state);
    }
    if (dt_eff != dt_saved)
        set_dt(dt_saved);
}

}  // namespace boundwave::evolution
