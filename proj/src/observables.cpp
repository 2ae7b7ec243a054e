#include "boundwave/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <fftw3.h>

#include "boundwave/errors.hpp"

namespace boundwave::observables {

using cplx = std::complex<double>;

namespace {

// Sum over channels of sum_j k_j^2 |F_j|^2 (dx/N) for a windowed field.
double kinetic_sum(const Eigen::MatrixXcd& f, const SpatialGrid& grid)
{
    const int n = static_cast<int>(f.rows());
    Eigen::MatrixXcd buf = f;
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    const int howmany = static_cast<int>(f.cols());
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, p, nullptr, 1, n, p, nullptr, 1, n, FFTW_FORWARD,
                                        FFTW_ESTIMATE);
    if (!plan)
        throw NumericalError("observables", "FFTW planning failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const auto& k = grid.k();
    double s = 0.0;
    for (int c = 0; c < howmany; ++c)
        for (int j = 0; j < n; ++j)
            s += k[j] * k[j] * std::norm(buf(j, c));
    return s * grid.dx() / n;
}

std::vector<double> entropy_eigenvalues(const Eigen::MatrixXcd& g)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("observables", "eigendecomposition for entropy failed");
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return lam;
}

double entropy_of(const std::vector<double>& lam)
{
    double s = 0.0;
    for (double l : lam) {
        if (l < -1e-8) {
            std::ostringstream os;
            os << "negative density-matrix eigenvalue " << l;
            throw NumericalError("observables", os.str());
        }
        l = std::clamp(l, 0.0, 1.0);
        if (l > 0.0)
            s -= l * std::log(l);
    }
    return s;
}

}  // namespace

double SideProbabilities::total_left() const { return std::accumulate(left.begin(), left.end(), 0.0); }
double SideProbabilities::total_right() const { return std::accumulate(right.begin(), right.end(), 0.0); }

SideProbabilities side_probabilities(const ChannelField& state, const SpatialGrid& grid)
{
    const auto& x = grid.x();
    const int n_ch = state.n_ch();
    SideProbabilities out{std::vector<double>(n_ch, 0.0), std::vector<double>(n_ch, 0.0)};
    for (int c = 0; c < n_ch; ++c) {
        double l = 0.0, r = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = std::norm(state.f(static_cast<Eigen::Index>(j), c));
            if (x[j] < 0.0)
                l += d;
            else if (x[j] > 0.0)
                r += d;
            else {
                l += 0.5 * d;
                r += 0.5 * d;
            }
        }
        out.left[c] = l * grid.dx();
        out.right[c] = r * grid.dx();
    }
    return out;
}

std::vector<double> populations(const ChannelField& state, double dx)
{
    std::vector<double> p(state.n_ch());
    for (int c = 0; c < state.n_ch(); ++c)
        p[c] = state.f.col(c).squaredNorm() * dx;
    return p;
}

Eigen::MatrixXcd gram_matrix(const ChannelField& state, double dx)
{
    // (f^H f)_{mn} = sum_j conj(f_m) f_n; G_nm is its transpose, which has the
    // same spectrum, but keep the stated index order.
    Eigen::MatrixXcd g = (state.f.adjoint() * state.f).transpose() * dx;
    return g;
}

double entanglement_entropy(const ChannelField& state, double dx)
{
    const double nrm = state.norm(dx);
    if (!(nrm > 0.0))
        throw DomainError("observables", "entropy of a zero state");
    return entropy_of(entropy_eigenvalues(gram_matrix(state, dx) / nrm));
}

Eigen::MatrixXcd reduced_density_matrix(const ChannelField& state, std::size_t stride)
{
    if (stride == 0)
        throw DomainError("observables", "stride must be positive");
    const auto n = static_cast<std::size_t>(state.f.rows());
    const std::size_t m = (n + stride - 1) / stride;
    if (m > max_density_points)
        throw CapacityError("observables", "dense rho_cm of " + std::to_string(m) +
                                               " points exceeds the limit; use a larger stride");
    Eigen::MatrixXcd sub(static_cast<Eigen::Index>(m), state.f.cols());
    for (std::size_t i = 0; i < m; ++i)
        sub.row(static_cast<Eigen::Index>(i)) = state.f.row(static_cast<Eigen::Index>(i * stride));
    Eigen::MatrixXcd rho = sub.conjugate() * sub.transpose();
    return rho;
}

double entropy_from_density_matrix(const Eigen::MatrixXcd& rho, double dx)
{
    const double tr = rho.trace().real() * dx;
    if (!(tr > 0.0))
        throw DomainError("observables", "entropy of a zero density matrix");
    return entropy_of(entropy_eigenvalues(rho * (dx / tr)));
}

Energies energies(const ChannelField& state, const SpatialGrid& grid, const basis::BindingBasis& basis)
{
    Energies e;
    const auto& eps = basis.energies();
    const auto sides = side_probabilities(state, grid);
    for (int c = 0; c < state.n_ch(); ++c) {
        e.e_rel_left += eps[c] * sides.left[c];
        e.e_rel_right += eps[c] * sides.right[c];
        e.e_rel += eps[c] * state.f.col(c).squaredNorm() * grid.dx();
    }
    e.e_cm = kinetic_sum(state.f, grid);

    const auto& x = grid.x();
    Eigen::MatrixXcd left = state.f, right = state.f;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(j);
        const double wl = x[j] < 0.0 ? 1.0 : (x[j] == 0.0 ? std::sqrt(0.5) : 0.0);
        const double wr = x[j] > 0.0 ? 1.0 : (x[j] == 0.0 ? std::sqrt(0.5) : 0.0);
        left.row(r) *= wl;
        right.row(r) *= wr;
    }
    e.e_cm_left = kinetic_sum(left, grid);
    e.e_cm_right = kinetic_sum(right, grid);
    return e;
}

double mirror_energy(const ChannelField& state, const evolution::Propagator& prop)
{
    const auto& cp = prop.coupling();
    double s = 0.0;
    for (std::size_t p = 0; p < cp.index.size(); ++p) {
        const Eigen::VectorXcd row = state.f.row(static_cast<Eigen::Index>(cp.index[p])).transpose();
        s += (row.adjoint() * cp.v[p] * row).value().real();
    }
    return s * prop.grid().dx();
}

Moments moments(const ChannelField& state, const SpatialGrid& grid)
{
    Moments m;
    const auto& x = grid.x();
    const double dx = grid.dx();
    const double nrm = state.norm(dx);
    double sx = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = state.f.row(static_cast<Eigen::Index>(j)).squaredNorm() * dx;
        sx += x[j] * d;
        sxx += x[j] * x[j] * d;
    }
    m.mean_x = sx / nrm;
    m.var_x = sxx / nrm - m.mean_x * m.mean_x;

    const int n = static_cast<int>(state.f.rows());
    Eigen::MatrixXcd buf = state.f;
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    const int howmany = state.n_ch();
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, p, nullptr, 1, n, p, nullptr, 1, n, FFTW_FORWARD,
                                        FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const auto& k = grid.k();
    double w = 0.0, sk = 0.0, skk = 0.0;
    for (int c = 0; c < howmany; ++c)
        for (int j = 0; j < n; ++j) {
            const double d = std::norm(buf(j, c));
            w += d;
            sk += k[j] * d;
            skk += k[j] * k[j] * d;
        }
    m.mean_k = sk / w;
    m.var_k = skk / w - m.mean_k * m.mean_k;
    return m;
}

double region_probability(const ChannelField& state, const SpatialGrid& grid, double cut)
{
    const auto& x = grid.x();
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (std::abs(x[j]) < cut)
            s += state.f.row(static_cast<Eigen::Index>(j)).squaredNorm();
    return s * grid.dx();
}

ObservableRecord record(const ChannelField& state, const evolution::Propagator& prop, double mirror_cut)
{
    const auto& grid = prop.grid();
    ObservableRecord r;
    r.t = state.t;
    r.norm = state.norm(grid.dx());
    r.entropy = entanglement_entropy(state, grid.dx());
    r.energy = energies(state, grid, prop.basis());
    r.e_mirror = mirror_energy(state, prop);
    r.e_total = r.energy.e_cm + r.energy.e_rel + r.e_mirror;
    r.trapped = region_probability(state, grid, mirror_cut);
    auto sides = side_probabilities(state, grid);
    r.p_left = std::move(sides.left);
    r.p_right = std::move(sides.right);
    return r;
}

}  // namespace boundwave::observables
