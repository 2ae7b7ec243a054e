#include "boundwave/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "boundwave/errors.hpp"

namespace boundwave::basis {

namespace {

constexpr int rescale_exp = 600;
const double rescale_threshold = std::ldexp(1.0, rescale_exp);

// Combine a raw recurrence value h * 2^e with the Gaussian factor e^g.
double finalize(double h, int e, double g)
{
    if (h == 0.0)
        return 0.0;
    if (e == 0 && g > -700.0)
        return h * std::exp(g);
    const double mag = std::exp(std::log(std::abs(h)) + g + e * std::numbers::ln2);
    return h < 0.0 ? -mag : mag;
}

cplx finalize(cplx h, int e, cplx g)
{
    if (h == cplx{})
        return h;
    if (e == 0 && g.real() > -700.0)
        return h * std::exp(g);
    return std::exp(std::log(h) + g + e * std::numbers::ln2);
}

double mag(double v) { return std::abs(v); }
double mag(cplx v) { return std::max(std::abs(v.real()), std::abs(v.imag())); }

// Normalized Hermite-function recurrence without the Gaussian factor; values
// exceeding 2^600 are rescaled by exact powers of two so that the result for
// -s is the exact negation pattern of the result for s.
template <class T>
void hermite_functions(double omega, T s, std::span<T> out)
{
    const int n_ch = static_cast<int>(out.size());
    const T g = -s * s / 2.0;
    const double c0 = std::pow(omega / std::numbers::pi, 0.25);

    T h_prev{}, h_cur = T(c0);
    int e = 0;
    out[0] = finalize(h_cur, 0, g);
    if (n_ch == 1)
        return;
    h_prev = h_cur;
    h_cur = std::numbers::sqrt2 * s * h_prev;
    out[1] = finalize(h_cur, 0, g);
    for (int n = 2; n < n_ch; ++n) {
        const T h_next = std::sqrt(2.0 / n) * s * h_cur - std::sqrt((n - 1.0) / n) * h_prev;
        h_prev = h_cur;
        h_cur = h_next;
        if (mag(h_cur) > rescale_threshold) {
            h_cur *= std::ldexp(1.0, -rescale_exp);
            h_prev *= std::ldexp(1.0, -rescale_exp);
            e += rescale_exp;
        }
        out[n] = finalize(h_cur, e, g);
    }
}

}  // namespace

BindingBasis::BindingBasis(BasisKind kind, double omega, double a, int n_ch)
    : kind_(kind), omega_(omega), a_(a), n_ch_(n_ch), eps_(n_ch)
{
    for (int n = 0; n < n_ch; ++n) {
        if (kind == BasisKind::Harmonic) {
            eps_[n] = 2.0 * omega * (n + 0.5);
        } else {
            const double k = (n + 1) * std::numbers::pi / (2.0 * a);
            eps_[n] = k * k;
        }
    }
}

BindingBasis BindingBasis::harmonic(double omega, int n_ch)
{
    if (!std::isfinite(omega) || omega <= 0.0)
        throw DomainError("basis", "harmonic stiffness must be positive, got " + std::to_string(omega));
    if (n_ch < 1)
        throw DomainError("basis", "channel count must be >= 1");
    if (n_ch > max_harmonic_channels)
        throw PrecisionError("basis", "Hermite recurrence not trusted beyond " +
                                          std::to_string(max_harmonic_channels) + " channels");
    return {BasisKind::Harmonic, omega, 0.0, n_ch};
}

BindingBasis BindingBasis::hardwall(double a, int n_ch)
{
    if (!std::isfinite(a) || a <= 0.0)
        throw DomainError("basis", "hardwall half-width must be positive, got " + std::to_string(a));
    if (n_ch < 1)
        throw DomainError("basis", "channel count must be >= 1");
    return {BasisKind::Hardwall, 0.0, a, n_ch};
}

void BindingBasis::check_index(int n) const
{
    if (n < 0 || n >= n_ch_)
        throw DomainError("basis", "channel index " + std::to_string(n) + " outside [0, " +
                                       std::to_string(n_ch_) + ")");
}

double BindingBasis::eigenenergy(int n) const
{
    check_index(n);
    return eps_[n];
}

double BindingBasis::eigenfunction(int n, double x) const
{
    check_index(n);
    std::vector<double> buf(n + 1);
    if (kind_ == BasisKind::Harmonic) {
        hermite_functions<double>(omega_, std::sqrt(omega_) * x, buf);
        return buf[n];
    }
    BindingBasis sub = *this;
    sub.n_ch_ = n + 1;
    sub.eigenfunctions(x, buf);
    return buf[n];
}

void BindingBasis::eigenfunctions(double x, std::span<double> out) const
{
    if (out.empty())
        return;
    if (static_cast<int>(out.size()) > n_ch_)
        throw DomainError("basis", "output span longer than channel count");
    if (kind_ == BasisKind::Harmonic) {
        hermite_functions<double>(omega_, std::sqrt(omega_) * x, out);
        return;
    }
    // Box [-a, a]: even n are cosines, odd n sines, so parity is exact.
    const double norm = 1.0 / std::sqrt(a_);
    const bool inside = std::abs(x) <= a_;
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (!inside) {
            out[n] = 0.0;
            continue;
        }
        const double k = (n + 1) * std::numbers::pi / (2.0 * a_);
        if (n % 2 == 0)
            out[n] = norm * std::cos(k * x) * ((n / 2) % 2 == 0 ? 1.0 : -1.0);
        else
            out[n] = norm * std::sin(k * x) * (((n + 1) / 2) % 2 == 0 ? 1.0 : -1.0);
    }
}

void BindingBasis::eigenfunctions(cplx z, std::span<cplx> out) const
{
    if (kind_ != BasisKind::Harmonic)
        throw DomainError("basis", "hardwall eigenfunctions are not analytic; complex argument unsupported");
    if (out.empty())
        return;
    if (static_cast<int>(out.size()) > n_ch_)
        throw DomainError("basis", "output span longer than channel count");
    hermite_functions<cplx>(omega_, std::sqrt(omega_) * z, out);
}

double effective_potential(const BindingBasis& b, const MirrorConfig& m, int n, int mm, double x_cm)
{
    const double pn_minus = b.eigenfunction(n, -x_cm), pm_minus = b.eigenfunction(mm, -x_cm);
    const double pn_plus = b.eigenfunction(n, x_cm), pm_plus = b.eigenfunction(mm, x_cm);
    return 2.0 * m.v1 * pn_minus * pm_minus + 2.0 * m.v2 * pn_plus * pm_plus;
}

Eigen::MatrixXd coupling_matrix(const BindingBasis& b, const MirrorConfig& m, double x_cm)
{
    const int n = b.n_ch();
    Eigen::VectorXd plus(n), minus(n);
    b.eigenfunctions(x_cm, {plus.data(), static_cast<std::size_t>(n)});
    b.eigenfunctions(-x_cm, {minus.data(), static_cast<std::size_t>(n)});
    // Filled by hand so that v(n, k) and v(k, n) are the same rounding.
    Eigen::MatrixXd v(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = k; i < n; ++i)
            v(i, k) = v(k, i) = 2.0 * m.v1 * (minus[i] * minus[k]) + 2.0 * m.v2 * (plus[i] * plus[k]);
    return v;
}

Eigen::MatrixXcd coupling_matrix(const BindingBasis& b, const MirrorConfig& m, cplx z_cm)
{
    const int n = b.n_ch();
    Eigen::VectorXcd plus(n), minus(n);
    b.eigenfunctions(z_cm, {plus.data(), static_cast<std::size_t>(n)});
    b.eigenfunctions(-z_cm, {minus.data(), static_cast<std::size_t>(n)});
    // Analytic continuation: plain transpose, no conjugation.
    Eigen::MatrixXcd v(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = k; i < n; ++i)
            v(i, k) = v(k, i) = 2.0 * m.v1 * (minus[i] * minus[k]) + 2.0 * m.v2 * (plus[i] * plus[k]);
    return v;
}

double coupling_cutoff(const BindingBasis& b, const MirrorConfig& m, double tol)
{
    if (m.free())
        return 0.0;
    if (b.kind() == BasisKind::Hardwall)
        return b.half_width();
    const double root = std::sqrt(b.omega());
    const double step = 0.02 / root;
    double x = std::sqrt(2.0 * b.n_ch() + 1.0) / root;  // outermost classical turning point
    for (int it = 0; it < 1000000; ++it, x += step) {
        if (coupling_matrix(b, m, x).cwiseAbs().maxCoeff() < tol)
            return x;
    }
    throw NumericalError("basis", "coupling envelope never fell below tolerance");
}

PotentialTable::PotentialTable(const BindingBasis& b, const MirrorConfig& m, std::span<const double> x)
    : n_ch_(b.n_ch()), n_points_(x.size())
{
    const std::size_t entries = static_cast<std::size_t>(n_ch_) * n_ch_ * n_points_;
    if (entries > max_table_entries)
        throw CapacityError("basis", "potential table of " + std::to_string(entries) +
                                         " entries exceeds the limit; reduce N_grid or N_ch");
    data_.resize(entries);
    for (std::size_t j = 0; j < n_points_; ++j) {
        const Eigen::MatrixXd v = coupling_matrix(b, m, x[j]);
        Eigen::Map<Eigen::MatrixXd>(data_.data() + j * n_ch_ * n_ch_, n_ch_, n_ch_) = v;
    }
}

PotentialTable potential_matrix(const BindingBasis& b, const MirrorConfig& m, std::span<const double> x)
{
    return {b, m, x};
}

}  // namespace boundwave::basis
