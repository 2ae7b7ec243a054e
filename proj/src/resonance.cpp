#include "boundwave/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "boundwave/errors.hpp"

namespace boundwave::resonance {

namespace {

Eigen::MatrixXd sine_dvr_kinetic(int n_r, double box)
{
    const double scale = std::sqrt(2.0 / (n_r + 1));
    Eigen::MatrixXd s(n_r, n_r);
    for (int i = 1; i <= n_r; ++i)
        for (int m = 1; m <= n_r; ++m)
            s(i - 1, m - 1) = scale * std::sin(std::numbers::pi * i * m / (n_r + 1));
    Eigen::VectorXd lam(n_r);
    for (int m = 1; m <= n_r; ++m)
        lam(m - 1) = std::pow(std::numbers::pi * m / box, 2);
    Eigen::MatrixXd t = s * lam.asDiagonal() * s.transpose();
    return t;
}

// min over thresholds below Re E of |arg(E - eps) + 2 theta|; +inf if none.
double ray_distance(cplx e, const std::vector<double>& thresholds, double theta)
{
    double best = std::numeric_limits<double>::infinity();
    for (double eps : thresholds)
        if (e.real() > eps)
            best = std::min(best, std::abs(std::arg(e - eps) + 2.0 * theta));
    return best;
}

}  // namespace

std::vector<int> parity_sector(int n_ch, int parity)
{
    std::vector<int> out;
    for (int n = parity; n < n_ch; n += 2)
        out.push_back(n);
    return out;
}

ScaledHamiltonian build_scaled_hamiltonian(const BindingBasis& basis, const MirrorConfig& mirror, double theta,
                                           double L_r, int N_r, std::vector<int> channels)
{
    if (basis.kind() != basis::BasisKind::Harmonic)
        throw DomainError("resonance", "complex scaling needs an analytic basis; the hardwall basis is unsupported");
    if (!(theta >= 0.0) || !(theta < std::numbers::pi / 4.0))
        throw DomainError("resonance", "rotation angle must satisfy 0 <= theta < pi/4, got " + std::to_string(theta));
    if (!(L_r > 0.0) || !std::isfinite(L_r))
        throw DomainError("resonance", "box length must be positive");
    if (N_r < 100)
        throw DomainError("resonance", "N_r must be at least 100");
    if (channels.empty())
        for (int n = 0; n < basis.n_ch(); ++n)
            channels.push_back(n);
    for (int c : channels)
        if (c < 0 || c >= basis.n_ch())
            throw DomainError("resonance", "channel " + std::to_string(c) + " outside the basis");

    ScaledHamiltonian out;
    out.theta = theta;
    out.L_r = L_r;
    out.N_r = N_r;
    out.channels = channels;
    for (int c : channels)
        out.thresholds.push_back(basis.energies()[c]);

    const int nc = static_cast<int>(channels.size());
    const int dim = nc * N_r;
    const double h = L_r / (N_r + 1);
    const cplx rot = std::polar(1.0, theta);
    const cplx kin_rot = std::polar(1.0, -2.0 * theta);
    const Eigen::MatrixXd t = sine_dvr_kinetic(N_r, L_r);

    out.H = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < nc; ++a) {
        out.H.block(a * N_r, a * N_r, N_r, N_r) = kin_rot * t.cast<cplx>();
        for (int i = 0; i < N_r; ++i)
            out.H(a * N_r + i, a * N_r + i) += out.thresholds[a];
    }
    for (int i = 0; i < N_r; ++i) {
        const double x = -L_r / 2.0 + h * (i + 1);
        const Eigen::MatrixXcd v = basis::coupling_matrix(basis, mirror, x * rot);
        for (int a = 0; a < nc; ++a)
            for (int b = 0; b < nc; ++b)
                out.H(a * N_r + i, b * N_r + i) += v(channels[a], channels[b]);
    }
    return out;
}

std::vector<cplx> complex_spectrum(const ScaledHamiltonian& H, int capacity)
{
    const auto n = static_cast<int>(H.H.rows());
    if (n > capacity)
        throw CapacityError("resonance", "dense eigenproblem of dimension " + std::to_string(n) +
                                             " exceeds capacity " + std::to_string(capacity) +
                                             "; reduce N_r or N_ch");
    Eigen::MatrixXcd a = H.H;
    std::vector<cplx> w(n);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(), nullptr, 1,
                                          nullptr, 1);
    if (info != 0)
        throw NumericalError("resonance", "zgeev failed with info=" + std::to_string(info));
    // zgeev returns eigenvalues in no documented order; sort for reproducible output.
    std::sort(w.begin(), w.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return w;
}

Classification classify_continuum(const std::vector<cplx>& eigs, const std::vector<double>& thresholds, double theta,
                                  double angle_tol)
{
    Classification c;
    for (cplx e : eigs) {
        if (ray_distance(e, thresholds, theta) < angle_tol)
            c.continuum.push_back(e);
        else
            c.candidates.push_back(e);
    }
    return c;
}

double median_ray_deviation(const std::vector<cplx>& eigs, const std::vector<double>& thresholds, double theta)
{
    std::vector<double> d;
    for (cplx e : eigs) {
        const double r = ray_distance(e, thresholds, theta);
        if (std::isfinite(r))
            d.push_back(r);
    }
    if (d.empty())
        return std::numeric_limits<double>::quiet_NaN();
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    if (d.size() % 2 == 1)
        return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(d.begin(), mid);
    return 0.5 * (lower + upper);
}

double lifetime(cplx e_res)
{
    if (!(e_res.imag() < 0.0))
        throw DomainError("resonance", "lifetime needs Im E < 0");
    return -1.0 / (2.0 * e_res.imag());
}

const cplx* ResonanceScan::narrowest_candidate(std::size_t i) const
{
    const auto& c = spectra.at(i).candidates;
    if (c.empty())
        return nullptr;
    return &*std::min_element(c.begin(), c.end(), [](cplx a, cplx b) { return std::abs(a.imag()) < std::abs(b.imag()); });
}

ResonanceScan find_resonances(const BindingBasis& basis, const MirrorConfig& mirror,
                              const std::vector<double>& theta_list, double L_r, int N_r, double stability_tol,
                              const ScanOptions& opts)
{
    if (theta_list.size() < 2)
        throw DomainError("resonance", "stability screening needs at least two angles");
    if (!(stability_tol > 0.0))
        throw DomainError("resonance", "stability tolerance must be positive");

    ResonanceScan scan;
    std::vector<double> thresholds;
    for (double theta : theta_list) {
        const ScaledHamiltonian H = build_scaled_hamiltonian(basis, mirror, theta, L_r, N_r, opts.channels);
        if (thresholds.empty()) {
            thresholds = H.thresholds;
            scan.e_lo = *std::min_element(thresholds.begin(), thresholds.end());
            const double top = *std::max_element(thresholds.begin(), thresholds.end());
            scan.e_hi = opts.e_max > 0.0
                            ? opts.e_max
                            : top + 4.0 * (mirror.v1 + mirror.v2) * std::sqrt(basis.omega() / std::numbers::pi);
        }
        ThetaSpectrum ts;
        ts.theta = theta;
        ts.eigenvalues = complex_spectrum(H, opts.capacity);
        for (cplx e : classify_continuum(ts.eigenvalues, thresholds, theta, opts.angle_tol).candidates)
            if (e.imag() < 0.0 && e.real() > scan.e_lo && e.real() < scan.e_hi)
                ts.candidates.push_back(e);
        scan.spectra.push_back(std::move(ts));
    }

    const double radius = 10.0 * stability_tol;
    const auto [lo_it, hi_it] = std::minmax_element(theta_list.begin(), theta_list.end());
    for (cplx ref : scan.spectra.front().candidates) {
        double drift = 0.0;
        bool matched = true, ambiguous = false;
        for (std::size_t s = 1; s < scan.spectra.size(); ++s) {
            const auto& cand = scan.spectra[s].candidates;
            double best = std::numeric_limits<double>::infinity();
            int within = 0;
            for (cplx e : cand) {
                const double d = std::abs(e - ref);
                best = std::min(best, d);
                if (d < radius)
                    ++within;
            }
            if (within > 1)
                ambiguous = true;
            if (!(best < radius)) {
                matched = false;
                break;
            }
            drift = std::max(drift, best);
        }
        if (!matched || drift >= stability_tol)
            continue;
        ResonanceCandidate rc;
        rc.E = ref;
        rc.tau = lifetime(ref);
        rc.theta_lo = *lo_it;
        rc.theta_hi = *hi_it;
        rc.stability = drift;
        rc.ambiguous = ambiguous;
        for (double eps : thresholds)
            if (eps < ref.real())
                rc.threshold_below = std::max(rc.threshold_below, eps);
        if (ambiguous) {
            std::ostringstream os;
            os << "pairing ambiguity near E=" << ref.real() << (ref.imag() < 0 ? "-" : "+") << std::abs(ref.imag())
               << "i: several candidates within the pairing radius " << radius;
            scan.flags.push_back(os.str());
        }
        scan.resonances.push_back(rc);
    }
    std::sort(scan.resonances.begin(), scan.resonances.end(),
              [](const ResonanceCandidate& a, const ResonanceCandidate& b) { return a.E.real() < b.E.real(); });
    return scan;
}

}  // namespace boundwave::resonance
