#include "boundwave/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "boundwave/errors.hpp"

namespace boundwave::stationary {

namespace {

using Mat = Eigen::MatrixXcd;

Mat rhs(const Mat& y, const Eigen::MatrixXd& w, int n)
{
    Mat d(2 * n, y.cols());
    d.topRows(n) = y.bottomRows(n);
    d.bottomRows(n).noalias() = w * y.topRows(n);
    return d;
}

// Gauss-Legendre rule on [0, 1] with N points.
template <int N>
void unit_rule(std::vector<double>& s, std::vector<double>& w)
{
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& a = rule::abscissa();
    const auto& wt = rule::weights();
    s.clear();
    w.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i];
        if (x == 0.0) {
            s.push_back(0.5);
            w.push_back(0.5 * wt[i]);
            continue;
        }
        s.push_back(0.5 * (1.0 - x));
        w.push_back(0.5 * wt[i]);
        s.push_back(0.5 * (1.0 + x));
        w.push_back(0.5 * wt[i]);
    }
}

void gauss_rule(int nodes, std::vector<double>& s, std::vector<double>& w)
{
    switch (nodes) {
    case 8: unit_rule<8>(s, w); break;
    case 12: unit_rule<12>(s, w); break;
    case 16: unit_rule<16>(s, w); break;
    case 20: unit_rule<20>(s, w); break;
    case 30: unit_rule<30>(s, w); break;
    case 40: unit_rule<40>(s, w); break;
    default: throw DomainError("stationary", "supported Gauss-Legendre node counts: 8, 12, 16, 20, 30, 40");
    }
}

}  // namespace

Eigen::MatrixXcd ScatteringMatrix::t_flux() const
{
    const int no = n_open();
    Eigen::MatrixXcd out(no, no);
    for (int i = 0; i < no; ++i)
        for (int j = 0; j < no; ++j)
            out(i, j) = t(open[i], j) * std::sqrt(k[open[i]] / k[open[j]]);
    return out;
}

Eigen::MatrixXcd ScatteringMatrix::r_flux() const
{
    const int no = n_open();
    Eigen::MatrixXcd out(no, no);
    for (int i = 0; i < no; ++i)
        for (int j = 0; j < no; ++j)
            out(i, j) = r(open[i], j) * std::sqrt(k[open[i]] / k[open[j]]);
    return out;
}

double ScatteringMatrix::unitarity_defect() const
{
    const Eigen::MatrixXcd tf = t_flux(), rf = r_flux();
    double worst = 0.0;
    for (int m = 0; m < n_open(); ++m)
        worst = std::max(worst, std::abs(tf.col(m).squaredNorm() + rf.col(m).squaredNorm() - 1.0));
    return worst;
}

SmatrixSolver::SmatrixSolver(const BindingBasis& basis, const MirrorConfig& mirror, double e_max, SolverOptions opts)
    : basis_(basis), mirror_(mirror), opts_(opts), e_max_(e_max)
{
    const auto& eps = basis.energies();
    if (!std::isfinite(e_max) || e_max <= eps.front())
        throw DomainError("stationary", "energy must exceed the lowest threshold");
    x_cut_ = opts.x_cut > 0.0 ? opts.x_cut : basis::coupling_cutoff(basis, mirror, opts.envelope_tol);
    x_cut_ = std::max(x_cut_, 1.0);

    double v_max = 0.0;
    const int probe = 400;
    for (int i = 0; i <= probe; ++i) {
        const double x = -x_cut_ + 2.0 * x_cut_ * i / probe;
        v_max = std::max(v_max, basis::coupling_matrix(basis, mirror, x).cwiseAbs().maxCoeff());
    }
    const double k_scale = std::sqrt(std::max({e_max - eps.front(), eps.back() + v_max - eps.front(), 1.0}));
    const double h_target = opts.step_scale / k_scale;
    n_steps_ = static_cast<int>(std::ceil(2.0 * x_cut_ / h_target));
    h_ = 2.0 * x_cut_ / n_steps_;
    v_.reserve(2 * static_cast<std::size_t>(n_steps_) + 1);
    for (int i = 0; i <= 2 * n_steps_; ++i)
        v_.push_back(basis::coupling_matrix(basis, mirror, x_cut_ - 0.5 * h_ * i));
}

ScatteringMatrix SmatrixSolver::solve(double E) const
{
    const auto& eps = basis_.energies();
    const int n = basis_.n_ch();
    if (!std::isfinite(E) || E <= eps.front())
        throw DomainError("stationary", "energy " + std::to_string(E) + " below all channel thresholds");
    if (E > e_max_ * (1.0 + 1e-12))
        throw DomainError("stationary", "energy exceeds the range the solver was built for");

    ScatteringMatrix s;
    s.E = E;
    s.k.resize(n);
    for (int c = 0; c < n; ++c) {
        s.k[c] = std::sqrt(std::abs(E - eps[c]));
        if (E > eps[c])
            s.open.push_back(c);
    }
    const int no = s.n_open();
    const double X = x_cut_;
    const cplx I{0.0, 1.0};

    auto is_open = [&](int c) { return E > eps[c]; };

    // Right-side solutions: outgoing waves normalized to 1 at x = X.
    Mat y = Mat::Zero(2 * n, n);
    for (int c = 0; c < n; ++c) {
        y(c, c) = 1.0;
        y(n + c, c) = is_open(c) ? I * s.k[c] : cplx{-s.k[c], 0.0};
    }

    std::vector<Mat> rs;
    rs.reserve(static_cast<std::size_t>(n_steps_) + 1);
    auto orthonormalize = [&](Mat& m) {
        Eigen::HouseholderQR<Mat> qr(m);
        rs.push_back(qr.matrixQR().topRows(n).triangularView<Eigen::Upper>());
        m = qr.householderQ() * Mat::Identity(2 * n, n);
    };
    orthonormalize(y);

    const double h = -h_;
    Eigen::MatrixXd w0(n, n), w1(n, n), w2(n, n);
    const Eigen::VectorXd shift = Eigen::Map<const Eigen::VectorXd>(eps.data(), n).array() - E;
    for (int i = 0; i < n_steps_; ++i) {
        w0 = v_[2 * i];
        w1 = v_[2 * i + 1];
        w2 = v_[2 * i + 2];
        w0.diagonal() += shift;
        w1.diagonal() += shift;
        w2.diagonal() += shift;
        const Mat k1 = rhs(y, w0, n);
        const Mat k2 = rhs(y + 0.5 * h * k1, w1, n);
        const Mat k3 = rhs(y + 0.5 * h * k2, w1, n);
        const Mat k4 = rhs(y + h * k3, w2, n);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        orthonormalize(y);
    }

    // At -X: y a = incident + reflected. Unknowns [a; r] for every open incident channel.
    Mat lhs(2 * n, 2 * n);
    lhs.leftCols(n) = y;
    lhs.rightCols(n).setZero();
    for (int c = 0; c < n; ++c) {
        if (is_open(c)) {
            const cplx e = std::exp(I * s.k[c] * X);  // e^{-ik(-X)}
            lhs(c, n + c) = -e;
            lhs(n + c, n + c) = I * s.k[c] * e;
        } else {
            lhs(c, n + c) = -1.0;
            lhs(n + c, n + c) = -s.k[c];
        }
    }
    Mat b = Mat::Zero(2 * n, no);
    for (int j = 0; j < no; ++j) {
        const int m = s.open[j];
        const cplx e = std::exp(-I * s.k[m] * X);
        b(m, j) = e;
        b(n + m, j) = I * s.k[m] * e;
    }
    Eigen::PartialPivLU<Mat> lu(lhs);
    s.rcond = lu.rcond();
    if (!(s.rcond > opts_.min_rcond)) {
        std::ostringstream os;
        os << "ill-conditioned channel matching at E=" << E << " (rcond " << s.rcond
           << "); reduce the x range or the channel count";
        throw ConditioningError("stationary", os.str());
    }
    const Mat sol = lu.solve(b);
    Mat a = sol.topRows(n);
    s.r = sol.bottomRows(n);
    for (auto it = rs.rbegin(); it != rs.rend(); ++it)
        a = it->triangularView<Eigen::Upper>().solve(a);
    s.t.resize(n, no);
    for (int c = 0; c < n; ++c)
        for (int j = 0; j < no; ++j)
            s.t(c, j) = is_open(c) ? a(c, j) * std::exp(-I * s.k[c] * X) : a(c, j);
    if (!s.t.allFinite() || !s.r.allFinite())
        throw NumericalError("stationary", "non-finite amplitudes at E=" + std::to_string(E));
    return s;
}

ScatteringMatrix solve_smatrix(double E, const BindingBasis& basis, const MirrorConfig& mirror, SolverOptions opts)
{
    return SmatrixSolver(basis, mirror, E, opts).solve(E);
}

ScatteringMatrix solve_smatrix_right(double E, const BindingBasis& basis, const MirrorConfig& mirror,
                                     SolverOptions opts)
{
    const MirrorConfig swapped{mirror.v2, mirror.v1};
    return SmatrixSolver(basis, swapped, E, opts).solve(E);
}

PacketPrediction wavepacket_prediction(const evolution::WavepacketSpec& spec, const BindingBasis& basis,
                                       const MirrorConfig& mirror, int nodes, SolverOptions opts)
{
    const int n = basis.n_ch();
    const int n0 = spec.n0;
    if (n0 < 0 || n0 >= n)
        throw DomainError("stationary", "incident channel outside the basis");
    if (!(spec.sigma > 0.0))
        throw DomainError("stationary", "packet width must be positive");
    const auto& eps = basis.energies();
    const double sig = spec.sigma;
    const double k_lo = std::max(spec.P - 6.0 / sig, 0.0);
    const double k_hi = spec.P + 6.0 / sig;
    if (!(k_hi > 0.0))
        throw DomainError("stationary", "packet momentum window lies entirely at k <= 0");

    PacketPrediction out;
    out.p_left.assign(n, 0.0);
    out.p_right.assign(n, 0.0);
    out.below_threshold = 0.5 * std::erfc(spec.P * sig / std::numbers::sqrt2);

    auto density = [&](double k) {
        const double d = k - spec.P;
        return sig / std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * sig * sig * d * d);
    };

    std::vector<double> cuts{k_lo};
    for (int c = n0 + 1; c < n; ++c) {
        const double kt = std::sqrt(eps[c] - eps[n0]);
        if (kt > k_lo && kt < k_hi) {
            cuts.push_back(kt);
            if (density(kt) > 1e-3 * density(spec.P)) {
                std::ostringstream os;
                os << "channel " << c << " threshold at k=" << kt << " lies inside the packet momentum support";
                out.warnings.push_back(os.str());
            }
        }
    }
    cuts.push_back(k_hi);

    // Keep every panel within one momentum standard deviation.
    std::vector<double> panels{cuts.front()};
    for (std::size_t iv = 0; iv + 1 < cuts.size(); ++iv) {
        const double a = cuts[iv], b = cuts[iv + 1];
        const int m = std::max(1, static_cast<int>(std::ceil((b - a) * sig)));
        for (int i = 1; i <= m; ++i)
            panels.push_back(i == m ? b : a + (b - a) * i / m);
    }

    SmatrixSolver solver(basis, mirror, eps[n0] + k_hi * k_hi, opts);
    std::vector<double> s, w;
    gauss_rule(nodes, s, w);
    for (std::size_t iv = 0; iv + 1 < panels.size(); ++iv) {
        const double a = panels[iv], b = panels[iv + 1];
        for (std::size_t q = 0; q < s.size(); ++q) {
            const double k = a + (b - a) * 0.5 * (1.0 - std::cos(std::numbers::pi * s[q]));
            const double jac = (b - a) * 0.5 * std::numbers::pi * std::sin(std::numbers::pi * s[q]);
            const double weight = w[q] * jac * density(k);
            const ScatteringMatrix sm = solver.solve(eps[n0] + k * k);
            ++out.n_energies;
            out.max_unitarity_defect = std::max(out.max_unitarity_defect, sm.unitarity_defect());
            const auto col = std::find(sm.open.begin(), sm.open.end(), n0) - sm.open.begin();
            for (int j = 0; j < sm.n_open(); ++j) {
                const int c = sm.open[j];
                const double ratio = sm.k[c] / k;
                out.p_right[c] += weight * std::norm(sm.t(c, col)) * ratio;
                out.p_left[c] += weight * std::norm(sm.r(c, col)) * ratio;
            }
        }
    }
    out.p_left[n0] += out.below_threshold;
    return out;
}

}  // namespace boundwave::stationary
