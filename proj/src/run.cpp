#include "boundwave/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "boundwave/io.hpp"
#include "boundwave/mirror.hpp"
#include "boundwave/wkb.hpp"

namespace boundwave::run {

namespace fs = std::filesystem;
using cplx = std::complex<double>;

namespace {

constexpr const char* version = "1.0.0";

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json matrix_json(const Eigen::MatrixXcd& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(complex_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> timeseries_header(int n_ch)
{
    std::vector<std::string> h{"t",        "norm",     "S",        "E_cm",     "E_rel",  "E_cm_L", "E_cm_R",
                               "E_rel_L",  "E_rel_R",  "E_mirror", "E_total", "trapped"};
    for (int n = 0; n < n_ch; ++n)
        h.push_back("p_" + std::to_string(n) + "_L");
    for (int n = 0; n < n_ch; ++n)
        h.push_back("p_" + std::to_string(n) + "_R");
    return h;
}

std::vector<double> timeseries_row(const observables::ObservableRecord& r)
{
    std::vector<double> v{r.t,
                          r.norm,
                          r.entropy,
                          r.energy.e_cm,
                          r.energy.e_rel,
                          r.energy.e_cm_left,
                          r.energy.e_cm_right,
                          r.energy.e_rel_left,
                          r.energy.e_rel_right,
                          r.e_mirror,
                          r.e_total,
                          r.trapped};
    v.insert(v.end(), r.p_left.begin(), r.p_left.end());
    v.insert(v.end(), r.p_right.begin(), r.p_right.end());
    return v;
}

void write_snapshot(const fs::path& dir, int index, const evolution::ChannelField& f, const SpatialGrid& grid,
                    int density_points)
{
    const int n_ch = f.n_ch();
    std::vector<std::string> h{"t", "x"};
    for (int n = 0; n < n_ch; ++n) {
        h.push_back("re_f" + std::to_string(n));
        h.push_back("im_f" + std::to_string(n));
    }
    io::CsvWriter field(dir / ("snapshot_" + std::to_string(index) + ".csv"), h);
    const auto& x = grid.x();
    for (std::size_t j = 0; j < x.size(); ++j) {
        std::vector<double> row{f.t, x[j]};
        for (int n = 0; n < n_ch; ++n) {
            row.push_back(f.f(static_cast<Eigen::Index>(j), n).real());
            row.push_back(f.f(static_cast<Eigen::Index>(j), n).imag());
        }
        field.row(row);
    }
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / static_cast<std::size_t>(density_points));
    const Eigen::MatrixXcd rho = observables::reduced_density_matrix(f, stride);
    io::CsvWriter dens(dir / ("density_" + std::to_string(index) + ".csv"), {"x", "x_prime", "abs_rho"});
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j)
            dens.row({x[static_cast<std::size_t>(i) * stride], x[static_cast<std::size_t>(j) * stride],
                      std::abs(rho(i, j))});
}

nlohmann::json simulate_experiment(const RunConfig& cfg, const fs::path& dir, nlohmann::json& notes)
{
    int snap_index = 0;
    const SnapshotFn snap = [&](const evolution::ChannelField& f, const evolution::Propagator& p) {
        write_snapshot(dir, snap_index++, f, p.grid(), cfg.density_points);
    };
    const SimulationOutcome out = simulate(cfg, snap);
    io::CsvWriter csv(dir / "timeseries.csv", timeseries_header(cfg.n_ch));
    for (const auto& r : out.records)
        csv.row(timeseries_row(r));

    const auto& last = out.records.back();
    nlohmann::json res;
    res["t_final"] = last.t;
    res["dt"] = out.dt;
    res["record_stride_steps"] = out.stride;
    res["mirror_cut"] = out.mirror_cut;
    res["p_left"] = last.p_left;
    res["p_right"] = last.p_right;
    double sl = 0.0, sr = 0.0;
    for (double v : last.p_left)
        sl += v;
    for (double v : last.p_right)
        sr += v;
    res["sum_p_left"] = sl;
    res["sum_p_right"] = sr;
    res["trapped_final"] = last.trapped;
    res["entropy_final"] = last.entropy;
    res["E_rel_L"] = last.energy.e_rel_left;
    res["E_rel_R"] = last.energy.e_rel_right;
    res["max_norm_error"] = out.max_norm_error;
    res["max_energy_drift"] = out.max_energy_drift;
    res["max_odd_population"] = out.max_odd_population;
    if (out.prediction) {
        res["prediction"] = {{"p_left", out.prediction->p_left},
                             {"p_right", out.prediction->p_right},
                             {"energies", out.prediction->n_energies},
                             {"max_unitarity_defect", out.prediction->max_unitarity_defect}};
    }
    for (const auto& w : out.warnings)
        notes.push_back(w);
    notes.push_back("side-resolved E_cm uses a sharp half-line window before the spectral derivative; "
                    "boundary artifact of order dx");
    if (last.trapped > 1e-6)
        notes.push_back("scattering incomplete at t_final: probability " + io::format(last.trapped) +
                        " remains in the coupling region");
    return res;
}

nlohmann::json scatter_experiment(const RunConfig& cfg, const fs::path& dir)
{
    const auto b = make_basis(cfg);
    const auto m = make_mirror(cfg);
    if (!cfg.sweep) {
        const auto left = stationary::solve_smatrix(cfg.energy, b, m);
        const auto right = stationary::solve_smatrix_right(cfg.energy, b, m);
        nlohmann::json j;
        j["left_incidence"] = smatrix_json(left);
        j["right_incidence"] = smatrix_json(right);
        j["reciprocity_defect"] = (right.t_flux() - left.t_flux().transpose()).cwiseAbs().maxCoeff();
        return j;
    }
    stationary::SmatrixSolver solver(b, m, cfg.sweep_e_max);
    const int n_ch = cfg.n_ch;
    std::vector<std::string> h{"E"};
    for (int n = 0; n < n_ch; ++n)
        h.push_back("T_" + std::to_string(n));
    for (int n = 0; n < n_ch; ++n)
        h.push_back("R_" + std::to_string(n));
    h.push_back("unitarity_defect");
    io::CsvWriter csv(dir / "sweep.csv", h);
    double worst = 0.0;
    const double eps_n0 = b.eigenenergy(cfg.n0);
    for (int i = 0; i < cfg.sweep_points; ++i) {
        const double E = cfg.sweep_e_min + (cfg.sweep_e_max - cfg.sweep_e_min) * i / (cfg.sweep_points - 1);
        std::vector<double> row{E};
        std::vector<double> tt(n_ch, 0.0), rr(n_ch, 0.0);
        double defect = std::numeric_limits<double>::quiet_NaN();
        if (E > eps_n0) {
            const auto s = solver.solve(E);
            const auto col = std::find(s.open.begin(), s.open.end(), cfg.n0) - s.open.begin();
            for (int c : s.open) {
                tt[c] = std::norm(s.t(c, col)) * s.k[c] / s.k[cfg.n0];
                rr[c] = std::norm(s.r(c, col)) * s.k[c] / s.k[cfg.n0];
            }
            defect = s.unitarity_defect();
            worst = std::max(worst, defect);
        }
        row.insert(row.end(), tt.begin(), tt.end());
        row.insert(row.end(), rr.begin(), rr.end());
        row.push_back(defect);
        csv.row(row);
    }
    return {{"points", cfg.sweep_points}, {"max_unitarity_defect", worst}};
}

nlohmann::json wkb_experiment(const RunConfig& cfg, const fs::path& dir, nlohmann::json& notes)
{
    const double omega = cfg.omega, v = cfg.v1;
    std::vector<double> x(cfg.wkb_points);
    for (int i = 0; i < cfg.wkb_points; ++i)
        x[i] = -cfg.wkb_x_max + 2.0 * cfg.wkb_x_max * i / (cfg.wkb_points - 1);
    const auto c = wkb::adiabatic_potentials(omega, v, x);
    io::CsvWriter csv(dir / "wkb_curves.csv", {"x", "V_plus", "V_minus", "V_plus_asym", "V_minus_asym"});
    for (std::size_t i = 0; i < x.size(); ++i)
        csv.row({x[i], c.v_plus[i], c.v_minus[i], c.v_plus_asym[i], c.v_minus_asym[i]});

    const auto est = wkb::resonance_estimate(omega, v);
    if (!est.regime_ok)
        notes.push_back("V < 10 sqrt(Omega): outside the regime of the asymptotic forms");
    nlohmann::json j;
    j["V_min"] = est.v_min;
    j["omega"] = est.omega_level;
    j["alpha"] = est.alpha;
    j["beta"] = est.beta;
    j["E_S"] = complex_json(est.e_sym);
    j["E_A"] = complex_json(est.e_anti);
    j["splitting"] = (est.e_sym - est.e_anti).real();
    const auto k = wkb::validate_constants(omega, v);
    j["constants"] = {{"u_star", k.u_star},
                      {"x_star", k.x_star},
                      {"depth_coefficient", k.depth_coefficient},
                      {"stiffness_coefficient", k.stiffness_coefficient}};
    auto minima_x = [&](const std::vector<double>& y) {
        nlohmann::json a = nlohmann::json::array();
        for (auto i : wkb::local_minima(y))
            a.push_back(x[i]);
        return a;
    };
    j["V_plus_minima"] = minima_x(c.v_plus);
    j["V_minus_minima"] = minima_x(c.v_minus);

    // V- well at the origin: depth below its barrier against the zero-point scale.
    const double h = 1e-3 / std::sqrt(omega);
    const auto near = wkb::adiabatic_potentials(omega, v, {-h, 0.0, h});
    const double curv = (near.v_minus[0] - 2.0 * near.v_minus[1] + near.v_minus[2]) / (h * h);
    const double barrier = *std::max_element(c.v_minus.begin(), c.v_minus.end());
    j["V_minus_well"] = {{"depth", barrier - near.v_minus[1]},
                         {"zero_point", curv > 0.0 ? std::sqrt(curv / 2.0) : 0.0}};
    return j;
}

}  // namespace

basis::BindingBasis make_basis(const RunConfig& cfg)
{
    return cfg.basis == "harmonic" ? basis::BindingBasis::harmonic(cfg.omega, cfg.n_ch)
                                   : basis::BindingBasis::hardwall(cfg.a, cfg.n_ch);
}

basis::MirrorConfig make_mirror(const RunConfig& cfg) { return {cfg.v1, cfg.v2}; }

evolution::WavepacketSpec make_packet(const RunConfig& cfg) { return {cfg.P, cfg.sigma, cfg.x0, cfg.n0}; }

SimulationOutcome simulate(const RunConfig& cfg, const SnapshotFn& snapshot)
{
    const auto b = make_basis(cfg);
    const auto m = make_mirror(cfg);
    const SpatialGrid grid(cfg.L, static_cast<std::size_t>(cfg.n_grid));
    const auto spec = make_packet(cfg);

    SimulationOutcome out;
    out.mirror_cut = basis::coupling_cutoff(b, m);
    out.dt = cfg.dt > 0.0 ? cfg.dt : evolution::default_dt(grid);
    evolution::PropagatorOptions opts;
    opts.absorbing_mask = cfg.absorbing_mask;
    evolution::Propagator prop(grid, b, m, out.dt, opts);
    auto state = evolution::init_wavepacket(grid, b, spec, out.mirror_cut);

    const double t_final = cfg.t_final > 0.0 ? cfg.t_final : 0.9 * evolution::max_wrap_free_time(grid, spec);
    const auto total_steps = static_cast<long>(std::ceil(t_final / out.dt));
    out.stride = static_cast<int>(std::max<long>(1, total_steps / cfg.records));

    const observables::ObservableRecord first = observables::record(state, prop, out.mirror_cut);
    auto observe = [&](const evolution::ChannelField& f) {
        if (!out.records.empty() && out.records.back().t == f.t)
            return;
        auto r = f.t == 0.0 && out.records.empty() ? first : observables::record(f, prop, out.mirror_cut);
        out.max_norm_error = std::max(out.max_norm_error, std::abs(r.norm - first.norm));
        out.max_energy_drift =
            std::max(out.max_energy_drift, std::abs(r.e_total - first.e_total) / std::abs(first.e_total));
        double odd = 0.0;
        for (int n = 1; n < f.n_ch(); n += 2)
            odd += r.p_left[n] + r.p_right[n];
        out.max_odd_population = std::max(out.max_odd_population, odd);
        out.records.push_back(std::move(r));
    };

    std::vector<double> stops = cfg.snapshot_times;
    std::sort(stops.begin(), stops.end());
    for (double ts : stops) {
        if (ts > state.t)
            prop.evolve(state, ts, observe, out.stride);
        else
            observe(state);
        if (snapshot)
            snapshot(state, prop);
    }
    if (t_final > state.t)
        prop.evolve(state, t_final, observe, out.stride);
    out.final_state = std::move(state);

    if (cfg.predict && !m.free()) {
        out.prediction = stationary::wavepacket_prediction(spec, b, m, cfg.prediction_nodes);
        for (const auto& w : out.prediction->warnings)
            out.warnings.push_back("prediction: " + w);
    }
    return out;
}

std::vector<SectorScan> resonance_scan(const RunConfig& cfg)
{
    const auto b = make_basis(cfg);
    const auto m = make_mirror(cfg);
    std::vector<SectorScan> out;
    std::vector<std::pair<std::string, std::vector<int>>> sectors;
    if (cfg.sector == "even" || (cfg.sector == "auto" && m.symmetric()))
        sectors.emplace_back("even", resonance::parity_sector(cfg.n_ch, 0));
    if (cfg.sector == "odd" || (cfg.sector == "auto" && m.symmetric() && cfg.n_ch > 1))
        sectors.emplace_back("odd", resonance::parity_sector(cfg.n_ch, 1));
    if (cfg.sector == "all" || (cfg.sector == "auto" && !m.symmetric()))
        sectors.emplace_back("all", std::vector<int>{});
    for (auto& [label, chans] : sectors) {
        resonance::ScanOptions opts;
        opts.channels = chans;
        opts.angle_tol = cfg.angle_tol;
        opts.e_max = cfg.e_max;
        opts.capacity = cfg.capacity;
        SectorScan s;
        s.label = label;
        s.scan = resonance::find_resonances(b, m, cfg.theta, cfg.L_r, cfg.N_r, cfg.stability_tol, opts);
        if (chans.empty())
            for (int n = 0; n < cfg.n_ch; ++n)
                chans.push_back(n);
        s.channels = chans;
        out.push_back(std::move(s));
    }
    return out;
}

nlohmann::json mirror_json(const RunConfig& cfg)
{
    const auto a = mirror1d::transmission_reflection(cfg.k, cfg.vm);
    nlohmann::json j{{"k", a.k},
                     {"V_m", a.v_m},
                     {"t", complex_json(a.t)},
                     {"r", complex_json(a.r)},
                     {"T", a.transmission()},
                     {"R", a.reflection()}};
    if (const auto p = mirror1d::pole_wavenumber(cfg.vm))
        j["pole"] = {{"k", complex_json(p->k)},
                     {"kind", p->kind == mirror1d::PoleKind::Resonance ? "resonance" : "bound_state"}};
    else
        j["pole"] = nullptr;
    return j;
}

nlohmann::json smatrix_json(const stationary::ScatteringMatrix& s)
{
    return {{"E", s.E},
            {"open", s.open},
            {"k", s.k},
            {"t", matrix_json(s.t)},
            {"r", matrix_json(s.r)},
            {"t_flux", matrix_json(s.t_flux())},
            {"r_flux", matrix_json(s.r_flux())},
            {"unitarity_defect", s.unitarity_defect()},
            {"rcond", s.rcond}};
}

nlohmann::json resonance_json(const std::vector<SectorScan>& scans, bool with_spectra)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : scans) {
        nlohmann::json j;
        j["sector"] = s.label;
        j["channels"] = s.channels;
        j["window"] = {s.scan.e_lo, s.scan.e_hi};
        nlohmann::json per = nlohmann::json::array();
        for (std::size_t i = 0; i < s.scan.spectra.size(); ++i) {
            const auto& sp = s.scan.spectra[i];
            nlohmann::json t;
            t["theta"] = sp.theta;
            nlohmann::json cands = nlohmann::json::array();
            for (cplx e : sp.candidates)
                cands.push_back(complex_json(e));
            t["candidates"] = cands;
            if (const cplx* c = s.scan.narrowest_candidate(i))
                t["narrowest_candidate"] = complex_json(*c);
            if (with_spectra) {
                nlohmann::json ev = nlohmann::json::array();
                for (cplx e : sp.eigenvalues)
                    ev.push_back(complex_json(e));
                t["eigenvalues"] = ev;
            }
            per.push_back(t);
        }
        j["spectra"] = per;
        nlohmann::json res = nlohmann::json::array();
        for (const auto& r : s.scan.resonances)
            res.push_back({{"re", r.E.real()},
                           {"im", r.E.imag()},
                           {"tau", r.tau},
                           {"stability", r.stability},
                           {"theta_window", {r.theta_lo, r.theta_hi}},
                           {"threshold_below", r.threshold_below},
                           {"ambiguous", r.ambiguous}});
        j["resonances"] = res;
        j["flags"] = s.scan.flags;
        out.push_back(j);
    }
    return out;
}

int exit_code(const Error& e)
{
    switch (e.kind()) {
    case ErrorKind::Domain:
    case ErrorKind::Config:
    case ErrorKind::Capacity: return 1;
    case ErrorKind::Numerical:
    case ErrorKind::Precision:
    case ErrorKind::Conditioning: return 2;
    }
    return 2;
}

fs::path output_root()
{
    if (const char* env = std::getenv("BOUNDWAVE_OUTPUT_ROOT"); env && *env)
        return env;
    return "boundwave_runs";
}

RunStatus run(const RunConfig& cfg, const fs::path& root)
{
    RunStatus st;
    const std::string name = cfg.name.empty() ? config::to_string(cfg.experiment) : cfg.name;
    st.directory = root / name;
    fs::create_directories(st.directory);

    nlohmann::json notes = nlohmann::json::array();
    nlohmann::json defaults = nlohmann::json::object();
    const nlohmann::json effective = config::to_json(cfg);
    for (const auto& k : cfg.defaulted)
        defaults[k] = effective[k];

    const auto t0 = std::chrono::steady_clock::now();
    std::string status = "complete";
    nlohmann::json error = nullptr;
    try {
        switch (cfg.experiment) {
        case config::Experiment::Mirror: st.result = mirror_json(cfg); break;
        case config::Experiment::Simulate: st.result = simulate_experiment(cfg, st.directory, notes); break;
        case config::Experiment::Scatter: st.result = scatter_experiment(cfg, st.directory); break;
        case config::Experiment::Resonances:
            st.result = {{"sectors", resonance_json(resonance_scan(cfg), true)}};
            break;
        case config::Experiment::Wkb: st.result = wkb_experiment(cfg, st.directory, notes); break;
        }
        io::write_json(st.directory / "result.json", st.result);
    } catch (const Error& e) {
        st.exit_code = exit_code(e);
        status = "partial";
        error = {{"module", e.module()}, {"message", e.what()}, {"exit_code", st.exit_code}};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    st.manifest = {{"program", "boundwave"},
                   {"version", version},
                   {"experiment", config::to_string(cfg.experiment)},
                   {"parameters", effective},
                   {"defaults_applied", defaults},
                   {"status", status},
                   {"error", error},
                   {"notes", notes},
                   {"wall_time_s", wall}};
    io::write_json(st.directory / "manifest.json", st.manifest);
    return st;
}

}  // namespace boundwave::run
