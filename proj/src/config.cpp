#include "boundwave/config.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "boundwave/errors.hpp"

namespace boundwave::config {

namespace {

struct Field {
    std::string key;
    std::function<void(RunConfig&, const YAML::Node&)> set;
    std::function<nlohmann::json(const RunConfig&)> get;
};

std::string where(const YAML::Node& n)
{
    const auto m = n.Mark();
    if (m.line < 0)
        return "";
    return " (line " + std::to_string(m.line + 1) + ")";
}

template <class T>
Field field(const char* key, T RunConfig::*member)
{
    return {key,
            [key, member](RunConfig& c, const YAML::Node& n) {
                try {
                    c.*member = n.as<T>();
                } catch (const YAML::Exception&) {
                    throw ConfigError(std::string("field '") + key + "' has the wrong type" + where(n));
                }
            },
            [member](const RunConfig& c) { return nlohmann::json(c.*member); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back({"experiment",
                     [](RunConfig& c, const YAML::Node& n) {
                         try {
                             c.experiment = parse_experiment(n.as<std::string>());
                         } catch (const YAML::Exception&) {
                             throw ConfigError("field 'experiment' must be a string" + where(n));
                         }
                     },
                     [](const RunConfig& c) { return nlohmann::json(to_string(c.experiment)); }});
        f.push_back(field("name", &RunConfig::name));
        f.push_back(field("basis", &RunConfig::basis));
        f.push_back(field("omega", &RunConfig::omega));
        f.push_back(field("a", &RunConfig::a));
        f.push_back(field("v1", &RunConfig::v1));
        f.push_back(field("v2", &RunConfig::v2));
        f.push_back(field("P", &RunConfig::P));
        f.push_back(field("sigma", &RunConfig::sigma));
        f.push_back(field("x0", &RunConfig::x0));
        f.push_back(field("n0", &RunConfig::n0));
        f.push_back(field("n_ch", &RunConfig::n_ch));
        f.push_back(field("L", &RunConfig::L));
        f.push_back(field("n_grid", &RunConfig::n_grid));
        f.push_back(field("dt", &RunConfig::dt));
        f.push_back(field("t_final", &RunConfig::t_final));
        f.push_back(field("records", &RunConfig::records));
        f.push_back(field("snapshot_times", &RunConfig::snapshot_times));
        f.push_back(field("density_points", &RunConfig::density_points));
        f.push_back(field("absorbing_mask", &RunConfig::absorbing_mask));
        f.push_back(field("predict", &RunConfig::predict));
        f.push_back(field("prediction_nodes", &RunConfig::prediction_nodes));
        f.push_back(field("energy", &RunConfig::energy));
        f.push_back(field("sweep", &RunConfig::sweep));
        f.push_back(field("sweep_e_min", &RunConfig::sweep_e_min));
        f.push_back(field("sweep_e_max", &RunConfig::sweep_e_max));
        f.push_back(field("sweep_points", &RunConfig::sweep_points));
        f.push_back(field("L_r", &RunConfig::L_r));
        f.push_back(field("N_r", &RunConfig::N_r));
        f.push_back(field("theta", &RunConfig::theta));
        f.push_back(field("stability_tol", &RunConfig::stability_tol));
        f.push_back(field("angle_tol", &RunConfig::angle_tol));
        f.push_back(field("e_max", &RunConfig::e_max));
        f.push_back(field("sector", &RunConfig::sector));
        f.push_back(field("capacity", &RunConfig::capacity));
        f.push_back(field("wkb_x_max", &RunConfig::wkb_x_max));
        f.push_back(field("wkb_points", &RunConfig::wkb_points));
        f.push_back(field("k", &RunConfig::k));
        f.push_back(field("vm", &RunConfig::vm));
        return f;
    }();
    return table;
}

const Field& find_field(const std::string& key)
{
    for (const auto& f : fields())
        if (f.key == key)
            return f;
    throw ConfigError("unknown field '" + key + "'");
}

[[noreturn]] void fail(const std::string& key, const std::string& constraint)
{
    throw ConfigError("field '" + key + "' violates: " + constraint);
}

void mark_default(RunConfig& c, const std::string& key)
{
    if (std::find(c.defaulted.begin(), c.defaulted.end(), key) == c.defaulted.end())
        c.defaulted.push_back(key);
}

}  // namespace

Experiment parse_experiment(const std::string& s)
{
    if (s == "mirror")
        return Experiment::Mirror;
    if (s == "simulate")
        return Experiment::Simulate;
    if (s == "scatter")
        return Experiment::Scatter;
    if (s == "resonances")
        return Experiment::Resonances;
    if (s == "wkb")
        return Experiment::Wkb;
    throw ConfigError("unknown experiment kind '" + s + "' (mirror|simulate|scatter|resonances|wkb)");
}

std::string to_string(Experiment e)
{
    switch (e) {
    case Experiment::Mirror: return "mirror";
    case Experiment::Simulate: return "simulate";
    case Experiment::Scatter: return "scatter";
    case Experiment::Resonances: return "resonances";
    case Experiment::Wkb: return "wkb";
    }
    return "?";
}

RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides)
{
    RunConfig cfg;
    std::set<std::string> given;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (root && !root.IsNull()) {
        if (!root.IsMap())
            throw ConfigError("configuration must be a flat key-value mapping");
        for (const auto& kv : root) {
            const auto key = kv.first.as<std::string>();
            if (kv.second.IsMap())
                throw ConfigError("field '" + key + "' must be a scalar or list" + where(kv.second));
            find_field(key).set(cfg, kv.second);
            given.insert(key);
        }
    }
    for (const auto& [key, value] : overrides) {
        YAML::Node n;
        try {
            n = YAML::Load(value);
        } catch (const YAML::ParserException& e) {
            throw ConfigError("cannot parse override " + key + "=" + value + ": " + e.msg);
        }
        find_field(key).set(cfg, n);
        given.insert(key);
    }
    for (const auto& f : fields())
        if (!given.count(f.key))
            cfg.defaulted.push_back(f.key);
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<Override>& overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

void validate(RunConfig& c)
{
    auto finite = [](double v) { return std::isfinite(v); };

    if (c.basis != "harmonic" && c.basis != "hardwall")
        fail("basis", "one of harmonic, hardwall");
    if (c.basis == "harmonic" && !(c.omega > 0.0 && finite(c.omega)))
        fail("omega", "Omega > 0");
    if (c.basis == "hardwall" && !(c.a > 0.0 && finite(c.a)))
        fail("a", "a > 0");
    if (!(c.v1 >= 0.0 && finite(c.v1)))
        fail("v1", "finite V1 >= 0");
    if (!(c.v2 >= 0.0 && finite(c.v2)))
        fail("v2", "finite V2 >= 0");
    if (c.n_ch < 1)
        fail("n_ch", "N_ch >= 1");
    if (c.n0 < 0 || c.n0 >= c.n_ch)
        fail("n0", "0 <= n0 < N_ch");
    if (!(c.sigma > 0.0 && finite(c.sigma)))
        fail("sigma", "sigma > 0");
    if (!finite(c.P))
        fail("P", "finite");
    if (!(c.x0 < 0.0))
        fail("x0", "x0 < 0 (packet starts left of the mirror)");
    if (!(c.L > 0.0 && finite(c.L)))
        fail("L", "L > 0");
    if (c.n_grid < 16 || !std::has_single_bit(static_cast<unsigned>(c.n_grid)))
        fail("n_grid", "power of two >= 16");
    if (!(c.dt >= 0.0 && finite(c.dt)))
        fail("dt", "dt >= 0 (0 selects the default)");
    if (!(c.t_final >= 0.0 && finite(c.t_final)))
        fail("t_final", "t_final >= 0 (0 selects the default)");
    if (c.records < 1)
        fail("records", "records >= 1");
    if (c.density_points < 2)
        fail("density_points", "density_points >= 2");
    if (c.prediction_nodes != 8 && c.prediction_nodes != 12 && c.prediction_nodes != 16 &&
        c.prediction_nodes != 20 && c.prediction_nodes != 30 && c.prediction_nodes != 40)
        fail("prediction_nodes", "one of 8, 12, 16, 20, 30, 40");
    if (c.N_r < 100)
        fail("N_r", "N_r >= 100");
    if (!(c.L_r >= 0.0 && finite(c.L_r)))
        fail("L_r", "L_r >= 0 (0 selects the default)");
    if (!(c.stability_tol > 0.0))
        fail("stability_tol", "> 0");
    if (!(c.angle_tol > 0.0))
        fail("angle_tol", "> 0");
    if (c.sector != "auto" && c.sector != "all" && c.sector != "even" && c.sector != "odd")
        fail("sector", "one of auto, all, even, odd");
    if (c.capacity < 1)
        fail("capacity", ">= 1");
    if (c.sweep_points < 2)
        fail("sweep_points", ">= 2");
    if (c.wkb_points < 3)
        fail("wkb_points", ">= 3");
    for (double t : c.snapshot_times)
        if (!(t >= 0.0 && finite(t)))
            fail("snapshot_times", "finite times >= 0");
    for (double th : c.theta)
        if (!(th >= 0.0 && th < std::numbers::pi / 4.0))
            fail("theta", "0 <= theta < pi/4");

    const double scale = c.basis == "harmonic" ? 1.0 / std::sqrt(c.omega) : c.a;
    const bool symmetric = c.v1 == c.v2;

    switch (c.experiment) {
    case Experiment::Mirror:
        if (!(c.k > 0.0 && finite(c.k)))
            fail("k", "k > 0");
        if (!finite(c.vm))
            fail("vm", "finite");
        break;
    case Experiment::Simulate: {
        const double dx = c.L / c.n_grid;
        if (std::abs(c.x0) + 4.0 * c.sigma >= c.L / 2.0)
            fail("x0", "|x0| + 4 sigma < L/2");
        const double bound = (c.L / 2.0 - std::abs(c.x0)) / (2.0 * (std::abs(c.P) + 4.0 / c.sigma));
        if (c.t_final == 0.0) {
            c.t_final = 0.9 * bound;
            mark_default(c, "t_final");
        } else if (c.t_final > bound) {
            fail("t_final", "no-wrap bound L/2 > |x0| + 2 (P + 4/sigma) t_final, i.e. t_final <= " +
                                std::to_string(bound));
        }
        if (c.dt == 0.0) {
            c.dt = 0.25 * dx * dx / std::numbers::pi;
            mark_default(c, "dt");
        }
        for (double t : c.snapshot_times)
            if (t > c.t_final)
                fail("snapshot_times", "times <= t_final");
        break;
    }
    case Experiment::Scatter:
        if (c.energy == 0.0 && !c.sweep) {
            const double eps_n0 = c.basis == "harmonic"
                                      ? 2.0 * c.omega * (c.n0 + 0.5)
                                      : std::pow((c.n0 + 1) * std::numbers::pi / (2.0 * c.a), 2);
            c.energy = eps_n0 + c.P * c.P + 1.0 / (c.sigma * c.sigma);
            mark_default(c, "energy");
        }
        if (c.sweep) {
            const double eps0 = c.basis == "harmonic" ? c.omega : std::pow(std::numbers::pi / (2.0 * c.a), 2);
            if (c.sweep_e_min == 0.0) {
                c.sweep_e_min = eps0 + 1e-3 * scale * scale;
                mark_default(c, "sweep_e_min");
            }
            if (c.sweep_e_max == 0.0) {
                const double kh = std::abs(c.P) + 6.0 / c.sigma;
                c.sweep_e_max = eps0 + kh * kh;
                mark_default(c, "sweep_e_max");
            }
            if (!(c.sweep_e_max > c.sweep_e_min) || !(c.sweep_e_min > eps0))
                fail("sweep_e_min", "eps_0 < sweep_e_min < sweep_e_max");
        }
        break;
    case Experiment::Resonances:
        if (c.basis != "harmonic")
            fail("basis", "complex scaling needs the harmonic basis");
        if (c.L_r == 0.0) {
            c.L_r = 36.0 / std::sqrt(c.omega);
            mark_default(c, "L_r");
        }
        if (c.theta.empty()) {
            c.theta = symmetric ? std::vector<double>{0.1, 0.15} : std::vector<double>{0.35, 0.40};
            mark_default(c, "theta");
        }
        if (c.theta.size() < 2)
            fail("theta", "at least two angles");
        break;
    case Experiment::Wkb:
        if (c.basis != "harmonic")
            fail("basis", "the adiabatic analysis uses the harmonic basis");
        if (!symmetric || !(c.v1 > 0.0))
            fail("v1", "symmetric mirror V1 = V2 = V > 0");
        if (c.wkb_x_max == 0.0) {
            c.wkb_x_max = 4.0 * scale;
            mark_default(c, "wkb_x_max");
        }
        if (!(c.wkb_x_max > 0.0))
            fail("wkb_x_max", "> 0");
        break;
    }
}

nlohmann::json to_json(const RunConfig& cfg)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : fields())
        j[f.key] = f.get(cfg);
    return j;
}

}  // namespace boundwave::config
