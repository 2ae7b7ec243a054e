#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boundwave/config.hpp"
#include "boundwave/errors.hpp"
#include "boundwave/io.hpp"
#include "boundwave/run.hpp"

namespace {

using boundwave::config::Override;

struct Common {
    std::string config_path;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config_path, "flat YAML run configuration");
    sub->add_option("--set", c.sets, "override a configuration field, key=value")->take_all();
}

template <class T>
void add_value(CLI::App* sub, const std::string& flag, const std::string& key, std::vector<Override>& out,
               const std::string& help)
{
    sub->add_option_function<T>(
        flag, [key, &out](const T& v) { out.emplace_back(key, boundwave::io::format(v)); }, help);
}

nlohmann::json brief(const boundwave::run::RunStatus& st)
{
    nlohmann::json j{{"directory", st.directory.string()}, {"status", st.manifest["status"]}};
    if (!st.manifest["error"].is_null())
        j["error"] = st.manifest["error"];
    return j;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"boundwave: scattering of a bound two-particle system at delta mirrors"};
    app.require_subcommand(1);

    Common common;
    std::vector<Override> flags;

    auto* mirror = app.add_subcommand("mirror", "single-particle delta mirror amplitudes");
    add_common(mirror, common);
    add_value<double>(mirror, "--k", "k", flags, "wavenumber");
    add_value<double>(mirror, "--vm", "vm", flags, "mirror strength");

    auto* simulate = app.add_subcommand("simulate", "time-dependent wavepacket scattering");
    add_common(simulate, common);

    auto* scatter = app.add_subcommand("scatter", "stationary coupled-channel S-matrix");
    add_common(scatter, common);
    add_value<double>(scatter, "--energy", "energy", flags, "total energy");
    scatter->add_flag_callback("--sweep", [&] { flags.emplace_back("sweep", "true"); }, "sweep the energy range");

    auto* resonances = app.add_subcommand("resonances", "complex-scaling resonance scan");
    add_common(resonances, common);
    add_value<double>(resonances, "--omega", "omega", flags, "binding stiffness");
    add_value<double>(resonances, "--v1", "v1", flags, "mirror strength on particle 1");
    add_value<double>(resonances, "--v2", "v2", flags, "mirror strength on particle 2");
    std::vector<double> thetas;
    resonances->add_option("--theta", thetas, "rotation angles")->delimiter(',');

    auto* wkb = app.add_subcommand("wkb", "adiabatic potentials and WKB estimates");
    add_common(wkb, common);
    wkb->add_option_function<double>(
        "--omega", [&](const double& v) { flags.emplace_back("omega", boundwave::io::format(v)); }, "binding stiffness");
    wkb->add_option_function<double>(
        "--v",
        [&](const double& v) {
            flags.emplace_back("v1", boundwave::io::format(v));
            flags.emplace_back("v2", boundwave::io::format(v));
        },
        "symmetric mirror strength");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const std::string kind = app.get_subcommands().front()->get_name();
    std::vector<Override> overrides{{"experiment", kind}};
    for (const auto& s : common.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --set expects key=value, got '" << s << "'\n";
            return 1;
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    overrides.insert(overrides.end(), flags.begin(), flags.end());
    if (!thetas.empty()) {
        std::string list = "[";
        for (std::size_t i = 0; i < thetas.size(); ++i)
            list += (i ? "," : "") + boundwave::io::format(thetas[i]);
        overrides.emplace_back("theta", list + "]");
    }

    try {
        const auto cfg = common.config_path.empty() ? boundwave::config::parse_config("", overrides)
                                                    : boundwave::config::load_config(common.config_path, overrides);
        const auto st = boundwave::run::run(cfg, boundwave::run::output_root());
        if (cfg.experiment == boundwave::config::Experiment::Mirror && st.exit_code == 0)
            std::cout << st.result.dump(2) << '\n';
        else
            std::cout << brief(st).dump(2) << '\n';
        if (st.exit_code != 0)
            std::cerr << "error: " << st.manifest["error"]["message"].get<std::string>() << '\n';
        return st.exit_code;
    } catch (const boundwave::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return boundwave::run::exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
