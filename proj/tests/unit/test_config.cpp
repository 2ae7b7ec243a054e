#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "boundwave/config.hpp"
#include "boundwave/errors.hpp"
#include "boundwave/run.hpp"

using namespace boundwave;
using config::Experiment;
namespace fs = std::filesystem;

namespace {

const fs::path preset_dir{BOUNDWAVE_CONFIG_DIR};

fs::path scratch(const std::string& tag)
{
    const fs::path p = fs::temp_directory_path() / ("boundwave_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int cli(const fs::path& root, const std::string& args)
{
    const std::string cmd = "BOUNDWAVE_OUTPUT_ROOT='" + root.string() + "' '" + BOUNDWAVE_CLI + "' " + args +
                            " > '" + (root / "stdout.txt").string() + "' 2> '" + (root / "stderr.txt").string() + "'";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("presets carry the stated parameters")
{
    const auto f3 = config::load_config(preset_dir / "fig3.yaml");
    CHECK(f3.experiment == Experiment::Simulate);
    CHECK(f3.P == 10.0);
    CHECK(f3.v1 == 0.0);
    CHECK(f3.v2 == 11.0);
    CHECK(f3.sigma == 0.5);
    CHECK(f3.omega == 10.0);

    const auto f4 = config::load_config(preset_dir / "fig4.yaml");
    CHECK(f4.P == 12.0);
    CHECK(f4.v1 == 15.0);
    CHECK(f4.v2 == 15.0);
    CHECK(f4.sigma == 0.5);
    CHECK(f4.omega == 5.0);

    const auto f7 = config::load_config(preset_dir / "fig7b.yaml");
    CHECK(f7.v1 == 20.0);
    CHECK(f7.v2 == 20.0);
    CHECK(f7.omega == 5.0);
    CHECK(f7.P == 8.0);
    CHECK(f7.sigma == 0.5);

    const auto f6a = config::load_config(preset_dir / "fig6a.yaml");
    CHECK(f6a.experiment == Experiment::Resonances);
    CHECK(f6a.v1 == 0.0);
    CHECK(f6a.v2 == 30.0);
    CHECK(f6a.theta.front() == 0.35);

    const auto f6b = config::load_config(preset_dir / "fig6b.yaml");
    CHECK(f6b.v1 == 30.0);
    CHECK(f6b.v2 == 30.0);
    CHECK(f6b.theta.front() == 0.1);

    const auto f8 = config::load_config(preset_dir / "fig8.yaml");
    CHECK(f8.experiment == Experiment::Wkb);
    CHECK(f8.omega == 0.1);
    CHECK(f8.v1 == 10.0);
}

TEST_CASE("defaults are resolved and recorded")
{
    const auto c = config::parse_config("experiment: simulate\nv2: 11\n");
    CHECK(c.t_final > 0.0);
    CHECK(c.dt > 0.0);
    auto has = [&](const std::string& k) {
        return std::find(c.defaulted.begin(), c.defaulted.end(), k) != c.defaulted.end();
    };
    CHECK(has("t_final"));
    CHECK(has("dt"));
    CHECK(has("n_ch"));
    CHECK_FALSE(has("v2"));

    const auto r = config::parse_config("experiment: resonances\nomega: 4\nv1: 30\nv2: 30\n");
    CHECK(r.L_r == doctest::Approx(18.0));
    CHECK(r.theta == std::vector<double>{0.1, 0.15});
    const auto ra = config::parse_config("experiment: resonances\nomega: 4\nv2: 30\n");
    CHECK(ra.theta == std::vector<double>{0.35, 0.40});
}

TEST_CASE("overrides are parsed as typed values")
{
    const auto c = config::load_config(preset_dir / "fig3.yaml",
                                       {{"n_grid", "1024"}, {"snapshot_times", "[0.1, 0.2]"}, {"predict", "false"}});
    CHECK(c.n_grid == 1024);
    CHECK(c.snapshot_times == std::vector<double>{0.1, 0.2});
    CHECK_FALSE(c.predict);
    CHECK(c.v2 == 11.0);
}

TEST_CASE("validation names the field")
{
    auto msg = [](const std::string& text) -> std::string {
        try {
            (void)config::parse_config(text);
        } catch (const ConfigError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(msg("experiment: teleport\n").find("unknown experiment") != std::string::npos);
    CHECK(msg("colour: blue\n").find("unknown field 'colour'") != std::string::npos);
    CHECK(msg("n_grid: 1000\n").find("n_grid") != std::string::npos);
    CHECK(msg("x0: 3\n").find("x0") != std::string::npos);
    CHECK(msg("omega: fast\n").find("line 1") != std::string::npos);
    CHECK(msg("v1: 1\nv2: [1, 2\n").find("line") != std::string::npos);
    CHECK(msg("t_final: 50\n").find("t_final") != std::string::npos);
    CHECK(msg("experiment: resonances\ntheta: [0.1, 0.9]\n").find("theta") != std::string::npos);
    CHECK(msg("experiment: resonances\nbasis: hardwall\n").find("basis") != std::string::npos);
    CHECK_THROWS_AS(config::load_config(preset_dir / "missing.yaml"), ConfigError);
}

TEST_CASE("manifest lists applied defaults")
{
    const auto root = scratch("manifest");
    auto c = config::parse_config("experiment: wkb\nomega: 0.1\nv1: 10\nv2: 10\nwkb_points: 101\n");
    const auto st = run::run(c, root);
    CHECK(st.exit_code == 0);
    const auto m = nlohmann::json::parse(slurp(st.directory / "manifest.json"));
    CHECK(m["status"] == "complete");
    CHECK(m["defaults_applied"].contains("wkb_x_max"));
    CHECK(m["defaults_applied"].contains("n_ch"));
    CHECK_FALSE(m["defaults_applied"].contains("omega"));
    CHECK(m["parameters"]["omega"] == 0.1);
    fs::remove_all(root);
}

TEST_CASE("mirror subcommand")
{
    const auto root = scratch("mirror");
    REQUIRE(cli(root, "mirror --k 1 --vm 1") == 0);
    const auto j = nlohmann::json::parse(slurp(root / "stdout.txt"));
    CHECK(j["T"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(j["R"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    fs::remove_all(root);
}

TEST_CASE("exit codes")
{
    const auto root = scratch("exit");
    CHECK(cli(root, "teleport") != 0);
    CHECK(cli(root, "") != 0);
    CHECK(cli(root, "simulate --set n_grid=1000") == 1);
    CHECK(cli(root, "simulate --set nonsense") == 1);
    CHECK(cli(root, "mirror --k -1 --vm 1") == 1);
    CHECK(cli(root, "resonances --omega 5 --v1 1 --v2 1 --set N_r=200 n_ch=30 capacity=1000") == 1);
    CHECK(cli(root, "scatter --set n_ch=1001 --energy 5000") == 2);
    const auto m = nlohmann::json::parse(slurp(root / "scatter" / "manifest.json"));
    CHECK(m["status"] == "partial");
    CHECK(m["error"]["module"] == "basis");
    fs::remove_all(root);
}

TEST_CASE("identical configs give identical bytes")
{
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const std::string args = "simulate --config '" + (preset_dir / "fig3.yaml").string() +
                             "' --set n_grid=512 L=40 n_ch=4 records=20 predict=false snapshot_times=[0.1] "
                             "density_points=32 t_final=0.3";
    REQUIRE(cli(a, args) == 0);
    REQUIRE(cli(b, args) == 0);
    for (const char* f : {"result.json", "timeseries.csv", "snapshot_0.csv", "density_0.csv"}) {
        const auto x = slurp(a / "fig3" / f);
        CHECK_MESSAGE(!x.empty(), f);
        CHECK_MESSAGE(x == slurp(b / "fig3" / f), f);
    }

    const std::string res = "resonances --omega 5 --v1 30 --v2 30 --set N_r=100 n_ch=4";
    REQUIRE(cli(a, res) == 0);
    REQUIRE(cli(b, res) == 0);
    CHECK(slurp(a / "resonances" / "result.json") == slurp(b / "resonances" / "result.json"));

    const std::string sc = "scatter --set omega=10 v2=11 n_ch=6 --energy 60";
    REQUIRE(cli(a, sc) == 0);
    REQUIRE(cli(b, sc) == 0);
    CHECK(slurp(a / "scatter" / "result.json") == slurp(b / "scatter" / "result.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("simulate writes its artifacts")
{
    const auto root = scratch("artifacts");
    REQUIRE(cli(root, "simulate --config '" + (preset_dir / "fig3.yaml").string() +
                          "' --set n_grid=512 L=40 n_ch=4 records=10 predict=false snapshot_times=[0,0.2] "
                          "density_points=16 t_final=0.3") == 0);
    const auto dir = root / "fig3";
    for (const char* f : {"manifest.json", "result.json", "timeseries.csv", "snapshot_0.csv", "snapshot_1.csv",
                          "density_0.csv", "density_1.csv"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    std::ifstream ts(dir / "timeseries.csv");
    std::string header;
    std::getline(ts, header);
    CHECK(header.rfind("t,norm,S,E_cm,E_rel,E_cm_L,E_cm_R,E_rel_L,E_rel_R", 0) == 0);
    CHECK(header.find("p_3_R") != std::string::npos);
    fs::remove_all(root);
}

}
