#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::string kCli = SYNCSTAB_CLI;
const std::string kGolden = std::string(SYNCSTAB_DATA_DIR) + "/reference.scenario";

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("syncstab_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args) {
    const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json summary(const fs::path& dir) {
    return json::parse(slurp(dir / "summary.json"));
}

fs::path write_scenario(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "case.scenario";
    std::ofstream(p) << text;
    return p;
}

std::string golden_with(const std::string& from, const std::string& to) {
    std::string text = slurp(kGolden);
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("help and usage errors", "[cli]") {
    CHECK(run("--help") == 0);
    CHECK(run("") != 0);
    CHECK(run("simulate") == 2);
    CHECK(run("bogus " + kGolden) == 2);
}

TEST_CASE("exit codes follow the error kind", "[cli]") {
    const fs::path dir = scratch("codes");
    // Schema violation.
    const fs::path missing = write_scenario(dir, golden_with("  inertia_s: 40\n", ""));
    CHECK(run("reduce " + missing.string() + " --out " + dir.string()) == 2);
    CHECK(run("reduce /nonexistent.scenario --out " + dir.string()) == 2);
    // Invariant violation.
    const fs::path negative = write_scenario(dir, golden_with("  inertia_s: 40\n", "  inertia_s: -40\n"));
    CHECK(run("reduce " + negative.string() + " --out " + dir.string()) == 3);
    CHECK(run("simulate " + kGolden + " --hv -1 --out " + dir.string()) == 3);
    // No fault-on SEP, so no region.
    CHECK(run("region " + kGolden + " --hv 70 --out " + dir.string()) == 4);
}

TEST_CASE("simulate writes a trajectory", "[cli]") {
    const fs::path dir = scratch("simulate");
    REQUIRE(run("simulate " + kGolden + " --hv 20 --out " + dir.string()) == 0);
    const json s = summary(dir);
    CHECK(s.at("los") == false);
    CHECK(s.at("model") == "reduced");
    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("t_s,delta_vg_rad,domega_vg_pu,p_syn_pu,i_v_pu\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 100002);

    const fs::path lost = scratch("simulate_lost");
    REQUIRE(run("simulate " + kGolden + " --hv 70 --out " + lost.string()) == 0);
    CHECK(summary(lost).at("los") == true);

    const fs::path full = scratch("simulate_full");
    REQUIRE(run("simulate " + kGolden + " --hv 20 --full --dt 1e-3 --out " + full.string()) == 0);
    CHECK(summary(full).at("model") == "full");
    CHECK(summary(full).at("los") == false);
}

TEST_CASE("output is deterministic", "[cli]") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    REQUIRE(run("simulate " + kGolden + " --out " + a.string()) == 0);
    REQUIRE(run("simulate " + kGolden + " --out " + b.string()) == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("index from a scenario and from a reduced model", "[cli]") {
    const fs::path dir = scratch("index");
    REQUIRE(run("index " + kGolden + " --out " + dir.string()) == 0);
    const json direct = summary(dir);
    const json& faulted = direct.at("stages").at(1);
    CHECK(faulted.at("stage") == "faulted");
    const double x_sum = 2.0 * 3.141592653589793 * 50.0 * (9.2e-3 + 2.9e-3 + 1.45e-3) / (95.22 * 95.22 / 1000.0);
    CHECK_THAT(faulted.at("lambda").get<double>(), WithinRel(1.0 - 0.12 * x_sum / 0.2, 1e-12));
    CHECK_THAT(faulted.at("sep_rad").get<double>(), WithinAbs(-0.2856, 1e-4));

    const fs::path red = scratch("reduce");
    REQUIRE(run("reduce " + kGolden + " --out " + red.string()) == 0);
    const fs::path again = scratch("index_model");
    REQUIRE(run("index --model " + (red / "summary.json").string() + " --out " + again.string()) == 0);
    CHECK(slurp(again / "index.csv") == slurp(dir / "index.csv"));
}

TEST_CASE("matched inertia gives lambda = 1", "[cli]") {
    const fs::path dir = scratch("matched");
    REQUIRE(run("index " + kGolden + " --hv 12.5 --out " + dir.string()) == 0);
    CHECK(summary(dir).at("stages").at(1).at("lambda").get<double>() == 1.0);
}

TEST_CASE("design command", "[cli]") {
    const fs::path dir = scratch("design");
    const fs::path heavy = write_scenario(dir, golden_with("  inertia_s: 20\n  damping_pu: 10\n",
                                                           "  inertia_s: 70\n  damping_pu: 35\n"));
    REQUIRE(run("design " + heavy.string() + " --verify --out " + dir.string()) == 0);
    const json s = summary(dir);
    CHECK_THAT(s.at("design").at("inertia_s").get<double>(), WithinAbs(12.5, 1e-12));
    CHECK(s.at("design").at("predicted_lambda").get<double>() == 1.0);
    CHECK(s.at("before").at("los") == true);
    CHECK(s.at("after").at("los") == false);
    CHECK(s.at("after").at("max_current_pu").get<double>() <= 1.8 * 1.02);
    CHECK(fs::exists(dir / "before.csv"));
    CHECK(fs::exists(dir / "after.csv"));
}

TEST_CASE("sweep over the VSG inertia", "[cli]") {
    const fs::path dir = scratch("sweep");
    REQUIRE(run("sweep " + kGolden + " --axis hv --values 8,20,70 --out " + dir.string()) == 0);
    const json rows = summary(dir).at("rows");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].at("classification") == "Stable");
    CHECK(rows[2].at("classification") == "Unstable");
    CHECK(rows[2].at("sep_exists") == false);
    // H_v = 8 keeps a fault-on SEP with lambda near 0.79 under these parameters.
    CHECK(rows[0].at("sep_exists") == true);
    CHECK(rows[0].at("classification") == rows[0].at("eac"));

    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("index,value,lambda,sep_exists,eac,classification,los_time_s,ssi,max_current_pu\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    CHECK(run("sweep " + kGolden + " --axis nope --values 1 --out " + dir.string()) == 2);
}

TEST_CASE("region command writes boundary and grid", "[cli]") {
    const fs::path dir = scratch("region");
    const fs::path small = write_scenario(dir, slurp(kGolden) + "region:\n  n_delta: 11\n  n_omega: 9\n");
    REQUIRE(run("region " + small.string() + " --out " + dir.string()) == 0);
    const json s = summary(dir);
    CHECK(s.at("grid_points") == 99);
    CHECK(s.at("stable_points").get<int>() > 0);
    CHECK(fs::exists(dir / "boundary.csv"));
    CHECK(fs::exists(dir / "grid.csv"));
}
