// Runs the kinex executable end to end.

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(KINEX_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) {
        r.out += buf.data();
    }
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("kinex_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("iterate writes trajectory and summary") {
    const auto dir = fresh_dir("iterate");
    const auto r = run("iterate --family gamma21 --lambda 1 --steps 4 --out " + dir.string());
    CHECK(r.status == 0);
    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("step,norm,mean,dist_to_target,leakage,sup_value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["final"]["dist_to_target"].get<double>() == doctest::Approx(0.037675).epsilon(1e-4));
}

TEST_CASE("iterate verdicts and exit codes") {
    const auto dir = fresh_dir("verdicts");
    const std::string out = " --quiet --out " + dir.string();
    CHECK(run("iterate --family rect:2:4" + out).out.find("ConvergedToExponential") != std::string::npos);
    const auto fixed = run("iterate --family exp:1 --lambda 0.5" + out);
    CHECK(fixed.status == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "summary.json"))["steps_recorded"] == 1);

    CHECK(run("iterate --family exp:1 --scale 0.5" + out).status == 1);
    CHECK(run("iterate --family exp:1 --scale 0.5 --accept collapse" + out).status == 0);
    CHECK(run("iterate --family exp:1 --scale 1.5" + out).out.find("DivergentNorm") != std::string::npos);

    CHECK(run("iterate --family nope" + out).status == 2);
    CHECK(run("iterate --lambda 3" + out).status == 2);
    CHECK(run("iterate --points 100" + out).status == 2);
    CHECK(run("iterate --accept maybe" + out).status == 2);
    CHECK(run("iterate --bogus-flag").status == 2);
    CHECK(run("").status == 2);
    CHECK(run("iterate --quiet --out /proc/kinex_nope").status == 1);
    CHECK(run("--help").status == 0);
}

TEST_CASE("output directory from the environment") {
    const auto dir = fresh_dir("env");
    const std::string cmd = "KINEX_OUT_DIR=" + dir.string() + " " + KINEX_CLI +
                            " iterate --family exp:1 --quiet > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
}

TEST_CASE("simulate is deterministic and warns when frozen") {
    const auto a = fresh_dir("sim_a");
    const auto b = fresh_dir("sim_b");
    const std::string flags = "simulate --agents 2000 --sweeps 50 --seed 42 --write-ensemble --out ";
    REQUIRE(run(flags + a.string()).status == 0);
    REQUIRE(run(flags + b.string()).status == 0);
    CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
    CHECK(slurp(a / "ensemble.csv") == slurp(b / "ensemble.csv"));
    const auto j = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(j["seed"] == 42);
    CHECK(j["agents"] == 2000);
    CHECK(j.contains("ks"));
    CHECK(j.contains("fitted_beta"));

    const auto frozen = run("simulate --lambda 0 --agents 100 --sweeps 3 --out " + a.string());
    CHECK(frozen.status == 0);
    CHECK(frozen.out.find("warning") != std::string::npos);

    CHECK(run("simulate --agents 101 --out " + a.string()).status == 2);
    CHECK(run("simulate --pairing sideways --out " + a.string()).status == 2);
    CHECK(run("simulate --agents 2000 --sweeps 5 --max-ks 0.0001 --out " + a.string()).status == 1);
}

TEST_CASE("reproduce prints the reference table") {
    const auto r = run("reproduce");
    CHECK(r.out.find("gamma21 lambda=1, ||T^4y - mu||") != std::string::npos);
    CHECK(r.out.find("gamma21 lambda=0.5, ||T^1y - mu||") != std::string::npos);
    CHECK(r.out.find("lomax2 vs exp:1, ||y - w||") != std::string::npos);
    // The heavy-tailed rows carry a truncation error above tolerance at the default grid.
    CHECK(r.status == 1);
}

TEST_CASE("oracle-check") {
    const auto r = run("oracle-check --family gamma21 --family rect:2:4 --samples 6");
    CHECK(r.status == 0);
    CHECK(r.out.find("worst discrepancy") != std::string::npos);
    CHECK(run("oracle-check --family gamma21 --samples 3 --tol 1e-12").status == 1);
}
