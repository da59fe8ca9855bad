#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include <jerkpath/io.hpp>

using namespace jerkpath;
namespace fs = std::filesystem;

namespace {

const fs::path dir = fs::temp_directory_path() / "jerkpath_test_cli";

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd = std::string(JERKPATH_CLI) + " " + args + " > " + stdout_file + " 2> " + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream fields(line);
        std::string f;
        while (std::getline(fields, f, ',')) {
            row.push_back(f);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("parameterize then evaluate reproduces the metrics") {
    fs::remove_all(dir);
    fs::create_directories(dir);
    REQUIRE(run("gen-dataset --kind random-walk --seed 5 --count 1 --out " + (dir / "ds").string()) == 0);
    const std::string path = (dir / "ds" / "walk_0000.json").string();
    REQUIRE(run("parameterize --path " + path + " --limits " + (dir / "ds" / "limits.json").string() + " --iters 2 --out " +
                (dir / "run").string()) == 0);
    for (const char* f : {"trajectory.csv", "metrics.json", "iterations.csv"}) {
        CHECK(fs::exists(dir / "run" / f));
    }
    const metrics_report report = load_metrics(dir / "run" / "metrics.json");
    CHECK(report.per_iteration.size() == 2);

    REQUIRE(run("evaluate --path " + path + " --trajectory " + (dir / "run" / "trajectory.csv").string(), (dir / "eval.json").string()) == 0);
    const auto eval = nlohmann::json::parse(read_file(dir / "eval.json"));
    CHECK(std::abs(eval["duration_s"].get<double>() - report.duration_s) <= 1e-9);
    CHECK(std::abs(eval["deviation_mean_rad"].get<double>() - report.deviation_mean_rad) <= 1e-9);
    CHECK(std::abs(eval["deviation_max_rad"].get<double>() - report.deviation_max_rad) <= 1e-9);

    REQUIRE(run("plot-data --trajectory " + (dir / "run" / "trajectory.csv").string() + " --out " + (dir / "plot.json").string()) == 0);
    const auto plot = nlohmann::json::parse(read_file(dir / "plot.json"));
    CHECK(plot["position"].size() == 7);
    CHECK(plot["arc_length"].size() == plot["t"].size());
}

TEST_CASE("feasible-acc on a down-up-down path") {
    fs::create_directories(dir);
    save_path(dir / "fig.json", {{0.0}, {-1.0}, {0.6}, {-0.4}});
    REQUIRE(run("feasible-acc --path " + (dir / "fig.json").string() + " --dim 0", (dir / "acc.csv").string()) == 0);
    const auto rows = csv_rows(read_file(dir / "acc.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].back() == "a_max");
    CHECK(std::stod(rows[2].back()) > 0.0);
    CHECK(std::stod(rows[3].back()) < 0.0);
}

TEST_CASE("traverse-1d writes a trajectory") {
    fs::create_directories(dir);
    save_path(dir / "fig.json", {{0.0}, {-1.0}, {0.6}, {-0.4}});
    REQUIRE(run("traverse-1d --path " + (dir / "fig.json").string() + " --dim 0 --out " + (dir / "tr").string()) == 0);
    const trajectory_table table = load_trajectory(dir / "tr" / "trajectory.csv");
    CHECK(table.p.front()[0] == 0.0);
    CHECK(std::abs(table.p.back()[0] + 0.4) <= 1e-9);
}

TEST_CASE("input errors exit with code 2") {
    fs::create_directories(dir);
    CHECK(run("evaluate --path " + (dir / "missing.json").string() + " --trajectory x") == 2);
    std::ofstream(dir / "nan.json") << "{\"dimensions\": 1, \"waypoints\": [[0], [NaN]]}";
    CHECK(run("traverse-1d --path " + (dir / "nan.json").string() + " --dim 0 --out " + (dir / "x").string()) == 2);
    CHECK(read_file(dir / "stderr.txt").rfind("error[input]: ", 0) == 0);
    CHECK(run("traverse-1d --path " + (dir / "fig.json").string() + " --dim 3 --out " + (dir / "x").string()) == 2);
    CHECK(run("no-such-command") == 2);
}
