#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "qgmt/qgmt.hpp"

namespace {

struct RunResult {
    int code = -1;
    std::string output;
};

std::string cli_path() {
    const char* p = std::getenv("QGMT_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string scenario_dir() {
    const char* p = std::getenv("QGMT_SCENARIOS");
    REQUIRE(p != nullptr);
    return p;
}

std::string scenario(const std::string& file) {
    return (std::filesystem::path(scenario_dir()) / file).string();
}

RunResult run(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + "\"" + cli_path() + "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, got);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) res.code = WEXITSTATUS(status);
    return res;
}

std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("qgmt_cli_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("scenario files produce the documented exit codes", "[cli]") {
    const struct {
        const char* file;
        int code;
    } cases[] = {
        {"metric_pair.json", 0},          {"decompose_separated.json", 0},
        {"decompose_entangled.json", 0},  {"pushforward_mirror.json", 0},
        {"reparam_flat.json", 0},         {"reparam_too_thick.json", 1},
        {"multisection_signjump.json", 1},
    };
    for (const auto& c : cases) {
        INFO(c.file);
        const RunResult res = run("run \"" + scenario(c.file) + "\"");
        INFO(res.output);
        CHECK(res.code == c.code);
        CHECK(res.output.find(c.code == 0 ? "PASS" : "FAIL") != std::string::npos);
    }
}

TEST_CASE("run writes a machine readable report", "[cli]") {
    const auto dir = fresh_dir("report");
    const RunResult res = run("run \"" + scenario("metric_pair.json") + "\" --out \"" +
                              dir.string() + "\"");
    INFO(res.output);
    REQUIRE(res.code == 0);
    const qgmt::json rep = qgmt::load_json_file((dir / "report.json").string());
    CHECK(rep.at("kind").get<std::string>() == "metric");
    CHECK(rep.at("pass").get<bool>());
    REQUIRE(rep.at("pairs").size() == 1);
    CHECK(rep["pairs"][0].at("distance").get<double>() ==
          Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    std::filesystem::remove_all(dir);
}

TEST_CASE("reparam run emits per vertex data", "[cli]") {
    const auto dir = fresh_dir("vertices");
    const RunResult res = run("run \"" + scenario("reparam_flat.json") + "\" --out \"" +
                              dir.string() + "\"");
    INFO(res.output);
    REQUIRE(res.code == 0);
    REQUIRE(std::filesystem::exists(dir / "vertices.csv"));
    const std::string csv = read_file(dir / "vertices.csv");
    CHECK(csv.find('\n') != std::string::npos);
    const qgmt::json rep = qgmt::load_json_file((dir / "report.json").string());
    CHECK(rep.at("kind").get<std::string>() == "reparam");
    CHECK(rep.at("pass").get<bool>());
    std::filesystem::remove_all(dir);
}

TEST_CASE("bad inputs exit with code two", "[cli]") {
    SECTION("missing file") {
        const RunResult res = run("run /nonexistent/qgmt_scenario.json");
        CHECK(res.code == 2);
    }
    SECTION("malformed JSON") {
        const auto dir = fresh_dir("malformed");
        const auto file = dir / "broken.json";
        std::ofstream(file) << "{ not json";
        const RunResult res = run("run \"" + file.string() + "\"");
        CHECK(res.code == 2);
        std::filesystem::remove_all(dir);
    }
    SECTION("unknown scenario kind") {
        const auto dir = fresh_dir("kind");
        const auto file = dir / "odd.json";
        std::ofstream(file) << R"({"kind": "astrology"})";
        const RunResult res = run("run \"" + file.string() + "\"");
        CHECK(res.code == 2);
        std::filesystem::remove_all(dir);
    }
    SECTION("unknown suite") {
        const RunResult res = run("suite no-such-suite --seed 1");
        CHECK(res.code == 2);
    }
    SECTION("missing required flag") {
        const RunResult res = run("suite metric-axioms");
        CHECK(res.code == 2);
    }
}

TEST_CASE("suites run from the command line", "[cli]") {
    const auto dir = fresh_dir("suite");
    const RunResult res = run("suite metric-axioms --seed 7 --cases 50 --out \"" +
                              dir.string() + "\"");
    INFO(res.output);
    CHECK(res.code == 0);
    CHECK(res.output.find("50/50") != std::string::npos);
    const qgmt::json rep = qgmt::load_json_file((dir / "report.json").string());
    CHECK(rep.at("suite").get<std::string>() == "metric-axioms");
    CHECK(rep.at("failures").get<int>() == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("reports are identical across seeds and thread counts", "[cli]") {
    const auto dir_a = fresh_dir("det_a");
    const auto dir_b = fresh_dir("det_b");
    const auto dir_c = fresh_dir("det_c");
    const std::string base = "run \"" + scenario("reparam_flat.json") + "\"";
    REQUIRE(run(base + " --threads 1 --out \"" + dir_a.string() + "\"").code == 0);
    REQUIRE(run(base + " --threads 4 --out \"" + dir_b.string() + "\"").code == 0);
    REQUIRE(run(base + " --out \"" + dir_c.string() + "\"", "QGMT_THREADS=3 ").code == 0);
    const std::string rep_a = read_file(dir_a / "report.json");
    CHECK(rep_a == read_file(dir_b / "report.json"));
    CHECK(rep_a == read_file(dir_c / "report.json"));
    CHECK(read_file(dir_a / "vertices.csv") == read_file(dir_b / "vertices.csv"));

    const std::string suite_cmd = "suite metric-axioms --seed 11 --cases 40 --out ";
    REQUIRE(run(suite_cmd + "\"" + dir_a.string() + "\"").code == 0);
    REQUIRE(run(suite_cmd + "\"" + dir_b.string() + "\"").code == 0);
    CHECK(read_file(dir_a / "report.json") == read_file(dir_b / "report.json"));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    std::filesystem::remove_all(dir_c);
}
