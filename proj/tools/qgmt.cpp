#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "qgmt/qgmt.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Q-valued field and integral chain toolkit"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    int threads = 0;
    auto* run = app.add_subcommand("run", "run a scenario file and write its report");
    run->add_option("file", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory for reports");
    run->add_option("--threads", threads, "worker thread count (default: QGMT_THREADS or 1)");

    std::string suite_name;
    std::uint64_t seed = 0;
    int cases = 0;
    std::string suite_out;
    int suite_threads = 0;
    auto* suite = app.add_subcommand("suite", "run a named randomized suite");
    suite->add_option("name", suite_name,
                      "metric-axioms | boundary-commutation | multisection-equivalence | "
                      "reparam-estimates")
        ->required();
    suite->add_option("--seed", seed, "PRNG seed")->required();
    suite->add_option("--cases", cases, "number of randomized cases");
    suite->add_option("--out", suite_out, "output directory for reports");
    suite->add_option("--threads", suite_threads, "worker thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qgmt::kExitBadInput;
    }

    try {
        if (run->parsed())
            return qgmt::run_scenario_file(scenario_path, out_dir, qgmt::resolve_threads(threads));
        return qgmt::run_suite(suite_name, seed, cases, suite_out,
                               qgmt::resolve_threads(suite_threads));
    } catch (const qgmt::input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return qgmt::kExitBadInput;
    } catch (const qgmt::error& e) {
        std::fprintf(stderr, "check failed: %s\n", e.what());
        return qgmt::kExitAssertionFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return qgmt::kExitBadInput;
    }
}
