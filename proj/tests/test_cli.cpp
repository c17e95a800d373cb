// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixture.hpp"

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(SRSR_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("run subcommand succeeds on the fixture manifest") {
    const fs::path dir = fixture::fresh_dir("srsr_cli_run");
    const fs::path manifest = fixture::write_workspace(dir, {{"steps", 4}});
    CHECK(run_cli("run --manifest " + manifest.string()) == 0);
    CHECK(fs::exists(dir / "out" / "restored.ppm"));
}

TEST_CASE("exit codes distinguish config, io and numeric failures") {
    const fs::path dir = fixture::fresh_dir("srsr_cli_codes");
    const fs::path manifest = fixture::write_workspace(dir, {{"steps", 4}});

    // malformed manifest -> config error
    std::ofstream(dir / "broken.json") << "{ nope";
    CHECK(run_cli("run --manifest " + (dir / "broken.json").string()) == 2);

    // bad flag value -> config error
    CHECK(run_cli("run --manifest " + manifest.string() + " --srca maybe") == 2);

    // guidance scale below 1 -> config error
    CHECK(run_cli("run --manifest " + manifest.string() + " --scale 0.5") == 2);

    // missing input image -> io error
    fs::remove(dir / "input.ppm");
    CHECK(run_cli("run --manifest " + manifest.string()) == 3);
    srsr::write_netpbm(dir / "input.ppm", fixture::make_test_image(101));

    // infinite guidance scale -> numeric divergence
    CHECK(run_cli("run --manifest " + manifest.string() +
                  " --scale inf --stcfg off --srca off") == 4);
    CHECK(run_cli("run --manifest " + manifest.string() + " --scale bogus") == 2);

    // unknown subcommand -> CLI parse failure, nonzero but not one of ours
    CHECK(run_cli("frobnicate") != 0);
}

TEST_CASE("two invocations produce byte-identical artifacts") {
    const fs::path dir = fixture::fresh_dir("srsr_cli_det");
    const fs::path manifest = fixture::write_workspace(dir, {{"steps", 4}});
    CHECK(run_cli("run --manifest " + manifest.string() + " --out " +
                  (dir / "run1").string()) == 0);
    CHECK(run_cli("run --manifest " + manifest.string() + " --out " +
                  (dir / "run2").string()) == 0);
    for (const char* name :
         {"restored.ppm", "run_log.json", "metrics.json", "config_resolved.json"})
        CHECK(fixture::read_bytes(dir / "run1" / name) ==
              fixture::read_bytes(dir / "run2" / name));
}

TEST_CASE("cli overrides change the resolved config") {
    const fs::path dir = fixture::fresh_dir("srsr_cli_override");
    const fs::path manifest = fixture::write_workspace(dir, {{"steps", 4}});
    CHECK(run_cli("run --manifest " + manifest.string() +
                  " --srca off --stcfg off --threshold 0.5 --seed 9 --renorm global" +
                  " --resample majority --steps 2 --scale 2.5") == 0);
    const std::string config = fixture::read_bytes(dir / "out" / "config_resolved.json");
    CHECK(config.find("\"srca\": false") != std::string::npos);
    CHECK(config.find("\"stcfg\": false") != std::string::npos);
    CHECK(config.find("\"threshold\": 0.5") != std::string::npos);
    CHECK(config.find("\"renorm\": \"global\"") != std::string::npos);
    CHECK(config.find("\"resample\": \"majority\"") != std::string::npos);
    CHECK(config.find("\"steps\": 2") != std::string::npos);
}

TEST_CASE("sweep and compare subcommands work end to end") {
    const fs::path dir = fixture::fresh_dir("srsr_cli_sweep");
    const fs::path manifest = fixture::write_workspace(
        dir, {{"steps", 2}}, {{"sweep", {{"thresholds", {0.15, 0.55}}}}});
    CHECK(run_cli("sweep --manifest " + manifest.string()) == 0);
    CHECK(fs::exists(dir / "out" / "sweep_report.json"));
    CHECK(fs::exists(dir / "out" / "sweep" / "threshold_0.1500" / "restored.ppm"));

    // two comparable ablation runs
    const fs::path dir_a = fixture::fresh_dir("srsr_cli_cmp_a");
    const fs::path dir_b = fixture::fresh_dir("srsr_cli_cmp_b");
    const fs::path ma = fixture::write_workspace(dir_a, {{"steps", 2}, {"stcfg", false}});
    const fs::path mb = fixture::write_workspace(dir_b, {{"steps", 2}, {"stcfg", true}});
    CHECK(run_cli("run --manifest " + ma.string()) == 0);
    CHECK(run_cli("run --manifest " + mb.string()) == 0);
    const fs::path report = dir_b / "diff.json";
    CHECK(run_cli("compare --a " + (dir_a / "out").string() + " --b " +
                  (dir_b / "out").string() + " --out " + report.string()) == 0);
    CHECK(fs::exists(report));

    // incomparable runs exit with the config code
    const fs::path dir_c = fixture::fresh_dir("srsr_cli_cmp_c");
    const fs::path mc = fixture::write_workspace(dir_c, {{"steps", 3}});
    CHECK(run_cli("run --manifest " + mc.string()) == 0);
    CHECK(run_cli("compare --a " + (dir_a / "out").string() + " --b " +
                  (dir_c / "out").string()) == 2);
}
