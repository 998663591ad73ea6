#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "test_fixtures.hpp"

namespace {

int run_cli(const std::string& args, const std::filesystem::path& stdout_file = {}) {
    std::string cmd = std::string(SRF_CLI_PATH) + " " + args;
    if (!stdout_file.empty()) {
        cmd += " > " + stdout_file.string() + " 2>&1";
    } else {
        cmd += " > /dev/null 2>&1";
    }
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    out << text;
}

// Reduced grid known to converge; the 8-state/2-D system keeps it cheap (the
// X and Y blocks share one solve).
const char* kTinyConfig =
    "system = quad8_planner2\n"
    "gamma = 0.5\n"
    "tolerance = 1e-4\n"
    "lateral.lower = -2 -2 -0.5235987755982988 -3.141592653589793\n"
    "lateral.upper = 2 2 0.5235987755982988 3.141592653589793\n"
    "lateral.counts = 21 21 13 25\n";

const char* kOpenFieldScenario =
    "system = quad10_planner3\n"
    "mode = srf\n"
    "seed = 1\n"
    "workspace = -1 -3 0 19 3 2\n"
    "start = 0 0 1\n"
    "goal = 18 0 1\n"
    "raster_resolution = 0.1\n";

}  // namespace

TEST_CASE("cli: solve writes deterministic artifacts") {
    // Solved once for the whole case; subcases re-enter this body.
    static const auto dir = [] {
        auto d = srf_test::scratch_dir("cli_solve");
        write_text(d / "tiny.cfg", kTinyConfig);
        REQUIRE(run_cli("solve -c " + (d / "tiny.cfg").string() + " -o " + (d / "v1").string()) == 0);
        REQUIRE(run_cli("solve -c " + (d / "tiny.cfg").string() + " -o " + (d / "v2").string()) == 0);
        return d;
    }();

    for (const char* f : {"X_gamma0.vf", "X_rclvf.vf", "Y_rclvf.vf", "manifest.txt",
                          "X_rclvf.meta", "X_rclvf_history.csv"}) {
        CHECK(std::filesystem::exists(dir / "v1" / f));
    }
    for (const char* f : {"X_gamma0.vf", "X_rclvf.vf", "Y_gamma0.vf", "Y_rclvf.vf",
                          "manifest.txt"}) {
        CHECK(slurp(dir / "v1" / f) == slurp(dir / "v2" / f));
    }

    SUBCASE("inspect summarizes both stages with matching zero-level extents") {
        CHECK(run_cli("inspect " + (dir / "v1" / "X_gamma0.vf").string(), dir / "g0.txt") == 0);
        CHECK(run_cli("inspect " + (dir / "v1" / "X_rclvf.vf").string(), dir / "rc.txt") == 0);
        const std::string g0 = slurp(dir / "g0.txt");
        const std::string rc = slurp(dir / "rc.txt");
        CHECK(g0.find("axis 0 extent") != std::string::npos);
        CHECK(rc.find("axis 0 extent") != std::string::npos);

        auto extent = [](const std::string& text) {
            const auto pos = text.find("axis 0 extent: [");
            REQUIRE(pos != std::string::npos);
            return std::stod(text.substr(pos + 16));
        };
        // Same error bound from either stage, up to one cell (0.2 here).
        CHECK(std::abs(extent(g0) - extent(rc)) <= 0.2 + 1e-9);
    }

    SUBCASE("truncated artifacts are rejected with exit 4") {
        // Corrupt a copy; v1 itself stays intact for the other subcases.
        std::filesystem::remove_all(dir / "vbad");
        std::filesystem::copy(dir / "v1", dir / "vbad");
        const std::string bytes = slurp(dir / "vbad" / "X_rclvf.vf");
        {
            std::ofstream out(dir / "vbad" / "X_rclvf.vf", std::ios::binary | std::ios::trunc);
            out << bytes.substr(0, bytes.size() / 2);
        }
        CHECK(run_cli("inspect " + (dir / "vbad" / "X_rclvf.vf").string()) == 4);
        // And the run command refuses the directory the same way (the 2-D
        // scenario matches the solved system, so it gets as far as loading).
        write_text(dir / "open2d.scn",
                   "system = quad8_planner2\n"
                   "mode = srf\n"
                   "workspace = -1 -3 19 3\n"
                   "start = 0 0\n"
                   "goal = 18 0\n");
        CHECK(run_cli("run -s " + (dir / "open2d.scn").string() + " -v " + (dir / "vbad").string() +
                      " -o " + (dir / "out").string()) == 4);
    }

    SUBCASE("system mismatch between scenario and directory is a refusal") {
        write_text(dir / "open.scn", kOpenFieldScenario);
        CHECK(run_cli("run -s " + (dir / "open.scn").string() + " -v " + (dir / "v1").string() +
                      " -o " + (dir / "out").string()) == 3);
    }
}

TEST_CASE("cli: error paths use the documented exit codes") {
    auto dir = srf_test::scratch_dir("cli_errors");

    write_text(dir / "broken.cfg", "gamma = not_a_number\n");
    CHECK(run_cli("solve -c " + (dir / "broken.cfg").string() + " -o " + (dir / "v").string()) == 2);

    write_text(dir / "open.scn", kOpenFieldScenario);
    CHECK(run_cli("run -s " + (dir / "open.scn").string() + " -v " + (dir / "nothere").string() +
                  " -o " + (dir / "out").string()) == 3);

    write_text(dir / "bad.scn", "system = quad10_planner3\nstart = 0 0 1\n");  // missing workspace
    CHECK(run_cli("run -s " + (dir / "bad.scn").string() + " -v " + (dir / "nothere").string() +
                  " -o " + (dir / "out").string()) == 2);

    CHECK(run_cli("bogus-subcommand") == 2);
}

TEST_CASE("cli: run executes scenarios against the shared value directory") {
    // Reuse the cached reduced-grid solve as the value directory.
    srf_test::small_quad10_policy();
    const auto values = srf_test::cache_dir() / "small_quad10";

    auto dir = srf_test::scratch_dir("cli_run");
    write_text(dir / "open.scn", kOpenFieldScenario);

    CHECK(run_cli("run -s " + (dir / "open.scn").string() + " -v " + values.string() + " -o " +
                  (dir / "r1").string() + " --seed 4") == 0);
    CHECK(std::filesystem::exists(dir / "r1" / "trace.csv"));
    CHECK(std::filesystem::exists(dir / "r1" / "result.txt"));
    CHECK(slurp(dir / "r1" / "result.txt").find("outcome = REACHED") != std::string::npos);

    CHECK(run_cli("run -s " + (dir / "open.scn").string() + " -v " + values.string() + " -o " +
                  (dir / "r2").string() + " --seed 4") == 0);
    CHECK(slurp(dir / "r1" / "trace.csv") == slurp(dir / "r2" / "trace.csv"));

    SUBCASE("mode override produces a comparable fastrack trace") {
        CHECK(run_cli("run -s " + (dir / "open.scn").string() + " -v " + values.string() + " -o " +
                      (dir / "ft").string() + " --seed 4 --mode fastrack") == 0);
        CHECK(slurp(dir / "ft" / "result.txt").find("mode = fastrack") != std::string::npos);
    }

    SUBCASE("batch emits per-run and aggregate CSVs") {
        CHECK(run_cli("batch -s " + (dir / "open.scn").string() + " -v " + values.string() +
                      " -n 2 -o " + (dir / "b").string()) == 0);
        const std::string runs = slurp(dir / "b" / "runs.csv");
        CHECK(runs.find("seed,mode,disturbance_setting,outcome") == 0);
        CHECK(std::count(runs.begin(), runs.end(), '\n') == 3);  // header + 2 rows
        CHECK(slurp(dir / "b" / "aggregate.csv").find("srf,none,2,0,100") != std::string::npos);
    }
}
