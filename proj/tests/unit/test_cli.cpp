#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "tsallis/parallel.hpp"

using namespace tsallis::app;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text, "t.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kBase = R"(market: {m: 1, n: 1, lambda: {kind: constant, level: [0.6]}}
params: {q: 2.0, gamma: 1.0}
claim: {name: digital_wperp}
numerics: {paths: 4000, steps: 10, seed: 3}
)";

}  // namespace

TEST(Config, ParsesDefaults) {
    const ScenarioConfig c = parse_config(kBase, "t.yaml");
    EXPECT_EQ(c.q, 2.0);
    EXPECT_EQ(c.gamma, 1.0);
    EXPECT_EQ(c.setup.paths, 4000u);
    EXPECT_EQ(c.setup.seed, 3u);
    EXPECT_EQ(c.outputs.report, "report.json");
    EXPECT_EQ(c.make_claim().id, "digital_wperp");
}

TEST(Config, RejectsQEqualOneWithReason) {
    const std::string e = error_of("market: {m: 1, n: 1}\nparams: {q: 1.0}\nclaim: {name: constant}\n");
    EXPECT_NE(e.find("t.yaml:2"), std::string::npos) << e;
    EXPECT_NE(e.find("params.q"), std::string::npos) << e;
    EXPECT_NE(e.find("q != 1"), std::string::npos) << e;
}

TEST(Config, RejectsUnknownKeysWithLine) {
    const std::string e = error_of(std::string(kBase) + "outputs: {reprot: x.json}\n");
    EXPECT_NE(e.find("t.yaml:5"), std::string::npos) << e;
    EXPECT_NE(e.find("outputs.reprot"), std::string::npos) << e;
    EXPECT_NE(error_of(std::string(kBase) + "extra: 1\n").find("unknown key"), std::string::npos);
}

TEST(Config, RangeAndTypeErrors) {
    EXPECT_NE(error_of("market: {m: 1, n: 1, T: -1}\nparams: {q: 2}\nclaim: {name: constant}\n").find("market.T"),
              std::string::npos);
    EXPECT_NE(error_of("market: {m: 1, n: 1}\nparams: {q: two}\nclaim: {name: constant}\n").find("params.q"),
              std::string::npos);
    EXPECT_NE(error_of("market: {m: 1, n: 1}\nparams: {q: 2}\nclaim: {name: custom, expr: \"W + 1\"}\n")
                  .find("not provably bounded"),
              std::string::npos);
    EXPECT_NE(error_of("market: {m: 1, n: 1}\nparams: {q: 2}\nclaim: {name: swaption}\n").find("claim.name"),
              std::string::npos);
    EXPECT_NE(error_of("market: {m: 1, n: 1}\nparams: {q: 2}\nclaim: {name: constant}\nnumerics: {pde: {points: 100}}\n")
                  .find("must be odd"),
              std::string::npos);
    EXPECT_NE(error_of("market: {m: 1, n: 1}\nparams: {q: 2}\nclaim: [1, 2\n").find("syntax error"), std::string::npos);
}

TEST(Config, MissingSections) {
    EXPECT_NE(error_of("params: {q: 2}\nclaim: {name: constant}\n").find("market"), std::string::npos);
    EXPECT_NE(error_of("market: {m: 1, n: 1}\nclaim: {name: constant}\n").find("params"), std::string::npos);
}

TEST(Cli, ZeroClaimPrice) {
    const fs::path dir = fs::temp_directory_path() / "tsallis_cli_zero";
    fs::remove_all(dir);
    const ScenarioConfig cfg = parse_config(
        "market: {m: 1, n: 1}\nparams: {q: 2.0, gamma: 1.0}\nclaim: {name: constant, params: {value: 0}}\n"
        "numerics: {paths: 100, steps: 4}\n",
        "zero.yaml");
    std::ostringstream log;
    EXPECT_EQ(run_command(cfg, RunOptions{"price", dir.string(), false, 1}, log), kExitPass);
    const std::string report = slurp(dir / "report.json");
    const auto f0 = report.find("\"F0\": {");
    ASSERT_NE(f0, std::string::npos);
    EXPECT_EQ(report.find("\"value\": 0.0,", f0), report.find("\"value\"", f0)) << report;
    EXPECT_TRUE(fs::exists(dir / "metadata.json"));
}

TEST(Cli, UnhedgedDigitalReportAndStrictMode) {
    const fs::path dir = fs::temp_directory_path() / "tsallis_cli_digital";
    fs::remove_all(dir);
    const ScenarioConfig cfg = parse_config(kBase, "t.yaml");
    std::ostringstream log;
    EXPECT_EQ(run_command(cfg, RunOptions{"price", dir.string(), false, 1}, log), kExitPass);
    // The seller leg is skipped with a warning, which --strict escalates.
    EXPECT_EQ(run_command(cfg, RunOptions{"price", dir.string(), true, 1}, log), kExitError);
}

TEST(Cli, ReportsAreByteIdenticalAcrossRunsAndThreads) {
    const fs::path a = fs::temp_directory_path() / "tsallis_cli_a", b = fs::temp_directory_path() / "tsallis_cli_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const ScenarioConfig cfg = parse_config(
        "market: {m: 1, n: 1, lambda: {kind: constant, level: [0.6]}}\nparams: {q: 2.0, gamma: 1.0}\n"
        "claim: {name: smooth_mixed}\nnumerics: {paths: 3000, steps: 10, scheme: lsmc}\n",
        "s.yaml");
    std::ostringstream log;
    tsallis::set_thread_count(1);
    run_command(cfg, RunOptions{"price", a.string(), false, 1}, log);
    tsallis::set_thread_count(4);
    run_command(cfg, RunOptions{"price", b.string(), false, 4}, log);
    tsallis::set_thread_count(1);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_EQ(slurp(a / "table.csv"), slurp(b / "table.csv"));
}

TEST(Cli, SweepTableHeader) {
    const fs::path dir = fs::temp_directory_path() / "tsallis_cli_sweep";
    fs::remove_all(dir);
    ScenarioConfig cfg = parse_config(std::string(kBase) + "sweep: {gammas: [0.1, 1.0], kappas: [2.0]}\n"
                                                           "outputs: {table: sweep.csv}\n",
                                      "t.yaml");
    std::ostringstream log;
    EXPECT_EQ(run_command(cfg, RunOptions{"sweep", dir.string(), false, 1}, log), kExitPass) << log.str();
    const std::string csv = slurp(dir / "sweep.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "gamma,F0,CE0,riskneutral0");
}
