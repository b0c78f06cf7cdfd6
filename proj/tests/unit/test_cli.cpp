#include "commands.hpp"
#include "scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sica::cli;

namespace {

const fs::path kDemo = fs::path(SICA_SOURCE_DIR) / "configs" / "demo.json";

// Scratch directory unique to the running test.
fs::path scratch() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    const fs::path dir = fs::temp_directory_path() / "sica_cli_tests" / info->name();
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CommandOptions small_run(const fs::path& out) {
    CommandOptions o;
    o.config = kDemo;
    o.out = out;
    o.overrides = {"time.n_steps=100", "sweep.n_paths=10", "sweep.n_starts=1", "simulate.n_paths=20",
                   "simulate.dump_paths=2", "verify.n_paths=20", "verify.random_checks=200"};
    return o;
}

nlohmann::json demo_json() { return nlohmann::json::parse(slurp(kDemo)); }

} // namespace

TEST(Scenario, LoadsDemo) {
    const ScenarioConfig c = load_scenario(kDemo);
    EXPECT_EQ(c.k, 0.5);
    EXPECT_EQ(c.grid.n_steps(), 400u);
    EXPECT_EQ(c.sweep.n_paths, 200u);
    EXPECT_EQ(c.imprecise.transmission.upper(), 0.9);
    EXPECT_EQ(c.k_grid.size(), 5u);
}

TEST(Scenario, OverridesApplyInOrder) {
    const ScenarioConfig c = load_scenario(kDemo, {"k=0.25", "sweep.rho=1", "k=0.75"});
    EXPECT_EQ(c.k, 0.75);
    EXPECT_EQ(c.sweep.rho, 1.0);
    EXPECT_THROW(load_scenario(kDemo, {"no_equals_sign"}), ConfigError);
}

TEST(Scenario, MissingKeyIsNamed) {
    auto doc = demo_json();
    doc["parameters"].erase("beta");
    try {
        parse_scenario(doc);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("parameters.beta"), std::string::npos) << e.what();
    }
}

TEST(Scenario, InvalidValuesAreRejected) {
    for (const char* bad : {"k=1.5", "sweep.rho=0", "time.n_steps=0", "cost.w_u=0", "parameters.mu=[2,1]",
                            "sweep.adjoint_mode=\"bogus\"", "control.u_lo=2"}) {
        EXPECT_THROW(load_scenario(kDemo, {bad}), ConfigError) << bad;
    }
}

TEST(Cli, MissingKeyExitsWithConfigError) {
    const fs::path dir = scratch();
    auto doc = demo_json();
    doc["sweep"].erase("rho");
    doc.erase("time");
    std::ofstream(dir / "broken.json") << doc.dump(2);
    CommandOptions o;
    o.config = dir / "broken.json";
    o.out = dir / "out";
    std::ostringstream log;
    EXPECT_EQ(cmd_optimize(o, log), kConfigError);
    EXPECT_NE(log.str().find("time"), std::string::npos) << log.str();
}

TEST(Cli, SyntaxErrorReportsLine) {
    const fs::path dir = scratch();
    std::ofstream(dir / "syntax.json") << "{\n  \"k\": 0.5,\n  oops\n}\n";
    CommandOptions o;
    o.config = dir / "syntax.json";
    std::ostringstream log;
    EXPECT_EQ(cmd_simulate(o, log), kConfigError);
    EXPECT_NE(log.str().find("line 3"), std::string::npos) << log.str();
}

TEST(Cli, MissingFileIsConfigError) {
    CommandOptions o;
    o.config = "/nonexistent/sica.json";
    std::ostringstream log;
    EXPECT_EQ(cmd_verify(o, log), kConfigError);
}

TEST(Cli, StrictUnconvergedLeavesPartialOutputs) {
    const fs::path dir = scratch();
    CommandOptions o = small_run(dir);
    o.overrides.push_back("sweep.max_iters=1");
    o.strict = true;
    std::ostringstream log;
    EXPECT_EQ(cmd_optimize(o, log), kNotConverged);
    EXPECT_FALSE(fs::exists(dir / "control.csv"));
    EXPECT_TRUE(fs::exists(dir / "control.csv.partial"));

    o.strict = false;
    EXPECT_EQ(cmd_optimize(o, log), kOk);
    EXPECT_TRUE(fs::exists(dir / "control.csv"));
}

TEST(Cli, SimulateWritesExpectedFiles) {
    const fs::path dir = scratch();
    std::ostringstream log;
    ASSERT_EQ(cmd_simulate(small_run(dir), log), kOk) << log.str();
    EXPECT_EQ(slurp(dir / "trajectory_mean.csv").substr(0, 12), "t,S,I,C,A,u\n");
    EXPECT_TRUE(fs::exists(dir / "paths" / "path_00000.csv"));
    EXPECT_TRUE(fs::exists(dir / "paths" / "path_00001.csv"));
    EXPECT_FALSE(fs::exists(dir / "paths" / "path_00002.csv"));
    const auto summary = nlohmann::json::parse(slurp(dir / "omega_summary.json"));
    EXPECT_LE(summary["violation_fraction"].get<double>(), 0.01);
}

TEST(Cli, RunsAreByteIdenticalAcrossRepeatsAndThreads) {
    const fs::path dir = scratch();
    std::ostringstream log;
    for (const char* name : {"a", "b", "c"}) {
        CommandOptions o = small_run(dir / name);
        o.threads = std::string(name) == "c" ? 8 : 1;
        ASSERT_EQ(cmd_simulate(o, log), kOk);
        ASSERT_EQ(cmd_optimize(o, log), kOk);
    }
    for (const char* file : {"trajectory_mean.csv", "omega_summary.json", "control.csv", "adjoint_mean.csv",
                             "sweep_report.json", "nearopt_report.json", "paths/path_00001.csv"}) {
        const std::string a = slurp(dir / "a" / file);
        EXPECT_FALSE(a.empty()) << file;
        EXPECT_EQ(a, slurp(dir / "b" / file)) << file;
        EXPECT_EQ(a, slurp(dir / "c" / file)) << file;
    }
}

TEST(Cli, SeedFlagChangesStochasticOutput) {
    const fs::path dir = scratch();
    std::ostringstream log;
    CommandOptions a = small_run(dir / "a");
    CommandOptions b = small_run(dir / "b");
    b.seed = 7;
    ASSERT_EQ(cmd_simulate(a, log), kOk);
    ASSERT_EQ(cmd_simulate(b, log), kOk);
    EXPECT_NE(slurp(dir / "a" / "trajectory_mean.csv"), slurp(dir / "b" / "trajectory_mean.csv"));
}

TEST(Cli, NoControlEfficacyOptimizesToZero) {
    const fs::path dir = scratch();
    CommandOptions o = small_run(dir);
    o.overrides.push_back("parameters.m=[0,0]");
    std::ostringstream log;
    ASSERT_EQ(cmd_optimize(o, log), kOk) << log.str();
    std::istringstream csv(slurp(dir / "control.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "t,u");
    // Relaxation approaches the zero argmax geometrically; convergence stops within cell_tol.
    while (std::getline(csv, line))
        EXPECT_LE(std::stod(line.substr(line.find(',') + 1)), 1e-6) << line;
}

TEST(Cli, VerifyGradcheckAndKsweepSucceed) {
    const fs::path dir = scratch();
    CommandOptions o = small_run(dir);
    o.overrides.push_back("ksweep.ks=[0,1]");
    std::ostringstream log;
    EXPECT_EQ(cmd_verify(o, log), kOk) << log.str();
    EXPECT_EQ(cmd_gradcheck(o, log), kOk) << log.str();
    EXPECT_EQ(cmd_ksweep(o, log), kOk) << log.str();
    const auto verify = nlohmann::json::parse(slurp(dir / "verify.json"));
    EXPECT_TRUE(verify["all_passed"].get<bool>()) << verify.dump(2);
    EXPECT_EQ(slurp(dir / "ksweep.csv").substr(0, 52), "k,J_mean,J_stderr,omega_low,omega_high,u_mean,u_max\n");
}
