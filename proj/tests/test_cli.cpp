#include <nnls/experiment.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

using namespace nnls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("nnls_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

fs::path write_config(const fs::path& dir, nlohmann::json cfg) {
    cfg["output"] = (dir / "out").string();
    const fs::path p = dir / "config.json";
    spit(p, cfg.dump(2));
    return p;
}

int run(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string(NNLS_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json small_pde() { return {{"L", 64.0}, {"N", 1024}, {"dt", 0.01}}; }

std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(Cli, MalformedJsonExitsWithInputError) {
    const auto d = scratch("malformed");
    spit(d / "config.json", "{ \"potential\": ");
    EXPECT_EQ(run("--config " + (d / "config.json").string() + " scatter", d), 1);
    EXPECT_NE(slurp(d / "stderr.txt").find("malformed JSON"), std::string::npos);
}

TEST(Cli, BadArgumentsExitWithInputError) {
    const auto d = scratch("badargs");
    const auto cfg = write_config(d, {{"potential", {{"kind", "zero"}}}});
    EXPECT_EQ(run("scatter", d), 1);
    EXPECT_EQ(run("--config " + cfg.string() + " frobnicate", d), 1);
    EXPECT_EQ(run("--config " + cfg.string() + " --tol-scale -1 scatter", d), 1);
    EXPECT_EQ(run("--config " + (d / "missing.json").string() + " scatter", d), 1);
}

TEST(Cli, ConfigInvariantsAreEnforced) {
    nlohmann::json j = {{"potential", {{"kind", "zero"}}}, {"rays", {20.0}}};
    EXPECT_THROW(config_from_json(j), InvalidInput);
    j = {{"potential", {{"kind", "zero"}}}, {"rays", {0.5}}, {"times", {40.0, 20.0}}};
    EXPECT_THROW(config_from_json(j), InvalidInput);
    j = {{"potential", {{"kind", "zero"}}}, {"times", {5.0}}};
    EXPECT_THROW(config_from_json(j), InvalidInput);
    j = {{"rays", {0.5}}};
    EXPECT_THROW(config_from_json(j), InvalidInput);
}

TEST(Cli, ZeroPotentialScatter) {
    const auto d = scratch("zero_scatter");
    const auto cfg = write_config(d, {{"potential", {{"kind", "zero"}}}, {"spectral", {{"z_max", 4.0}, {"points", 33}}}});
    ASSERT_EQ(run("--config " + cfg.string() + " scatter", d), 0);
    const auto rows = csv(d / "out" / "scattering.csv");
    ASSERT_EQ(rows.size(), 34u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(std::stod(rows[i][1]), 1.0);
        EXPECT_EQ(std::stod(rows[i][3]), 0.0);
        EXPECT_EQ(std::stod(rows[i][4]), 0.0);
    }
    const auto g = nlohmann::json::parse(slurp(d / "out" / "genericity.json"));
    EXPECT_TRUE(g.at("passed").get<bool>());
}

TEST(Cli, BoxVerifyAgainstOracle) {
    const auto d = scratch("box_verify");
    const auto cfg = write_config(d, {{"potential", {{"kind", "box"}, {"amplitude", 0.3}, {"sigma", 1}}},
                                      {"spectral", {{"z_max", 10.0}, {"points", 129}}}});
    ASSERT_EQ(run("--config " + cfg.string() + " --threads 2 verify", d), 0);
    const auto v = nlohmann::json::parse(slurp(d / "out" / "verify.json"));
    ASSERT_GE(v.size(), 5u);
    for (const auto& c : v) EXPECT_EQ(c.at("status"), "pass") << c.dump();
}

TEST(Cli, GenericityViolationExitsWithTwo) {
    const auto d = scratch("nongeneric");
    const auto cfg = write_config(d, {{"potential", {{"kind", "box"}, {"amplitude", 1.2}, {"sigma", -1}}},
                                      {"spectral", {{"z_max", 6.0}, {"points", 65}}},
                                      {"tolerances", {{"eps_gen", 0.9}}}});
    EXPECT_EQ(run("--config " + cfg.string() + " scatter", d), 2);
    EXPECT_FALSE(slurp(d / "stderr.txt").empty());
}

TEST(Cli, PhaseWritesOneEntryPerRay) {
    const auto d = scratch("phase");
    const auto cfg = write_config(d, {{"potential", {{"kind", "box"}, {"amplitude", 0.2}}},
                                      {"spectral", {{"z_max", 8.0}, {"points", 257}}},
                                      {"rays", {-0.5, 0.5}}});
    ASSERT_EQ(run("--config " + cfg.string() + " phase", d), 0);
    const auto j = nlohmann::json::parse(slurp(d / "out" / "phase.json"));
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[1].at("xi").get<double>(), 0.5);
}

TEST(Cli, AsymptoticBatchFromQueryFile) {
    const auto d = scratch("asym");
    spit(d / "queries.jsonl", "{\"x\": -40, \"t\": 20}\n\n{\"x\": 12.5, \"t\": 50}\n");
    const auto cfg = write_config(d, {{"potential", {{"kind", "box"}, {"amplitude", 0.2}}},
                                      {"spectral", {{"z_max", 8.0}, {"points", 257}}},
                                      {"queries", (d / "queries.jsonl").string()}});
    ASSERT_EQ(run("--config " + cfg.string() + " asym", d), 0);
    const auto rows = csv(d / "out" / "asymptotics.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "t", "xi", "re_q", "im_q", "abs_q", "im_nu", "validity"}));
    EXPECT_EQ(std::stod(rows[1][2]), 0.5);
    EXPECT_EQ(rows[1][7], "valid");
}

TEST(Cli, EvolveWritesSnapshots) {
    const auto d = scratch("evolve");
    auto pde = small_pde();
    pde["format"] = "bin";
    const auto cfg = write_config(d, {{"potential", {{"kind", "gaussian"}, {"amplitude", 0.1}, {"L", 36.0}, {"params", {{"width", 3.0}}}}},
                                      {"times", {10.0, 20.0}},
                                      {"pde", pde}});
    ASSERT_EQ(run("--config " + cfg.string() + " evolve", d), 0);
    EXPECT_EQ(fs::file_size(d / "out" / "snapshot_t10.bin"), 1024u * 16u);
    EXPECT_TRUE(fs::exists(d / "out" / "snapshot_t20.bin"));
    const auto diag = nlohmann::json::parse(slurp(d / "out" / "pde_diagnostics.json"));
    EXPECT_LT(diag.at("max_mass_drift").get<double>(), 1e-10);
}

TEST(Cli, ReportOnEmptyDirectoryIsMissingInputs) {
    const auto d = scratch("empty_report");
    const auto cfg = write_config(d, {{"potential", {{"kind", "zero"}}}});
    fs::create_directories(d / "out");
    EXPECT_EQ(run("--config " + cfg.string() + " report", d), 4);
    EXPECT_EQ(run("--config " + cfg.string() + " --out " + (d / "nowhere").string() + " report", d), 4);
}

TEST(Cli, ZeroPotentialCompareAndDeterministicReport) {
    const auto d = scratch("zero_compare");
    const auto cfg = write_config(d, {{"potential", {{"kind", "zero"}}},
                                      {"spectral", {{"z_max", 4.0}, {"points", 65}}},
                                      {"rays", {0.3, 0.5}},
                                      {"times", {10.0, 20.0, 40.0}},
                                      {"pde", small_pde()}});
    ASSERT_EQ(run("--config " + cfg.string() + " compare", d), 0);
    const auto rows = csv(d / "out" / "compare.csv");
    ASSERT_EQ(rows.size(), 7u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][7]), 0.0);
    const std::string first = slurp(d / "out" / "compare.csv");
    ASSERT_EQ(run("--config " + cfg.string() + " compare", d), 0);
    EXPECT_EQ(slurp(d / "out" / "compare.csv"), first);

    ASSERT_EQ(run("--config " + cfg.string() + " report", d), 0);
    const std::string s1 = slurp(d / "out" / "summary.json"), t1 = slurp(d / "out" / "summary.txt");
    ASSERT_EQ(run("--config " + cfg.string() + " report", d), 0);
    EXPECT_EQ(slurp(d / "out" / "summary.json"), s1);
    EXPECT_EQ(slurp(d / "out" / "summary.txt"), t1);
    const auto summary = nlohmann::json::parse(s1);
    EXPECT_EQ(summary.at("overall"), "pass");
    std::set<std::string> names;
    for (const auto& c : summary.at("checks")) names.insert(c.at("check").get<std::string>());
    EXPECT_TRUE(names.count("compare_complete"));
    EXPECT_TRUE(names.count("nonlocal_mass"));
    EXPECT_TRUE(names.count("decay_rate xi=0.5"));
    EXPECT_TRUE(fs::exists(d / "out" / "report_long.csv"));
}

TEST(Cli, CompareFailureFlushesMarkerRow) {
    const auto d = scratch("compare_fail");
    const auto cfg = write_config(d, {{"potential", {{"kind", "gaussian"}, {"amplitude", 0.1}, {"L", 20.0}}},
                                      {"spectral", {{"z_max", 4.0}, {"points", 65}}},
                                      {"rays", {0.5}},
                                      {"times", {10.0, 20.0}},
                                      {"pde", {{"L", 16.0}, {"N", 256}, {"dt", 0.01}}}});
    EXPECT_EQ(run("--config " + cfg.string() + " compare", d), 3);
    const auto rows = csv(d / "out" / "compare.csv");
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows.back()[0], "FAILED");
    ASSERT_EQ(run("--config " + cfg.string() + " report", d), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(d / "out" / "summary.json")).at("overall"), "fail");
}

TEST(Cli, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(InvalidInput("x")), 1);
    EXPECT_EQ(exit_code_for(NonpositiveTime("x")), 1);
    EXPECT_EQ(exit_code_for(GenericityViolation("x")), 2);
    EXPECT_EQ(exit_code_for(ValidityViolation("x")), 3);
    EXPECT_EQ(exit_code_for(BoundaryContamination("x")), 3);
    EXPECT_EQ(exit_code_for(MissingInputs("x")), 4);
}

TEST(Cli, DecayExponentFit) {
    const std::vector<double> t{40, 80, 160};
    EXPECT_NEAR(fit_decay_exponent(t, {1.0, std::pow(2.0, -0.75), std::pow(4.0, -0.75)}), -0.75, 1e-12);
    EXPECT_TRUE(std::isnan(fit_decay_exponent(t, {0.0, 0.0, 0.0})));
    EXPECT_TRUE(strictly_decreasing({3, 2, 1}));
    EXPECT_FALSE(strictly_decreasing({3, 3, 1}));
}
