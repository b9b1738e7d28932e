#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "optocool/scenario_file.hpp"
#include "optocool/table.hpp"

using namespace optocool;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int rc = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("optocool_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Outcome run(const std::string& args, const std::string& env = "") {
    const fs::path out = scratch() / "stdout", err = scratch() / "stderr";
    const std::string cmd = env + " \"" OPTOCOOL_BIN "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string fixture(const std::string& name) { return std::string(OPTOCOOL_SCENARIO_DIR) + "/" + name; }

std::string write_scenario(const std::string& name, const nlohmann::json& j) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
}

nlohmann::json fixture_json(const std::string& name) {
    std::ifstream in(fixture(name));
    return nlohmann::json::parse(in);
}

}  // namespace

TEST(Cli, SteadyDiamondMirror) {
    const Outcome r = run("steady --scenario " + fixture("diamond_mirror.json"));
    ASSERT_EQ(r.rc, 0) << r.err;
    const Table t = parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(std::get<std::string>(t.rows[0][t.column("status")]), "ok");
    EXPECT_NEAR(t.number(0, "n_ss"), 2.17795751136221, 1e-12);
}

TEST(Cli, SteadyDivergentExitsThree) {
    auto j = fixture_json("tms_red.json");
    j["cloud"]["n_atoms"] = 0;
    const Outcome r = run("steady --scenario " + write_scenario("bare.json", j));
    EXPECT_EQ(r.rc, 3);
    const Table t = parse_csv(r.out);
    EXPECT_EQ(std::get<std::string>(t.rows[0][t.column("status")]), "divergent");
    EXPECT_TRUE(std::isinf(t.number(0, "n_ss")));
}

TEST(Cli, InputErrorsExitTwo) {
    const fs::path bad = scratch() / "broken.json";
    std::ofstream(bad) << "{\n \"mirror\": {\n   \"nu_hz\": ,\n";
    Outcome r = run("steady --scenario " + bad.string());
    EXPECT_EQ(r.rc, 2);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

    auto j = fixture_json("tms_red.json");
    j["cloud"]["colour"] = "blue";
    r = run("steady --scenario " + write_scenario("unknown.json", j));
    EXPECT_EQ(r.rc, 2);
    EXPECT_NE(r.err.find("cloud: unknown key 'colour'"), std::string::npos) << r.err;

    EXPECT_EQ(run("steady --scenario /nonexistent/file.json").rc, 2);
    EXPECT_EQ(run("steady").rc, 2);
    EXPECT_EQ(run("frobnicate --scenario x").rc, 2);
    EXPECT_EQ(run("spectrum --scenario " + fixture("bs_blue.json") + " --points 1").rc, 2);
}

TEST(Cli, MalformedAxisPrintsUsage) {
    const Outcome r = run("sweep --scenario " + fixture("tms_red.json") + " --axis cloud.delta_over_nu=1:2");
    EXPECT_EQ(r.rc, 2);
    EXPECT_NE(r.err.find("usage: PATH=LO:HI:N"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("--axis"), std::string::npos) << r.err;
    EXPECT_EQ(run("sweep --scenario " + fixture("tms_red.json") + " --axis nowhere=1:2:3").rc, 2);
}

TEST(Cli, PoleExitsFour) {
    auto j = fixture_json("diamond_mirror.json");
    j["overrides"]["eta_minus"] = {1.0, 0.0};
    const Outcome r = run("steady --scenario " + write_scenario("pole.json", j));
    EXPECT_EQ(r.rc, 4) << r.err;
}

TEST(Cli, SpectrumBlueAndRed) {
    const Outcome blue =
        run("spectrum --scenario " + fixture("bs_blue.json") + " --omega-min -2 --omega-max 2 --points 401");
    ASSERT_EQ(blue.rc, 0) << blue.err;
    const Table t = parse_csv(blue.out);
    std::size_t peak = 0;
    for (std::size_t k = 0; k < t.rows.size(); ++k)
        if (t.number(k, "abs_J") > t.number(peak, "abs_J")) peak = k;
    EXPECT_NEAR(t.number(peak, "omega_over_nu"), 1.0, 0.02);
    EXPECT_EQ(t.number(300, "omega_over_nu"), 1.0);
    EXPECT_NEAR(t.number(300, "abs_J"), 1.0, 1e-15);
    EXPECT_NEAR(1.0 / t.number(100, "abs_J"), 46.677379722707, 1e-9);

    const Outcome red = run("spectrum --scenario " + fixture("tms_red.json") +
                            " --omega-min -2 --omega-max 2 --points 401 --normalize minus");
    const Table tr = parse_csv(red.out);
    std::size_t rpeak = 0;
    for (std::size_t k = 0; k < tr.rows.size(); ++k)
        if (tr.number(k, "abs_J") > tr.number(rpeak, "abs_J")) rpeak = k;
    EXPECT_NEAR(tr.number(rpeak, "omega_over_nu"), -1.0, 0.02);
}

TEST(Cli, SpectrumZeroFrequencyIsExactlyZero) {
    const Outcome r = run("spectrum --scenario " + fixture("bs_blue.json") +
                          " --omega-min -3 --omega-max 3 --points 7 --normalize none");
    ASSERT_EQ(r.rc, 0) << r.err;
    const Table t = parse_csv(r.out);
    EXPECT_EQ(t.number(3, "omega_over_nu"), 0.0);
    EXPECT_EQ(t.number(3, "re_J"), 0.0);
    EXPECT_EQ(t.number(3, "im_J"), 0.0);
}

TEST(Cli, Evolve) {
    Outcome r = run("evolve --scenario " + fixture("diamond_mirror.json") + " --t-max 0");
    ASSERT_EQ(r.rc, 0) << r.err;
    Table t = parse_csv(r.out);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.number(0, "t_s"), 0.0);
    EXPECT_NEAR(t.number(0, "n"), 6511.44348003, 1e-6);

    r = run("evolve --scenario " + fixture("diamond_mirror.json") + " --n0 6500 --t-max 0.1 --points 11");
    t = parse_csv(r.out);
    EXPECT_EQ(t.number(0, "n"), 6500.0);
    EXPECT_NEAR(t.number(10, "n"), 2.17795751136221, 1e-9);

    r = run("evolve --scenario " + fixture("diamond_mirror.json") + " --n0 2.1779575113622154 --t-max 1 --points 5");
    t = parse_csv(r.out);
    for (std::size_t k = 0; k < t.rows.size(); ++k) EXPECT_NEAR(t.number(k, "n"), 2.1779575113622154, 1e-12);

    EXPECT_EQ(run("evolve --scenario " + fixture("tms_red.json") + " --t-max 1").rc, 2);
}

TEST(Cli, Design) {
    Outcome r = run("design --scenario " + fixture("bs_blue.json") + " --strategy bs");
    ASSERT_EQ(r.rc, 0) << r.err;
    Table t = parse_csv(r.out);
    EXPECT_DOUBLE_EQ(t.number(0, "delta_over_nu"), -7.0);
    EXPECT_EQ(t.number(0, "phase"), 1.0);
    EXPECT_EQ(t.number(0, "xbar_m"), 0.0);

    r = run("design --scenario " + fixture("bs_blue.json") + " --strategy tms");
    ASSERT_EQ(r.rc, 0) << r.err;
    t = parse_csv(r.out);
    EXPECT_DOUBLE_EQ(t.number(0, "delta_over_nu"), 7.0);
    EXPECT_EQ(t.number(0, "phase"), -1.0);
    EXPECT_NEAR(t.number(0, "xbar_m"), 2342.128578125, 1e-9);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(t.number(0, "n_ss_ideal"), 0.0);
}

TEST(Cli, SweepAndOptimize) {
    const std::string args = "sweep --scenario " + fixture("tms_red.json") +
                             " --axis cloud.delta_over_nu=-10:10:2001 --axis cloud.placement.strategy=tms,bs";
    const Outcome a = run(args, "OPTOCOOL_THREADS=1");
    ASSERT_EQ(a.rc, 0) << a.err;
    const Outcome b = run(args + " --threads 4");
    EXPECT_EQ(a.out, b.out);
    const Table t = parse_csv(a.out);
    ASSERT_EQ(t.rows.size(), 4002u);
    std::size_t best = 0;
    for (std::size_t k = 0; k < t.rows.size(); ++k)
        if (t.number(k, "n_ss") < t.number(best, "n_ss")) best = k;
    EXPECT_NEAR(t.number(best, "cloud.delta_over_nu"), 7.0, 1e-3);
    EXPECT_EQ(std::get<std::string>(t.rows[best][t.column("cloud.placement.strategy")]), "tms");

    const Outcome o = run("optimize --scenario " + fixture("tms_red.json") + " --free cloud.delta_over_nu=-10:10");
    ASSERT_EQ(o.rc, 0) << o.err;
    const Table ot = parse_csv(o.out);
    EXPECT_NEAR(ot.number(0, "cloud.delta_over_nu"), 7.0, 1e-3);
    EXPECT_LE(ot.number(0, "n_ss"), t.number(best, "n_ss") * (1.0 + 1e-10));

    auto j = fixture_json("tms_red.json");
    j["cloud"]["n_atoms"] = 0;
    EXPECT_EQ(run("optimize --scenario " + write_scenario("bare2.json", j) + " --free cloud.delta_over_nu=-1:1").rc, 3);
    EXPECT_EQ(run("optimize --scenario " + fixture("tms_red.json") + " --free cloud.delta_over_nu=3:1").rc, 2);
}

TEST(Cli, JsonOutputAndFile) {
    const fs::path out = scratch() / "steady.json";
    const Outcome r = run("steady --scenario " + fixture("tms_red.json") + " --format json --output " + out.string());
    ASSERT_EQ(r.rc, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = nlohmann::json::parse(slurp(out));
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["status"], "ok");
    EXPECT_LT(j[0]["n_ss"].get<double>(), 1.0);
}
