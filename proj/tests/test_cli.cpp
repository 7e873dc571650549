#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int status;
    std::string out;
};

CliResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + MINSURF_CLI_PATH + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("minsurf_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string read_all(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

json without_timestamp(json j) {
    j["environment"].erase("timestamp");
    return j;
}

const json* find_check(const json& report, const std::string& name) {
    for (const auto& c : report["checks"])
        if (c["name"] == name) return &c;
    return nullptr;
}

}  // namespace

TEST(Kdv, PrintsHierarchy) {
    const CliResult r2 = run("kdv --print-p 2");
    EXPECT_EQ(r2.status, 0);
    EXPECT_EQ(r2.out, "P0 = 1/2\nP1 = u\nP2 = u'' + 3 u^2\n");
    const CliResult r3 = run("kdv --print-p 3");
    EXPECT_NE(r3.out.find("P3 = u'''' + 10 u u'' + 5 u'^2 + 10 u^3\n"), std::string::npos);
}

TEST(Kdv, FitReport) {
    const CliResult r = run("kdv --sigma 2 --n 1 --samples 60 --seed 7");
    ASSERT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["coefficients"].size(), 1u);
    EXPECT_NEAR(j["coefficients"][0][0].get<double>(), -0.5, 1e-9);
    EXPECT_LT(j["residual"].get<double>(), 1e-6);
    EXPECT_EQ(run("kdv --sigma 2 --n 9").status, 2);
}

TEST(Gen, FortyBySixtyPipeline) {
    const fs::path dir = fresh_dir("gen");
    const CliResult r = run("gen --sigma 2 --e 0.1 --grid 40x60 --copies 1 -o " + dir.string());
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(fs::exists(dir / "fundamental.obj"));
    EXPECT_TRUE(fs::exists(dir / "extended.obj"));
    const json rep = json::parse(read_all(dir / "report.json"));
    EXPECT_EQ(rep["fundamental_vertices"], 2400);
    EXPECT_EQ(rep["extended_vertices"], 2400 * 16);
    EXPECT_NEAR(rep["translation"][2].get<double>(), 2 * 2.342840168, 1e-8);
    EXPECT_TRUE(rep["pass"].get<bool>());
}

TEST(Gen, CopiesZeroAndFormats) {
    const fs::path dir = fresh_dir("copies");
    ASSERT_EQ(run("gen --sigma 2 --grid 10x12 --copies 0 --format both -o " + dir.string()).status, 0);
    const json rep = json::parse(read_all(dir / "report.json"));
    EXPECT_EQ(rep["extended_vertices"].get<int>(), 8 * rep["fundamental_vertices"].get<int>());
    EXPECT_TRUE(fs::exists(dir / "extended.ply"));
    EXPECT_TRUE(fs::exists(dir / "extended.obj"));
}

TEST(Gen, LambdaRecordsSigma) {
    const fs::path a = fresh_dir("lambda"), b = fresh_dir("sigma");
    ASSERT_EQ(run("gen --lambda 1 --grid 8x10 -o " + a.string()).status, 0);
    ASSERT_EQ(run("gen --sigma 2.618033988749895 --grid 8x10 -o " + b.string()).status, 0);
    const json ra = json::parse(read_all(a / "report.json"));
    EXPECT_NEAR(ra["sigma"].get<double>(), 2.618034, 1e-6);
    EXPECT_EQ(ra["lambda"], 1.0);
    const json rb = json::parse(read_all(b / "report.json"));
    EXPECT_NEAR(ra["slab_height"].get<double>(), rb["slab_height"].get<double>(), 1e-12);
}

TEST(Gen, Deterministic) {
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    ASSERT_EQ(run("gen --sigma 0.7 --grid 12x16 --format both -o " + a.string()).status, 0);
    ASSERT_EQ(run("gen --sigma 0.7 --grid 12x16 --format both -o " + b.string()).status, 0);
    for (const char* f : {"fundamental.obj", "extended.obj", "fundamental.ply", "extended.ply"})
        EXPECT_EQ(read_all(a / f), read_all(b / f)) << f;
    EXPECT_EQ(without_timestamp(json::parse(read_all(a / "report.json"))),
              without_timestamp(json::parse(read_all(b / "report.json"))));
}

TEST(Verify, DefaultSuitePasses) {
    const CliResult r = run("verify --sigma 2 --seed 7");
    EXPECT_EQ(r.status, 0) << r.out;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    for (const char* name : {"period_gamma1", "period_gamma2_x2", "end_flux", "symmetry_S1", "shiffman", "circle_fit",
                             "registration", "enneper", "minimality_classical", "minimality_weierstrass",
                             "conformality_weierstrass", "gauss_limit"})
        EXPECT_NE(find_check(j, name), nullptr) << name;
    EXPECT_EQ(find_check(j, "catenoid"), nullptr);
}

TEST(Verify, ForcedShiffmanFailure) {
    const fs::path dir = fresh_dir("forced");
    fs::create_directories(dir);
    const CliResult r = run("verify --sigma 2 --tol shiffman=1e-15 --json " + (dir / "r.json").string());
    EXPECT_EQ(r.status, 1);
    const json j = json::parse(read_all(dir / "r.json"));
    EXPECT_FALSE(j["pass"].get<bool>());
    const json* s = find_check(j, "shiffman");
    ASSERT_NE(s, nullptr);
    EXPECT_FALSE((*s)["pass"].get<bool>());
    EXPECT_EQ((*s)["threshold"], 1e-15);
}

TEST(Verify, LambdaZeroRunsCatenoidBranch) {
    const CliResult r = run("verify --lambda 0");
    EXPECT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    const json* c = find_check(j, "catenoid");
    ASSERT_NE(c, nullptr);
    EXPECT_TRUE((*c)["pass"].get<bool>());
    EXPECT_EQ(j["sigma"], 1.0);
}

TEST(Config, ErrorsExitWithTwo) {
    EXPECT_EQ(run("gen --sigma 2 --lambda 1").status, 2);
    EXPECT_EQ(run("gen").status, 2);
    EXPECT_EQ(run("gen --sigma 2 --grid 40by60").status, 2);
    EXPECT_EQ(run("gen --sigma -1").status, 2);
    EXPECT_EQ(run("verify --sigma 2 --tol shiffman=-1").status, 2);
    EXPECT_EQ(run("verify --sigma 2 --tol shiffman").status, 2);
    EXPECT_EQ(run("gen --sigma 2 --e 1.5").status, 2);
    EXPECT_EQ(run("gen --sigma 2 --format stl").status, 2);
    EXPECT_EQ(run("frobnicate").status, 2);
    EXPECT_EQ(run("kdv").status, 2);
}

TEST(Logging, EnvironmentLevelKeepsStdoutClean) {
    const CliResult r = run("kdv --sigma 2 --samples 20", "MINSURF_LOG=debug");
    ASSERT_EQ(r.status, 0);
    EXPECT_NO_THROW(json::parse(r.out));
}
