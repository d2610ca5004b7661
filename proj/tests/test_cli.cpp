#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hardedge/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hardedge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = hardedge::cli::run_cli(static_cast<int>(argv.size()), argv.data(), {out, err});
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream f(p);
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("hardedge_cli_" + std::to_string(::getpid()) + "_" +
                                           ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    fs::path dir;
};

}  // namespace

TEST(CliParsing, Grids) {
    const auto g = hardedge::cli::parse_grid("-5:5:11");
    const auto pts = g.points();
    ASSERT_EQ(pts.size(), 11u);
    EXPECT_EQ(pts.front(), -5.0);
    EXPECT_EQ(pts.back(), 5.0);
    EXPECT_EQ(pts[5], 0.0);
    EXPECT_THROW(hardedge::cli::parse_grid("5:1:10"), hardedge::cli::usage_error);
    EXPECT_THROW(hardedge::cli::parse_grid("1:2"), hardedge::cli::usage_error);
    EXPECT_THROW(hardedge::cli::parse_grid("1:2:0"), hardedge::cli::usage_error);
    EXPECT_THROW(hardedge::cli::parse_grid("a:2:3"), hardedge::cli::usage_error);
    EXPECT_EQ(hardedge::cli::parse_grid("2:2:1").points(), std::vector<double>{2.0});
    EXPECT_THROW(hardedge::cli::parse_window("3:3"), hardedge::cli::usage_error);
    EXPECT_THROW(hardedge::cli::parse_int_list("25,25"), hardedge::cli::usage_error);
}

TEST_F(CliTest, DensityOutsideSupportIsZero) {
    const auto r = cli({"density", "--x", "3", "--grid", "0.5:10:20", "--out", path("d.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(path("d.csv"));
    ASSERT_EQ(rows.size(), 21u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "rho_analytic"}));
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][1]), 0.0);
    EXPECT_TRUE(fs::exists(path("d.csv.manifest.json")));
}

TEST_F(CliTest, DensitySymmetricAtOrigin) {
    const auto r = cli({"density", "--x", "0", "--grid", "-5:5:101", "--out", path("d.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(path("d.csv"));
    ASSERT_EQ(rows.size(), 102u);
    for (int i = 1; i <= 101; ++i) {
        const double v = std::stod(rows[i][1]);
        const double m = std::stod(rows[102 - i][1]);
        if (std::isinf(v)) {
            EXPECT_TRUE(std::isinf(m));
            continue;
        }
        EXPECT_NEAR(v, m, 1e-6) << rows[i][0];
    }
}

TEST_F(CliTest, DensityRejectsBadGrid) {
    EXPECT_EQ(cli({"density", "--x", "0", "--grid", "5:1:10", "--out", path("d.csv")}).code, 2);
    EXPECT_EQ(cli({"density", "--x", "0", "--family", "jacobi", "--grid", "1:2:3", "--out", path("d.csv")}).code, 2);
    EXPECT_EQ(cli({"density", "--grid", "1:2:3", "--out", path("d.csv")}).code, 2);
    EXPECT_EQ(cli({}).code, 2);
}

TEST_F(CliTest, SimulateIsReproducibleAndRoundTrips) {
    const std::vector<std::string> base = {"simulate", "--n", "20", "--samples", "200", "--x", "1", "--seed", "5"};
    auto args = base;
    args.insert(args.end(), {"--threads", "1", "--out", path("a.csv")});
    ASSERT_EQ(cli(args).code, 0);
    args = base;
    args.insert(args.end(), {"--threads", "2", "--out", path("b.csv")});
    ASSERT_EQ(cli(args).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));

    const auto manifest = nlohmann::json::parse(slurp(path("a.csv.manifest.json")));
    EXPECT_EQ(manifest["command"], "simulate");
    EXPECT_EQ(manifest["output_paths"][0], path("a.csv"));
    const auto rows = read_csv(path("a.csv"));
    ASSERT_EQ(rows[0], (std::vector<std::string>{"bin_lo", "bin_hi", "density_mc", "density_analytic"}));
    double l1 = 0.0, sup = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double lo = std::stod(rows[i][0]), hi = std::stod(rows[i][1]);
        const double d = std::abs(std::stod(rows[i][2]) - std::stod(rows[i][3]));
        l1 += d * (hi - lo);
        sup = std::max(sup, d);
    }
    EXPECT_EQ(l1, manifest["results"]["l1_distance"].get<double>());
    EXPECT_EQ(sup, manifest["results"]["sup_distance"].get<double>());
}

TEST_F(CliTest, SimulateRejectsBadInput) {
    EXPECT_EQ(cli({"simulate", "--samples", "0", "--out", path("s.csv")}).code, 2);
    EXPECT_EQ(cli({"simulate", "--window", "2:1", "--out", path("s.csv")}).code, 2);
    EXPECT_EQ(cli({"simulate", "--ensemble", "wishart", "--out", path("s.csv")}).code, 2);
    EXPECT_EQ(cli({"simulate", "--curve", "finite", "--n", "100", "--out", path("s.csv")}).code, 2);
}

TEST_F(CliTest, KernelModes) {
    auto r = cli({"kernel", "--mode", "product-limit", "--x", "3", "--a1-grid", "0.5:2:3", "--a2-grid", "0.5:2:4",
                  "--out", path("k.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(path("k.csv"));
    ASSERT_EQ(rows.size(), 4u);
    ASSERT_EQ(rows[0].size(), 5u);
    for (std::size_t i = 1; i < rows.size(); ++i)
        for (std::size_t j = 1; j < rows[i].size(); ++j) EXPECT_EQ(std::stod(rows[i][j]), 0.0);

    EXPECT_EQ(cli({"kernel", "--mode", "product-finite", "--n", "128", "--a1-grid", "1:2:2", "--a2-grid", "1:2:2",
                   "--out", path("k2.csv")})
                  .code,
              2);
    EXPECT_EQ(cli({"kernel", "--mode", "gue-finite", "--a1-grid", "1:2:2", "--a2-grid", "1:2:2", "--out",
                   path("k3.csv")})
                  .code,
              2);
    EXPECT_EQ(cli({"kernel", "--mode", "sine", "--a1-grid", "1:2:2", "--a2-grid", "1:2:2", "--out", path("k4.csv")})
                  .code,
              2);
}

TEST_F(CliTest, PolyaLimitDiagonalMatchesDensityRoute) {
    // For x = 3 and a < 0 the density is |Re G| times the hard-edge kernel at y = |Re G a|.
    const double g = std::abs(hardedge::gue_macro(3.0).green.real());
    ASSERT_EQ(cli({"density", "--x", "3", "--grid", "-4:-1:4", "--out", path("d.csv")}).code, 0);
    const auto dens = read_csv(path("d.csv"));
    for (int i = 1; i <= 4; ++i) {
        const double a = std::stod(dens[i][0]);
        const std::string y = hardedge::cli::detail::fmt17(g * std::abs(a));
        ASSERT_EQ(cli({"kernel", "--mode", "polya-limit", "--a1-grid", y + ":" + y + ":1", "--a2-grid",
                       y + ":" + y + ":1", "--out", path("k.csv")})
                      .code,
                  0);
        const auto k = read_csv(path("k.csv"));
        EXPECT_NEAR(std::stod(dens[i][1]), g * std::stod(k[1][1]), 1e-8) << a;
    }
}

TEST_F(CliTest, SweepWritesTrace) {
    const auto r = cli({"sweep", "--x", "1", "--ns", "10,20", "--samples", "20", "--threads", "1", "--out",
                        path("w.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(path("w.csv"));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][0], "10");
    EXPECT_EQ(rows[2][0], "20");
}

TEST_F(CliTest, VerifyArguments) {
    EXPECT_EQ(cli({"verify", "--suite", "nightly"}).code, 2);
    const auto r = cli({"verify", "--suite", "fast", "--only", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("[PASS]"), std::string::npos);
}

TEST(VerifyMutation, WrongGreenBranchIsCaught) {
    hardedge::VerifyOptions opt;
    opt.macro = [](double x) {
        auto m = hardedge::gue_macro(x);
        m.green = std::conj(m.green);  // wrong sheet of the square root
        return m;
    };
    EXPECT_FALSE(hardedge::run_criterion(1, opt).passed);
    EXPECT_TRUE(hardedge::run_criterion(1, hardedge::VerifyOptions{}).passed);
}
