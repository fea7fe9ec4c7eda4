#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdmix/chain_io.hpp"
#include "bdmix/families.hpp"
#include "bdmix/spectral.hpp"
#include "bdmix_cli/cli.hpp"
#include "oracle.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = bdmix::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const char* name) { return std::string(BDMIX_TEST_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bdmix_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Rows of a CSV with the banner line dropped; the first row is the header.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  ADD_FAILURE() << "no column " << name;
  return 0;
}

TEST(Cli, VerifyC2ExitsZero) {
  const Result r = run({"verify", "--chain", data("c2.json"), "--eps", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_FALSE(doc["theorem_violation"].get<bool>());
  EXPECT_TRUE(doc["window"]["holds"].get<bool>());
  EXPECT_EQ(doc["checks"].size(), 7u);
  EXPECT_EQ(doc["manifest"]["command"], "verify");
}

TEST(Cli, ProfileOfPeriodicChainExitsThree) {
  const Result r = run({"profile", "--chain", data("swap.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("horizon"), std::string::npos);
}

TEST(Cli, FamilyScanBiasedRatioDecreases) {
  const fs::path summary = scratch("biased_summary.json");
  const Result r = run({"family-scan", "--family", "biased:0.6667", "--sizes", "64,128,256", "--eps", "0.1,0.25",
                        "--summary", summary.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  const std::size_t ratio = column(rows[0], "ratio_0.1");
  const std::size_t tq = column(rows[0], "t_mix_quarter");
  double prev = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][ratio]);
    EXPECT_LT(v, prev) << "row " << i;
    prev = v;
  }

  // Exact oracle on the smallest size.
  bdmix::FamilySpec spec = bdmix::parse_family("biased:0.6667");
  spec.n = 64;
  const bdmix::Chain c = bdmix::generate(spec);
  const double t1 = static_cast<double>(oracle::linear_mixing_time(c, 0.1));
  const double t9 = static_cast<double>(oracle::linear_mixing_time(c, 0.9));
  EXPECT_EQ(std::stod(rows[1][ratio]), t1 / t9);
  EXPECT_EQ(std::stoul(rows[1][tq]), oracle::linear_mixing_time(c, 0.25));

  const json s = json::parse(slurp(summary));
  EXPECT_TRUE(s["trends"][0]["ratio_strictly_decreasing"].get<bool>());
  EXPECT_TRUE(s["product_strictly_increasing"].get<bool>());
}

TEST(Cli, SpectrumOfC2) {
  const Result r = run({"spectrum", "--chain", data("c2.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  ASSERT_EQ(doc["eigenvalues"].size(), 2u);
  EXPECT_NEAR(doc["eigenvalues"][0].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(doc["eigenvalues"][1].get<double>(), 0.0, 1e-15);
  EXPECT_NEAR(doc["gap"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(doc["t_rel"].get<double>(), 1.0, 1e-15);
}

TEST(Cli, ValidateReadsConductances) {
  const Result r = run({"validate", "--chain", data("four_state_once.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["n"], 3);
  EXPECT_TRUE(doc["irreducible"].get<bool>());
  EXPECT_TRUE(doc["aperiodic"].get<bool>());
  EXPECT_FALSE(doc["lazy"].get<bool>());
}

TEST(Cli, ProfileCsvHasBannerAndHeader) {
  const Result r = run({"profile", "--chain", data("c2.json"), "--separation", "--pairwise"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# bdmix-csv/1 command=profile input=fnv1a64:", 0), 0u);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);  // header, t = 0, t = 1
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "d_tv", "d_sep", "d_bar"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "0.5", "1", "1"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"1", "0", "0", "0"}));
}

TEST(Cli, SeparationCsv) {
  const Result r = run({"separation", "--chain", data("c2.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "d_sep", "worst_x", "worst_y"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "1", "0", "1"}));
  EXPECT_EQ(rows[2][1], "0");
}

TEST(Cli, SeparationOfPeriodicChainExitsThree) {
  EXPECT_EQ(run({"separation", "--chain", data("swap.json"), "--max-time", "50"}).code, 3);
}

TEST(Cli, MixingTimes) {
  const Result r = run({"mixing", "--chain", data("c2.json"), "--eps", "0.9,0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["t_mix"], json::array({0, 1}));
}

TEST(Cli, HittingWritesPmf) {
  const fs::path pmf = scratch("c2_pmf.csv");
  const Result r = run({"hitting", "--chain", data("c2.json"), "--start", "0", "--target", "1", "--pmf-csv",
                        pmf.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["expectation"].get<double>(), 2.0, 1e-10);
  EXPECT_NEAR(doc["variance"].get<double>(), 2.0, 1e-10);
  ASSERT_EQ(doc["thetas"].size(), 1u);
  EXPECT_NEAR(doc["thetas"][0].get<double>(), 0.5, 1e-15);
  EXPECT_EQ(doc["pmf_csv_path"], pmf.string());
  const auto rows = csv_rows(slurp(pmf));
  ASSERT_GE(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "probability"}));
  EXPECT_EQ(rows[1][1], "0");
  EXPECT_EQ(rows[2][1], "0.5");
  EXPECT_EQ(rows[3][1], "0.25");
}

TEST(Cli, ConstructTightnessWorkedExample) {
  const Result r = run({"construct", "--tightness", "64", "4", "20", "0.0001"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["construction"]["k_floor"], 8);
  EXPECT_EQ(doc["n"], 20);
  // The emitted file is itself a valid chain.
  const bdmix::Chain c = bdmix::parse_chain_json(r.out);
  EXPECT_EQ(c.n(), 20u);
  EXPECT_TRUE(c.lazy());
}

TEST(Cli, ConstructRealizeRoundTrip) {
  const Result r = run({"construct", "--realize", data("thetas.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const bdmix::Chain c = bdmix::parse_chain_json(r.out);
  const auto ev = bdmix::eigenvalues(c).eigenvalues;
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_NEAR(ev[0], 1.0, 1e-12);
  EXPECT_NEAR(ev[1], 0.5, 1e-12);
  EXPECT_NEAR(ev[2], 0.25, 1e-12);
  EXPECT_NEAR(ev[3], 0.125, 1e-12);
}

TEST(Cli, ConstructNeedsExactlyOneRecipe) {
  EXPECT_EQ(run({"construct"}).code, 1);
  EXPECT_EQ(run({"construct", "--realize", data("thetas.json"), "--tightness", "64", "4", "20", "0"}).code, 1);
}

TEST(Cli, InfeasibleTightnessIsInputError) {
  const Result r = run({"construct", "--tightness", "1000", "4", "20", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST(Cli, UnknownFlagPrintsUsage) {
  const Result r = run({"spectrum", "--chain", data("c2.json"), "--bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, MissingSubcommandIsInputError) { EXPECT_EQ(run({}).code, 1); }

TEST(Cli, MalformedJsonReportsPosition) {
  const Result r = run({"validate", "--chain", data("malformed.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, MissingFileIsInputError) { EXPECT_EQ(run({"validate", "--chain", data("nope.json")}).code, 1); }

TEST(Cli, MaxStatesCap) {
  const Result r = run({"validate", "--chain", data("c2.json"), "--max-states", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("limit"), std::string::npos);
}

TEST(Cli, VerifyRejectsNonLazyChain) { EXPECT_EQ(run({"verify", "--chain", data("swap.json")}).code, 1); }

TEST(Cli, ToleranceFromEnvironment) {
  ::setenv("BDMIX_TOLERANCE", "abc", 1);
  EXPECT_EQ(run({"spectrum", "--chain", data("c2.json")}).code, 1);
  ::setenv("BDMIX_TOLERANCE", "1e-9", 1);
  const Result r = run({"spectrum", "--chain", data("c2.json")});
  ::unsetenv("BDMIX_TOLERANCE");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["manifest"]["tolerance"].get<double>(), 1e-9);
}

TEST(Cli, SimulationIsByteDeterministic) {
  for (const char* mode : {"path", "coupling", "delta-coupling", "hitting"}) {
    const fs::path h1 = scratch(std::string(mode) + "_1.csv");
    const fs::path h2 = scratch(std::string(mode) + "_2.csv");
    const std::vector<std::string> base{"simulate", "--chain", data("c2.json"), "--mode", mode, "--trials", "500",
                                        "--seed", "42", "--horizon", "50"};
    auto a = base, b = base;
    a.insert(a.end(), {"--histogram", h1.string(), "--workers", "1"});
    b.insert(b.end(), {"--histogram", h2.string(), "--workers", "4"});
    const Result ra = run(a), rb = run(b);
    ASSERT_EQ(ra.code, 0) << mode << ": " << ra.err;
    ASSERT_EQ(rb.code, 0) << mode << ": " << rb.err;
    // Only the histogram path differs between the two manifests.
    json ja = json::parse(ra.out), jb = json::parse(rb.out);
    ja["manifest"].erase("outputs");
    jb["manifest"].erase("outputs");
    EXPECT_EQ(ja.dump(), jb.dump()) << mode;
    EXPECT_EQ(slurp(h1), slurp(h2)) << mode;
    EXPECT_EQ(ja["manifest"]["seed"], 42);
  }
}

TEST(Cli, ManifestFileMatchesEmbeddedManifest) {
  const fs::path m = scratch("manifest.json");
  const Result r = run({"spectrum", "--chain", data("c2.json"), "--manifest", m.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(slurp(m)), json::parse(r.out)["manifest"]);
}

TEST(Cli, NumbersUseSeventeenDigits) {
  const Result r = run({"hitting", "--chain", data("four_state_once.json"), "--start", "0", "--target", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  // 1/3-style values need all 17 digits to round-trip.
  const json doc = json::parse(r.out);
  const double e = doc["expectation"].get<double>();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", e);
  EXPECT_NE(r.out.find(std::string("\"expectation\": ") + buf), std::string::npos);
}

}  // namespace
