#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "conewave/cli.hpp"

using namespace conewave;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out, err;
  io::json summary;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("conewave-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "conewave");
    args.push_back("--out");
    args.push_back(dir_.string());
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    RunResult r{cli::run(static_cast<int>(argv.size()), argv.data(), out, err), out.str(), err.str(), {}};
    if (r.code != 2) r.summary = io::json::parse(r.out);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  static std::string csv_of(const io::json& summary) {
    for (const auto& a : summary.at("artifacts"))
      if (a.get<std::string>().ends_with(".csv")) return a.get<std::string>();
    return {};
  }

  fs::path dir_;
};

}  // namespace

TEST(Io, FieldRoundTripIsLittleEndianComplex64) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  GridField f{2, 4.0, 8, {}};
  f.values.resize(f.total());
  for (auto& v : f.values) v = cplx(g(rng), g(rng));
  const auto p = fs::temp_directory_path() / "conewave-io-field.bin";
  io::write_field(p, f);
  EXPECT_EQ(fs::file_size(p), f.total() * 8);
  std::ifstream raw(p, std::ios::binary);
  unsigned char b[4];
  raw.read(reinterpret_cast<char*>(b), 4);
  const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  float first;
  std::memcpy(&first, &bits, 4);
  EXPECT_EQ(first, static_cast<float>(f.values[0].real()));
  const auto back = io::read_field(p);
  EXPECT_EQ(back.n, 2u);
  EXPECT_EQ(back.N, 8u);
  EXPECT_DOUBLE_EQ(back.L, 4.0);
  for (std::size_t i = 0; i < f.total(); ++i) EXPECT_LT(std::abs(back.values[i] - f.values[i]), 1e-6 * (1 + std::abs(f.values[i])));
  fs::remove(p);
  fs::remove(fs::path(p).replace_extension(".json"));
}

TEST(Io, ConeJsonRoundTrip) {
  const auto j = io::json::parse(R"({"kind": "circular", "axis": [0, 2], "halfAngleDeg": 30, "open": true})");
  const auto c = io::cone_from_json(j);
  const auto& cc = std::get<CircularCone>(c);
  EXPECT_NEAR(cc.half_angle(), 30 * kDegree, 1e-12);
  EXPECT_TRUE(cc.is_open());
  const auto back = io::cone_from_json(io::cone_to_json(c));
  EXPECT_NEAR(std::get<CircularCone>(back).cos_half(), cc.cos_half(), 1e-15);
  EXPECT_THROW(io::cone_from_json(io::json::parse(R"({"kind": "spiral"})")), ConfigError);
  EXPECT_THROW(io::cone_from_json(io::json::parse(R"({"kind": "circular", "axis": [1, 0]})")), ConfigError);
}

TEST(Io, SymbolsFromJson) {
  const double xi[2] = {3.0, 0.1};
  EXPECT_EQ(io::symbol_from_json(io::json::parse(R"({"kind": "sign"})"))(std::span<const double>(xi, 1)), cplx(1.0));
  const auto cut = io::symbol_from_json(io::json::parse(R"({"kind": "cutoff",
      "v0": {"kind": "circular", "axis": [1, 0], "halfAngleDeg": 10},
      "vOuter": {"kind": "circular", "axis": [1, 0], "halfAngleDeg": 20, "open": true}})"));
  EXPECT_DOUBLE_EQ(cut(xi).real(), 1.0);
  EXPECT_THROW(io::symbol_from_json(io::json::parse(R"({"kind": "nope"})")), ConfigError);
}

TEST_F(CliTest, Pv1dSingleK) {
  const auto r = run({"witness", "pv1d", "--k", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto& row = r.summary.at("results").at(0);
  EXPECT_GE(row.at("value").get<double>(), 0.6931);
  EXPECT_TRUE(row.contains("tol"));
}

TEST_F(CliTest, RayDualIsHalfspace) {
  const auto r = run({"cone", "dual", "--config", "ray2d.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.summary.at("dual").at("kind"), "halfspace");
  EXPECT_TRUE(fs::exists(r.summary.at("artifacts").back().get<std::string>()));
  EXPECT_TRUE(fs::path(r.summary.at("artifacts").back().get<std::string>()).filename().string().starts_with("cone-dual-"));
}

TEST_F(CliTest, UnknownSubcommandPrintsUsage) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown subcommand"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({"cone"}).code, 2);
  EXPECT_EQ(run({"cone", "dual", "--bogus"}).code, 2);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({"cone", "dual", "--config", (dir_ / "missing.json").string()}).code, 2);
  EXPECT_EQ(run({"cone", "dual", "--config", write("bad.json", "{ not json").string()}).code, 2);
  EXPECT_EQ(run({"cone", "dual", "--config", write("extra.json", R"({"cone": {"kind": "zero", "n": 2}, "x": 1})").string()}).code, 2);
  const auto missingField = write("f.json", R"({"symbol": {"kind": "sign"}, "field": {"kind": "file", "path": "nowhere.bin"}})");
  EXPECT_EQ(run({"multiplier", "apply", "--config", missingField.string()}).code, 2);
}

TEST_F(CliTest, RefusedSpacesExitTwo) {
  const auto r = run({"wavefront", "estimate", "--config", "wf_L1.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("L1_loc"), std::string::npos);
}

TEST_F(CliTest, NumericalFailureExitsThree) {
  const auto cfg = write("stable.json", R"({"symbol": {"kind": "sign"}, "input": {"kind": "box", "half": [1]},
    "n": 1, "L": 16, "ladder": [8, 11], "K": [-2, 2], "p": "inf", "expect": "stable"})");
  const auto r = run({"multiplier", "blowup", "--config", cfg.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.summary.at("pass").get<bool>());
}

TEST_F(CliTest, DeterministicCsvIsByteIdentical) {
  const auto cfg = write("commute.json", R"({"symbol": {"kind": "control", "R": 2},
    "field": {"kind": "gaussian", "n": 2, "L": 8, "N": 32}, "randomShifts": 5})");
  const auto a = run({"multiplier", "commute", "--config", cfg.string(), "--seed", "7", "--deterministic"});
  const auto b = run({"multiplier", "commute", "--config", cfg.string(), "--seed", "7", "--deterministic"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NE(csv_of(a.summary), csv_of(b.summary));
  EXPECT_EQ(slurp(csv_of(a.summary)), slurp(csv_of(b.summary)));
  const auto lemma1 = run({"witness", "lemma", "--config", "default2d.json", "--deterministic"});
  const auto lemma2 = run({"witness", "lemma", "--config", "default2d.json", "--deterministic"});
  ASSERT_EQ(lemma1.code, 0) << lemma1.err;
  EXPECT_EQ(slurp(csv_of(lemma1.summary)), slurp(csv_of(lemma2.summary)));
  EXPECT_EQ(slurp(csv_of(lemma1.summary)).substr(0, 27), "l,I,L,margin,tol,pass,slope");
}

TEST_F(CliTest, ApplyWritesFieldWithSidecar) {
  const auto r = run({"multiplier", "apply", "--config", "apply_sign1d.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string bin;
  for (const auto& a : r.summary.at("artifacts"))
    if (a.get<std::string>().ends_with(".bin")) bin = a.get<std::string>();
  const auto f = io::read_field(bin);
  EXPECT_EQ(f.N, 4096u);
  // Feed the written field back through a second config.
  const auto cfg = write("again.json", R"({"symbol": {"kind": "one"}, "field": {"kind": "file", "path": ")" +
                                           fs::path(bin).filename().string() + R"("}})");
  const auto again = run({"multiplier", "apply", "--config", cfg.string()});
  EXPECT_EQ(again.code, 0) << again.err;
  EXPECT_NEAR(again.summary.at("l2In").get<double>(), r.summary.at("l2Out").get<double>(), 1e-5);
}

TEST_F(CliTest, ProfileCheckReportsMixedVerdict) {
  const auto r = run({"profile", "check", "--config", "mixed2d.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(r.summary.at("condition").at("holds").get<bool>());
  const auto c = run({"profile", "check", "--config", "complex2d.json"});
  EXPECT_EQ(c.summary.at("reduction").at("branch"), "-Im");
}

TEST_F(CliTest, PlotScriptIsEmitted) {
  const auto r = run({"witness", "pv1d", "--config", "pv1d.json", "--emit-plot"});
  ASSERT_EQ(r.code, 0);
  const auto w = run({"wavefront", "estimate", "--config", "wf_jump_sigma.json", "--emit-plot"});
  ASSERT_EQ(w.code, 0) << w.err;
  bool gp = false;
  for (const auto& a : w.summary.at("artifacts")) gp = gp || a.get<std::string>().ends_with(".gp");
  EXPECT_TRUE(gp);
  const auto& sig = w.summary.at("sigmaDeg");
  for (const auto& a : sig) {
    const double d = std::fmod(a.get<double>(), 180.0);
    EXPECT_LE(std::min(d, 180.0 - d), 15.0);
  }
}
