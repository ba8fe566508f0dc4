#pragma once

// Command-line front end: JSON configs in, CSV/JSON artifacts out.

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "conewave/io.hpp"
#include "conewave/parallel.hpp"
#include "conewave/witness.hpp"

#ifndef CONEWAVE_CONFIG_DIR
#define CONEWAVE_CONFIG_DIR ""
#endif

namespace conewave::cli {

namespace fs = std::filesystem;
using io::json;

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3 };

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// JSON has no infinities; those are emitted as strings.
inline json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) { line(header); }

  template <class... T>
  void row(const T&... cells) {
    static_assert(sizeof...(T) > 0);
    std::vector<std::string> v{cell(cells)...};
    require(v.size() == cols_, "csv row width differs from header");
    line(v);
  }

  const std::string& text() const { return text_; }

  void save(const fs::path& p) const {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << text_;
  }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(bool b) { return b ? "true" : "false"; }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  void line(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) text_ += (i ? "," : "") + v[i];
    text_ += "\n";
  }

  std::size_t cols_;
  std::string text_;
};

struct Session {
  std::string command;  // e.g. "witness lemma"
  json cfg = json::object();
  fs::path cfgDir;
  fs::path outDir = ".";
  std::string stem;
  bool emitPlot = false;
  std::optional<std::uint64_t> seed;
  std::optional<long> k;
  json summary = json::object();
  std::vector<std::string> artifacts;

  fs::path artifact(const std::string& suffix) {
    const auto p = outDir / (stem + suffix);
    artifacts.push_back(p.string());
    return p;
  }
};

namespace detail {

inline std::string utc_stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// <command>-<timestamp>, suffixed with a counter when an artifact of that name exists.
inline std::string artifact_stem(const fs::path& dir, const std::string& command) {
  std::string base = command;
  std::replace(base.begin(), base.end(), ' ', '-');
  base += "-" + utc_stamp();
  std::string stem = base;
  auto taken = [&](const std::string& s) {
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().filename().string().rfind(s + ".", 0) == 0 || e.path().filename().string().rfind(s + "-", 0) == 0)
        return true;
    return false;
  };
  for (int i = 1; taken(stem); ++i) stem = base + "-" + std::to_string(i);
  return stem;
}

inline fs::path resolve_config(const std::string& path) {
  fs::path p(path);
  if (fs::exists(p)) return p;
  const fs::path alt = fs::path(CONEWAVE_CONFIG_DIR) / p;
  if (p.is_relative() && std::string(CONEWAVE_CONFIG_DIR).size() > 0 && fs::exists(alt)) return alt;
  throw ConfigError("config file not found: " + path);
}

inline json load_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

inline void check_keys(const json& cfg, const std::set<std::string>& allowed) {
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : cfg.items())
    if (!allowed.count(key)) throw ConfigError("unexpected config key '" + key + "'");
}

inline double parse_p(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Linf") return INFINITY;
    throw ConfigError("p must be 1, 2 or \"inf\"");
  }
  if (!j.is_number()) throw ConfigError("p must be 1, 2 or \"inf\"");
  return j.get<double>();
}

inline Box parse_box(const json& j, std::size_t n) {
  Box K;
  if (j.is_array() && !j.empty() && j.front().is_number()) {
    const auto v = io::detail::vec(j);
    require(v.size() == 2, "K given as [lo, hi] needs two numbers");
    return cube(n, v[0], v[1]);
  }
  for (const auto& side : j) {
    const auto v = io::detail::vec(side);
    require(v.size() == 2, "each side of K is [lo, hi]");
    K.sides.push_back({v[0], v[1]});
  }
  require(K.sides.size() == n, "K must have one side per dimension");
  return K;
}

inline std::string box_text(const Box& K) {
  std::string s;
  for (std::size_t i = 0; i < K.sides.size(); ++i)
    s += (i ? "x[" : "[") + num(K.sides[i].first) + ":" + num(K.sides[i].second) + "]";
  return s;
}

inline std::vector<std::vector<double>> parse_grid(const json& j) {
  if (j.is_object()) return square_grid(io::detail::number(j, "half"), io::detail::number(j, "step"));
  std::vector<std::vector<double>> g;
  for (const auto& p : j) g.push_back(io::detail::vec(p));
  require(!g.empty(), "xGrid is empty");
  return g;
}

inline WFParams parse_params(const json& j) {
  WFParams p;
  if (j.is_null()) return p;
  check_keys(j, {"M", "deltaDeg", "tauExp", "jMin", "windowRadii", "noiseFloor", "cutoffR"});
  if (j.contains("M")) p.M = static_cast<std::size_t>(io::detail::number(j, "M"));
  p.delta = io::detail::number_or(j, "deltaDeg", p.delta / kDegree) * kDegree;
  p.tauExp = io::detail::number_or(j, "tauExp", p.tauExp);
  p.jMin = static_cast<int>(io::detail::number_or(j, "jMin", p.jMin));
  if (j.contains("windowRadii")) p.windowRadii = io::detail::vec(j.at("windowRadii"));
  p.noiseFloor = io::detail::number_or(j, "noiseFloor", p.noiseFloor);
  p.cutoffR = io::detail::number_or(j, "cutoffR", p.cutoffR);
  require(p.M >= 8, "params.M must be at least 8");
  return p;
}

inline json params_json(const WFParams& p) {
  return {{"M", p.M},
          {"deltaDeg", p.delta / kDegree},
          {"tauExp", p.tauExp},
          {"jMin", p.jMin},
          {"windowRadii", p.windowRadii},
          {"noiseFloor", p.noiseFloor},
          {"cutoffR", p.cutoffR},
          {"angularTolDeg", 360.0 / static_cast<double>(p.M)}};
}

inline double l2(const GridField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.cell());
}

inline void write_plot(Session& S, const std::string& csvName, const std::string& body) {
  std::ofstream out(S.artifact(".gp"));
  out << "# gnuplot script for " << csvName << "\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << body;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------
// Handlers. Each fills S.summary and returns an exit code.

inline int cone_dual(Session& S) {
  detail::check_keys(S.cfg, {"cone"});
  const auto c = io::cone_from_json(io::detail::at(S.cfg, "cone"));
  const auto d = dual_cone(c);
  S.summary["cone"] = io::cone_to_json(c);
  S.summary["dual"] = io::cone_to_json(d);
  S.summary["dualInteriorNonempty"] = interior_nonempty(d);
  S.summary["tol"] = {{"boundary", kBoundaryTol}};
  return kOk;
}

inline int cone_kappa(Session& S) {
  detail::check_keys(S.cfg, {"suppNeg", "V", "Vprime", "Vdoubleprime", "gridStepDeg"});
  const auto neg = io::direction_set_from_json(io::detail::at(S.cfg, "suppNeg"));
  const auto V = io::cone_from_json(io::detail::at(S.cfg, "V"));
  const ConeSpec Vp = S.cfg.contains("Vprime") ? io::cone_from_json(S.cfg.at("Vprime")) : interior_of_dual(V);
  SearchOptions opt;
  opt.gridStepDeg = io::detail::number_or(S.cfg, "gridStepDeg", opt.gridStepDeg);
  S.summary["kappa0"] = jnum(kappa0(neg, Vp, opt));
  S.summary["kappaV"] = jnum(kappaV(V, Vp, opt));
  if (S.cfg.contains("Vdoubleprime")) {
    const auto vpp = io::circular_from_json(S.cfg.at("Vdoubleprime"));
    S.summary["kappa0Prime"] = jnum(kappa0_prime(neg, vpp, &Vp));
  }
  S.summary["tol"] = {{"gridStepDeg", opt.gridStepDeg}, {"refine", opt.refineTol}};
  return kOk;
}

inline int profile_check(Session& S) {
  detail::check_keys(S.cfg, {"profile", "imaginary", "V", "Vprime", "useKappaV"});
  const auto p = io::profile_from_json(io::detail::at(S.cfg, "profile"));
  const auto V = io::cone_from_json(io::detail::at(S.cfg, "V"));
  const ConeSpec Vp = S.cfg.contains("Vprime") ? io::cone_from_json(S.cfg.at("Vprime")) : interior_of_dual(V);
  const bool useKappaV = S.cfg.value("useKappaV", false);
  const auto rep = check_condition(p, V, Vp, useKappaV);
  S.summary["condition"] = io::condition_to_json(rep);
  S.summary["kappaKind"] = useKappaV ? "kappaV" : "kappa0";
  if (S.cfg.contains("imaginary")) {
    const auto im = io::profile_from_json(S.cfg.at("imaginary"));
    const auto red = validate_component_reduction(p, im, V, Vp);
    json checks = json::array();
    for (const auto& c : red.checks) {
      checks.push_back({{"branch", c.branch}, {"condition", io::condition_to_json(c.report)}});
    }
    S.summary["reduction"] = {{"certified", red.certified}, {"branch", red.branch}, {"checks", checks}};
  }
  S.summary["tol"] = {{"sphereIntegralRel", 1e-10}, {"kappaRefine", SearchOptions{}.refineTol}};
  return kOk;
}

inline int witness_pv1d(Session& S) {
  detail::check_keys(S.cfg, {"k", "tol"});
  std::vector<long> ks;
  if (S.k) ks = {*S.k};
  else if (S.cfg.contains("k"))
    for (double v : io::detail::vec(S.cfg.at("k"))) ks.push_back(static_cast<long>(v));
  else ks = {8, 32, 128, 512, 2048};
  const double tol = io::detail::number_or(S.cfg, "tol", 1e-9);
  Csv csv({"k", "value", "lowerBound", "upperBound", "tol", "pass"});
  json rows = json::array();
  bool ok = true;
  std::vector<double> xs, ys;
  for (long k : ks) {
    const double v = pv_pairing_1d(k);
    const double lo = std::log(static_cast<double>(k) / 2.0), hi = lo + 2.0 * std::log(2.0);
    const bool pass = v >= lo - tol && v <= hi + tol;
    ok = ok && pass;
    csv.row(k, v, lo, hi, tol, pass);
    rows.push_back({{"k", k}, {"value", v}, {"lowerBound", lo}, {"upperBound", hi}, {"tol", tol}, {"pass", pass}});
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(v);
  }
  S.summary["results"] = rows;
  if (ks.size() >= 2) {
    const auto fit = quad::fit_line(xs, ys);
    const bool slopeOk = fit.slope >= 0.97 && fit.slope <= 1.03;
    S.summary["slope"] = {{"value", fit.slope}, {"range", {0.97, 1.03}}, {"pass", slopeOk}};
    ok = ok && slopeOk;
  }
  csv.save(S.artifact(".csv"));
  return ok ? kOk : kNumerical;
}

inline WitnessConfig witness_config_from(const json& j) {
  detail::check_keys(j, {"V", "Vprime", "Vdoubleprime", "profile", "r", "s", "lSchedule", "tol", "slopeTol"});
  WitnessConfig c = default_witness_config();
  if (j.contains("V")) c.V = io::cone_from_json(j.at("V"));
  if (j.contains("Vprime")) c.Vprime = io::cone_from_json(j.at("Vprime"));
  if (j.contains("Vdoubleprime")) c.Vdoubleprime = io::circular_from_json(j.at("Vdoubleprime"));
  if (j.contains("profile")) c.profile = io::profile_from_json(j.at("profile"));
  c.r = io::detail::number_or(j, "r", c.r);
  if (j.contains("s")) c.s = io::detail::number(j, "s");
  if (j.contains("lSchedule")) {
    c.lSchedule.clear();
    for (double v : io::detail::vec(j.at("lSchedule"))) c.lSchedule.push_back(static_cast<long>(v));
  }
  c.tol = io::detail::number_or(j, "tol", c.tol);
  return c;
}

inline int witness_lemma(Session& S) {
  const auto cfg = witness_config_from(S.cfg);
  const auto run = run_lemma(cfg);
  Csv csv({"l", "I", "L", "margin", "tol", "pass", "slope"});
  for (const auto& r : run.results) csv.row(r.l, r.I, r.L, r.margin(), r.tol, r.pass, r.slopeEstimate);
  csv.save(S.artifact(".csv"));
  bool ok = run.allPass && run.monotone;
  S.summary["setup"] = {{"s", run.setup.s},           {"kappa0Prime", jnum(run.setup.kappa0Prime)},
                        {"normPos", run.setup.normPos}, {"normNeg", run.setup.normNeg},
                        {"chiNorm", run.setup.chiNorm}};
  S.summary["allPass"] = run.allPass;
  S.summary["monotone"] = run.monotone;
  S.summary["tol"] = cfg.tol;
  S.summary["cStar"] = run.cStar;
  if (S.cfg.contains("slopeTol") && run.results.size() >= 2) {
    const double slopeTol = io::detail::number(S.cfg, "slopeTol");
    const double slope = run.results.back().slopeEstimate;
    const double rel = std::abs(slope - run.cStar) / std::abs(run.cStar);
    S.summary["slope"] = {{"value", slope}, {"relDeviation", rel}, {"relTol", slopeTol}, {"pass", rel <= slopeTol}};
    ok = ok && rel <= slopeTol;
  }
  if (S.emitPlot)
    detail::write_plot(S, S.stem + ".csv",
                       "set logscale x 2\nset xlabel 'l'\nplot '" + S.stem +
                           ".csv' using 1:2 with linespoints, '' using 1:3 with linespoints\n");
  return ok ? kOk : kNumerical;
}

inline int witness_expansion(Session& S) {
  detail::check_keys(S.cfg, {"seeds", "tol", "lMin", "lMax"});
  std::vector<std::uint64_t> seeds;
  if (S.seed) seeds = {*S.seed};
  else if (S.cfg.contains("seeds"))
    for (double v : io::detail::vec(S.cfg.at("seeds"))) seeds.push_back(static_cast<std::uint64_t>(v));
  else seeds = {1};
  const double tol = io::detail::number_or(S.cfg, "tol", 1e-5);
  const long lMin = static_cast<long>(io::detail::number_or(S.cfg, "lMin", 8));
  const long lMax = static_cast<long>(io::detail::number_or(S.cfg, "lMax", 32));
  Csv csv({"seed", "directRe", "directIm", "expandedRe", "expandedIm", "relErr", "tol", "pass"});
  bool ok = true;
  json rows = json::array();
  for (auto seed : seeds) {
    const auto c = seeded_expansion_case(seed, lMin, lMax);
    const auto r = expansion_crosscheck(c.profile, c.V, c.r, c.chi);
    const bool pass = r.relErr <= tol;
    ok = ok && pass;
    csv.row(static_cast<std::size_t>(seed), r.direct.real(), r.direct.imag(), r.expanded.real(), r.expanded.imag(),
            r.relErr, tol, pass);
    rows.push_back({{"seed", seed}, {"relErr", r.relErr}, {"tol", tol}, {"pass", pass}, {"fftSize", r.maxFftSize}});
  }
  csv.save(S.artifact(".csv"));
  S.summary["results"] = rows;
  return ok ? kOk : kNumerical;
}

inline MeasureSpec measure_from(const json& j, const GridField& like, const fs::path& base) {
  detail::check_keys(j, {"atoms", "density"});
  MeasureSpec mu;
  for (const auto& a : j.value("atoms", json::array())) {
    const auto w = a.contains("weightIm") ? cplx(io::detail::number(a, "weight"), io::detail::number(a, "weightIm"))
                                          : cplx(io::detail::number(a, "weight"), 0.0);
    mu.atoms.push_back({io::detail::vec(io::detail::at(a, "at")), w});
  }
  if (j.contains("density")) {
    auto spec = j.at("density");
    if (!spec.contains("n")) spec["n"] = like.n;
    if (!spec.contains("L")) spec["L"] = like.L;
    if (!spec.contains("N")) spec["N"] = like.N;
    mu.density = io::field_from_json(spec, base);
  }
  return mu;
}

inline int multiplier_apply(Session& S) {
  detail::check_keys(S.cfg, {"symbol", "field", "measure"});
  const auto f = io::field_from_json(io::detail::at(S.cfg, "field"), S.cfgDir);
  const double tol = 1e-12;
  if (S.cfg.contains("measure")) {
    const auto mu = measure_from(S.cfg.at("measure"), f, S.cfgDir);
    const auto g = convolve_with_measure(f, mu);
    const double bound = mu.total_variation() * detail::l2(f) + tol;
    const bool pass = detail::l2(g) <= bound;
    io::write_field(S.artifact("-field.bin"), g);
    S.artifacts.push_back((S.outDir / (S.stem + "-field.json")).string());
    S.summary["operation"] = "measure";
    S.summary["l2In"] = detail::l2(f);
    S.summary["l2Out"] = detail::l2(g);
    S.summary["youngBound"] = bound;
    S.summary["tol"] = tol;
    S.summary["pass"] = pass;
    return pass ? kOk : kNumerical;
  }
  const auto sym = io::symbol_from_json(io::detail::at(S.cfg, "symbol"));
  const auto g = apply_multiplier(sym, f);
  const double smax = symbol_max_on_grid(sym, f);
  const double bound = smax * detail::l2(f) + tol;
  const bool pass = detail::l2(g) <= bound;
  io::write_field(S.artifact("-field.bin"), g);
  S.artifacts.push_back((S.outDir / (S.stem + "-field.json")).string());
  S.summary["operation"] = "multiplier";
  S.summary["l2In"] = detail::l2(f);
  S.summary["l2Out"] = detail::l2(g);
  S.summary["symbolMax"] = smax;
  S.summary["plancherelBound"] = bound;
  S.summary["tol"] = tol;
  S.summary["pass"] = pass;
  return pass ? kOk : kNumerical;
}

inline int multiplier_commute(Session& S) {
  detail::check_keys(S.cfg, {"symbol", "field", "shifts", "randomShifts", "tol"});
  const auto f = io::field_from_json(io::detail::at(S.cfg, "field"), S.cfgDir);
  const auto sym = io::symbol_from_json(io::detail::at(S.cfg, "symbol"));
  const double tol = io::detail::number_or(S.cfg, "tol", 1e-10);
  std::vector<std::vector<long>> shifts;
  for (const auto& s : S.cfg.value("shifts", json::array())) {
    std::vector<long> v;
    for (double x : io::detail::vec(s)) v.push_back(static_cast<long>(x));
    require(v.size() == f.n, "shift length must equal the field dimension");
    shifts.push_back(v);
  }
  const auto extra = static_cast<std::size_t>(io::detail::number_or(S.cfg, "randomShifts", shifts.empty() ? 20 : 0));
  std::mt19937_64 rng(S.seed.value_or(0));
  const long half = static_cast<long>(f.N / 2);
  std::uniform_int_distribution<long> pick(-half, half);
  for (std::size_t i = 0; i < extra; ++i) {
    std::vector<long> v(f.n);
    for (auto& x : v) x = pick(rng);
    shifts.push_back(v);
  }
  Csv csv({"index", "shift", "value", "tol", "pass"});
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    const double v = translation_commutation_check(sym, f, shifts[i]);
    std::string st;
    for (std::size_t d = 0; d < shifts[i].size(); ++d) st += (d ? ";" : "") + std::to_string(shifts[i][d]);
    csv.row(i, st, v, tol, v <= tol);
    ok = ok && v <= tol;
    worst = std::max(worst, v);
  }
  csv.save(S.artifact(".csv"));
  S.summary["shifts"] = shifts.size();
  S.summary["worst"] = worst;
  S.summary["tol"] = tol;
  S.summary["pass"] = ok;
  return ok ? kOk : kNumerical;
}

inline int multiplier_blowup(Session& S) {
  detail::check_keys(S.cfg, {"symbol", "input", "n", "L", "ladder", "Ns", "K", "p", "expect"});
  const auto sym = io::symbol_from_json(io::detail::at(S.cfg, "symbol"));
  const auto n = static_cast<std::size_t>(io::detail::number(S.cfg, "n"));
  const double L = io::detail::number(S.cfg, "L");
  std::vector<std::size_t> Ns;
  if (S.cfg.contains("Ns")) {
    for (double v : io::detail::vec(S.cfg.at("Ns"))) Ns.push_back(static_cast<std::size_t>(v));
  } else {
    const auto lad = io::detail::vec(io::detail::at(S.cfg, "ladder"));
    require(lad.size() == 2, "ladder is [log2 lo, log2 hi]");
    Ns = power_ladder(static_cast<int>(lad[0]), static_cast<int>(lad[1]));
  }
  const Box K = detail::parse_box(io::detail::at(S.cfg, "K"), n);
  const double p = detail::parse_p(io::detail::at(S.cfg, "p"));
  const std::string expect = S.cfg.value("expect", "none");
  require(expect == "none" || expect == "divergent" || expect == "stable", "expect must be none, divergent or stable");
  const json input = io::detail::at(S.cfg, "input");
  const auto rep = blowup_probe_family(sym, n, L, [&](std::size_t N) { return io::input_from_json(input, L / static_cast<double>(N)); },
                                       Ns, K, p);
  Csv csv({"index", "N", "p", "K", "value"});
  for (const auto& pr : rep.probes) csv.row(pr.index, pr.N, pr.p, detail::box_text(pr.K), pr.value);
  csv.save(S.artifact(".csv"));
  const double stabTol = 0.02, r2Min = 0.9;
  S.summary["fit"] = {{"slope", rep.fit.slope}, {"intercept", rep.fit.intercept}, {"r2", rep.fit.r2}, {"r2Min", r2Min}};
  S.summary["increasing"] = rep.increasing;
  S.summary["divergentTrend"] = rep.divergentTrend;
  S.summary["stabilizes"] = rep.stabilizes;
  S.summary["stabilizeRelTol"] = stabTol;
  S.summary["expect"] = expect;
  bool ok = true;
  if (expect == "divergent") ok = rep.divergentTrend;
  if (expect == "stable") ok = rep.stabilizes;
  S.summary["pass"] = ok;
  if (S.emitPlot)
    detail::write_plot(S, S.stem + ".csv",
                       "set logscale x 2\nset xlabel 'N'\nset ylabel 'local norm'\nplot '" + S.stem +
                           ".csv' using 2:5 with linespoints\n");
  return ok ? kOk : kNumerical;
}

namespace detail {

struct WavefrontInputs {
  EDescriptor E;
  GridField u;
  WFParams prm;
};

// E is parsed first so refused spaces fail before any field work.
inline WavefrontInputs wavefront_inputs(Session& S, const std::set<std::string>& extra) {
  std::set<std::string> keys{"E", "field", "params", "xGrid"};
  keys.insert(extra.begin(), extra.end());
  check_keys(S.cfg, keys);
  auto E = io::space_from_json(io::detail::at(S.cfg, "E"));
  auto u = io::field_from_json(io::detail::at(S.cfg, "field"), S.cfgDir);
  require(u.n == 2, "wave front analysis is 2-D");
  return {E, std::move(u), parse_params(S.cfg.contains("params") ? S.cfg.at("params") : json())};
}

inline void wf_csv(Session& S, const WFReport& rep) {
  Csv csv({"x1", "x2", "angleDeg", "fittedExponent", "flagged"});
  for (const auto& sc : rep.scans)
    for (std::size_t m = 0; m < rep.params.M; ++m)
      csv.row(sc.x[0], sc.x[1], 360.0 * static_cast<double>(m) / static_cast<double>(rep.params.M), sc.exponents[m],
              static_cast<bool>(sc.intersection[m]));
  csv.save(S.artifact(".csv"));
}

inline json wf_json(const WFReport& rep) {
  json sing = json::array(), proj = json::array();
  for (const auto& x : rep.singSupport) sing.push_back(x);
  for (const auto& x : rep.projection()) proj.push_back(x);
  return {{"E", rep.E.name()},
          {"params", params_json(rep.params)},
          {"flaggedPairs", rep.flagged.size()},
          {"singSupport", sing},
          {"projection", proj}};
}

inline void wf_plot(Session& S) {
  write_plot(S, S.stem + ".csv",
             "set xlabel 'x1'\nset ylabel 'x2'\nset zlabel 'angle (deg)'\nsplot '" + S.stem +
                 ".csv' using 1:2:(stringcolumn(5) eq 'true' ? $3 : 1/0) with points pt 7 ps 0.5\n");
}

}  // namespace detail

inline int wavefront_estimate(Session& S) {
  auto in = detail::wavefront_inputs(S, {});
  if (S.cfg.contains("xGrid")) {
    const auto rep = wavefront_set(in.u, in.E, detail::parse_grid(S.cfg.at("xGrid")), in.prm);
    detail::wf_csv(S, rep);
    S.summary["report"] = detail::wf_json(rep);
  } else {
    const auto scores = sigma_E(in.u, in.E, in.prm);
    Csv csv({"x1", "x2", "angleDeg", "fittedExponent", "flagged"});
    json flagged = json::array();
    for (const auto& d : scores) {
      csv.row("all", "all", d.angle / kDegree, d.fittedExponent, d.inSigma);
      if (d.inSigma) flagged.push_back(d.angle / kDegree);
    }
    csv.save(S.artifact(".csv"));
    S.summary["E"] = in.E.name();
    S.summary["params"] = detail::params_json(in.prm);
    S.summary["sigmaDeg"] = flagged;
  }
  if (S.emitPlot) detail::wf_plot(S);
  return kOk;
}

inline int wavefront_check(Session& S) {
  auto in = detail::wavefront_inputs(S, {"cell", "mollifier"});
  const json grid = S.cfg.contains("xGrid") ? S.cfg.at("xGrid") : json{{"half", 2.0}, {"step", 0.5}};
  const auto xs = detail::parse_grid(grid);
  const double cell = io::detail::number_or(S.cfg, "cell", grid.is_object() ? io::detail::number(grid, "step") : 0.5);
  const auto rep = wavefront_set(in.u, in.E, xs, in.prm);
  const bool proj = projection_check(rep, rep.singSupport, cell);
  const json mj = S.cfg.contains("mollifier") ? S.cfg.at("mollifier") : json{{"center", {0.0, 0.0}}, {"radius", 2.0}};
  const auto c = io::detail::vec(io::detail::at(mj, "center"));
  const auto phi = gaussian_window(in.u, c, io::detail::number(mj, "radius"));
  const bool moll = mollification_check(in.u, phi, in.E, in.prm);
  detail::wf_csv(S, rep);
  S.summary["report"] = detail::wf_json(rep);
  S.summary["projectionCheck"] = {{"pass", proj}, {"cell", cell}};
  S.summary["mollificationCheck"] = {{"pass", moll}, {"angularTolDeg", 360.0 / static_cast<double>(in.prm.M)}};
  if (S.emitPlot) detail::wf_plot(S);
  return proj && moll ? kOk : kNumerical;
}

// ---------------------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"conewave: conic Fourier multipliers, divergence witnesses and wave front sets"};
  app.require_subcommand(1);
  std::string config, outDir = ".";
  bool emitPlot = false, deterministic = false;
  long seed = -1, k = -1;

  using Handler = int (*)(Session&);
  struct Leaf {
    std::string name;
    CLI::App* app;
    Handler fn;
  };
  std::vector<Leaf> leaves;
  std::map<std::string, CLI::App*> groups;
  auto add = [&](const std::string& group, const std::string& name, const std::string& desc, Handler fn) {
    if (!groups.count(group)) {
      groups[group] = app.add_subcommand(group, group + " commands");
      groups[group]->require_subcommand(1);
    }
    auto* sc = groups[group]->add_subcommand(name, desc);
    sc->add_option("--config", config, "JSON config path");
    sc->add_option("--out", outDir, "artifact directory");
    sc->add_flag("--emit-plot", emitPlot, "also write a gnuplot script");
    sc->add_option("--seed", seed, "seed for randomized inputs")->check(CLI::NonNegativeNumber);
    sc->add_flag("--deterministic", deterministic, "sequential evaluation");
    leaves.push_back({group + " " + name, sc, fn});
    return sc;
  };
  add("cone", "dual", "dual cone of a cone spec", cone_dual);
  add("cone", "kappa", "kappa0, kappa0' and kappaV", cone_kappa);
  add("profile", "check", "divergence condition for a spherical profile", profile_check);
  add("witness", "pv1d", "1-D principal value pairing", witness_pv1d)->add_option("--k", k, "single k")->check(CLI::PositiveNumber);
  add("witness", "lemma", "pairing schedule against its lower bound", witness_lemma);
  add("witness", "expansion", "direct versus expanded pairing", witness_expansion);
  add("multiplier", "apply", "apply a symbol or convolve with a measure", multiplier_apply);
  add("multiplier", "commute", "translation commutation", multiplier_commute);
  add("multiplier", "blowup", "local norm ladder over resolutions", multiplier_blowup);
  add("wavefront", "estimate", "Sigma^E or WF^E of a sampled field", wavefront_estimate);
  add("wavefront", "check", "projection and mollification checks", wavefront_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    if (argc > 1 && argv[1][0] != '-' && !groups.count(argv[1]))
      err << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    else
      err << "error: " << e.what() << "\n\n" << app.help();
    return kConfig;
  }

  const Leaf* leaf = nullptr;
  for (const auto& l : leaves)
    if (l.app->parsed()) leaf = &l;
  if (leaf == nullptr) {
    err << app.help();
    return kConfig;
  }

  set_deterministic(deterministic);
  Session S;
  S.command = leaf->name;
  S.emitPlot = emitPlot;
  if (seed >= 0) S.seed = static_cast<std::uint64_t>(seed);
  if (k >= 0) S.k = k;
  int code = kOk;
  try {
    if (!config.empty()) {
      const auto p = detail::resolve_config(config);
      S.cfg = detail::load_json(p);
      S.cfgDir = p.parent_path();
    }
    S.outDir = outDir;
    std::error_code ec;
    fs::create_directories(S.outDir, ec);
    if (!fs::is_directory(S.outDir)) throw ConfigError("cannot create output directory " + outDir);
    S.stem = detail::artifact_stem(S.outDir, leaf->name);
    code = leaf->fn(S);
  } catch (const UnsupportedSpaceError& e) {
    err << "error: unsupported space: " << e.what() << "\n";
    return kConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kConfig;
  }

  S.summary["command"] = S.command;
  S.summary["exitCode"] = code;
  const auto summaryPath = S.artifact(".json");
  S.summary["artifacts"] = S.artifacts;
  {
    std::ofstream js(summaryPath);
    js << S.summary.dump(2) << "\n";
  }
  out << S.summary.dump(2) << "\n";
  return code;
}

}  // namespace conewave::cli
