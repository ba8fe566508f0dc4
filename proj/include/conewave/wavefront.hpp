#pragma once

// Finite-resolution estimates of Sigma^E(u), Sigma^E_x(u), WF^E(u) and sing supp_E(u) for
// sampled fields on the 2-D torus, E in {Sobolev(s), Besov_inf,inf(s)}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conewave/multiplier_engine.hpp"
#include "conewave/symbols.hpp"

namespace conewave {

struct EDescriptor {
  enum class Kind { Sobolev, BesovInfInf };
  Kind kind = Kind::Sobolev;
  double s = 0.0;

  static EDescriptor sobolev(double s) { return {Kind::Sobolev, s}; }
  static EDescriptor besov(double s) { return {Kind::BesovInfInf, s}; }

  double weight(double r) const { return std::pow(1.0 + r * r, 0.5 * s); }
  std::string name() const {
    return (kind == Kind::Sobolev ? "Sobolev(" : "BesovInfInf(") + std::to_string(s) + ")";
  }
};

// Tag parser. L1, Linf and C0 are refused: smooth conic cut-offs do not preserve them.
inline EDescriptor parse_space(const std::string& tag, double s) {
  std::string t;
  for (char c : tag) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "l1" || t == "linf" || t == "c0")
    throw UnsupportedSpaceError(
        "E = " + tag +
        " is refused: a smooth cut-off psi for a cone pair maps some f in L1_comp outside L1_loc, some g in "
        "Linf_comp outside Linf_loc and some continuous compactly supported phi to a discontinuous psi(D)phi, "
        "so psi F u in F E is not a usable regularity test for this space");
  require(std::isfinite(s), "space order s must be finite");
  if (t == "sobolev" || t == "h") return EDescriptor::sobolev(s);
  if (t == "besovinfinf" || t == "besov" || t == "holder") return EDescriptor::besov(s);
  throw ConfigError("unknown space tag '" + tag + "' (expected Sobolev or BesovInfInf)");
}

struct WFParams {
  std::size_t M = 180;              // directions on S^1
  double delta = 10.0 * kDegree;    // outer cut-off half-angle
  double tauExp = 0.5;              // flagged when the fitted shell exponent is >= -tauExp
  int jMin = 2;
  std::vector<double> windowRadii{2.0, 1.0, 0.5};
  double noiseFloor = 1e-10;        // shells whose peak |psi F u| is below this times the reference are unresolved
  double cutoffR = 1.0;
};

struct DirectionScore {
  double angle = 0.0;
  std::vector<int> shells;
  std::vector<double> shellEnergies;
  double fittedExponent = -std::numeric_limits<double>::infinity();
  bool inSigma = false;
  std::size_t resolvedShells = 0;
  UnitVector direction() const { return UnitVector::from_angle(angle); }
};

// Frequencies in the usable dyadic shells, sorted by angle.
struct ShellSpectrum {
  struct Point {
    double angle, r, amp;
    double xi[2];
    int shell;
  };
  std::vector<Point> pts;
  int jMin = 2, jMax = 0;
  double cellArea = 0.0;  // (2 pi / L)^2
  double peak = 0.0;      // max |F u| over the whole grid

  ShellSpectrum(const GridField& spec, int jMinShell) : jMin(jMinShell) {
    const double nyq = kPi * static_cast<double>(spec.N) / spec.L;
    jMax = static_cast<int>(std::floor(std::log2(nyq))) - 1;
    if (jMax - jMin + 1 < 4)
      throw ConfigError("resolution too coarse: fewer than 4 usable dyadic shells below the Nyquist radius");
    cellArea = std::pow(2.0 * kPi / spec.L, 2.0);
    const double lo = std::ldexp(1.0, jMin), hi = std::ldexp(1.0, jMax + 1);
    for (std::size_t a = 0; a < spec.N; ++a)
      for (std::size_t b = 0; b < spec.N; ++b) {
        const double amp = std::abs(spec.values[a * spec.N + b]);
        peak = std::max(peak, amp);
        const double x = spec.freq(a), y = spec.freq(b), r = std::hypot(x, y);
        if (r < lo || r >= hi) continue;
        pts.push_back({planar_angle(x, y), r, amp, {x, y}, static_cast<int>(std::floor(std::log2(r)))});
      }
    std::sort(pts.begin(), pts.end(), [](const Point& p, const Point& q) { return p.angle < q.angle; });
  }

  std::size_t shell_count() const { return static_cast<std::size_t>(jMax - jMin + 1); }

  // Visits points with angle within `half` of `center` (cyclically).
  template <class F>
  void for_each_near(double center, double half, F&& f) const {
    auto visit = [&](double lo, double hi) {
      auto it = std::lower_bound(pts.begin(), pts.end(), lo, [](const Point& p, double v) { return p.angle < v; });
      for (; it != pts.end() && it->angle <= hi; ++it) f(*it);
    };
    double lo = center - half, hi = center + half;
    if (lo < 0.0) {
      visit(lo + 2.0 * kPi, 2.0 * kPi);
      lo = 0.0;
    }
    if (hi >= 2.0 * kPi) {
      visit(0.0, hi - 2.0 * kPi);
      hi = 2.0 * kPi;
    }
    visit(lo, hi);
  }
};

namespace detail {

// Shell energies and peaks of psi F u for one cut-off.
struct ShellAccumulator {
  const ShellSpectrum& sp;
  const EDescriptor& E;
  std::vector<double> energy, peak;

  ShellAccumulator(const ShellSpectrum& s, const EDescriptor& e)
      : sp(s), E(e), energy(s.shell_count(), 0.0), peak(s.shell_count(), 0.0) {}

  void add(const ShellSpectrum::Point& p, double psi) {
    if (psi == 0.0) return;
    const auto j = static_cast<std::size_t>(p.shell - sp.jMin);
    const double v = psi * p.amp;
    peak[j] = std::max(peak[j], v);
    if (E.kind == EDescriptor::Kind::Sobolev) {
      const double w = E.weight(p.r);
      energy[j] += v * v * w * w * sp.cellArea;
    } else {
      energy[j] = std::max(energy[j], v * std::pow(2.0, p.shell * E.s));
    }
  }

  DirectionScore finish(double angle, double floor, double tau) const {
    DirectionScore d;
    d.angle = angle;
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < energy.size(); ++j) {
      d.shells.push_back(sp.jMin + static_cast<int>(j));
      d.shellEnergies.push_back(energy[j]);
      if (xs.size() == j && peak[j] > floor && energy[j] > 0.0) {
        xs.push_back(static_cast<double>(sp.jMin + static_cast<int>(j)));
        ys.push_back(std::log2(energy[j]));
      }
    }
    d.resolvedShells = xs.size();
    if (xs.size() >= 2) d.fittedExponent = quad::fit_line(xs, ys).slope;
    d.inSigma = d.fittedExponent >= -tau;
    return d;
  }
};

inline void check_compact(const GridField& u) {
  require(u.n == 2, "wave front estimates support n = 2");
  double inside = 0.0, outside = 0.0;
  for (std::size_t a = 0; a < u.N; ++a)
    for (std::size_t b = 0; b < u.N; ++b) {
      const double v = std::abs(u.values[a * u.N + b]);
      const bool in = std::abs(u.coord(a)) <= 0.25 * u.L && std::abs(u.coord(b)) <= 0.25 * u.L;
      (in ? inside : outside) = std::max(in ? inside : outside, v);
    }
  require(outside <= 1e-10 * std::max(inside, 1e-300), "field must be supported in the central quarter of the period box");
}

}  // namespace detail

// Sigma^E estimate from a prepared spectrum. `reference` sets the absolute noise floor (defaults
// to the spectrum's own peak).
inline std::vector<DirectionScore> sigma_E_from(const ShellSpectrum& sp, const EDescriptor& E, const WFParams& prm,
                                                std::optional<double> reference = std::nullopt) {
  require(prm.M >= 4 && prm.M <= 720, "angular resolution M must lie in [4, 720]");
  require(prm.delta > 0.0 && prm.delta < kPi / 2, "cone half-angle must lie in (0, pi/2)");
  const double floor = prm.noiseFloor * (reference ? *reference : sp.peak);
  std::vector<DirectionScore> out(prm.M);
  parallel_for(prm.M, [&](std::size_t m) {
    const double th = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(prm.M);
    const auto ax = UnitVector::from_angle(th);
    const auto psi = make_smooth_cutoff(CircularCone::from_half_angle(ax, 0.5 * prm.delta),
                                        CircularCone::from_half_angle(ax, prm.delta, true), prm.cutoffR, 1.0);
    detail::ShellAccumulator acc(sp, E);
    sp.for_each_near(th, prm.delta, [&](const ShellSpectrum::Point& p) { acc.add(p, psi(std::span<const double>(p.xi, 2))); });
    out[m] = acc.finish(th, floor, prm.tauExp);
  });
  return out;
}

inline std::vector<DirectionScore> sigma_E(const GridField& u, const EDescriptor& E, const WFParams& prm = {},
                                           std::optional<double> reference = std::nullopt) {
  detail::check_compact(u);
  const ShellSpectrum sp(dft_forward(u), prm.jMin);
  return sigma_E_from(sp, E, prm, reference);
}

// Same test with an arbitrary cut-off family (one symbol per direction index).
inline std::vector<DirectionScore> sigma_E_with(const GridField& u, const EDescriptor& E, const WFParams& prm,
                                                const std::function<double(std::size_t, std::span<const double>)>& cutoff) {
  detail::check_compact(u);
  const ShellSpectrum sp(dft_forward(u), prm.jMin);
  std::vector<DirectionScore> out(prm.M);
  for (std::size_t m = 0; m < prm.M; ++m) {
    detail::ShellAccumulator acc(sp, E);
    for (const auto& p : sp.pts) acc.add(p, cutoff(m, std::span<const double>(p.xi, 2)));
    out[m] = acc.finish(2.0 * kPi * static_cast<double>(m) / static_cast<double>(prm.M), prm.noiseFloor * sp.peak, prm.tauExp);
  }
  return out;
}

inline std::vector<bool> flags_of(const std::vector<DirectionScore>& s) {
  std::vector<bool> f;
  for (const auto& d : s) f.push_back(d.inSigma);
  return f;
}

// Each flagged index of `sub` lies within one step of a flagged index of `sup`.
inline bool flags_within(const std::vector<bool>& sub, const std::vector<bool>& sup) {
  const std::size_t M = sub.size();
  for (std::size_t m = 0; m < M; ++m)
    if (sub[m] && !(sup[m] || sup[(m + 1) % M] || sup[(m + M - 1) % M])) return false;
  return true;
}

// ---------------------------------------------------------------------------------------
// Localization.

// exp(-|x - c|^2 / (2 sigma^2)) with sigma = radius / 6.
inline GridField gaussian_window(const GridField& like, std::span<const double> c, double radius) {
  require(radius > 0.0, "window radius must be positive");
  for (std::size_t d = 0; d < 2; ++d)
    require(std::abs(c[d]) + radius <= 0.5 * like.L, "window exits the period box");
  const double sig = radius / 6.0;
  const std::vector<double> cc(c.begin(), c.end());
  return GridField::sample(2, like.L, like.N, [&](std::span<const double> x) {
    const double d2 = (x[0] - cc[0]) * (x[0] - cc[0]) + (x[1] - cc[1]) * (x[1] - cc[1]);
    return cplx(std::exp(-0.5 * d2 / (sig * sig)), 0.0);
  });
}

inline GridField multiply(const GridField& a, const GridField& b) {
  GridField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

struct LocalScan {
  std::vector<double> x;
  std::vector<std::vector<bool>> perWindow;  // smallest radius first; may stop early
  std::vector<bool> intersection;
  std::vector<double> exponents;             // fitted exponents in the smallest window
  bool anyWindowEmpty = false;
};

// Sigma^E_x(u): intersection over nested windows, matching directions within one grid step.
inline LocalScan sigma_E_localized(const GridField& u, std::span<const double> x, const EDescriptor& E,
                                   const WFParams& prm, std::optional<double> reference = std::nullopt) {
  require(prm.windowRadii.size() >= 3, "localization needs at least 3 window radii");
  detail::check_compact(u);
  const double ref = reference ? *reference : ShellSpectrum(dft_forward(u), prm.jMin).peak;
  auto radii = prm.windowRadii;
  std::sort(radii.begin(), radii.end());
  LocalScan scan;
  scan.x.assign(x.begin(), x.end());
  scan.intersection.assign(prm.M, true);
  for (double r : radii) {
    const auto w = gaussian_window(u, x, r);
    const auto s = sigma_E(multiply(u, w), E, prm, ref);
    if (scan.exponents.empty())
      for (const auto& d : s) scan.exponents.push_back(d.fittedExponent);
    auto f = flags_of(s);
    const bool empty = std::none_of(f.begin(), f.end(), [](bool b) { return b; });
    scan.perWindow.push_back(f);
    if (empty) scan.anyWindowEmpty = true;
    std::vector<bool> next(prm.M, false);
    for (std::size_t m = 0; m < prm.M; ++m)
      next[m] = scan.intersection[m] && (f[m] || f[(m + 1) % prm.M] || f[(m + prm.M - 1) % prm.M]);
    scan.intersection = next;
    if (empty) break;
  }
  return scan;
}

struct WFEntry {
  std::vector<double> x;
  std::size_t directionIndex;
  double angle;
};

struct WFReport {
  EDescriptor E;
  WFParams params;
  std::vector<WFEntry> flagged;
  std::vector<std::vector<double>> singSupport;
  std::vector<LocalScan> scans;

  std::vector<std::vector<double>> projection() const {
    std::vector<std::vector<double>> p;
    for (const auto& e : flagged)
      if (p.empty() || p.back() != e.x) p.push_back(e.x);
    return p;
  }
};

// Scans every x in xGrid; WF pairs come from the intersections and sing supp_E from whether
// some window gave an empty Sigma^E.
inline WFReport wavefront_set(const GridField& u, const EDescriptor& E, const std::vector<std::vector<double>>& xGrid,
                              const WFParams& prm = {}) {
  detail::check_compact(u);
  WFReport rep{E, prm, {}, {}, {}};
  const double ref = ShellSpectrum(dft_forward(u), prm.jMin).peak;
  for (const auto& x : xGrid) {
    require(x.size() == 2, "x grid points must be 2-D");
    for (std::size_t d = 0; d < 2; ++d) require(std::abs(x[d]) <= 0.25 * u.L, "x grid must lie in the support box");
  }
  rep.scans.resize(xGrid.size());
  for (std::size_t i = 0; i < xGrid.size(); ++i) rep.scans[i] = sigma_E_localized(u, xGrid[i], E, prm, ref);
  for (std::size_t i = 0; i < xGrid.size(); ++i) {
    const auto& sc = rep.scans[i];
    for (std::size_t m = 0; m < prm.M; ++m)
      if (sc.intersection[m])
        rep.flagged.push_back({sc.x, m, 2.0 * kPi * static_cast<double>(m) / static_cast<double>(prm.M)});
    if (!sc.anyWindowEmpty) rep.singSupport.push_back(sc.x);
  }
  return rep;
}

inline std::vector<std::vector<double>> sing_supp_E(const GridField& u, const EDescriptor& E,
                                                    const std::vector<std::vector<double>>& xGrid,
                                                    const WFParams& prm = {}) {
  return wavefront_set(u, E, xGrid, prm).singSupport;
}

// pr_1(WF) and sing supp agree up to points within one x-grid cell of their common part.
inline bool projection_check(const WFReport& rep, const std::vector<std::vector<double>>& singsupp, double cell) {
  const auto pr = rep.projection();
  auto contains = [](const std::vector<std::vector<double>>& s, const std::vector<double>& x) {
    return std::find(s.begin(), s.end(), x) != s.end();
  };
  std::vector<std::vector<double>> common, diff;
  for (const auto& x : pr) (contains(singsupp, x) ? common : diff).push_back(x);
  for (const auto& x : singsupp)
    if (!contains(pr, x)) diff.push_back(x);
  for (const auto& x : diff) {
    bool near = false;
    for (const auto& c : common)
      near = near || std::max(std::abs(x[0] - c[0]), std::abs(x[1] - c[1])) <= cell * (1.0 + 1e-9);
    if (!near) return false;
  }
  return true;
}

// Sigma^E(phi u) within one angular step of Sigma^E(u).
inline bool mollification_check(const GridField& u, const GridField& phi, const EDescriptor& E, const WFParams& prm = {}) {
  detail::check_compact(u);
  const double ref = ShellSpectrum(dft_forward(u), prm.jMin).peak;
  return flags_within(flags_of(sigma_E(multiply(u, phi), E, prm, ref)), flags_of(sigma_E(u, E, prm, ref)));
}

// Exact quarter turn: v(x1, x2) = u(x2, -x1).
inline GridField rotate90(const GridField& u) {
  GridField v = u;
  const std::size_t N = u.N;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) v.values[a * N + b] = u.values[b * N + (N - a) % N];
  return v;
}

// ---------------------------------------------------------------------------------------
// Reference fields.

inline GridField gaussian_field(double L, std::size_t N, double sigma = 0.5) {
  return GridField::sample(2, L, N, [&](std::span<const double> x) {
    return cplx(std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]) / (sigma * sigma)), 0.0);
  });
}

inline GridField delta_field(double L, std::size_t N, std::vector<double> x0 = {0.0, 0.0}) {
  GridField g{2, L, N, std::vector<cplx>(N * N)};
  auto idx = [&](double x) { return static_cast<std::size_t>(std::llround(x / g.h() + 0.5 * static_cast<double>(N))); };
  const std::size_t a = idx(x0[0]), b = idx(x0[1]);
  require(a < N && b < N, "delta location outside the grid");
  g.values[a * N + b] = 1.0 / (g.h() * g.h());
  return g;
}

// H(x1) times a smoothly truncated Gaussian; H(0) = 1/2.
inline GridField jump_sheet_field(double L, std::size_t N) {
  return GridField::sample(2, L, N, [](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    const double env = std::exp(-0.5 * r * r / 0.64) * (1.0 - smooth_step(r - 2.5));
    const double H = x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? 0.0 : 0.5);
    return cplx(H * env, 0.0);
  });
}

inline std::vector<std::vector<double>> square_grid(double half, double step) {
  std::vector<std::vector<double>> g;
  const auto n = static_cast<long>(std::llround(half / step));
  for (long i = -n; i <= n; ++i)
    for (long j = -n; j <= n; ++j) g.push_back({static_cast<double>(i) * step, static_cast<double>(j) * step});
  return g;
}

}  // namespace conewave
