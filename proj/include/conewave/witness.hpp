#pragma once

// Numerical divergence witnesses: the 1-D principal-value pairing, the auxiliary
// oscillatory integral f(lambda), the n-D pairing I(l) against its logarithmic lower bound,
// and a two-route cross-check of <F phi, chi> for n = 2.

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "conewave/cone_geometry.hpp"
#include "conewave/fft.hpp"
#include "conewave/parallel.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sphere_profiles.hpp"
#include "conewave/symbols.hpp"

namespace conewave {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------------------
// 1-D pairing with p.v. 1/x.

inline BumpSpec default_pv_bump(long k) {
  require(k >= 3, "pv pairing needs k >= 3");
  const double kk = static_cast<double>(k);
  return make_bump(1.0 / (2.0 * kk), 1.0 / kk, 0.5, 1.0);
}

// int_0^1 chi(x)/x dx, integrated in u = ln x.
inline double pv_pairing_1d(long k, std::optional<BumpSpec> bump = std::nullopt) {
  const BumpSpec b = bump ? *bump : default_pv_bump(k);
  require(b.a >= 0.0 && b.d <= 1.0, "pv pairing bump must be supported in [0, 1]");
  auto g = [&](double u) { return b(std::exp(u)); };
  const double lo = b.a > 0.0 ? std::log(b.a) : std::log(b.b) - 7.0;
  double v = std::log(b.c / b.b);
  v += quad::adaptive(g, lo, std::log(b.b), 1e-10);
  v += quad::adaptive(g, std::log(b.c), std::log(b.d), 1e-10);
  return v;
}

// ---------------------------------------------------------------------------------------
// f(lambda) = int_lambda^inf exp(-i rho) rho^{-2} d rho.

namespace detail {

// int_lo^hi exp(-i rho) rho^{-p} d rho by 20-point Gauss panels of unit width.
inline cplx oscillatory_panels(double lo, double hi, double p) {
  cplx s{};
  const auto panels = static_cast<std::size_t>(std::ceil(hi - lo));
  const double h = (hi - lo) / static_cast<double>(panels);
  for (std::size_t i = 0; i < panels; ++i)
    s += quad::gauss_panel<20>([&](double x) { return std::exp(cplx(0.0, -x)) * std::pow(x, -p); },
                               lo + i * h, lo + (i + 1) * h);
  return s;
}

}  // namespace detail

inline cplx f_lambda(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "f(lambda) needs lambda > 0");
  if (lambda < 1.0) {
    // Direct part on [lambda, 1] in u = ln rho: exp(-i e^u) e^{-u}.
    auto re = [](double u) { return std::cos(std::exp(u)) * std::exp(-u); };
    auto im = [](double u) { return -std::sin(std::exp(u)) * std::exp(-u); };
    const double lo = std::log(lambda);
    const double tol = 1e-13 * std::max(1.0, 1.0 / lambda);
    return cplx(quad::adaptive(re, lo, 0.0, tol), quad::adaptive(im, lo, 0.0, tol)) + f_lambda(1.0);
  }
  // Two integrations by parts leave a rho^{-4} remainder; its tail beyond T uses two more terms.
  const cplx e = std::exp(cplx(0.0, -lambda));
  const double l2 = lambda * lambda, l3 = l2 * lambda;
  const cplx head = e * cplx(2.0 / l3, -1.0 / l2);
  const double T = lambda + 200.0;
  const cplx eT = std::exp(cplx(0.0, -T));
  const cplx tail = eT * cplx(4.0 / std::pow(T, 5), -1.0 / std::pow(T, 4));
  return head - 6.0 * (detail::oscillatory_panels(lambda, T, 4.0) + tail);
}

// ---------------------------------------------------------------------------------------
// Weighted direction sets for quadrature over S^{n-1}.

struct DirectionRule {
  std::size_t n = 2;
  std::vector<double> pts;  // row-major, n per node
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  std::span<const double> point(std::size_t i) const { return {pts.data() + n * i, n}; }
  void add(std::span<const double> p, double weight) {
    pts.insert(pts.end(), p.begin(), p.end());
    w.push_back(weight);
  }
  double total() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
  }
};

namespace detail {

struct Frame {
  std::vector<double> t1, t2, c;

  explicit Frame(std::span<const double> axis) : c(axis.begin(), axis.end()) {
    t1 = std::abs(c[2]) < 0.9 ? std::vector<double>{-c[1], c[0], 0.0} : std::vector<double>{0.0, -c[2], c[1]};
    const double l = norm(t1);
    for (double& x : t1) x /= l;
    t2 = {c[1] * t1[2] - c[2] * t1[1], c[2] * t1[0] - c[0] * t1[2], c[0] * t1[1] - c[1] * t1[0]};
  }

  static Frame identity() {
    Frame f(std::vector<double>{0.0, 0.0, 1.0});
    f.t1 = {1.0, 0.0, 0.0};
    f.t2 = {0.0, 1.0, 0.0};
    return f;
  }

  std::vector<double> at(double alpha, double gamma) const {
    const double sa = std::sin(alpha), ca = std::cos(alpha), cg = std::cos(gamma), sg = std::sin(gamma);
    return {sa * cg * t1[0] + sa * sg * t2[0] + ca * c[0], sa * cg * t1[1] + sa * sg * t2[1] + ca * c[1],
            sa * cg * t1[2] + sa * sg * t2[2] + ca * c[2]};
  }

  UnitVector local(const UnitVector& v) const {
    return UnitVector::normalized({dot(v.coords(), t1), dot(v.coords(), t2), dot(v.coords(), c)});
  }
};

template <std::size_t N, class F>
void gauss_nodes(double a, double b, std::size_t panels, F&& f) {
  const auto& rule = quad::GaussRule<N>::get();
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + p * h, mid = lo + 0.5 * h;
    for (std::size_t q = 0; q < N; ++q) f(mid + 0.5 * h * rule.nodes[q], 0.5 * h * rule.weights[q]);
  }
}

}  // namespace detail

// Nodes for the angular window chi~: Gauss panels split at the plateau and edge angles.
inline DirectionRule window_rule(const AngularWindow& win, std::size_t panels = 8) {
  DirectionRule rule;
  const std::size_t n = win.axis.size();
  rule.n = n;
  const double th = win.halfAperture;
  const double p0 = AngularWindow::kPlateau * th, p1 = AngularWindow::kEdge * th;
  if (n == 2) {
    const double b0 = planar_angle(win.axis[0], win.axis[1]);
    for (auto [a, b] : {std::pair{-p1, -p0}, std::pair{-p0, p0}, std::pair{p0, p1}})
      detail::gauss_nodes<20>(a, b, panels, [&](double d, double wt) {
        const double v = win.of_angle(std::abs(d));
        if (v == 0.0) return;
        const std::vector<double> x{std::cos(b0 + d), std::sin(b0 + d)};
        rule.add(x, wt * v);
      });
    return rule;
  }
  require(n == 3, "window quadrature supports n in {2, 3}");
  const detail::Frame fr(win.axis.coords());
  const std::size_t ng = 64;
  for (auto [a, b] : {std::pair{0.0, p0}, std::pair{p0, p1}})
    detail::gauss_nodes<20>(a, b, std::max<std::size_t>(1, panels / 2), [&](double al, double wt) {
      const double v = win.of_angle(al);
      if (v == 0.0) return;
      for (std::size_t k = 0; k < ng; ++k) {
        const double g = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(ng);
        rule.add(fr.at(al, g), wt * v * std::sin(al) * 2.0 * kPi / static_cast<double>(ng));
      }
    });
  return rule;
}

// Nodes for integrating phi_1(omega) G(omega) with G smooth: Gauss nodes on every piece where
// the profile is constant; the profile value is folded into the weights.
inline DirectionRule profile_rule(const SphericalProfile& p, std::size_t panels = 4) {
  DirectionRule rule;
  const std::size_t n = p.dim();
  rule.n = n;
  if (n == 2) {
    const auto br = p.breakpoints_2d();
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double v = p(UnitVector::from_angle(0.5 * (br[i] + br[i + 1])));
      if (v == 0.0) continue;
      detail::gauss_nodes<20>(br[i], br[i + 1], panels, [&](double a, double wt) {
        const std::vector<double> x{std::cos(a), std::sin(a)};
        rule.add(x, wt * v);
      });
    }
    return rule;
  }
  // n = 3: colatitude/azimuth about a frame axis chosen so that the pieces are exact.
  std::vector<double> axis{0.0, 0.0, 1.0};
  const auto& sup = p.declared_support();
  if (p.kind() == SphericalProfile::Kind::Caps) {
    if (sup && std::holds_alternative<CircularCone>(*sup) && !std::get<CircularCone>(*sup).is_whole_space())
      axis = std::get<CircularCone>(*sup).axis().vec();
    else if (!p.cap_list().empty())
      axis = p.cap_list().front().axis.vec();
  }
  const bool gridKind = p.kind() == SphericalProfile::Kind::Grid;
  const detail::Frame fr = gridKind ? detail::Frame::identity() : detail::Frame(axis);
  struct LocalCap {
    UnitVector axis;
    double half;
  };
  std::vector<LocalCap> caps;
  for (const auto& c : p.cap_list()) caps.push_back({fr.local(c.axis), c.halfAngle});
  if (sup)
    if (const auto* cc = std::get_if<CircularCone>(&*sup); cc && !cc->is_whole_space())
      caps.push_back({fr.local(cc->axis()), cc->half_angle()});
  std::vector<double> tb{0.0, kPi};
  for (const auto& c : caps) {
    const double thc = std::acos(std::clamp(c.axis[2], -1.0, 1.0));
    for (double x : {thc - c.half, thc + c.half, c.half - thc, 2.0 * kPi - thc - c.half, thc}) tb.push_back(x);
  }
  if (gridKind)
    for (std::size_t k = 0; k <= p.grid_values().size(); ++k)
      tb.push_back(kPi * static_cast<double>(k) / static_cast<double>(p.grid_values().size()));
  const auto abr = quad::clip_breaks(tb, 0.0, kPi);
  for (std::size_t i = 0; i + 1 < abr.size(); ++i) {
    const double a = abr[i], b = abr[i + 1];
    detail::gauss_nodes<20>(0.0, 1.0, panels, [&](double t, double wt) {
      const double al = a + 0.5 * (b - a) * (1.0 - std::cos(kPi * t));
      const double jac = 0.5 * (b - a) * kPi * std::sin(kPi * t);
      std::vector<double> gb{0.0, 2.0 * kPi};
      for (const auto& c : caps) {
        const auto [ph, h] = detail::latitude_arc(c.axis, c.half, al);
        if (h > 0 && h < kPi)
          for (double x : {ph - h, ph + h}) gb.push_back(std::fmod(std::fmod(x, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi));
      }
      if (gridKind)
        for (std::size_t k = 0; k <= p.grid_values().front().size(); ++k)
          gb.push_back(2.0 * kPi * static_cast<double>(k) / static_cast<double>(p.grid_values().front().size()));
      const auto gbr = quad::clip_breaks(gb, 0.0, 2.0 * kPi);
      for (std::size_t j = 0; j + 1 < gbr.size(); ++j) {
        const double v = p(fr.at(al, 0.5 * (gbr[j] + gbr[j + 1])));
        if (v == 0.0) continue;
        detail::gauss_nodes<12>(gbr[j], gbr[j + 1], 1, [&](double g, double wg) {
          rule.add(fr.at(al, g), wt * jac * std::sin(al) * wg * v);
        });
      }
    });
  }
  return rule;
}

// ---------------------------------------------------------------------------------------
// Radial moments M_j = int theta(rho) rho^j d rho on log-spaced Gauss nodes
// (128 per decade; the two transitions get at least 16 panels of 20 nodes).

inline double radial_moment(const BumpSpec& th, double j) {
  auto f = [&](double u) { return th(std::exp(u)) * std::exp((j + 1.0) * u); };
  const double perPanel = std::log(10.0) / 16.0;
  double s = 0.0;
  int piece = 0;
  for (auto [x0, x1] : {std::pair{th.a, th.b}, std::pair{th.b, th.c}, std::pair{th.c, th.d}}) {
    const bool ramp = piece++ != 1;
    if (!(x1 > x0) || x0 <= 0.0) continue;
    const double a = std::log(x0), b = std::log(x1);
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / perPanel)));
    s += ramp ? quad::gauss_composite<20>(f, {a, b}, std::max<std::size_t>(panels, 16))
              : quad::gauss_composite<8>(f, {a, b}, panels);
  }
  return s;
}

// Even power series R(a) = int cos(r rho a) theta(rho)/rho d rho = sum_k c_k a^{2k}.
struct RadialKernel {
  std::vector<double> coeff;

  RadialKernel(const BumpSpec& th, double r) {
    double fact = 1.0;
    for (int k = 0; k < 40; ++k) {
      if (k > 0) fact *= (2.0 * k - 1.0) * (2.0 * k);
      const double c = ((k % 2) ? -1.0 : 1.0) * std::pow(r, 2.0 * k) * radial_moment(th, 2.0 * k - 1.0) / fact;
      coeff.push_back(c);
      if (k > 2 && std::abs(c) < 1e-18 * std::abs(coeff.front())) break;
    }
  }

  double operator()(double a) const {
    const double a2 = a * a;
    double s = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) s = s * a2 + *it;
    return s;
  }
};

// ---------------------------------------------------------------------------------------
// n-dimensional pairing I(l) and its lower bound.

struct WitnessConfig {
  ConeSpec V;
  std::optional<ConeSpec> Vprime;
  CircularCone Vdoubleprime;
  SphericalProfile profile;
  double r = 1.0;
  std::optional<double> s;
  std::vector<long> lSchedule{16, 64, 256, 1024};
  double tol = 1e-6;
};

struct LemmaSetup {
  ConeSpec Vprime = ZeroCone{2};
  double s = 1.5;
  double kappa0Prime = 1.0;
  double normPos = 0.0;
  double normNeg = 0.0;
  double chiNorm = 0.0;
  ConditionReport condition;
  std::size_t n = 2;
};

// int V* with the open flag for circular cones.
inline ConeSpec interior_of_dual(const ConeSpec& v) {
  ConeSpec d = dual_cone(v);
  if (auto* c = std::get_if<CircularCone>(&d)) return c->as_open();
  return d;
}

inline WitnessConfig default_witness_config() {
  const auto e1 = UnitVector::basis(2, 0);
  const auto V = CircularCone::from_half_angle(e1, 20.0 * kDegree);
  return WitnessConfig{V, std::nullopt, CircularCone::from_half_angle(e1, 30.0 * kDegree),
                       SphericalProfile::constant(2, 1.0, V), 1.0, std::nullopt, {16, 64, 256, 1024}, 1e-6};
}

inline LemmaSetup prepare_lemma(const WitnessConfig& cfg) {
  LemmaSetup st;
  st.n = cfg.profile.dim();
  require(st.n == 2 || st.n == 3, "lemma witness supports n in {2, 3}");
  require(cone_dim(cfg.V) == st.n && cfg.Vdoubleprime.dim() == st.n, "witness cone dimensions differ");
  require(cfg.r > 0.0, "witness needs r > 0");
  st.Vprime = cfg.Vprime ? *cfg.Vprime : interior_of_dual(cfg.V);
  require(interior_nonempty(st.Vprime), "V' has empty interior");
  check_support(cfg.profile, cfg.V);
  const auto neg = cfg.profile.negative_part();
  st.kappa0Prime = kappa0_prime(neg.support_set(), cfg.Vdoubleprime, &st.Vprime);
  st.normPos = sphere_integral(cfg.profile.positive_part());
  st.normNeg = sphere_integral(neg);
  st.condition = condition_from(st.normPos, st.normNeg, st.kappa0Prime, st.n);
  const bool trivial = st.normPos == 0.0 && st.normNeg == 0.0;
  if (!trivial && !st.condition.holds)
    throw ConfigError("divergence condition fails with kappa0' computed from V''");
  if (cfg.s) {
    require(*cfg.s > 1.0, "s must exceed 1");
    if (!trivial && !(std::cos(1.0 / *cfg.s) * st.normPos > st.condition.rhsScaled))
      throw ConfigError("configured s violates cos(1/s) |phi+| > kappa0'^{-n} |phi-|");
    st.s = *cfg.s;
  } else {
    st.s = (trivial || !st.condition.s) ? 1.5 : *st.condition.s;
  }
  for (long l : cfg.lSchedule)
    require(static_cast<double>(l) >= 2.0 * st.s + 1.0, "schedule entries must satisfy l >= 2s + 1");
  st.chiNorm = AngularWindow{cfg.Vdoubleprime.axis(), cfg.Vdoubleprime.half_angle()}.l1_norm();
  return st;
}

struct WitnessResult {
  long l = 0;
  double I = 0.0;
  double L = 0.0;
  double slopeEstimate = std::numeric_limits<double>::quiet_NaN();
  double tol = 0.0;
  bool pass = false;
  double margin() const { return I - L; }
};

inline double lemma_lower_bound(const LemmaSetup& st, long l) {
  const double L = static_cast<double>(l);
  double v = std::cos(1.0 / st.s) * st.normPos * std::log(L / (2.0 * st.s));
  if (st.normNeg > 0.0) v -= std::pow(st.kappa0Prime, -static_cast<double>(st.n)) * st.normNeg * std::log(2.0 * L / st.s);
  return st.chiNorm * v;
}

namespace detail {

template <class K>
double double_sum(const DirectionRule& outer, const DirectionRule& inner, std::size_t n, K&& kernel) {
  double total = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const auto w = outer.point(i);
    double row = 0.0;
    for (std::size_t j = 0; j < inner.size(); ++j) {
      const double a = dot(w, inner.point(j));
      if (!(a > 0.0)) throw NumericalError("omega . omega' <= 0 on the supports; chi must lie in int V*");
      row += inner.w[j] * std::pow(a, -static_cast<double>(n)) * kernel(a);
    }
    total += outer.w[i] * row;
  }
  return total;
}

}  // namespace detail

inline WitnessResult lemma_pairing(const WitnessConfig& cfg, const LemmaSetup& st, long l) {
  const auto chi = make_test_sequence(cfg.Vdoubleprime.axis(), cfg.Vdoubleprime, cfg.r, st.s, l);
  WitnessResult res;
  res.l = l;
  res.tol = cfg.tol;
  const auto outer = profile_rule(cfg.profile);
  const auto inner = window_rule(chi.angular, st.n == 2 ? 8 : 4);
  const RadialKernel R(chi.radial, cfg.r);
  res.I = detail::double_sum(outer, inner, st.n, R);
  res.L = lemma_lower_bound(st, l);
  res.pass = res.I >= res.L - cfg.tol;
  return res;
}

inline WitnessResult lemma_pairing(const WitnessConfig& cfg, long l) { return lemma_pairing(cfg, prepare_lemma(cfg), l); }

// C* = int int phi_1(omega) (omega . omega')^{-n} chi~(omega') d omega' d omega.
inline double lemma_slope_constant(const WitnessConfig& cfg) {
  const auto outer = profile_rule(cfg.profile);
  const auto inner = window_rule(AngularWindow{cfg.Vdoubleprime.axis(), cfg.Vdoubleprime.half_angle()},
                                 cfg.profile.dim() == 2 ? 8 : 4);
  return detail::double_sum(outer, inner, cfg.profile.dim(), [](double) { return 1.0; });
}

struct LemmaRun {
  LemmaSetup setup;
  std::vector<WitnessResult> results;
  double cStar = 0.0;
  bool allPass = true;
  bool monotone = true;
};

// Evaluates the schedule (concurrently unless deterministic); slopes between consecutive
// entries are (I(l_{k+1}) - I(l_k)) / ln(l_{k+1}/l_k).
inline LemmaRun run_lemma(const WitnessConfig& cfg) {
  LemmaRun run;
  run.setup = prepare_lemma(cfg);
  auto sched = cfg.lSchedule;
  std::sort(sched.begin(), sched.end());
  run.results.resize(sched.size());
  parallel_for(sched.size(), [&](std::size_t i) { run.results[i] = lemma_pairing(cfg, run.setup, sched[i]); });
  run.cStar = lemma_slope_constant(cfg);
  for (std::size_t i = 0; i < run.results.size(); ++i) {
    run.allPass = run.allPass && run.results[i].pass;
    if (i > 0) {
      auto& cur = run.results[i];
      const auto& prev = run.results[i - 1];
      cur.slopeEstimate = (cur.I - prev.I) / std::log(static_cast<double>(cur.l) / static_cast<double>(prev.l));
      if (!(cur.I > prev.I)) run.monotone = false;
    }
  }
  return run;
}

// ---------------------------------------------------------------------------------------
// Two-route evaluation of <F phi, chi> = int_{S cap V} int_r^inf phi_1 rho^{n-1} F chi(rho omega).

struct ExpansionOptions {
  double tailTol = 1e-12;   // |F chi| threshold relative to its peak at the truncation point
  double window = 100.0;    // width of the smooth split of [r, inf)
  double pad = 16.0;        // t-period as a multiple of 2 max|t| on supp chi
  std::size_t maxLog2 = 22;
};

struct ExpansionResult {
  cplx direct{};
  cplx expanded{};
  double relErr = 0.0;
  std::size_t maxFftSize = 0;
  double rhoMax = 0.0;
};

namespace detail {

// Radon projection g(t) = int chi(t omega + u omega_perp) du for n = 2.
inline double radon_projection(const TestFunction& chi, double beta, double t) {
  const auto& bump = chi.radial;
  const double d = bump.d;
  if (!(t < d)) return 0.0;
  const double umax = std::sqrt(d * d - t * t);
  std::vector<double> br{-umax, umax};
  for (double x : {bump.a, bump.b, bump.c})
    if (x > t) {
      const double u = std::sqrt(x * x - t * t);
      br.push_back(u);
      br.push_back(-u);
    }
  const double b0 = planar_angle(chi.angular.axis[0], chi.angular.axis[1]);
  const double th = chi.angular.halfAperture;
  for (double k : {AngularWindow::kPlateau, AngularWindow::kEdge})
    for (double sgn : {-1.0, 1.0}) {
      const double ang = wrap_angle(b0 + sgn * k * th - beta);
      if (std::abs(ang) < 0.5 * kPi - 1e-9) br.push_back(t * std::tan(ang));
    }
  const auto pts = quad::clip_breaks(br, -umax, umax);
  auto f = [&](double u) {
    const double rho = std::sqrt(t * t + u * u);
    const double delta = wrap_angle(beta + std::atan2(u, t) - b0);
    return chi.angular.of_angle(std::abs(delta)) * bump(rho);
  };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (f(0.5 * (pts[i] + pts[i + 1])) == 0.0) continue;
    s += quad::gauss_composite<20>(f, {pts[i], pts[i + 1]}, 3);
  }
  return s;
}

// int_r^inf rho F chi(rho omega) d rho via the FFT of the Radon projection.
inline cplx direct_radial(const TestFunction& chi, double beta, double r, const ExpansionOptions& opt,
                          std::size_t& fftSize, double& rhoMax) {
  const double b0 = planar_angle(chi.angular.axis[0], chi.angular.axis[1]);
  const double cmin = std::cos(std::abs(wrap_angle(b0 - beta)) + AngularWindow::kEdge * chi.angular.halfAperture);
  require(cmin > 0.0, "test function support leaves the half-space omega . xi > 0");
  const double tlo = chi.radial.a * cmin, thi = chi.radial.d;
  const double drho = kPi / (opt.pad * thi);  // t-period 2 pad thi
  std::size_t P = 1024;
  while (P * drho / 2.0 < 64.0 / chi.radial.a) P *= 2;
  std::vector<double> g;
  std::vector<cplx> spec;
  double dt = 0.0;
  for (;;) {
    dt = 2.0 * opt.pad * thi / static_cast<double>(P);
    g.assign(P, 0.0);
    const auto j0 = static_cast<std::size_t>(std::floor(tlo / dt));
    const auto j1 = std::min(P - 1, static_cast<std::size_t>(std::ceil(thi / dt)));
    for (std::size_t j = j0; j <= j1; ++j) g[j] = radon_projection(chi, beta, j * dt);
    spec = fft::r2c(g);
    double peak = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double m = std::abs(spec[k]);
      peak = std::max(peak, m);
      if (k >= (spec.size() * 4) / 5) tail = std::max(tail, m);
    }
    if (tail <= opt.tailTol * peak) break;
    if (P >= (std::size_t{1} << opt.maxLog2))
      throw NumericalError("Fourier transform of chi did not decay below the truncation threshold");
    P *= 2;
  }
  fftSize = std::max(fftSize, P);
  rhoMax = std::max(rhoMax, drho * static_cast<double>(spec.size() - 1));
  auto split = [&](double rho) { return smooth_step((rho - r) / opt.window); };
  // Far part on the rho grid (trapezoid; integrand vanishes to all orders at r).
  cplx far{};
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double rho = drho * static_cast<double>(k);
    if (rho <= r) continue;
    far += split(rho) * rho * spec[k] * dt;
  }
  far *= drho;
  // Near part by Gauss panels with F chi summed directly from the samples.
  std::size_t jlo = P, jhi = 0;
  for (std::size_t j = 0; j < P; ++j)
    if (g[j] != 0.0) {
      jlo = std::min(jlo, j);
      jhi = j;
    }
  auto fchi = [&](double rho) {
    const cplx step = std::exp(cplx(0.0, -rho * dt));
    cplx ph = std::exp(cplx(0.0, -rho * dt * static_cast<double>(jlo)));
    cplx s{};
    for (std::size_t j = jlo; j <= jhi; ++j) {
      s += g[j] * ph;
      ph *= step;
    }
    return s * dt;
  };
  cplx nearPart{};
  const auto panels = static_cast<std::size_t>(std::ceil(opt.window / 2.0));
  detail::gauss_nodes<16>(r, r + opt.window, panels,
                          [&](double rho, double w) { nearPart += w * (1.0 - split(rho)) * rho * fchi(rho); });
  return far + nearPart;
}

// Closed-form radial factor of the expanded route:
// int theta(rho) e^{-i r rho a} (-i r / a - 1/(rho a^2)) d rho as a power series in r rho a.
struct ExpandedKernel {
  std::vector<double> moments;  // M_{m-1}, m = 0..K+1
  double r;

  ExpandedKernel(const BumpSpec& th, double radius) : r(radius) {
    for (int m = -1; m <= 40; ++m) moments.push_back(radial_moment(th, m));
  }

  cplx operator()(double a) const {
    cplx sum{};
    cplx pw(1.0, 0.0);  // (-i r a)^m / m!
    for (int m = 0; m <= 40; ++m) {
      if (m > 0) pw *= cplx(0.0, -r * a) / static_cast<double>(m);
      const cplx term = pw * (cplx(0.0, -r / a) * moments[m + 1] - moments[m] / (a * a));
      sum += term;
      if (m > 4 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
};

}  // namespace detail

inline ExpansionResult expansion_crosscheck(const SphericalProfile& profile, const ConeSpec& V, double r,
                                            const TestFunction& chi, const ExpansionOptions& opt = {}) {
  require(profile.dim() == 2 && chi.angular.axis.size() == 2, "expansion cross-check is implemented for n = 2");
  require(r > 0.0, "expansion cross-check needs r > 0");
  check_support(profile, V);
  const auto outer = profile_rule(profile, 1);
  const auto inner = window_rule(chi.angular, 8);
  for (std::size_t i = 0; i < outer.size(); ++i)
    for (std::size_t j = 0; j < inner.size(); ++j)
      if (!(dot(outer.point(i), inner.point(j)) > 0.0))
        throw ConfigError("support violation: omega . xi must be positive on supp phi x supp chi");
  ExpansionResult res;
  std::vector<cplx> direct(outer.size()), expanded(outer.size());
  std::vector<std::size_t> sizes(outer.size(), 0);
  std::vector<double> rmax(outer.size(), 0.0);
  const detail::ExpandedKernel ek(chi.radial, r);
  parallel_for(outer.size(), [&](std::size_t i) {
    const auto w = outer.point(i);
    direct[i] = detail::direct_radial(chi, planar_angle(w[0], w[1]), r, opt, sizes[i], rmax[i]);
    cplx e{};
    for (std::size_t j = 0; j < inner.size(); ++j) e += inner.w[j] * ek(dot(w, inner.point(j)));
    expanded[i] = e;
  });
  for (std::size_t i = 0; i < outer.size(); ++i) {
    res.direct += outer.w[i] * direct[i];
    res.expanded += outer.w[i] * expanded[i];
    res.maxFftSize = std::max(res.maxFftSize, sizes[i]);
    res.rhoMax = std::max(res.rhoMax, rmax[i]);
  }
  const double scale = std::abs(res.direct);
  res.relErr = scale == 0.0 ? std::abs(res.expanded) : std::abs(res.direct - res.expanded) / scale;
  return res;
}

// Seeded cross-check inputs: V'' axis and aperture, r, s and l drawn from a fixed generator.
struct ExpansionCase {
  SphericalProfile profile;
  ConeSpec V;
  double r;
  TestFunction chi;
};

inline ExpansionCase seeded_expansion_case(std::uint64_t seed, long lMin = 8, long lMax = 32) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto e1 = UnitVector::basis(2, 0);
  const auto V = CircularCone::from_half_angle(e1, (10.0 + 15.0 * u(rng)) * kDegree);
  const double vHalf = V.half_angle();
  const double ppHalf = (10.0 + 20.0 * u(rng)) * kDegree;
  // Keep V'' inside int V* (half-aperture pi/2 - vHalf) with a margin.
  const double room = std::max(0.0, kPi / 2 - vHalf - ppHalf - 5.0 * kDegree);
  const double offset = (2.0 * u(rng) - 1.0) * room;
  const auto axis = UnitVector::from_angle(offset);
  const double r = 0.5 + 1.5 * u(rng);
  const double s = 1.5 + u(rng);
  const long l = lMin + static_cast<long>(std::floor(u(rng) * static_cast<double>(lMax - lMin + 1)));
  const auto profile = SphericalProfile::caps(
      2, {{e1, vHalf, 1.0}, {UnitVector::from_angle((2.0 * u(rng) - 1.0) * 0.5 * vHalf), 0.25 * vHalf, -0.5}}, V);
  const auto vpp = CircularCone::from_half_angle(axis, ppHalf);
  return {profile, V, r, make_test_sequence(axis, vpp, r, s, std::max(l, static_cast<long>(std::ceil(2 * s + 1))))};
}

// ---------------------------------------------------------------------------------------
// Reduction from a complex homogeneous symbol to the real condition on either component.

struct ComponentCheck {
  std::string branch;
  ConditionReport report;
};

struct ComponentReport {
  bool certified = false;
  std::string branch = "none";
  std::vector<ComponentCheck> checks;
};

inline ComponentReport validate_component_reduction(const SphericalProfile& re, const SphericalProfile& im,
                                              const ConeSpec& V, const ConeSpec& Vprime) {
  ComponentReport rep;
  const std::vector<std::pair<std::string, SphericalProfile>> cands{
      {"Re", re}, {"-Re", re.scaled(-1.0)}, {"Im", im}, {"-Im", im.scaled(-1.0)}};
  for (const auto& [name, prof] : cands) {
    ComponentCheck c{name, check_condition(prof, V, Vprime)};
    if (c.report.holds && !rep.certified) {
      rep.certified = true;
      rep.branch = name;
    }
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace conewave
