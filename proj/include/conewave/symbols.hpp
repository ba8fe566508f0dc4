#pragma once

// Order-0 positively homogeneous symbols, smooth conic cut-offs, smooth bumps built from
// exp(-1/t), the lemma test functions chi_l and numerical Mikhlin seminorm estimates.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "conewave/cone_geometry.hpp"
#include "conewave/quadrature.hpp"
#include "conewave/sphere_profiles.hpp"

namespace conewave {

// C^infinity step: 0 for x <= 0, 1 for x >= 1, h(x)/(h(x)+h(1-x)) with h(x) = exp(-1/x).
inline double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

// Support [a, d], plateau [b, c].
struct BumpSpec {
  double a, b, c, d;

  double operator()(double x) const {
    if (x <= a || x >= d) return 0.0;
    if (x < b) return smooth_step((x - a) / (b - a));
    if (x <= c) return 1.0;
    return smooth_step((d - x) / (d - c));
  }
};

inline BumpSpec make_bump(double a, double b, double c, double d) {
  require(std::isfinite(a) && std::isfinite(d), "bump endpoints must be finite");
  require(a < b && b <= c && c < d, "bump requires a < b <= c < d");
  return {a, b, c, d};
}

// psi(xi) = phi_1(xi/|xi|) 1_{(r, inf)}(|xi|).
struct HomogeneousSymbol {
  SphericalProfile profile;
  double r;

  HomogeneousSymbol(SphericalProfile p, double radius) : profile(std::move(p)), r(radius) {
    require(r > 0.0, "truncation radius r must be positive");
  }

  std::size_t dim() const { return profile.dim(); }

  double operator()(std::span<const double> xi) const {
    const double len = norm(xi);
    if (!(len > r)) return 0.0;
    std::vector<double> w(xi.begin(), xi.end());
    for (double& x : w) x /= len;
    return profile(w);
  }
};

// Smooth cut-off for (V0, Vouter): c0 * ramp(|xi|/R) * A(xi/|xi|), with the radial ramp
// rising on [R/2, R] and A equal to 1 on V0, 0 outside a cone strictly inside Vouter.
class SmoothCutoff {
 public:
  SmoothCutoff(ConeSpec v0, ConeSpec vOuter, double R, double c0)
      : v0_(std::move(v0)), vOuter_(std::move(vOuter)), R_(R), c0_(c0), n_(cone_dim(v0_)) {
    require(R_ > 0.0 && c0_ > 0.0, "cut-off needs R > 0 and c0 > 0");
    require(cone_dim(vOuter_) == n_, "cut-off cone dimensions differ");
    validate();
  }

  std::size_t dim() const { return n_; }
  double R() const { return R_; }
  double c0() const { return c0_; }
  const ConeSpec& v0() const { return v0_; }
  const ConeSpec& v_outer() const { return vOuter_; }

  double radial(double rho) const { return smooth_step(2.0 * (rho / R_ - 0.5)); }

  double angular(std::span<const double> w) const {
    if (outerWhole_) return 1.0;
    if (n_ == 1) return cone_contains(v0_, w, true) ? 1.0 : 0.0;
    const double d1 = dot(w, outerAxis_) - cosZero_;
    if (d1 <= 0.0) return 0.0;
    const double d0 = distance_to_v0(w);
    if (d0 <= 0.0) return 1.0;
    return smooth_step(d1 / (d0 + d1));
  }

  double operator()(std::span<const double> xi) const {
    const double len = norm(xi);
    if (!(len > 0.5 * R_)) return 0.0;
    const double rad = radial(len);
    if (rad == 0.0) return 0.0;
    std::array<double, kMaxDim> w{};
    for (std::size_t i = 0; i < xi.size(); ++i) w[i] = xi[i] / len;
    return c0_ * rad * angular(std::span<const double>(w.data(), xi.size()));
  }

 private:
  // Zero on V0, positive and Lipschitz outside (1 - cos of the angular distance).
  double distance_to_v0(std::span<const double> w) const {
    if (const auto* c = std::get_if<CircularCone>(&v0_)) {
      if (c->is_whole_space()) return 0.0;
      return std::max(0.0, c->cos_half() - dot(w, c->axis().coords()));
    }
    if (const auto* p = std::get_if<PolyhedralCone>(&v0_)) {
      if (p->contains(w)) return 0.0;
      double best = kInfinity;
      for (const auto& g : p->generators()) best = std::min(best, 1.0 - dot(w, g.coords()));
      return std::max(best, 1e-300);
    }
    return cone_contains(v0_, w, true) ? 0.0 : 1.0;
  }

  void validate() {
    if (const auto* o = std::get_if<CircularCone>(&vOuter_); o && o->is_whole_space()) {
      outerWhole_ = true;
      return;
    }
    if (const auto* h = std::get_if<HalfspaceCone>(&vOuter_); h && h->normals().empty()) {
      outerWhole_ = true;
      return;
    }
    const auto* o = std::get_if<CircularCone>(&vOuter_);
    require(o != nullptr, "outer cone of a cut-off must be circular or the whole space");
    if (n_ == 1) return;
    const bool v0Ok = std::holds_alternative<CircularCone>(v0_) ||
                      (std::holds_alternative<PolyhedralCone>(v0_) && n_ == 2);
    require(v0Ok, "cut-off plateau cone must be circular (or polyhedral for n = 2)");
    outerAxis_ = o->axis().vec();
    const double beta = o->half_angle();
    // Widest direction of V0 measured from the outer axis.
    double reach = 0.0;
    if (const auto* c = std::get_if<CircularCone>(&v0_)) {
      require(!c->is_whole_space(), "plateau cone is the whole space but the outer cone is not");
      reach = angle_between(c->axis(), o->axis()) + c->half_angle();
    } else {
      for (const auto& g : std::get<PolyhedralCone>(v0_).generators())
        reach = std::max(reach, angle_between(g, o->axis()));
      // Conic hull between generators stays within the widest generator for n = 2 arcs < pi.
    }
    if (!(reach < beta - 1e-12)) throw ConfigError("cut-off: V0 \\ {0} is not contained in Vouter");
    // Sampled containment check of V0 \ {0} in Vouter.
    for (int k = 0; k < 10000; ++k) {
      std::vector<double> w;
      if (n_ == 2) {
        const double a = 2.0 * kPi * k / 10000.0;
        w = {std::cos(a), std::sin(a)};
      } else {
        const double z = 1.0 - 2.0 * (k + 0.5) / 10000.0, ph = k * kPi * (3.0 - std::sqrt(5.0));
        const double s = std::sqrt(1.0 - z * z);
        w = {s * std::cos(ph), s * std::sin(ph), z};
        if (n_ > 3) throw UnsupportedSpaceError("cut-off construction supports n <= 3");
      }
      if (cone_contains(v0_, w, true) && !cone_contains(vOuter_, w, true))
        throw ConfigError("cut-off: V0 \\ {0} is not contained in Vouter");
    }
    const double zero = std::max(0.95 * beta, 0.5 * (reach + beta));
    cosZero_ = std::cos(std::min(zero, beta));
  }

  ConeSpec v0_, vOuter_;
  double R_, c0_;
  std::size_t n_;
  bool outerWhole_ = false;
  std::vector<double> outerAxis_;
  double cosZero_ = -1.0;
};

inline SmoothCutoff make_smooth_cutoff(ConeSpec v0, ConeSpec vOuter, double R, double c0) {
  return SmoothCutoff(std::move(v0), std::move(vOuter), R, c0);
}

// Pointwise product of cut-offs.
struct CutoffProduct {
  std::vector<SmoothCutoff> factors;
  double operator()(std::span<const double> xi) const {
    double v = 1.0;
    for (const auto& f : factors) v *= f(xi);
    return v;
  }
};

// Angular window on S^{n-1}: 1 within 0.4 of the half-aperture of V'', cos^2 bridge to 0 at 0.9.
struct AngularWindow {
  UnitVector axis;
  double halfAperture;

  static constexpr double kPlateau = 0.4;
  static constexpr double kEdge = 0.9;

  double of_angle(double alpha) const {
    const double u = alpha / halfAperture;
    if (u <= kPlateau) return 1.0;
    if (u >= kEdge) return 0.0;
    const double c = std::cos(0.5 * kPi * smooth_step((u - kPlateau) / (kEdge - kPlateau)));
    return c * c;
  }

  double operator()(std::span<const double> w) const { return of_angle(angle_between(axis.coords(), w)); }

  // L1 norm over S^{n-1}.
  double l1_norm() const {
    const std::size_t n = axis.size();
    const double a0 = kPlateau * halfAperture, a1 = kEdge * halfAperture;
    auto f = [&](double a) { return of_angle(a) * (n == 3 ? std::sin(a) : 1.0); };
    double bridge = quad::adaptive(f, a0, a1, 1e-12);
    if (n == 2) return 2.0 * (a0 + bridge);
    require(n == 3, "angular window norm supports n in {2, 3}");
    return 2.0 * kPi * ((1.0 - std::cos(a0)) + bridge);
  }
};

// chi_l(xi) = chi~(xi/|xi|) theta_l(|xi|).
struct TestFunction {
  AngularWindow angular;
  BumpSpec radial;
  double r, s;
  long l;

  double operator()(std::span<const double> xi) const {
    const double len = norm(xi);
    const double th = radial(len);
    if (th == 0.0) return 0.0;
    return angular(xi) * th;
  }
};

inline TestFunction make_test_sequence(const UnitVector& axis, const CircularCone& vDoublePrime, double r,
                                       double s, long l) {
  require(s > 1.0, "test sequence needs s > 1");
  require(r > 0.0, "test sequence needs r > 0");
  require(static_cast<double>(l) >= 2.0 * s + 1.0, "test sequence needs l >= 2s + 1");
  require(axis.size() == vDoublePrime.dim(), "axis and V'' dimensions differ");
  require(vDoublePrime.half_angle() > 0.0 && vDoublePrime.half_angle() < kPi / 2,
          "V'' half-aperture must lie in (0, pi/2)");
  require(angle_between(axis, vDoublePrime.axis()) < 1e-12, "test sequence axis must be the axis of V''");
  const double L = static_cast<double>(l), q = r + 1.0;
  return {AngularWindow{axis, vDoublePrime.half_angle()},
          make_bump(1.0 / (2.0 * L * q), 1.0 / (L * q), 1.0 / (2.0 * s * q), 1.0 / (s * q)), r, s, l};
}

// ---------------------------------------------------------------------------------------
// Mikhlin seminorm estimates by central differences on a log-polar grid.

struct MikhlinGrid {
  std::size_t radial = 128;
  std::size_t angular = 720;
  double relStep = 1e-4;
};

namespace detail {

// Mixed central difference for the multi-index (k0, k1) (n = 2) or k0 (n = 1).
template <class Sym>
double central_difference(const Sym& sym, std::span<const double> x, std::size_t k0, std::size_t k1, double h) {
  const std::size_t n = x.size();
  double sum = 0.0;
  const std::size_t m0 = k0 + 1, m1 = (n == 2) ? k1 + 1 : 1;
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < m0; ++i)
    for (std::size_t j = 0; j < m1; ++j) {
      // Binomial weights of the k-fold central difference with offsets (k - 2i) h.
      double c = std::tgamma(static_cast<double>(k0) + 1) /
                 (std::tgamma(static_cast<double>(i) + 1) * std::tgamma(static_cast<double>(k0 - i) + 1));
      if (i % 2 == 1) c = -c;
      p[0] = x[0] + (static_cast<double>(k0) - 2.0 * static_cast<double>(i)) * h;
      if (n == 2) {
        double c1 = std::tgamma(static_cast<double>(k1) + 1) /
                    (std::tgamma(static_cast<double>(j) + 1) * std::tgamma(static_cast<double>(k1 - j) + 1));
        if (j % 2 == 1) c1 = -c1;
        c *= c1;
        p[1] = x[1] + (static_cast<double>(k1) - 2.0 * static_cast<double>(j)) * h;
      }
      sum += c * sym(std::span<const double>(p));
    }
  return sum / std::pow(2.0 * h, static_cast<double>(k0 + k1));
}

}  // namespace detail

// For each order |alpha| <= maxOrder: max over the grid of <xi>^|alpha| |d^alpha psi(xi)|.
// Grid: |xi| log-spaced on [R/4, 64R], `angular` directions (n = 2) or +-1 (n = 1);
// refinement level doubles both grid sizes and halves the difference step.
template <class Sym>
std::vector<double> mikhlin_seminorm_estimate(const Sym& sym, std::size_t n, double R, std::size_t maxOrder,
                                              const MikhlinGrid& grid = {}, unsigned level = 0) {
  require(maxOrder <= 3, "Mikhlin estimates support orders up to 3");
  require(n == 1 || n == 2, "Mikhlin estimates support n in {1, 2}");
  require(R > 0.0, "Mikhlin grid needs R > 0");
  const std::size_t nr = grid.radial << level;
  const std::size_t na = (n == 2) ? grid.angular << level : 2;
  const double scale = std::ldexp(1.0, -static_cast<int>(level));
  std::vector<double> out(maxOrder + 1, 0.0);
  const double lo = std::log(R / 4.0), hi = std::log(64.0 * R);
  for (std::size_t i = 0; i < nr; ++i) {
    const double rho = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nr - 1));
    const double bracket = std::sqrt(1.0 + rho * rho);
    const double h = grid.relStep * bracket * scale;
    for (std::size_t a = 0; a < na; ++a) {
      std::vector<double> x;
      if (n == 2) {
        const double ang = 2.0 * kPi * static_cast<double>(a) / static_cast<double>(na);
        x = {rho * std::cos(ang), rho * std::sin(ang)};
      } else {
        x = {a == 0 ? rho : -rho};
      }
      for (std::size_t k = 0; k <= maxOrder; ++k) {
        const std::size_t variants = (n == 2) ? k + 1 : 1;
        for (std::size_t v = 0; v < variants; ++v) {
          const double d = (k == 0) ? sym(std::span<const double>(x))
                                    : detail::central_difference(sym, x, k - v, v, h);
          out[k] = std::max(out[k], std::pow(bracket, static_cast<double>(k)) * std::abs(d));
        }
      }
    }
  }
  return out;
}

struct MikhlinReport {
  std::vector<std::vector<double>> levels;  // estimates per refinement level
  std::vector<double> relativeChange;       // per order, between the last two levels
  bool stable = true;
};

template <class Sym>
MikhlinReport mikhlin_refinement(const Sym& sym, std::size_t n, double R, std::size_t maxOrder, unsigned levels = 2,
                                 const MikhlinGrid& grid = {}) {
  require(levels >= 2, "refinement study needs at least two levels");
  MikhlinReport rep;
  for (unsigned l = 0; l < levels; ++l) rep.levels.push_back(mikhlin_seminorm_estimate(sym, n, R, maxOrder, grid, l));
  const auto& a = rep.levels[levels - 2];
  const auto& b = rep.levels[levels - 1];
  for (std::size_t k = 0; k <= maxOrder; ++k) {
    const double denom = std::max(std::abs(a[k]), 1e-300);
    const double change = (std::abs(b[k]) < 1e-8 && std::abs(a[k]) < 1e-8) ? 0.0 : std::abs(b[k] - a[k]) / denom;
    rep.relativeChange.push_back(change);
    if (change >= 0.05) rep.stable = false;
  }
  return rep;
}

}  // namespace conewave
