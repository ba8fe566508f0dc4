#pragma once

// Closed and open cones in R^n: circular cones, conic hulls of generators and
// intersections of half-spaces; dual cones, interior tests and the angular
// sup-inf parameters used by the divergence condition.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "conewave/error.hpp"
#include "conewave/linalg.hpp"

namespace conewave {

inline constexpr double kBoundaryTol = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// {x : x . axis >= cosHalf |x|}; `open` switches the inequality to strict.
class CircularCone {
 public:
  CircularCone(UnitVector axis, double cosHalf, bool open = false)
      : axis_(std::move(axis)), cosHalf_(cosHalf), open_(open) {
    require(cosHalf_ > -1.0 && cosHalf_ <= 1.0,
            "circular cone cosHalf must lie in (-1, 1]; use whole_space() for R^n");
  }

  static CircularCone from_half_angle(UnitVector axis, double halfAngle, bool open = false) {
    require(halfAngle >= 0.0 && halfAngle < kPi, "half-aperture must lie in [0, pi)");
    return CircularCone(std::move(axis), std::cos(halfAngle), open);
  }

  static CircularCone whole_space(std::size_t n) {
    CircularCone c(UnitVector::basis(n, 0), 0.0, false);
    c.cosHalf_ = -1.0;
    c.whole_ = true;
    return c;
  }

  std::size_t dim() const { return axis_.size(); }
  const UnitVector& axis() const { return axis_; }
  double cos_half() const { return cosHalf_; }
  double half_angle() const { return whole_ ? kPi : std::acos(std::clamp(cosHalf_, -1.0, 1.0)); }
  bool is_open() const { return open_; }
  bool is_whole_space() const { return whole_; }

  CircularCone as_open() const {
    CircularCone c = *this;
    c.open_ = true;
    return c;
  }
  CircularCone as_closed() const {
    CircularCone c = *this;
    c.open_ = false;
    return c;
  }

  bool contains(std::span<const double> x, bool closure = false) const {
    require(x.size() == dim(), "dimension mismatch in cone membership");
    const double len = norm(x);
    if (whole_) return true;
    if (len == 0.0) return !open_ || closure;
    const double lhs = dot(x, axis_.coords()) - cosHalf_ * len;
    if (open_ && !closure) return lhs > kBoundaryTol * len;
    return lhs >= -kBoundaryTol * len;
  }

 private:
  UnitVector axis_;
  double cosHalf_;
  bool open_;
  bool whole_ = false;
};

// The degenerate cone {0}.
struct ZeroCone {
  std::size_t n = 1;
  std::size_t dim() const { return n; }
  bool contains(std::span<const double> x, bool = false) const {
    require(x.size() == n, "dimension mismatch in cone membership");
    return norm(x) <= kBoundaryTol;
  }
};

namespace detail {

// Lawson-Hanson non-negative least squares: min |A x - b| subject to x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 1e-12 * std::max(1.0, A.norm()) * std::max(1.0, b.norm());
  for (int outer = 0; outer < 3 * m + 10; ++outer) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    Eigen::Index best = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < m; ++j)
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;
    for (int inner = 0; inner < 3 * m + 10; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[j]) idx.push_back(j);
      Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
      const Eigen::VectorXd sp = Ap.colPivHouseholderQr().solve(b);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
      for (std::size_t k = 0; k < idx.size(); ++k) s[idx[k]] = sp[static_cast<Eigen::Index>(k)];
      bool allPositive = true;
      for (auto j : idx)
        if (s[j] <= 0.0) allPositive = false;
      if (allPositive) {
        x = s;
        break;
      }
      double alpha = 1.0;
      for (auto j : idx)
        if (s[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - s[j]));
      x += alpha * (s - x);
      for (auto j : idx)
        if (x[j] <= 1e-15) {
          passive[j] = false;
          x[j] = 0.0;
        }
    }
  }
  return x;
}

inline Eigen::MatrixXd columns(const std::vector<UnitVector>& vs) {
  const auto n = static_cast<Eigen::Index>(vs.front().size());
  Eigen::MatrixXd G(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, static_cast<Eigen::Index>(j)) = vs[j][static_cast<std::size_t>(i)];
  return G;
}

// Minimum-norm point of the convex hull of the given directions.
inline std::vector<double> min_norm_hull_point(const std::vector<UnitVector>& vs) {
  const Eigen::MatrixXd G = columns(vs);
  const double rho = 1e4;
  Eigen::MatrixXd A(G.rows() + 1, G.cols());
  A.topRows(G.rows()) = G;
  A.row(G.rows()).setConstant(rho);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(G.rows() + 1);
  b[G.rows()] = rho;
  Eigen::VectorXd lambda = nnls(A, b);
  const double total = lambda.sum();
  if (total > 0) lambda /= total;
  const Eigen::VectorXd p = G * lambda;
  return {p.data(), p.data() + p.size()};
}

inline void check_same_dim(const std::vector<UnitVector>& vs, std::size_t n) {
  for (const auto& v : vs) require(v.size() == n, "dimension mismatch among cone vectors");
}

}  // namespace detail

// Conic hull of finitely many generators (closed).
class PolyhedralCone {
 public:
  explicit PolyhedralCone(std::vector<UnitVector> generators) : gens_(std::move(generators)) {
    require(!gens_.empty(), "polyhedral cone needs at least one generator");
    detail::check_same_dim(gens_, gens_.front().size());
  }

  std::size_t dim() const { return gens_.front().size(); }
  const std::vector<UnitVector>& generators() const { return gens_; }

  bool contains(std::span<const double> x, bool = false) const {
    require(x.size() == dim(), "dimension mismatch in cone membership");
    const double len = norm(x);
    if (len == 0.0) return true;
    const Eigen::MatrixXd G = detail::columns(gens_);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) b[static_cast<Eigen::Index>(i)] = x[i] / len;
    const Eigen::VectorXd lambda = detail::nnls(G, b);
    return (G * lambda - b).norm() <= 1e-10;
  }

 private:
  std::vector<UnitVector> gens_;
};

// {x : x . g >= 0 for every normal g}; no normals means all of R^n.
class HalfspaceCone {
 public:
  HalfspaceCone(std::size_t n, std::vector<UnitVector> normals) : n_(n), normals_(std::move(normals)) {
    require(n_ >= 1 && n_ <= kMaxDim, "cone dimension must lie in [1, 8]");
    detail::check_same_dim(normals_, n_);
  }

  std::size_t dim() const { return n_; }
  const std::vector<UnitVector>& normals() const { return normals_; }

  bool contains(std::span<const double> x, bool = false) const {
    require(x.size() == n_, "dimension mismatch in cone membership");
    const double len = norm(x);
    for (const auto& g : normals_)
      if (dot(x, g.coords()) < -kBoundaryTol * len) return false;
    return true;
  }

 private:
  std::size_t n_;
  std::vector<UnitVector> normals_;
};

using ConeSpec = std::variant<CircularCone, PolyhedralCone, HalfspaceCone, ZeroCone>;

inline std::size_t cone_dim(const ConeSpec& c) {
  return std::visit([](const auto& k) { return k.dim(); }, c);
}

// Membership; `closure` evaluates open cones as their closure.
inline bool cone_contains(const ConeSpec& c, std::span<const double> x, bool closure = false) {
  return std::visit([&](const auto& k) { return k.contains(x, closure); }, c);
}

inline bool cone_contains(const ConeSpec& c, const UnitVector& x, bool closure = false) {
  return cone_contains(c, x.coords(), closure);
}

inline ConeSpec dual_cone(const ConeSpec& cone) {
  struct Visitor {
    ConeSpec operator()(const CircularCone& c) const {
      if (c.is_whole_space()) return ZeroCone{c.dim()};
      if (c.dim() == 1) return CircularCone(c.axis(), 1.0);
      if (c.cos_half() < 0.0) return ZeroCone{c.dim()};
      const double ch = c.cos_half();
      return CircularCone(c.axis(), std::sqrt(std::max(0.0, 1.0 - ch * ch)));
    }
    ConeSpec operator()(const PolyhedralCone& c) const { return HalfspaceCone(c.dim(), c.generators()); }
    ConeSpec operator()(const HalfspaceCone& c) const {
      if (c.normals().empty()) return ZeroCone{c.dim()};
      return PolyhedralCone(c.normals());
    }
    ConeSpec operator()(const ZeroCone& c) const { return HalfspaceCone(c.dim(), {}); }
  };
  return std::visit(Visitor{}, cone);
}

inline bool interior_nonempty(const ConeSpec& cone) {
  struct Visitor {
    bool operator()(const CircularCone& c) const {
      if (c.is_whole_space() || c.dim() == 1) return true;
      return c.cos_half() < 1.0;
    }
    bool operator()(const PolyhedralCone& c) const {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(detail::columns(c.generators()));
      lu.setThreshold(1e-10);
      return static_cast<std::size_t>(lu.rank()) == c.dim();
    }
    bool operator()(const HalfspaceCone& c) const {
      if (c.normals().empty()) return true;
      // Gordan: strictly feasible iff 0 is not in the convex hull of the normals.
      const auto p = detail::min_norm_hull_point(c.normals());
      const double len = norm(p);
      if (len < 1e-9) return false;
      for (const auto& g : c.normals())
        if (dot(p, g.coords()) <= 1e-12) return false;
      return true;
    }
    bool operator()(const ZeroCone&) const { return false; }
  };
  return std::visit(Visitor{}, cone);
}

// Generators of the dual of a planar polyhedral cone (angle sorting). Empty when the dual
// is {0}.
inline std::vector<UnitVector> dual_generators_2d(const PolyhedralCone& cone) {
  require(cone.dim() == 2, "dual generator recovery is only available for n = 2");
  std::vector<double> ang;
  for (const auto& g : cone.generators()) ang.push_back(planar_angle(g[0], g[1]));
  std::sort(ang.begin(), ang.end());
  double maxGap = -1.0;
  std::size_t after = 0;
  for (std::size_t i = 0; i < ang.size(); ++i) {
    const double next = (i + 1 < ang.size()) ? ang[i + 1] : ang[0] + 2.0 * kPi;
    if (next - ang[i] > maxGap) {
      maxGap = next - ang[i];
      after = (i + 1) % ang.size();
    }
  }
  const double width = 2.0 * kPi - maxGap;
  if (ang.size() == 1) {
    return {UnitVector::from_angle(ang[0] - kPi / 2), UnitVector::from_angle(ang[0] + kPi / 2)};
  }
  if (width > kPi + 1e-12) return {};
  const double start = ang[after];
  const double end = start + width;
  return {UnitVector::from_angle(end - kPi / 2), UnitVector::from_angle(start + kPi / 2)};
}

// A subset of the sphere given as finite samples and/or closed caps, supporting the
// infimum of omega . omega' over the set.
struct DirectionSet {
  std::vector<UnitVector> points;
  std::vector<CircularCone> caps;

  bool empty() const { return points.empty() && caps.empty(); }

  double min_dot(std::span<const double> w) const {
    double m = kInfinity;
    for (const auto& p : points) m = std::min(m, dot(p.coords(), w));
    for (const auto& c : caps) {
      if (c.is_whole_space()) return -1.0;
      m = std::min(m, std::cos(std::min(kPi, angle_between(c.axis().coords(), w) + c.half_angle())));
    }
    return m;
  }
};

struct SearchOptions {
  double gridStepDeg = 0.5;
  double refineTol = 1e-8;
  std::size_t candidates = 4;
};

namespace detail {

template <class F>
double golden_max(F&& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max({fc, fd, f(0.5 * (a + b))});
}

// Boundary of a feasible arc between a feasible and an infeasible angle.
template <class Feasible>
double bisect_feasible(Feasible&& feasible, double in, double out) {
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (in + out);
    if (feasible(mid)) in = mid;
    else out = mid;
  }
  return in;
}

}  // namespace detail

// sup of a continuous objective over S^{n-1} intersected with the closure of `domain`:
// uniform angular grid followed by local refinement (golden section for n = 2, shrinking
// pattern search for n = 3). Returns -inf when no grid direction is feasible.
template <class F>
double sup_on_section(F&& f, const ConeSpec& domain, const SearchOptions& opt = {},
                      const std::vector<UnitVector>& extra = {}) {
  const std::size_t n = cone_dim(domain);
  double best = -kInfinity;
  for (const auto& e : extra)
    if (cone_contains(domain, e, true)) best = std::max(best, f(e.coords()));
  if (n == 1) {
    for (double s : {1.0, -1.0}) {
      const std::vector<double> v{s};
      if (cone_contains(domain, v, true)) best = std::max(best, f(std::span<const double>(v)));
    }
    return best;
  }
  const double step = opt.gridStepDeg * kDegree;
  if (n == 2) {
    const auto count = static_cast<std::size_t>(std::ceil(2.0 * kPi / step));
    const double h = 2.0 * kPi / static_cast<double>(count);
    auto feasible = [&](double phi) {
      const std::vector<double> v{std::cos(phi), std::sin(phi)};
      return cone_contains(domain, v, true);
    };
    auto value = [&](double phi) {
      const std::vector<double> v{std::cos(phi), std::sin(phi)};
      return f(std::span<const double>(v));
    };
    std::vector<double> vals(count, -kInfinity);
    std::vector<bool> ok(count, false);
    for (std::size_t k = 0; k < count; ++k) {
      ok[k] = feasible(k * h);
      if (ok[k]) vals[k] = value(k * h);
    }
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < count; ++k)
      if (ok[k]) order.push_back(k);
    if (order.empty()) return best;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] > vals[b]; });
    std::vector<std::size_t> picked;
    for (auto k : order) {
      bool far = true;
      for (auto p : picked) {
        const auto d = std::min((k + count - p) % count, (p + count - k) % count);
        if (d <= 2) far = false;
      }
      if (far) picked.push_back(k);
      if (picked.size() >= opt.candidates) break;
    }
    for (auto k : picked) {
      best = std::max(best, vals[k]);
      const double phi = k * h;
      double lo = phi - h, hi = phi + h;
      if (!feasible(lo)) lo = detail::bisect_feasible(feasible, phi, lo);
      if (!feasible(hi)) hi = detail::bisect_feasible(feasible, phi, hi);
      best = std::max(best, detail::golden_max(value, lo, hi, opt.refineTol));
    }
    return best;
  }
  require(n == 3, "sphere search supports n <= 3");
  const auto nt = static_cast<std::size_t>(std::ceil(kPi / step));
  const auto np = static_cast<std::size_t>(std::ceil(2.0 * kPi / step));
  const double ht = kPi / static_cast<double>(nt), hp = 2.0 * kPi / static_cast<double>(np);
  struct Cand {
    double v;
    std::vector<double> w;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i <= nt; ++i) {
    const double th = i * ht;
    const std::size_t jn = (i == 0 || i == nt) ? 1 : np;
    for (std::size_t j = 0; j < jn; ++j) {
      const double ph = j * hp;
      std::vector<double> w{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      if (!cone_contains(domain, w, true)) continue;
      const double v = f(std::span<const double>(w));
      cands.push_back({v, std::move(w)});
    }
  }
  if (cands.empty()) return best;
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
  std::vector<Cand> picked;
  for (auto& c : cands) {
    bool far = true;
    for (const auto& p : picked)
      if (angle_between(c.w, p.w) < 3.0 * step) far = false;
    if (far) picked.push_back(c);
    if (picked.size() >= opt.candidates) break;
  }
  for (auto& c : picked) {
    std::vector<double> w = c.w;
    double v = c.v;
    double s = step;
    while (s > opt.refineTol) {
      // Orthonormal tangent frame at w.
      std::vector<double> t1 = std::abs(w[2]) < 0.9 ? std::vector<double>{-w[1], w[0], 0.0}
                                                      : std::vector<double>{0.0, -w[2], w[1]};
      const double l1 = norm(t1);
      for (double& x : t1) x /= l1;
      const std::vector<double> t2{w[1] * t1[2] - w[2] * t1[1], w[2] * t1[0] - w[0] * t1[2],
                                   w[0] * t1[1] - w[1] * t1[0]};
      bool improved = false;
      for (int k = 0; k < 16; ++k) {
        const double a = 2.0 * kPi * k / 16.0;
        std::vector<double> q(3);
        for (int i = 0; i < 3; ++i) q[i] = w[i] + s * (std::cos(a) * t1[i] + std::sin(a) * t2[i]);
        const double lq = norm(q);
        for (double& x : q) x /= lq;
        if (!cone_contains(domain, q, true)) continue;
        const double vq = f(std::span<const double>(q));
        if (vq > v) {
          v = vq;
          w = q;
          improved = true;
        }
      }
      if (!improved) s *= 0.5;
    }
    best = std::max(best, v);
  }
  return best;
}

// kappa_0: sup over omega' in S^{n-1} cap V' of inf over supp(phi_-) of omega . omega'.
// +inf when the negative support is empty.
inline double kappa0(const DirectionSet& suppNeg, const ConeSpec& vPrime, const SearchOptions& opt = {}) {
  if (suppNeg.empty()) return kInfinity;
  require(interior_nonempty(vPrime), "kappa0: V' has empty interior");
  std::vector<UnitVector> extra;
  if (suppNeg.caps.empty() && cone_dim(vPrime) > 1) {
    const auto p = detail::min_norm_hull_point(suppNeg.points);
    if (norm(p) > 1e-9) extra.push_back(UnitVector::normalized(p));
  }
  return sup_on_section([&](std::span<const double> w) { return suppNeg.min_dot(w); }, vPrime, opt,
                        extra);
}

namespace detail {

// Directions of the closed circular cone: axis, boundary ring and intermediate rings.
inline std::vector<UnitVector> sample_circular(const CircularCone& c, std::size_t count) {
  const std::size_t n = c.dim();
  const double th = c.half_angle();
  std::vector<UnitVector> out;
  if (n == 2) {
    const double a0 = planar_angle(c.axis()[0], c.axis()[1]);
    for (std::size_t k = 0; k < count; ++k) {
      const double t = -th + 2.0 * th * static_cast<double>(k) / static_cast<double>(count - 1);
      out.push_back(UnitVector::from_angle(a0 + t));
    }
    return out;
  }
  require(n == 3, "cone sampling supports n in {2, 3}");
  const auto& a = c.axis();
  std::vector<double> t1 = std::abs(a[2]) < 0.9 ? std::vector<double>{-a[1], a[0], 0.0}
                                                  : std::vector<double>{0.0, -a[2], a[1]};
  const double l1 = norm(t1);
  for (double& x : t1) x /= l1;
  const std::vector<double> t2{a[1] * t1[2] - a[2] * t1[1], a[2] * t1[0] - a[0] * t1[2],
                               a[0] * t1[1] - a[1] * t1[0]};
  const std::size_t rings = 10, per = std::max<std::size_t>(8, count / rings);
  out.push_back(a);
  for (std::size_t r = 1; r <= rings; ++r) {
    const double beta = th * static_cast<double>(r) / static_cast<double>(rings);
    for (std::size_t k = 0; k < per; ++k) {
      const double g = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(per);
      std::vector<double> v(3);
      for (int i = 0; i < 3; ++i)
        v[i] = std::cos(beta) * a[i] + std::sin(beta) * (std::cos(g) * t1[i] + std::sin(g) * t2[i]);
      out.push_back(UnitVector::normalized(v));
    }
  }
  return out;
}

}  // namespace detail

// kappa_0': inf over the closed cone V'' of inf over supp(phi_-); 1 when supp(phi_-) is empty.
// When `vPrime` is given, closure(V'') \ {0} must lie in V' (checked on 10^4 directions).
inline double kappa0_prime(const DirectionSet& suppNeg, const CircularCone& vDoublePrime,
                           const ConeSpec* vPrime = nullptr) {
  const std::size_t n = vDoublePrime.dim();
  require(n >= 2, "kappa0_prime needs n >= 2");
  if (vPrime != nullptr) {
    require(cone_dim(*vPrime) == n, "dimension mismatch between V'' and V'");
    for (const auto& d : detail::sample_circular(vDoublePrime.as_closed(), 10000))
      if (!cone_contains(*vPrime, d)) throw ConfigError("kappa0_prime: closure of V'' is not inside V'");
  }
  if (suppNeg.empty()) return 1.0;
  const auto& ax = vDoublePrime.axis();
  const double th = vDoublePrime.half_angle();
  double m = kInfinity;
  for (const auto& p : suppNeg.points) m = std::min(m, std::cos(std::min(kPi, angle_between(p, ax) + th)));
  for (const auto& c : suppNeg.caps)
    m = std::min(m, std::cos(std::min(kPi, angle_between(c.axis(), ax) + c.half_angle() + th)));
  return m;
}

// Directions covering S^{n-1} cap V for the infimum in kappa_V.
inline DirectionSet section_of(const ConeSpec& v) {
  struct Visitor {
    DirectionSet operator()(const CircularCone& c) const { return {{}, {c.as_closed()}}; }
    DirectionSet operator()(const PolyhedralCone& c) const { return {c.generators(), {}}; }
    DirectionSet operator()(const HalfspaceCone& c) const {
      DirectionSet s;
      const std::size_t n = c.dim();
      if (n == 2) {
        for (int k = 0; k < 1440; ++k) {
          auto d = UnitVector::from_angle(2.0 * kPi * k / 1440.0);
          if (c.contains(d.coords())) s.points.push_back(d);
        }
      } else {
        require(n == 3, "half-space cone sampling supports n in {2, 3}");
        for (int i = 0; i <= 180; ++i)
          for (int j = 0; j < 360; ++j) {
            auto d = UnitVector::from_spherical(i * kDegree, j * kDegree);
            if (c.contains(d.coords())) s.points.push_back(d);
          }
      }
      return s;
    }
    DirectionSet operator()(const ZeroCone&) const { return {}; }
  };
  return std::visit(Visitor{}, v);
}

// kappa_V: sup over omega' in S^{n-1} cap V' of inf over omega in S^{n-1} cap V.
inline double kappaV(const ConeSpec& v, const ConeSpec& vPrime, const SearchOptions& opt = {}) {
  require(cone_dim(v) == cone_dim(vPrime), "dimension mismatch between V and V'");
  const DirectionSet section = section_of(v);
  require(!section.empty(), "kappaV: V \\ {0} is empty");
  require(interior_nonempty(vPrime), "kappaV: V' has empty interior");
  return sup_on_section([&](std::span<const double> w) { return section.min_dot(w); }, vPrime, opt);
}

}  // namespace conewave
