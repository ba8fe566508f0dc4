#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "conewave/error.hpp"

namespace conewave::quad {

// Full Gauss-Legendre rule on [-1, 1] expanded from Boost's half tables.
template <std::size_t N>
struct GaussRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussRule() {
    using Rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    std::size_t k = 0;
    const std::size_t start = (N % 2 == 1) ? 1 : 0;
    if (N % 2 == 1) {
      nodes[k] = 0.0;
      weights[k++] = w[0];
    }
    for (std::size_t i = start; i < x.size(); ++i) {
      nodes[k] = -x[i];
      weights[k++] = w[i];
      nodes[k] = x[i];
      weights[k++] = w[i];
    }
  }

  static const GaussRule& get() {
    static const GaussRule rule;
    return rule;
  }
};

// Fixed-order Gauss-Legendre on [a, b]; works for real and complex integrands.
template <std::size_t N, class F>
auto gauss_panel(F&& f, double a, double b) {
  const auto& rule = GaussRule<N>::get();
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  using R = decltype(f(a));
  R sum{};
  for (std::size_t i = 0; i < N; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

// Composite Gauss-Legendre: each interval between consecutive breakpoints is split into
// `panels` equal panels.
template <std::size_t N, class F>
auto gauss_composite(F&& f, const std::vector<double>& breaks, std::size_t panels = 1) {
  using R = decltype(f(0.0));
  R sum{};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) sum += gauss_panel<N>(f, a + p * h, a + (p + 1) * h);
  }
  return sum;
}

// Adaptive Gauss-Kronrod (G15/K31) for real integrands; throws when the estimated error
// exceeds `absTol`.
template <class F>
double adaptive(F&& f, double a, double b, double absTol, unsigned maxDepth = 15) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  const double relTol = std::max(absTol / std::max(1.0, std::abs(b - a)), 1e-15);
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, maxDepth, relTol, &err);
  if (!std::isfinite(v) || err > absTol)
    throw NumericalError("adaptive quadrature on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "] missed tolerance: error estimate " +
                         std::to_string(err));
  return v;
}

// Adaptive quadrature over consecutive breakpoint intervals.
template <class F>
double adaptive_pieces(F&& f, std::vector<double> breaks, double absTol) {
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  const double per = absTol / std::max<std::size_t>(1, breaks.size());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) sum += adaptive(f, breaks[i], breaks[i + 1], per);
  return sum;
}

// Sorted unique breakpoints clipped to [lo, hi], always including both ends.
inline std::vector<double> clip_breaks(std::vector<double> pts, double lo, double hi,
                                       double tol = 1e-14) {
  pts.push_back(lo);
  pts.push_back(hi);
  std::vector<double> out;
  for (double p : pts)
    if (p >= lo && p <= hi && std::isfinite(p)) out.push_back(p);
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double p : out)
    if (uniq.empty() || p - uniq.back() > tol * std::max(1.0, std::abs(p))) uniq.push_back(p);
  if (uniq.back() < hi) uniq.back() = hi;
  return uniq;
}

// Least-squares line fit y = intercept + slope * x with coefficient of determination.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace conewave::quad
