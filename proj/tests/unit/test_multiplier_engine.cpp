#include <gtest/gtest.h>

#include <random>

#include "conewave/multiplier_engine.hpp"

using namespace conewave;

namespace {

double max_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double l2(const GridField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.cell());
}

GridField random_field(std::size_t n, std::size_t N, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  GridField f{n, 10.0, N, {}};
  f.values.resize(f.total());
  for (auto& v : f.values) v = cplx(g(rng), g(rng));
  return f;
}

// (i/L) pv int_{-1}^{1} cot(pi (x - y)/L) dy: the 1/(x - y) part exactly, the remainder by quadrature.
double periodic_hilbert_oracle(double x, double L) {
  auto reg = [&](double y) {
    const double z = kPi * (x - y) / L;
    return std::abs(z) < 1e-8 ? -z / 3.0 : 1.0 / std::tan(z) - 1.0 / z;
  };
  const double smooth = quad::adaptive(reg, -1.0, 1.0, 1e-11);
  return (smooth + (L / kPi) * std::log(std::abs((x + 1.0) / (x - 1.0)))) / L;
}

}  // namespace

TEST(Dft, GaussianMatchesAnalyticTransform) {
  const auto f = GridField::sample(1, 40.0, 4096, [](std::span<const double> x) { return cplx(std::exp(-0.5 * x[0] * x[0])); });
  const auto F = dft_forward(f);
  double err = 0.0;
  for (std::size_t m = 0; m < F.N; ++m) {
    const double xi = F.freq(m);
    if (std::abs(xi) > 8.0) continue;
    err = std::max(err, std::abs(F.values[m] - std::sqrt(2.0 * kPi) * std::exp(-0.5 * xi * xi)));
  }
  EXPECT_LT(err, 1e-8);
}

TEST(Dft, ConstantConcentratesAtZero) {
  const auto F = dft_forward(GridField::sample(2, 4.0, 16, [](std::span<const double>) { return cplx(3.0); }));
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = 0; b < 16; ++b) {
      const auto v = F.values[a * 16 + b];
      if (a == 8 && b == 8) {
        EXPECT_NEAR(v.real(), 3.0 * 16.0, 1e-12);
      } else {
        EXPECT_LT(std::abs(v), 1e-12);
      }
    }
}

TEST(Dft, RoundTrip) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u}) {
    const auto f = random_field(n, 64, rng);
    const auto back = dft_inverse(dft_forward(f));
    EXPECT_LT(max_diff(f, back), 1e-12 * 10.0);
  }
  GridField bad{1, 1.0, 12, std::vector<cplx>(12)};
  EXPECT_THROW(dft_forward(bad), ConfigError);
}

TEST(Multiplier, IdentityAndShift) {
  std::mt19937_64 rng(4);
  const auto f = random_field(1, 256, rng);
  EXPECT_LT(max_diff(apply_multiplier([](std::span<const double>) { return cplx(1.0); }, f), f), 1e-12);
  const double a = 5.0 * f.h();
  const auto shifted = apply_multiplier([a](std::span<const double> xi) { return std::exp(cplx(0.0, -a * xi[0])); }, f);
  const std::array<long, 1> s{5};
  EXPECT_LT(max_diff(shifted, translate(f, s)), 1e-12);
}

TEST(Multiplier, HilbertPairAgainstPeriodicOracle) {
  const double L = 16.0;
  const auto out = apply_multiplier(sign_symbol(), GridField::sample(1, L, 1 << 14, box_indicator({1.0})));
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, out.N - 1);
  int checked = 0;
  while (checked < 50) {
    const std::size_t k = pick(rng);
    const double x = out.coord(k);
    if (std::abs(x) > 4.0 || std::abs(std::abs(x) - 1.0) < 0.1) continue;
    const double oracle = periodic_hilbert_oracle(x, L);
    const double closed = -std::log(std::abs(std::sin(kPi * (x - 1) / L) / std::sin(kPi * (x + 1) / L))) / kPi;
    EXPECT_NEAR(oracle, closed, 1e-10);
    EXPECT_LT(std::abs(out.values[k] - cplx(0.0, oracle)), 1e-3) << "x=" << x;
    ++checked;
  }
}

TEST(Multiplier, PlancherelBound) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 2;
    const auto f = random_field(n, n == 1 ? 128 : 32, rng);
    const double c = u(rng), w = 1.0 + 3.0 * u(rng), ph = 6.0 * u(rng);
    const Symbol sym = [=](std::span<const double> xi) {
      return c * std::cos(w * xi[0]) * std::exp(cplx(0.0, ph * norm(xi)));
    };
    const double bound = symbol_max_on_grid(sym, f) * l2(f) + 1e-12;
    EXPECT_LE(l2(apply_multiplier(sym, f)), bound);
  }
}

TEST(Multiplier, RealEvenSymbolKeepsRealInputsReal) {
  std::mt19937_64 rng(2);
  auto f = random_field(2, 64, rng);
  for (auto& v : f.values) v = v.real();
  const auto out = apply_multiplier(control_symbol(3.0), f);
  for (const auto& v : out.values) EXPECT_LT(std::abs(v.imag()), 1e-10);
}

TEST(Multiplier, NonFiniteSymbolIsRejected) {
  std::mt19937_64 rng(2);
  const auto f = random_field(1, 16, rng);
  EXPECT_THROW(apply_multiplier([](std::span<const double> xi) { return cplx(1.0 / xi[0]); }, f), ConfigError);
}

TEST(LocalNorm, Examples) {
  const auto one = GridField::sample(1, 8.0, 256, [](std::span<const double>) { return cplx(1.0); });
  const double h = one.h();
  EXPECT_NEAR(local_norm(one, cube(1, -1.0, 1.0), 1.0), 2.0, h + 1e-12);
  std::mt19937_64 rng(1);
  auto f = random_field(2, 32, rng);
  double mx = 0.0;
  for (const auto& v : f.values) mx = std::max(mx, std::abs(v));
  EXPECT_DOUBLE_EQ(local_norm(f, cube(2, -5.0, 5.0), INFINITY), mx);
  auto g = f;
  for (auto& v : g.values) v *= -3.0;
  EXPECT_NEAR(local_norm(g, cube(2, -2, 1), 2.0), 3.0 * local_norm(f, cube(2, -2, 1), 2.0), 1e-12);
  EXPECT_THROW(local_norm(f, cube(2, 0.01, 0.02), 1.0), ConfigError);
  EXPECT_THROW(local_norm(f, cube(2, -6, 6), 1.0), ConfigError);
}

TEST(Measure, AtomsAndDensity) {
  std::mt19937_64 rng(6);
  const auto f = random_field(1, 128, rng);
  EXPECT_LT(max_diff(convolve_with_measure(f, MeasureSpec{{{{0.0}, 1.0}}, std::nullopt}), f), 1e-15);
  const std::array<long, 1> s{7};
  EXPECT_LT(max_diff(convolve_with_measure(f, MeasureSpec{{{{7 * f.h()}, 1.0}}, std::nullopt}), translate(f, s)), 1e-12);
  // Half-way atom averages two neighbouring shifts.
  const auto half = convolve_with_measure(f, MeasureSpec{{{{2.5 * f.h()}, 1.0}}, std::nullopt});
  const std::array<long, 1> s2{2}, s3{3};
  const auto a = translate(f, s2), b = translate(f, s3);
  for (std::size_t i = 0; i < f.N; ++i) EXPECT_NEAR(std::abs(half.values[i] - 0.5 * (a.values[i] + b.values[i])), 0.0, 1e-12);

  const auto dens = GridField::sample(1, f.L, f.N, [](std::span<const double> x) { return cplx(std::exp(-x[0] * x[0])); });
  const auto conv = convolve_with_measure(f, MeasureSpec{{}, dens});
  double err = 0.0;
  for (std::size_t k = 0; k < f.N; ++k) {
    cplx direct{};
    for (std::size_t j = 0; j < f.N; ++j) direct += f.values[(k + f.N + f.N / 2 - j) % f.N] * dens.values[j] * f.h();
    err = std::max(err, std::abs(direct - conv.values[k]));
  }
  EXPECT_LT(err, 1e-10);
  const MeasureSpec both{{{{3 * f.h()}, cplx(0.5, 1.0)}}, dens};
  const auto sum = convolve_with_measure(f, both);
  const auto parts = convolve_with_measure(f, MeasureSpec{{{{3 * f.h()}, cplx(0.5, 1.0)}}, std::nullopt});
  for (std::size_t i = 0; i < f.N; ++i) EXPECT_LT(std::abs(sum.values[i] - parts.values[i] - conv.values[i]), 1e-12);
  EXPECT_NEAR(both.total_variation(), std::abs(cplx(0.5, 1.0)) + std::sqrt(kPi), 1e-6);
}

TEST(Commutation, TranslationsCommute) {
  std::mt19937_64 rng(17);
  const auto f = random_field(1, 256, rng);
  const std::array<long, 1> s17{17}, s0{0};
  EXPECT_LE(translation_commutation_check(sign_symbol(), f, s17), 1e-10);
  EXPECT_EQ(translation_commutation_check(sign_symbol(), f, s0), 0.0);
  const auto g = random_field(2, 32, rng);
  const std::array<long, 2> s2{-5, 9};
  EXPECT_LE(translation_commutation_check(control_symbol(2.0), g, s2), 1e-10);
}

TEST(Blowup, HilbertLadderGrowsLikeLogN) {
  const auto rep = blowup_probe(sign_symbol(), 1, 16.0, box_indicator({1.0}), power_ladder(10, 16), cube(1, -2, 2), INFINITY);
  EXPECT_TRUE(rep.divergentTrend);
  EXPECT_NEAR(rep.fit.slope, 1.0 / kPi, 0.01);
}

TEST(Blowup, ControlSymbolStabilizes) {
  const auto rep = blowup_probe(control_symbol(4.0), 2, 8.0, box_indicator({0.5, 0.5}), power_ladder(7, 9), cube(2, -2, 2), 1.0);
  EXPECT_TRUE(rep.stabilizes);
}

TEST(Blowup, UnboundedL1InputGrowsUnderConeCutoff) {
  const auto e1 = UnitVector::basis(2, 0);
  const auto psi = make_smooth_cutoff(CircularCone::from_half_angle(e1, 10 * kDegree),
                                      CircularCone::from_half_angle(e1, 20 * kDegree, true), 1.0, 1.0);
  const double L = 8.0;
  const auto rep = blowup_probe_family(
      real_symbol(psi), 2, L, [&](std::size_t N) { return log_singular_input(L / static_cast<double>(N)); },
      power_ladder(7, 9), cube(2, -2, 2), 1.0);
  EXPECT_TRUE(rep.divergentTrend);
}
