#include <gtest/gtest.h>

#include <random>

#include "conewave/symbols.hpp"

using namespace conewave;

namespace {

CircularCone circ(double axisDeg, double halfDeg, bool open = false) {
  return CircularCone::from_half_angle(UnitVector::from_angle(axisDeg * kDegree), halfDeg * kDegree, open);
}

std::vector<double> polar(double rho, double deg) { return {rho * std::cos(deg * kDegree), rho * std::sin(deg * kDegree)}; }

}  // namespace

TEST(Bump, OrderingIsValidated) {
  EXPECT_THROW(make_bump(0, 0, 1, 2), ConfigError);
  EXPECT_THROW(make_bump(0, 2, 1, 3), ConfigError);
  EXPECT_NO_THROW(make_bump(0, 1, 1, 2));
}

TEST(Bump, PlateauSupportAndRange) {
  const auto b = make_bump(0.0, 0.25, 0.5, 1.0);
  EXPECT_EQ(b(0.375), 1.0);
  EXPECT_EQ(b(0.0), 0.0);
  EXPECT_EQ(b(1.0), 0.0);
  EXPECT_EQ(b(-3.0), 0.0);
  for (int i = 0; i <= 1000; ++i) {
    const double v = b(i / 1000.0);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_LE(quad::adaptive(b, 0.0, 1.0, 1e-10), 1.0);
}

TEST(Bump, SmoothToFourthOrder) {
  // Fourth differences stay bounded as the step shrinks, including near the glue points.
  const auto b = make_bump(0.0, 1.0, 2.0, 3.0);
  for (double x : {0.02, 0.5, 0.98, 1.0, 2.0, 2.5, 2.99}) {
    double prev = 0.0;
    for (double h : {1e-2, 5e-3}) {
      const double d4 = (b(x + 2 * h) - 4 * b(x + h) + 6 * b(x) - 4 * b(x - h) + b(x - 2 * h)) / std::pow(h, 4);
      if (prev != 0.0) {
        EXPECT_NEAR(d4, prev, 0.1 * std::abs(prev) + 2.0);
      }
      prev = d4;
    }
  }
}

TEST(Bump, OneDimensionalPvBump) {
  const int k = 8;
  const auto b = make_bump(0.0, 1.0 / k, 0.5, 1.0);
  EXPECT_EQ(b(0.3), 1.0);
}

TEST(HomogeneousSymbolTest, TruncationAndHomogeneity) {
  const HomogeneousSymbol psi(SphericalProfile::caps(2, {{UnitVector::from_angle(0), 20 * kDegree, 1.0}}), 1.0);
  EXPECT_EQ(psi(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_EQ(psi(polar(0.5, 0)), 0.0);
  EXPECT_EQ(psi(polar(2.0, 10)), 1.0);
  EXPECT_EQ(psi(polar(2.0, 30)), 0.0);
}

TEST(Cutoff, WholeSpaceIsRadial) {
  const auto psi = make_smooth_cutoff(CircularCone::whole_space(2), CircularCone::whole_space(2), 2.0, 3.0);
  EXPECT_EQ(psi(polar(2.5, 77)), 3.0);
  EXPECT_EQ(psi(polar(0.9, 77)), 0.0);
  const double mid = psi(polar(1.5, 12));
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 3.0);
}

TEST(Cutoff, PlateauAndSupportDefaults) {
  const double R = 1.0;
  const auto psi = make_smooth_cutoff(circ(0, 10), circ(0, 20, true), R, 1.0);
  EXPECT_EQ(psi(polar(2 * R, 0)), 1.0);
  EXPECT_EQ(psi(polar(2 * R, 10)), 1.0);
  EXPECT_EQ(psi(polar(2 * R, 30)), 0.0);
  EXPECT_EQ(psi(polar(2 * R, 19.5)), 0.0);
  EXPECT_GT(psi(polar(2 * R, 15)), 0.0);
}

TEST(Cutoff, ContainmentFailureIsRejected) {
  EXPECT_THROW(make_smooth_cutoff(circ(0, 25), circ(0, 20, true), 1.0, 1.0), ConfigError);
  EXPECT_THROW(make_smooth_cutoff(circ(0, 10), circ(0, 20, true), -1.0, 1.0), ConfigError);
}

TEST(Cutoff, HomogeneityAndRange) {
  const auto psi = make_smooth_cutoff(circ(30, 10), circ(35, 25, true), 1.5, 2.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double rho = 1.5 * (1.0 + 20 * u(rng)), ang = 360 * u(rng), lam = 1.0 + 10 * u(rng);
    const auto x = polar(rho, ang), y = polar(lam * rho, ang);
    EXPECT_NEAR(psi(x), psi(y), 1e-12);
    EXPECT_GE(psi(x), 0.0);
    EXPECT_LE(psi(x), 2.0);
  }
  EXPECT_NEAR(psi(polar(3.0, 30)), psi(polar(2.0, 30)), 1e-12);
}

TEST(Cutoff, PolyhedralPlateau) {
  PolyhedralCone v0({UnitVector::from_angle(-5 * kDegree), UnitVector::from_angle(5 * kDegree)});
  const auto psi = make_smooth_cutoff(v0, circ(0, 20, true), 1.0, 1.0);
  EXPECT_EQ(psi(polar(3.0, 4.9)), 1.0);
  EXPECT_EQ(psi(polar(3.0, 25)), 0.0);
}

TEST(Cutoff, ThreeDimensional) {
  const auto ax = UnitVector::basis(3, 2);
  const auto psi = make_smooth_cutoff(CircularCone::from_half_angle(ax, 0.2),
                                      CircularCone::from_half_angle(ax, 0.5, true), 1.0, 1.0);
  EXPECT_EQ(psi(std::vector<double>{0.0, 0.0, 4.0}), 1.0);
  EXPECT_EQ(psi(std::vector<double>{4.0, 0.0, 0.0}), 0.0);
}

TEST(Cutoff, ProductIsCutoffForIntersection) {
  const auto a = make_smooth_cutoff(circ(0, 10), circ(0, 30, true), 1.0, 1.0);
  const auto b = make_smooth_cutoff(circ(10, 10), circ(10, 30, true), 2.0, 1.0);
  const CutoffProduct prod{{a, b}};
  // Plateau on the intersection of the inner cones (angles 0..10), away from the larger radius.
  for (double ang = 0.0; ang <= 10.0; ang += 0.5) EXPECT_EQ(prod(polar(4.0, ang)), 1.0);
  // Supported in the intersection of the outer cones.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto x = polar(5 * u(rng), 360 * u(rng));
    if (prod(x) > 0.0) {
      EXPECT_TRUE(cone_contains(circ(0, 30, true), x));
      EXPECT_TRUE(cone_contains(circ(10, 30, true), x));
    }
    const auto y = polar(2.0 + 5 * u(rng), 360 * u(rng));
    std::vector<double> y2{3 * y[0], 3 * y[1]};
    EXPECT_NEAR(prod(y), prod(y2), 1e-12);
  }
}

TEST(TestSequence, SupportPlateauAndScaling) {
  const auto vpp = circ(0, 30);
  const double r = 1.0, s = 1.5;
  EXPECT_THROW(make_test_sequence(UnitVector::from_angle(0), vpp, r, s, 3), ConfigError);
  const auto chi = make_test_sequence(UnitVector::from_angle(0), vpp, r, s, 16);
  EXPECT_LT(chi.radial.d, 1.0);
  const double mid = std::sqrt(chi.radial.b * chi.radial.c);
  EXPECT_EQ(chi(polar(mid, 0)), 1.0);
  EXPECT_EQ(chi(polar(mid, 28)), 0.0);
  EXPECT_EQ(chi(polar(mid, 12)), 1.0);
  const auto chi2 = make_test_sequence(UnitVector::from_angle(0), vpp, r, s, 32);
  const double len1 = std::log(chi.radial.c / chi.radial.b), len2 = std::log(chi2.radial.c / chi2.radial.b);
  EXPECT_NEAR(len2 - len1, std::log(2.0), 1e-12);
}

TEST(TestSequence, AngularWindowNorm) {
  const AngularWindow w{UnitVector::from_angle(0), 30 * kDegree};
  const double brute = integrate_smooth([&](std::span<const double> x) { return w(x); }, 2, 1e-9);
  EXPECT_NEAR(w.l1_norm(), brute, 1e-8);
  const AngularWindow w3{UnitVector::basis(3, 0), 0.4};
  const double brute3 = integrate_smooth([&](std::span<const double> x) { return w3(x); }, 3, 1e-9);
  EXPECT_NEAR(w3.l1_norm(), brute3, 1e-6);
}

TEST(Mikhlin, ConstantSymbol) {
  auto one = [](std::span<const double>) { return 1.0; };
  const auto est = mikhlin_seminorm_estimate(one, 2, 1.0, 2, MikhlinGrid{32, 90});
  EXPECT_EQ(est[0], 1.0);
  EXPECT_LE(est[1], 1e-8);
}

TEST(Mikhlin, SmoothCutoffIsStable) {
  const auto psi = make_smooth_cutoff(circ(0, 10), circ(0, 20, true), 1.0, 1.0);
  const auto rep = mikhlin_refinement(psi, 2, 1.0, 3);
  EXPECT_TRUE(rep.stable);
  for (double v : rep.levels.back()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Mikhlin, SharpIndicatorDiverges) {
  const HomogeneousSymbol sharp(SphericalProfile::caps(2, {{UnitVector::from_angle(0), 20 * kDegree, 1.0}}), 1.0);
  const auto rep = mikhlin_refinement(sharp, 2, 1.0, 1, 3);
  EXPECT_FALSE(rep.stable);
  EXPECT_GE(rep.levels[1][1], 2.0 * rep.levels[0][1] * 0.999);
  EXPECT_GE(rep.levels[2][1], 2.0 * rep.levels[1][1] * 0.999);
}
