#include <gtest/gtest.h>

#include <random>

#include "conewave/cone_geometry.hpp"

using namespace conewave;

namespace {

UnitVector e(std::size_t n, std::size_t i) { return UnitVector::basis(n, i); }

CircularCone circ(double axisDeg, double halfDeg, bool open = false) {
  return CircularCone::from_half_angle(UnitVector::from_angle(axisDeg * kDegree), halfDeg * kDegree, open);
}

}  // namespace

TEST(UnitVectorTest, RejectsNonUnitAndBadDimension) {
  EXPECT_THROW(UnitVector({1.0, 1.0}), ConfigError);
  EXPECT_THROW(UnitVector(std::vector<double>(9, 1.0 / 3.0)), ConfigError);
  EXPECT_NO_THROW(UnitVector({0.6, 0.8}));
}

TEST(ConeMembership, CircularOpenVersusClosedBoundary) {
  const auto closed = circ(0, 45);
  const auto open = circ(0, 45, true);
  const std::vector<double> edge{1.0, 1.0};
  EXPECT_TRUE(closed.contains(edge));
  EXPECT_FALSE(open.contains(edge));
  EXPECT_TRUE(open.contains(edge, true));
  EXPECT_FALSE(closed.contains(std::vector<double>{1.0, 1.01}));
}

TEST(ConeMembership, PolyhedralUsesNonnegativeCombination) {
  PolyhedralCone c({e(2, 0), e(2, 1)});
  EXPECT_TRUE(c.contains(std::vector<double>{2.0, 3.0}));
  EXPECT_FALSE(c.contains(std::vector<double>{-0.1, 3.0}));
  EXPECT_TRUE(c.contains(std::vector<double>{0.0, 0.0}));
}

TEST(DualCone, CircularQuarterPlaneIsSelfDual) {
  const ConeSpec d = dual_cone(circ(0, 45));
  const auto& c = std::get<CircularCone>(d);
  EXPECT_NEAR(c.half_angle(), kPi / 4, 1e-12);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const ConeSpec src = circ(0, 45);
  int agree = 0;
  for (int i = 0; i < 100000; ++i) {
    std::vector<double> x{g(rng), g(rng)};
    agree += cone_contains(d, x) == cone_contains(src, x);
  }
  EXPECT_GE(agree, 99900);
}

TEST(DualCone, RayGivesHalfPlane) {
  const ConeSpec d = dual_cone(PolyhedralCone({e(2, 0)}));
  const auto& h = std::get<HalfspaceCone>(d);
  ASSERT_EQ(h.normals().size(), 1u);
  EXPECT_TRUE(cone_contains(d, std::vector<double>{0.0, 5.0}));
  EXPECT_FALSE(cone_contains(d, std::vector<double>{-0.1, 5.0}));
}

TEST(DualCone, HalfSpaceGivesRay) {
  const ConeSpec d = dual_cone(CircularCone::from_half_angle(e(3, 0), kPi / 2));
  const auto& c = std::get<CircularCone>(d);
  EXPECT_NEAR(c.cos_half(), 1.0, 1e-15);
  EXPECT_FALSE(interior_nonempty(d));
}

TEST(DualCone, WideCircularGivesZeroCone) {
  const ConeSpec d = dual_cone(circ(0, 120));
  EXPECT_TRUE(std::holds_alternative<ZeroCone>(d));
  EXPECT_TRUE(std::holds_alternative<HalfspaceCone>(dual_cone(d)));
}

TEST(DualCone, PlanarGeneratorRecovery) {
  PolyhedralCone c({UnitVector::from_angle(0.0), UnitVector::from_angle(kPi / 3)});
  const auto gens = dual_generators_2d(c);
  ASSERT_EQ(gens.size(), 2u);
  const PolyhedralCone d(gens);
  const HalfspaceCone h(2, c.generators());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> x{g(rng), g(rng)};
    EXPECT_EQ(d.contains(x), h.contains(x));
  }
  PolyhedralCone wide({UnitVector::from_angle(0.0), UnitVector::from_angle(2.0), UnitVector::from_angle(4.0)});
  EXPECT_TRUE(dual_generators_2d(wide).empty());
}

TEST(Interior, ReferenceCones) {
  EXPECT_TRUE(interior_nonempty(circ(0, 60)));
  EXPECT_FALSE(interior_nonempty(CircularCone(e(2, 0), 1.0)));
  EXPECT_FALSE(interior_nonempty(HalfspaceCone(2, {e(2, 0), -e(2, 0)})));
  EXPECT_TRUE(interior_nonempty(HalfspaceCone(2, {e(2, 0), e(2, 1)})));
  EXPECT_FALSE(interior_nonempty(PolyhedralCone({e(3, 0), e(3, 1)})));
}

TEST(Kappa0, EmptySupportIsInfinite) {
  EXPECT_TRUE(std::isinf(kappa0(DirectionSet{}, circ(0, 90, true))));
}

TEST(Kappa0, SinglePointInHalfPlane) {
  DirectionSet s{{e(2, 0)}, {}};
  EXPECT_NEAR(kappa0(s, circ(0, 90, true)), 1.0, 1e-10);
}

TEST(Kappa0, ArcWithinTenDegrees) {
  DirectionSet s{{}, {circ(0, 10)}};
  EXPECT_NEAR(kappa0(s, circ(0, 70, true)), std::cos(10 * kDegree), 1e-9);
  std::vector<UnitVector> pts;
  for (int k = 0; k <= 200; ++k) pts.push_back(UnitVector::from_angle((-10.0 + 0.1 * k) * kDegree));
  EXPECT_NEAR(kappa0(DirectionSet{pts, {}}, circ(0, 70, true)), std::cos(10 * kDegree), 1e-9);
}

TEST(Kappa0, OffsetArcUsesBestAxisInsideConstraint) {
  // Arc of half-width 5 deg centred 40 deg off axis; V' too narrow to reach its centre.
  DirectionSet s{{}, {circ(40, 5)}};
  EXPECT_NEAR(kappa0(s, circ(0, 20, true)), std::cos(25 * kDegree), 1e-9);
}

TEST(Kappa0Prime, ReferenceValues) {
  const auto vpp = circ(0, 30);
  EXPECT_EQ(kappa0_prime(DirectionSet{}, vpp), 1.0);
  EXPECT_NEAR(kappa0_prime(DirectionSet{{e(2, 0)}, {}}, vpp), std::cos(30 * kDegree), 1e-14);
  EXPECT_NEAR(kappa0_prime(DirectionSet{{}, {circ(0, 20)}}, vpp), std::cos(50 * kDegree), 1e-14);
}

TEST(Kappa0Prime, ContainmentIsValidated) {
  const ConeSpec vp = circ(0, 40, true);
  EXPECT_NO_THROW(kappa0_prime(DirectionSet{}, circ(0, 30), &vp));
  EXPECT_THROW(kappa0_prime(DirectionSet{}, circ(0, 40), &vp), ConfigError);
}

TEST(Kappa0, DominatesKappa0Prime) {
  DirectionSet s{{}, {circ(10, 8)}};
  const ConeSpec vp = circ(0, 60, true);
  EXPECT_GE(kappa0(s, vp) + 1e-12, kappa0_prime(s, circ(0, 30), &vp));
}

TEST(KappaV, ReferenceValues) {
  EXPECT_NEAR(kappaV(PolyhedralCone({e(2, 0)}), circ(0, 90, true)), 1.0, 1e-10);
  EXPECT_NEAR(kappaV(circ(0, 45), circ(0, 45, true)), std::cos(kPi / 4), 1e-9);
  EXPECT_NEAR(kappaV(CircularCone(e(3, 0), 1.0), CircularCone(e(3, 0), 0.0, true)), 1.0, 1e-9);
}

TEST(KappaV, ThreeDimensionalCap) {
  const auto ax = UnitVector::normalized({1.0, 1.0, 1.0});
  const auto v = CircularCone::from_half_angle(ax, 20 * kDegree);
  const ConeSpec vp = std::get<CircularCone>(dual_cone(v)).as_open();
  EXPECT_NEAR(kappaV(v, vp), std::cos(20 * kDegree), 1e-8);
}

TEST(KappaV, RotationEquivariance) {
  DirectionSet base{{}, {circ(15, 6)}};
  const double k0 = kappa0(base, circ(5, 50, true));
  for (double rot : {33.0, 100.0, 250.0}) {
    DirectionSet s{{}, {circ(15 + rot, 6)}};
    EXPECT_NEAR(kappa0(s, circ(5 + rot, 50, true)), k0, 1e-6);
  }
}

TEST(Nnls, RecoversNonnegativeSolution) {
  Eigen::MatrixXd A(3, 3);
  A << 1, 0, 1, 0, 1, 1, 1, 1, 0;
  Eigen::VectorXd x(3);
  x << 0.5, 0.0, 2.0;
  const Eigen::VectorXd got = detail::nnls(A, A * x);
  EXPECT_LT((got - x).norm(), 1e-10);
}
