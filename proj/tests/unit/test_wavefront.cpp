#include <gtest/gtest.h>

#include "conewave/wavefront.hpp"

using namespace conewave;

namespace {

constexpr double kL = 16.0;
constexpr std::size_t kN = 512;

std::size_t count(const std::vector<bool>& f) { return static_cast<std::size_t>(std::count(f.begin(), f.end(), true)); }

double angle_to_axis_deg(std::size_t m, std::size_t M) {
  const double a = 360.0 * static_cast<double>(m) / static_cast<double>(M);
  return std::min({a, std::abs(a - 180.0), 360.0 - a});
}

const GridField& jump() {
  static const GridField f = jump_sheet_field(kL, kN);
  return f;
}

}  // namespace

TEST(Space, RefusesNonAdmissibleTags) {
  for (const char* t : {"L1", "Linf", "C0"}) {
    try {
      parse_space(t, 0.0);
      FAIL() << t;
    } catch (const UnsupportedSpaceError& e) {
      EXPECT_NE(std::string(e.what()).find("L1_loc"), std::string::npos);
    }
  }
  EXPECT_EQ(parse_space("Sobolev", 1.5).kind, EDescriptor::Kind::Sobolev);
  EXPECT_EQ(parse_space("BesovInfInf", 0.5).kind, EDescriptor::Kind::BesovInfInf);
  EXPECT_THROW(parse_space("Lp", 1.0), ConfigError);
}

TEST(SigmaE, GaussianIsRegular) {
  const auto s = sigma_E(gaussian_field(kL, kN), EDescriptor::sobolev(2.0));
  EXPECT_EQ(count(flags_of(s)), 0u);
  EXPECT_EQ(count(flags_of(sigma_E(gaussian_field(kL, kN), EDescriptor::besov(3.0)))), 0u);
}

TEST(SigmaE, DeltaFlagsEveryDirection) {
  const auto s = sigma_E(delta_field(kL, kN), EDescriptor::sobolev(0.0));
  EXPECT_EQ(count(flags_of(s)), s.size());
  for (const auto& d : s) EXPECT_NEAR(d.fittedExponent, 2.0, 0.1);
  EXPECT_EQ(count(flags_of(sigma_E(delta_field(kL, kN), EDescriptor::besov(0.0)))), s.size());
}

TEST(SigmaE, JumpSheetFlagsNormalDirectionsOnly) {
  const auto f = flags_of(sigma_E(jump(), EDescriptor::sobolev(0.75)));
  EXPECT_TRUE(f[0]);
  EXPECT_TRUE(f[90]);
  for (std::size_t m = 0; m < f.size(); ++m)
    if (f[m]) {
      EXPECT_LE(angle_to_axis_deg(m, f.size()), 15.0) << m;
    }
}

TEST(SigmaE, MonotoneInOrder) {
  const auto lo = flags_of(sigma_E(jump(), EDescriptor::sobolev(0.25)));
  const auto mid = flags_of(sigma_E(jump(), EDescriptor::sobolev(0.75)));
  const auto hi = flags_of(sigma_E(jump(), EDescriptor::sobolev(1.5)));
  EXPECT_TRUE(flags_within(lo, mid));
  EXPECT_TRUE(flags_within(mid, hi));
  EXPECT_LT(count(lo), count(hi));
}

TEST(SigmaE, QuarterTurnRotatesFlags) {
  const auto a = flags_of(sigma_E(jump(), EDescriptor::sobolev(0.75)));
  const auto b = flags_of(sigma_E(rotate90(jump()), EDescriptor::sobolev(0.75)));
  const std::size_t M = a.size();
  for (std::size_t m = 0; m < M; ++m) EXPECT_EQ(b[(m + M / 4) % M], a[m]) << m;
}

TEST(SigmaE, ProductCutoffFlagsNothingNew) {
  WFParams prm;
  prm.M = 36;
  auto family = [&](double half) {
    std::vector<SmoothCutoff> v;
    for (std::size_t m = 0; m < prm.M; ++m) {
      const auto ax = UnitVector::from_angle(2.0 * kPi * static_cast<double>(m) / static_cast<double>(prm.M));
      v.push_back(make_smooth_cutoff(CircularCone::from_half_angle(ax, 0.5 * half),
                                     CircularCone::from_half_angle(ax, half, true), 1.0, 1.0));
    }
    return v;
  };
  const auto A = family(prm.delta), B = family(0.5 * prm.delta);
  const EDescriptor E = EDescriptor::sobolev(0.75);
  const auto fa = flags_of(sigma_E_with(jump(), E, prm, [&](std::size_t m, std::span<const double> x) { return A[m](x); }));
  const auto fb = flags_of(sigma_E_with(jump(), E, prm, [&](std::size_t m, std::span<const double> x) { return B[m](x); }));
  const auto fp = flags_of(sigma_E_with(jump(), E, prm, [&](std::size_t m, std::span<const double> x) {
    return CutoffProduct{{A[m], B[m]}}(x);
  }));
  for (std::size_t m = 0; m < prm.M; ++m)
    if (fp[m]) {
      EXPECT_TRUE(fa[m] || fb[m]) << m;
    }
  EXPECT_TRUE(fp[0]);
}

TEST(SigmaE, PreconditionsAreChecked) {
  EXPECT_THROW(sigma_E(gaussian_field(kL, 64), EDescriptor::sobolev(0.0)), ConfigError);
  EXPECT_THROW(sigma_E(gaussian_field(kL, kN, 3.0), EDescriptor::sobolev(0.0)), ConfigError);
  WFParams prm;
  prm.M = 1000;
  EXPECT_THROW(sigma_E(gaussian_field(kL, kN), EDescriptor::sobolev(0.0), prm), ConfigError);
}

TEST(Localized, SheetPointsAndOffSheetPoints) {
  const EDescriptor E = EDescriptor::sobolev(0.75);
  const std::vector<double> on{0.0, 0.5}, off{1.0, 0.0};
  const auto a = sigma_E_localized(jump(), on, E, {});
  EXPECT_TRUE(a.intersection[0]);
  EXPECT_TRUE(a.intersection[90]);
  for (std::size_t m = 0; m < a.intersection.size(); ++m)
    if (a.intersection[m]) {
      EXPECT_LE(angle_to_axis_deg(m, a.intersection.size()), 15.0);
    }
  const auto b = sigma_E_localized(jump(), off, E, {});
  EXPECT_EQ(count(b.intersection), 0u);
  EXPECT_TRUE(b.anyWindowEmpty);
  const auto g = sigma_E_localized(gaussian_field(kL, kN), on, EDescriptor::sobolev(2.0), {});
  EXPECT_EQ(count(g.intersection), 0u);
  WFParams two;
  two.windowRadii = {1.0, 0.5};
  EXPECT_THROW(sigma_E_localized(jump(), on, E, two), ConfigError);
}

TEST(WaveFront, DeltaReportAndChecks) {
  const auto u = delta_field(kL, kN);
  const auto grid = square_grid(1.0, 0.5);
  const auto rep = wavefront_set(u, EDescriptor::sobolev(0.0), grid);
  for (const auto& e : rep.flagged) EXPECT_LE(std::max(std::abs(e.x[0]), std::abs(e.x[1])), 0.5 + 1e-12);
  std::size_t atOrigin = 0;
  for (const auto& e : rep.flagged) atOrigin += (e.x[0] == 0.0 && e.x[1] == 0.0);
  EXPECT_EQ(atOrigin, rep.params.M);
  EXPECT_TRUE(projection_check(rep, rep.singSupport, 0.5));
  const auto phi = gaussian_window(u, std::vector<double>{0.0, 0.0}, 1.0);
  EXPECT_TRUE(mollification_check(u, phi, EDescriptor::sobolev(0.0)));
}

TEST(WaveFront, JumpSheetOffSheetWindowMollification) {
  const auto phi = gaussian_window(jump(), std::vector<double>{1.5, 0.0}, 1.0);
  EXPECT_TRUE(mollification_check(jump(), phi, EDescriptor::sobolev(0.75)));
  const auto s = sigma_E(multiply(jump(), phi), EDescriptor::sobolev(0.75), {},
                         ShellSpectrum(dft_forward(jump()), 2).peak);
  EXPECT_EQ(count(flags_of(s)), 0u);
}

TEST(WaveFront, ProjectionCheckDetectsMismatch) {
  WFReport rep;
  rep.flagged.push_back({{0.0, 0.0}, 0, 0.0});
  EXPECT_TRUE(projection_check(rep, {{0.0, 0.0}, {0.5, 0.0}}, 0.5));
  EXPECT_FALSE(projection_check(rep, {{0.0, 0.0}, {1.5, 0.0}}, 0.5));
}
