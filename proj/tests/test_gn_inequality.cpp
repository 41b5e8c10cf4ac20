#include <gtest/gtest.h>

#include <cmath>

#include "dnls/gn_inequality.hpp"
#include "dnls/initial_data.hpp"
#include "oracles.hpp"

using namespace dnls;

namespace {

Field random_field(double L, std::uint64_t seed, int max_mode = 6) {
  DataSpec d;
  d.kind = DataKind::multimode;
  d.max_mode = max_mode;
  d.decay = 0.2;
  d.seed = seed;
  return build(d, make_grid(L, 128));
}

}  // namespace

TEST(Constants, SharpConstantValue) {
  const double c = std::pow(3.0, 1.0 / 6.0) * std::pow(2.0 * kPi, -1.0 / 9.0);
  EXPECT_NEAR(cgn(), c, 1e-15);
  EXPECT_NEAR(cgn(), 0.9791, 5e-5);
  EXPECT_LT(cgn(), 1.0);
  EXPECT_NEAR(cgn_pow_m9_2(), std::pow(cgn(), -4.5), 1e-14 * cgn_pow_m9_2());
  EXPECT_NEAR(cgn_pow_m18(), std::pow(cgn(), -18.0), 1e-14 * cgn_pow_m18());
}

TEST(MassThreshold, ClosedFormsAndMonotonicity) {
  EXPECT_DOUBLE_EQ(mass_threshold(1.0, 2.5), kPi);
  EXPECT_DOUBLE_EQ(mass_threshold(3.0, 0.0), 4 * kPi);
  EXPECT_NEAR(mass_threshold(1.0, 1e-9), 4 * kPi, 1e-7);
  EXPECT_LT(mass_threshold(1.0, 1e-3), 4 * kPi);
  EXPECT_GT(mass_threshold(1.0, 0.1), mass_threshold(1.0, 0.2));
  EXPECT_LT(mass_threshold(1.0, 0.1), mass_threshold(2.0, 0.1));
  EXPECT_THROW(mass_threshold(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(mass_threshold(1.0, -0.1), std::invalid_argument);
}

TEST(FlapIntegrals, ClosedFormsAndPreconditions) {
  const auto f = flap_integrals(1.0, 1.0);
  EXPECT_DOUBLE_EQ(f.l4, 0.4);
  EXPECT_DOUBLE_EQ(f.l2grad, 2.0);
  EXPECT_DOUBLE_EQ(f.l6, 2.0 / 7.0);
  const auto z = flap_integrals(0.0, 3.0);
  EXPECT_EQ(z.l4 + z.l2grad + z.l6, 0.0);
  EXPECT_THROW(flap_integrals(1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(flap_integrals(1.0, 0.0), std::invalid_argument);
}

TEST(FlapIntegrals, AgreeWithAdaptiveQuadrature) {
  for (double a : {0.3, 1.0, 2.7}) {
    for (double d : {0.1, 1.0, 10.0}) {
      const auto f = flap_integrals(a, d);
      // Ramps F(t) = a t / d on [0, d] and its mirror image.
      auto ramp = [&](double t) { return a * t / d; };
      const double l4 = 2 * oracle::adaptive_simpson([&](double t) { return std::pow(ramp(t), 4); }, 0, d);
      const double l6 = 2 * oracle::adaptive_simpson([&](double t) { return std::pow(ramp(t), 6); }, 0, d);
      const double gr = 2 * oracle::adaptive_simpson([&](double) { return (a / d) * (a / d); }, 0, d);
      EXPECT_NEAR(f.l4, l4, 1e-10 * l4);
      EXPECT_NEAR(f.l6, l6, 1e-10 * l6);
      EXPECT_NEAR(f.l2grad, gr, 1e-10 * gr);
    }
  }
}

TEST(BaseShift, MinimumModulusAtOrigin) {
  auto g = make_grid(2 * kPi, 64);
  const Field c = Field::sample(g, [](double x) { return std::cos(x); });
  const auto s = base_shift(c);
  EXPECT_NEAR(std::abs(s.shifted[0]), 0.0, 1e-15);
  EXPECT_TRUE(s.base_index == 16 || s.base_index == 48);

  const auto z = base_shift(Field::zeros(g));
  EXPECT_EQ(z.base_index, 0u);

  const Field pw = Field::sample(g, [](double x) { return 1.5 * std::polar(1.0, 2 * x); });
  const auto p = base_shift(pw);
  EXPECT_NEAR(std::abs(p.shifted[0]), std::pow(2 * kPi, -0.25) * lp_norm(pw, 4), 1e-13);
}

TEST(BaseShift, OriginBoundOnRandomFields) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Field f = random_field(seed % 2 ? 1.0 : 7.0, seed);
    const auto s = base_shift(f);
    EXPECT_LE(std::abs(s.shifted[0]), std::pow(f.grid().period(), -0.25) * lp_norm(f, 4) * (1 + 1e-9));
    for (std::size_t j = 0; j < f.size(); ++j) EXPECT_EQ(s.shifted[j], f[(j + s.base_index) % f.size()]);
  }
}

TEST(CheckGn1, ZeroField) {
  const auto r = check_gn1(Field::zeros(make_grid(1.0, 16)), 1.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.satisfied);
  EXPECT_THROW(check_gn1(Field::zeros(make_grid(1.0, 16)), 0.0), std::invalid_argument);
}

TEST(CheckGn1, ConstantFieldClosedForm) {
  const double L = 2 * kPi;
  const Field one = Field::sample(make_grid(L, 64), [](double) { return 1.0; });
  const auto r = check_gn1(one, 1.0);
  EXPECT_NEAR(r.lhs, std::pow(L, 1.0 / 6), 1e-14);
  const double rhs = cgn() * std::pow(1 + 1 / (5 * kPi), 2.0 / 9) *
                     std::pow((2 / std::sqrt(L)) * std::sqrt(L), 1.0 / 18) * std::pow(L, 2.0 / 9);
  EXPECT_NEAR(r.rhs, rhs, 1e-14);
  EXPECT_TRUE(r.satisfied);
  EXPECT_EQ(r.delta, 1.0);
  EXPECT_EQ(r.L, L);
}

TEST(CheckGn1, RandomAuditWithChain) {
  int rows = 0;
  for (double L : {0.5, 1.0, 2 * kPi, 10.0}) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const Field f = random_field(L, seed, 1 + seed % 8);
      for (double d : {0.1, 1.0, 10.0}) {
        const auto gn1 = check_gn1(f, d);
        const auto gn0 = check_gn0_on_extension(f, d);
        EXPECT_TRUE(gn1.satisfied) << L << " " << seed << " " << d;
        EXPECT_TRUE(gn0.record.satisfied);
        EXPECT_LE(gn0.record.rhs, gn1.rhs * (1 + 1e-12));
        EXPECT_EQ(gn1.satisfied, gn1.slack >= -1e-12 * gn1.rhs);
        ++rows;
      }
    }
  }
  EXPECT_EQ(rows, 480);
}

TEST(CheckGn1, CorruptedConstantIsDetected) {
  const Field one = Field::sample(make_grid(2 * kPi, 64), [](double) { return 1.0; });
  EXPECT_FALSE(check_gn1(one, 1.0, 0.5 * cgn()).satisfied);
}

TEST(CheckGn0, ConstantFieldAssemblesFlapsOnly) {
  const double L = 2 * kPi, d = 1.0;
  const Field one = Field::sample(make_grid(L, 64), [](double) { return 1.0; });
  const auto a = check_gn0_on_extension(one, d);
  EXPECT_DOUBLE_EQ(a.profile.f0_abs, 1.0);
  EXPECT_DOUBLE_EQ(a.profile.flap_l2grad, 2.0 / d);
  EXPECT_DOUBLE_EQ(a.profile.flap_l4, 2 * d / 5);
  EXPECT_DOUBLE_EQ(a.profile.flap_l6, 2 * d / 7);
  EXPECT_NEAR(a.record.lhs, std::pow(L + 2 * d / 7, 1.0 / 6), 1e-13);
  EXPECT_NEAR(a.record.rhs, cgn() * std::pow(2.0 / d, 1.0 / 18) * std::pow(L + 2 * d / 5, 2.0 / 9), 1e-13);
  EXPECT_TRUE(a.record.satisfied);
  EXPECT_TRUE(check_gn0_on_extension(Field::zeros(make_grid(L, 16)), d).record.satisfied);
  EXPECT_THROW(check_gn0_on_extension(one, -1.0), std::invalid_argument);
}
