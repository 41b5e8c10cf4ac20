#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dnls/diagnostics.hpp"
#include "dnls/dynamics.hpp"
#include "dnls/gauge.hpp"
#include "dnls/initial_data.hpp"

using namespace dnls;

namespace {

Field random_field(double L, std::uint64_t seed, double m, std::size_t N = 128) {
  DataSpec d;
  d.kind = DataKind::multimode;
  d.max_mode = 1 + static_cast<int>(seed % 7);
  d.decay = 0.3;
  d.seed = seed;
  d.target_mass = m;
  return build(d, make_grid(L, N));
}

}  // namespace

TEST(FRatio, ConstantModulusSaturatesHolder) {
  const double L = 3.0, A = 1.4;
  const Field pw = Field::sample(make_grid(L, 64), [&](double x) { return A * std::polar(1.0, 2 * kPi / L * x); });
  EXPECT_NEAR(f_ratio(pw), A * std::sqrt(L), 1e-12);
  EXPECT_NEAR(f_ratio(pw), std::sqrt(mass(pw)), 1e-12 * std::sqrt(mass(pw)));
  EXPECT_THROW(f_ratio(Field::zeros(make_grid(L, 16))), ZeroFieldError);
}

TEST(FRatio, TwoLevelModulusBelowHolder) {
  const double L = 2 * kPi;
  const Field f = Field::sample(make_grid(L, 256), [](double x) { return 0.5 + 0.5 * std::tanh(4 * std::sin(x)); });
  EXPECT_LT(f_ratio(f), std::sqrt(mass(f)) * (1 - 1e-3));
}

TEST(ProofSample, ConstantFieldMatchesRetranscription) {
  const double L = 2.0, A = 0.8, d = 0.5;
  const Field v = Field::sample(make_grid(L, 32), [&](double) { return A; });
  const auto s = proof_sample(v, d, ecal(v), 0.25);
  // gamma = (2/(d sqrt L) - (3/8) A^2 A^2 sqrt L) A^4 L / (A^6 L), with ||v||_4^2 = A^2 sqrt L.
  const double l4sq = A * A * std::sqrt(L);
  const double gamma = (2 / (d * std::sqrt(L)) - 0.375 * A * A * l4sq) * l4sq / (std::pow(A, 6) * L);
  EXPECT_NEAR(s.gamma, gamma, 1e-12 * std::abs(gamma));
  EXPECT_NEAR(s.l4, std::pow(std::pow(A, 4) * L, 0.25), 1e-14);
  EXPECT_NEAR(s.l6, std::pow(std::pow(A, 6) * L, 1.0 / 6), 1e-14);
  EXPECT_NEAR(s.h1dot, 0.0, 1e-14);
  EXPECT_NEAR(s.holder_upper, A * std::sqrt(L), 1e-14);
  EXPECT_EQ(s.t, 0.25);
  const double a = 1 + 2 * d / (5 * L);
  const double f = std::pow(A, 4) * L / std::pow(std::pow(A, 6) * L, 0.5);
  const double eta = 1.0 / 16 - std::pow(a, -4) * std::pow(cgn(), -18) * std::pow(f, -4);
  EXPECT_NEAR(s.eta, eta, 1e-12 * std::max(1.0, std::abs(eta)));
  const double base = 1 + 16 * ecal(v) / std::pow(s.l6, 6) + 16 * gamma;
  ASSERT_GT(base, 0);
  ASSERT_TRUE(s.lower_bound_f.has_value());
  EXPECT_NEAR(*s.lower_bound_f, 2 * std::pow(cgn(), -4.5) / a * std::pow(base, -0.25), 1e-12);
  EXPECT_EQ(s.case_tag, s.eta + s.gamma <= 0 ? CaseTag::case1 : CaseTag::case2);
}

TEST(ProofSample, Preconditions) {
  auto g = make_grid(1.0, 16);
  EXPECT_THROW(proof_sample(Field::zeros(g), 1.0, 0.0, 0.0), ZeroFieldError);
  const Field one = Field::sample(g, [](double) { return 1.0; });
  EXPECT_THROW(proof_sample(one, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(Eta, VanishesAtAlgebraicRoot) {
  for (double L : {1.0, 2 * kPi}) {
    for (double d : {0.1, 1.0}) {
      const double froot = 2 * cgn_pow_m9_2() / flap_factor(L, d);
      EXPECT_NEAR(eta_value(froot, L, d), 0.0, 1e-12);
    }
  }
}

TEST(AlphaChoice, SyntheticArithmetic) {
  DiagnosticsSample s;
  s.eta = 0.01;
  s.gamma = 0.0;
  s.l6 = 2.0;
  s.case_tag = CaseTag::case2;
  EXPECT_DOUBLE_EQ(alpha_choice(s, 1.0, 2 * kPi), 1.0);
  // target sqrt(4/1) * 1 = 2 exactly, so the +1 lifts it to 3.
  s.eta = 4.0;
  s.l6 = 1.0;
  EXPECT_DOUBLE_EQ(alpha_choice(s, 1.0, 2 * kPi), 3.0);
  s.eta = -0.5;
  s.gamma = 0.5;
  EXPECT_THROW(alpha_choice(s, 1.0, 2 * kPi), CaseNotApplicable);
}

TEST(AlphaChoice, SmallestLatticeFrequencyAboveTarget) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    DiagnosticsSample s;
    s.eta = 0.05 + u(rng);
    s.gamma = u(rng) - 0.05;
    s.l6 = 0.2 + 3 * u(rng);
    const double M = 0.1 + 10 * u(rng);
    const double L = 0.5 + 10 * u(rng);
    const double unit = 2 * kPi / L;
    const double target = std::sqrt((s.eta + s.gamma) / M) * std::pow(s.l6, 3);
    int n = 1;
    while (!(n * unit > target)) ++n;
    EXPECT_NEAR(alpha_choice(s, M, L), n * unit, 1e-12 * n * unit);
  }
}

TEST(M1Identity, RandomFieldsAndLattice) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double L = seed % 3 == 0 ? 1.0 : 2 * kPi;
    const Field v = gauge_profile(random_field(L, seed, 0.5 + seed % 10), 0.75);
    const double a = static_cast<double>(1 + seed % 3) * 2 * kPi / L;
    const double lhs = momentum_v(v) + 0.25 * std::pow(lp_norm(v, 4), 4);
    EXPECT_LT(m1_identity_check(v, a), 1e-11 * std::max(std::abs(lhs), 1.0)) << seed;
  }
}

TEST(M1Identity, PlaneWaveClosedFormAndEdgeCases) {
  const double L = 3.0, A = 0.7, k = 2 * kPi / L * 2;
  const Field v = Field::sample(make_grid(L, 64), [&](double x) { return A * std::polar(1.0, k * x); });
  const double a = 2 * kPi / L;
  const double lhs = momentum_v(v) + 0.25 * std::pow(lp_norm(v, 4), 4);
  EXPECT_NEAR(lhs, -k * A * A * L, 1e-12);
  // ecal(e^{iax}v) = (k+a)^2 A^2 L + 5 A^6 L/16.
  const double e0 = k * k * A * A * L + 5.0 / 16 * std::pow(A, 6) * L;
  const double e1 = (k + a) * (k + a) * A * A * L + 5.0 / 16 * std::pow(A, 6) * L;
  EXPECT_NEAR(-e1 / (2 * a) + a * A * A * L / 2 + e0 / (2 * a), -k * A * A * L, 1e-12);
  EXPECT_LT(m1_identity_check(v, a), 1e-11);
  EXPECT_EQ(m1_identity_check(Field::zeros(make_grid(L, 16)), a), 0.0);
  EXPECT_THROW(m1_identity_check(v, 0.0), std::invalid_argument);
  EXPECT_THROW(m1_identity_check(v, 1.0), std::invalid_argument);
}

TEST(BoundChain, HolderAndLowerBoundOnRandomFields) {
  int lower_checked = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const double L = std::vector<double>{0.5, 1.0, 2 * kPi, 10.0}[seed % 4];
    const double d = std::vector<double>{0.1, 1.0, 10.0}[seed % 3];
    const Field v = gauge_profile(random_field(L, seed, 0.2 + 0.1 * (seed % 120)), 0.75);
    const auto s = proof_sample(v, d, ecal(v), 0.0);
    EXPECT_LE(s.f, s.holder_upper * (1 + 1e-12));
    if (s.lower_bound_f) {
      EXPECT_GE(s.f, *s.lower_bound_f * (1 - 1e-10)) << seed;
      ++lower_checked;
    }
  }
  EXPECT_GT(lower_checked, 100);
}

TEST(CaseReport, PlaneWaveTrajectoryConstantQuantities) {
  const double L = 2 * kPi, A = 0.9, k = 1.0;
  auto g = make_grid(L, 64);
  SimConfig c;
  c.dt = 1e-3;
  c.T = 0.2;
  c.record_stride = 20;
  const Field u0 = Field::sample(g, [&](double x) { return A * std::polar(1.0, k * x); });
  const auto r = simulate(u0, c);
  const Trajectory v = gauge_trajectory(r.trajectory, 0.75);
  const auto frames = case_report(v, 1.0, conserved_report(v.frames[0].field, 0.0));
  ASSERT_EQ(frames.size(), 11u);
  const auto& s0 = frames[0].sample;
  for (const auto& cf : frames) {
    const auto& s = cf.sample;
    EXPECT_NEAR(s.f, s0.f, 1e-10);
    EXPECT_NEAR(s.gamma, s0.gamma, 1e-10);
    EXPECT_NEAR(s.eta, s0.eta, 1e-10);
    EXPECT_NEAR(s.h1dot, s0.h1dot, 1e-10);
    EXPECT_NEAR(cf.case_slack, frames[0].case_slack, 1e-10);
    EXPECT_EQ(s.case_tag, s0.case_tag);
    EXPECT_FALSE(cf.violation);
  }
}

TEST(CaseReport, CaseTagsSelectAlpha) {
  int seen1 = 0, seen2 = 0;
  for (double L : {1.0, 2 * kPi}) {
    const double d = L == 1.0 ? 0.1 : 1.0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const Field v = gauge_profile(random_field(L, seed, (0.3 + 0.0165 * seed) * mass_threshold(L, d)), 0.75);
      Trajectory tr;
      tr.frames.push_back({0.0, v});
      const auto cf = case_report(tr, d, conserved_report(v, 0.0)).front();
      EXPECT_TRUE(cf.below_threshold);
      EXPECT_FALSE(cf.violation) << L << " " << seed;
      if (cf.sample.case_tag == CaseTag::case1) {
        EXPECT_EQ(*cf.sample.alpha, 2 * kPi / L);
        ++seen1;
      } else {
        ASSERT_EQ(cf.sample.case_tag, CaseTag::case2);
        EXPECT_DOUBLE_EQ(*cf.sample.alpha, alpha_choice(cf.sample, mass(v), L));
        EXPECT_TRUE(cf.m2_ok && cf.case_ok && cf.m3_ok);
        ++seen2;
      }
    }
  }
  EXPECT_GT(seen1, 0);
  EXPECT_GT(seen2, 0);
  EXPECT_THROW(case_report(Trajectory{}, 1.0, ConservedReport{}), std::invalid_argument);
}

TEST(CaseReport, BelowThresholdRunHasNoViolations) {
  const double L = 2 * kPi, d = 1.0;
  const Field u0 = random_field(L, 7, 0.9 * mass_threshold(L, d), 256);
  SimConfig c;
  c.dt = 1e-4;
  c.T = 1.0;
  c.record_stride = 200;
  const auto r = simulate(u0, c);
  ASSERT_TRUE(r.ok());
  const Trajectory v = gauge_trajectory(r.trajectory, 0.75);
  const auto frames = case_report(v, d, conserved_report(v.frames[0].field, 0.0));
  for (const auto& cf : frames) {
    EXPECT_TRUE(cf.below_threshold);
    EXPECT_FALSE(cf.violation) << cf.sample.t;
  }
}
