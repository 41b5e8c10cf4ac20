#pragma once

// Per-frame quantities of the mass-threshold argument, evaluated on gauged
// (beta = 3/4) fields:
//   f      = ||v||_4^4 / ||v||_6^3
//   gamma  = (2/(d sqrt L) - (3/8) mu ||v||_4^2) ||v||_4^2 / ||v||_6^6
//   eta    = 1/16 - a^{-4} C^{-18} f^{-4},          a = 1 + 2d/(5L)
//   lower  = 2 C^{-9/2} a^{-1} (1 + 16 Ecal/||v||_6^6 + 16 gamma)^{-1/4}
// with the Case 1 / Case 2 modulation bounds and the final cubic-in-f^2
// defect M f^4 - 16 a^{-4} C^{-18} M - f^6.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/functionals.hpp"
#include "dnls/gn_inequality.hpp"
#include "dnls/spectral_grid.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

struct ZeroFieldError : std::domain_error {
  ZeroFieldError() : std::domain_error("field is identically zero") {}
};

struct CaseNotApplicable : std::logic_error {
  using std::logic_error::logic_error;
};

enum class CaseTag { case1, case2, degenerate };

inline const char* to_string(CaseTag c) {
  switch (c) {
    case CaseTag::case1: return "case1";
    case CaseTag::case2: return "case2";
    case CaseTag::degenerate: return "degenerate";
  }
  return "unknown";
}

struct DiagnosticsSample {
  double t = 0.0;
  double l4 = 0.0;
  double l6 = 0.0;
  double h1dot = 0.0;
  double f = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  std::optional<double> lower_bound_f;
  double holder_upper = 0.0;
  std::optional<double> alpha;
  CaseTag case_tag = CaseTag::degenerate;
};

inline double f_ratio(const Field& v) {
  const double l6 = lp_norm(v, 6);
  if (!(l6 > 0.0)) throw ZeroFieldError();
  const double l4 = lp_norm(v, 4);
  return std::pow(l4, 4) / (l6 * l6 * l6);
}

/// gamma from its ingredients.
inline double gamma_value(double l4, double l6, double mu_val, double period, double delta) {
  const double l4_2 = l4 * l4;
  return (2.0 / (delta * std::sqrt(period)) - 0.375 * mu_val * l4_2) * l4_2 / std::pow(l6, 6);
}

/// eta from f.
inline double eta_value(double f, double period, double delta) {
  const double a = flap_factor(period, delta);
  return 1.0 / 16.0 - cgn_pow_m18() / (std::pow(a, 4) * std::pow(f, 4));
}

inline DiagnosticsSample proof_sample(const Field& v, double delta, double ecal_val, double t) {
  if (!(delta > 0.0)) throw std::invalid_argument("proof_sample: delta must be positive");
  const double L = v.grid().period();
  DiagnosticsSample s;
  s.t = t;
  s.l6 = lp_norm(v, 6);
  if (!(s.l6 > 0.0)) throw ZeroFieldError();
  s.l4 = lp_norm(v, 4);
  s.h1dot = std::sqrt(dirichlet(v));
  s.f = std::pow(s.l4, 4) / (s.l6 * s.l6 * s.l6);
  const double M = mass(v);
  s.holder_upper = std::sqrt(M);
  s.gamma = gamma_value(s.l4, s.l6, M / L, L, delta);
  s.eta = eta_value(s.f, L, delta);
  const double base = 1.0 + 16.0 * ecal_val / std::pow(s.l6, 6) + 16.0 * s.gamma;
  if (base > 0.0) {
    s.lower_bound_f = 2.0 * cgn_pow_m9_2() / flap_factor(L, delta) * std::pow(base, -0.25);
  }
  const double eg = s.eta + s.gamma;
  if (!std::isfinite(eg)) {
    s.case_tag = CaseTag::degenerate;
  } else {
    s.case_tag = eg <= 0.0 ? CaseTag::case1 : CaseTag::case2;
  }
  return s;
}

/// Smallest lattice frequency strictly above sqrt((eta + gamma)/M) ||v||_6^3.
inline double alpha_choice(const DiagnosticsSample& s, double M_val, double period) {
  const double eg = s.eta + s.gamma;
  if (!(eg > 0.0)) throw CaseNotApplicable("alpha_choice: eta + gamma <= 0 (Case 1 uses 2 pi / L)");
  if (!(M_val > 0.0)) throw std::invalid_argument("alpha_choice: mass must be positive");
  const double unit = 2.0 * kPi / period;
  const double target = std::sqrt(eg / M_val) * s.l6 * s.l6 * s.l6;
  return unit * (std::floor(target / unit) + 1.0);
}

/// |LHS - RHS| of  Im int v conj(v_x) = -Ecal(e^{i a x} v)/(2a) + a M/2 + Ecal(v)/(2a),
/// with the left side evaluated as P(v) + ||v||_4^4 / 4.
inline double m1_identity_check(const Field& v, double alpha) {
  if (alpha == 0.0) throw std::invalid_argument("m1_identity_check: alpha must be nonzero");
  const Field phi = modulate(v, alpha);  // throws off-lattice
  const double lhs = momentum_v(v) + 0.25 * std::pow(lp_norm(v, 4), 4);
  const double rhs = -ecal(phi) / (2.0 * alpha) + 0.5 * alpha * mass(v) + ecal(v) / (2.0 * alpha);
  return std::abs(lhs - rhs);
}

/// Relative tolerance on bounds that use conserved values frozen at t = 0.
inline constexpr double kBoundChainRelTol = 1e-6;
/// Relative tolerance on pointwise consequences of the periodic GN bound.
inline constexpr double kPointwiseRelTol = 1e-10;

struct CaseFrame {
  DiagnosticsSample sample;
  /// Ecal(e^{i alpha x} v) and the bound -(eta + gamma) ||v||_6^6 it must exceed.
  double m2_lhs = 0.0;
  double m2_rhs = 0.0;
  /// ||v||_4^4 / 4 and the case-specific upper bound with frozen M, P, Ecal.
  double case_lhs = 0.0;
  double case_rhs = 0.0;
  double case_slack = 0.0;
  double m3_defect = 0.0;
  double gn1_slack = 0.0;
  bool below_threshold = false;
  bool holder_ok = true;
  bool lower_ok = true;
  bool m2_ok = true;
  bool case_ok = true;
  bool m3_ok = true;
  bool violation = false;
};

inline CaseFrame case_frame(const Field& v, double t, double delta, const ConservedReport& c0) {
  const double L = v.grid().period();
  CaseFrame cf;
  cf.sample = proof_sample(v, delta, c0.Ecal, t);
  auto& s = cf.sample;
  const double M = c0.M;
  const double l4_4 = std::pow(s.l4, 4);
  const double l6_6 = std::pow(s.l6, 6);
  const double eg = s.eta + s.gamma;
  const double unit = 2.0 * kPi / L;

  if (s.case_tag == CaseTag::case2) {
    s.alpha = alpha_choice(s, M, L);
  } else {
    s.alpha = unit;
  }
  const double alpha = *s.alpha;

  // Pointwise modulation bound, from the GN bound applied to e^{i alpha x} v.
  const Field phi = modulate(v, alpha);
  cf.m2_lhs = ecal(phi);
  cf.m2_rhs = -eg * l6_6;
  const double b = 2.0 / (delta * std::sqrt(L));
  const double m2_scale = dirichlet(phi) + l6_6 / 16.0 + 0.375 * mu(v) * l4_4 + b * s.l4 * s.l4;
  cf.m2_ok = cf.m2_lhs - cf.m2_rhs >= -kPointwiseRelTol * m2_scale;

  cf.case_lhs = 0.25 * l4_4;
  double scale = 0.0;
  if (s.case_tag == CaseTag::case2) {
    const double lead = std::sqrt(M * eg) * s.l6 * s.l6 * s.l6;
    cf.case_rhs = lead - c0.P + kPi / L * M + c0.Ecal / (2.0 * alpha);
    scale = lead + std::abs(c0.P) + kPi / L * M + std::abs(c0.Ecal / (2.0 * alpha)) + cf.case_lhs;
  } else {
    cf.case_rhs = -c0.P + kPi / L * M + L / (4.0 * kPi) * c0.Ecal;
    scale = std::abs(c0.P) + kPi / L * M + std::abs(L / (4.0 * kPi) * c0.Ecal) + cf.case_lhs;
  }
  cf.case_slack = cf.case_rhs - cf.case_lhs;
  cf.case_ok = cf.case_slack >= -kBoundChainRelTol * scale;

  const double a = flap_factor(L, delta);
  const double f2 = s.f * s.f;
  const double k16 = 16.0 * cgn_pow_m18() / std::pow(a, 4) * M;
  cf.m3_defect = M * f2 * f2 - k16 - f2 * f2 * f2;

  cf.holder_ok = s.f <= s.holder_upper * (1.0 + 1e-12);
  if (s.lower_bound_f) cf.lower_ok = s.f >= *s.lower_bound_f * (1.0 - kPointwiseRelTol);
  cf.gn1_slack = check_gn1(v, delta).slack;

  cf.below_threshold = M < mass_threshold(L, delta);
  cf.m3_ok = !cf.below_threshold || cf.m3_defect < 0.0;
  cf.violation = cf.below_threshold && !(cf.holder_ok && cf.lower_ok && cf.m2_ok && cf.case_ok && cf.m3_ok);
  return cf;
}

/// Evaluates every frame of a beta = 3/4 gauged trajectory; conserved values
/// are frozen at their initial-frame values.
inline std::vector<CaseFrame> case_report(const Trajectory& traj, double delta, const ConservedReport& conserved0) {
  if (traj.frames.empty()) throw std::invalid_argument("case_report: empty trajectory");
  if (!(delta > 0.0)) throw std::invalid_argument("case_report: delta must be positive");
  std::vector<CaseFrame> out;
  out.reserve(traj.frames.size());
  for (const auto& fr : traj.frames) out.push_back(case_frame(fr.field, fr.t, delta, conserved0));
  return out;
}

}  // namespace dnls
