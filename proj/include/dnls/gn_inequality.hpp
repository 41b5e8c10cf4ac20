#pragma once

// Sharp Gagliardo-Nirenberg machinery on T_L.
//
// Line inequality:   ||F||_6 <= C ||F'||_2^{1/9} ||F||_4^{8/9}   on R,
// periodic variant:  ||f||_6 <= C (1 + 2d/(5L))^{2/9}
//                               (||f'||_2^2 + 2/(d sqrt L) ||f||_4^2)^{1/18} ||f||_4^{8/9}.
// The periodic bound comes from extending f (rotated so |f(0)| is minimal)
// by linear ramps of width d down to zero on both sides.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dnls/functionals.hpp"
#include "dnls/spectral_grid.hpp"

namespace dnls {

/// C_GN = 3^{1/6} (2 pi)^{-1/9}.
inline double cgn() { return std::pow(3.0, 1.0 / 6.0) * std::pow(2.0 * kPi, -1.0 / 9.0); }
/// C_GN^{-9/2} = 3^{-3/4} (2 pi)^{1/2}.
inline double cgn_pow_m9_2() { return std::pow(3.0, -0.75) * std::sqrt(2.0 * kPi); }
/// C_GN^{-18} = (2 pi)^2 / 27.
inline double cgn_pow_m18() { return 4.0 * kPi * kPi / 27.0; }

/// Flap width factor 1 + 2 delta / (5 L).
inline double flap_factor(double period, double delta) { return 1.0 + 2.0 * delta / (5.0 * period); }

struct FlapIntegrals {
  double l2grad = 0.0;  ///< int |F'|^2 over both ramps, 2 f0^2 / delta
  double l4 = 0.0;      ///< int |F|^4 over both ramps, 2 delta f0^4 / 5
  double l6 = 0.0;      ///< int |F|^6 over both ramps, 2 delta f0^6 / 7
};

struct ExtensionProfile {
  double delta = 0.0;
  std::size_t base_index = 0;
  double f0_abs = 0.0;
  double flap_l2grad = 0.0;
  double flap_l4 = 0.0;
  double flap_l6 = 0.0;
};

struct GnAuditRecord {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool satisfied = true;
  double delta = 0.0;
  double L = 0.0;
};

struct ExtensionAudit {
  GnAuditRecord record;
  ExtensionProfile profile;
};

inline constexpr double kGnRelTolerance = 1e-12;

inline GnAuditRecord make_audit_record(double lhs, double rhs, double delta, double period) {
  GnAuditRecord r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.satisfied = r.slack >= -kGnRelTolerance * rhs;
  r.delta = delta;
  r.L = period;
  return r;
}

struct BaseShift {
  Field shifted;
  std::size_t base_index;
};

/// Rotates the samples so that the node minimizing |f| becomes index 0.
inline BaseShift base_shift(const Field& f) {
  std::size_t best = 0;
  double best_abs = std::abs(f[0]);
  for (std::size_t j = 1; j < f.size(); ++j) {
    const double a = std::abs(f[j]);
    if (a < best_abs) {
      best_abs = a;
      best = j;
    }
  }
  CVec v(f.data());
  std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(best), v.end());
  return {Field(f.grid_ptr(), std::move(v)), best};
}

inline FlapIntegrals flap_integrals(double f0_abs, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("flap_integrals: delta must be positive");
  if (f0_abs < 0.0) throw std::invalid_argument("flap_integrals: |f(0)| must be nonnegative");
  const double a2 = f0_abs * f0_abs;
  return {2.0 * a2 / delta, 2.0 * delta * a2 * a2 / 5.0, 2.0 * delta * a2 * a2 * a2 / 7.0};
}

/// Audits the periodic inequality on f; `constant` replaces C_GN (fault injection).
inline GnAuditRecord check_gn1(const Field& f, double delta, double constant = cgn()) {
  if (!(delta > 0.0)) throw std::invalid_argument("check_gn1: delta must be positive");
  const double L = f.grid().period();
  const double l4 = lp_norm(f, 4);
  const double lhs = lp_norm(f, 6);
  const double inner = dirichlet(f) + 2.0 / (delta * std::sqrt(L)) * l4 * l4;
  const double rhs =
      constant * std::pow(flap_factor(L, delta), 2.0 / 9.0) * std::pow(inner, 1.0 / 18.0) * std::pow(l4, 8.0 / 9.0);
  return make_audit_record(lhs, rhs, delta, L);
}

/// Audits the line inequality on the ramp extension F of f.
inline ExtensionAudit check_gn0_on_extension(const Field& f, double delta, double constant = cgn()) {
  if (!(delta > 0.0)) throw std::invalid_argument("check_gn0_on_extension: delta must be positive");
  const auto [shifted, base] = base_shift(f);
  ExtensionProfile prof;
  prof.delta = delta;
  prof.base_index = base;
  prof.f0_abs = std::abs(shifted[0]);
  const auto flaps = flap_integrals(prof.f0_abs, delta);
  prof.flap_l2grad = flaps.l2grad;
  prof.flap_l4 = flaps.l4;
  prof.flap_l6 = flaps.l6;

  // Norms are rotation invariant; shifting only fixes the junction value.
  const double F6_6 = std::pow(lp_norm(shifted, 6), 6) + flaps.l6;
  const double F4_4 = std::pow(lp_norm(shifted, 4), 4) + flaps.l4;
  const double Fx2 = dirichlet(shifted) + flaps.l2grad;
  const double lhs = std::pow(F6_6, 1.0 / 6.0);
  const double rhs = constant * std::pow(Fx2, 1.0 / 18.0) * std::pow(F4_4, 2.0 / 9.0);
  return {make_audit_record(lhs, rhs, delta, f.grid().period()), prof};
}

/// Largest mass covered by the periodic GN bound with flap width delta:
/// 4 pi (1 + 2 delta / (5 L))^{-2}.
inline double mass_threshold(double period, double delta) {
  if (!(period > 0.0)) throw std::invalid_argument("mass_threshold: L must be positive");
  if (delta < 0.0) throw std::invalid_argument("mass_threshold: delta must be nonnegative");
  const double a = flap_factor(period, delta);
  return 4.0 * kPi / (a * a);
}

}  // namespace dnls
