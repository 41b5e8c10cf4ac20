#pragma once

// Conserved functionals of the derivative NLS on T_L and of its gauged form.

#include <cmath>

#include "dnls/spectral_grid.hpp"

namespace dnls {

/// Reading of the cubic-derivative term "u u conj(u u)_x" in the energy.
///   literal:  u^2 * conj(d/dx (u^2))
///   standard: |u|^2 u * conj(u_x)
enum class TermForm { literal, standard };

/// Shipped reading, selected by the energy-conservation oracle.
inline constexpr TermForm kDefaultTermForm = TermForm::standard;

struct ConservedReport {
  double t = 0.0;
  double M = 0.0;
  double H = 0.0;
  double E = 0.0;
  double P = 0.0;
  double mu = 0.0;
  double Ecal = 0.0;
};

inline double mass(const Field& f) {
  double s = 0.0;
  for (const auto& z : f.values()) s += std::norm(z);
  return s * f.grid().spacing();
}

inline double mu(const Field& f) { return mass(f) / f.grid().period(); }

/// Im int f conj(f_x) dx.
inline double im_cross(const Field& f) {
  const Field fx = deriv(f);
  return integrate(pointwise(f, conj(fx))).imag();
}

/// int |f_x|^2 dx.
inline double dirichlet(const Field& f) { return mass(deriv(f)); }

/// Im of the cubic-derivative integral T, on the 2x padded grid.
inline double cubic_term(const Field& f, TermForm form) {
  if (form == TermForm::standard) {
    const Field u = refine(f, 2);
    const Field ux = refine(deriv(f), 2);
    cplx s{};
    for (std::size_t j = 0; j < u.size(); ++j) s += std::norm(u[j]) * u[j] * std::conj(ux[j]);
    return (s * u.grid().spacing()).imag();
  }
  const Field u = refine(f, 2);
  const Field w = pointwise(u, u);
  const Field wx = deriv(w);
  return integrate(pointwise(w, conj(wx))).imag();
}

inline double hamiltonian_u(const Field& f) {
  const double l4 = lp_norm(f, 4);
  return im_cross(f) + 0.5 * std::pow(l4, 4);
}

inline double energy_u(const Field& f, TermForm form = kDefaultTermForm) {
  const double l6 = lp_norm(f, 6);
  return dirichlet(f) + 1.5 * cubic_term(f, form) + 0.5 * std::pow(l6, 6);
}

inline double momentum_v(const Field& f) {
  return im_cross(f) - 0.25 * std::pow(lp_norm(f, 4), 4);
}

/// H for the gauged field v = Gamma_beta(u); equals hamiltonian_u(u).
inline double gauged_H(const Field& f, double beta) {
  const double m = mu(f);
  return im_cross(f) + (0.5 - beta) * std::pow(lp_norm(f, 4), 4) + f.grid().period() * beta * m * m;
}

/// E for the gauged field v = Gamma_beta(u); equals energy_u(u) for the
/// standard term form. The momentum-like term carries a factor mu.
inline double gauged_E(const Field& f, double beta, TermForm form = kDefaultTermForm) {
  const double m = mu(f);
  const double L = f.grid().period();
  const double l4_4 = std::pow(lp_norm(f, 4), 4);
  const double l6_6 = std::pow(lp_norm(f, 6), 6);
  const double c = 1.5 - 2.0 * beta;
  return dirichlet(f) + c * cubic_term(f, form) + (beta * beta - 1.5 * beta + 0.5) * l6_6 +
         2.0 * beta * m * im_cross(f) + beta * c * m * l4_4 + L * beta * beta * m * m * m;
}

/// The beta = 3/4 gauged energy: int |v_x|^2 - (1/16) int |v|^6 + (3/8) mu int |v|^4.
inline double ecal(const Field& f) {
  const double l4_4 = std::pow(lp_norm(f, 4), 4);
  const double l6_6 = std::pow(lp_norm(f, 6), 6);
  return dirichlet(f) - l6_6 / 16.0 + 0.375 * mu(f) * l4_4;
}

inline ConservedReport conserved_report(const Field& f, double t) {
  ConservedReport r;
  r.t = t;
  r.M = mass(f);
  r.mu = r.M / f.grid().period();
  r.H = hamiltonian_u(f);
  r.E = energy_u(f);
  r.P = momentum_v(f);
  r.Ecal = ecal(f);
  return r;
}

}  // namespace dnls
