#pragma once

// Gauge transform Gamma_beta(f) = exp(-i beta I(f)) f, where I(f) is the
// mean-zero antiderivative of |f|^2 - mu, together with the moving-frame
// spacetime gauge v(x, t) = Gamma_beta(u)(x - 2 beta mu t, t).

#include <cmath>
#include <stdexcept>

#include "dnls/functionals.hpp"
#include "dnls/spectral_grid.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

/// Sign in front of beta^2 mu^2 in the nonlocal coefficient psi(v).
enum class MuSquaredSign { plus, minus };

/// Shipped sign, selected by the gauge-consistency oracle.
inline constexpr MuSquaredSign kDefaultMuSquaredSign = MuSquaredSign::plus;

inline Field gauge_profile(const Field& f, double beta) {
  if (beta == 0.0) return f;
  const Field I = antideriv_meanzero(abs2(f));
  CVec out(f.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::polar(1.0, -beta * I[j].real()) * f[j];
  return Field(f.grid_ptr(), std::move(out));
}

/// Inverse of gauge_profile: I depends only on |f|, which the gauge keeps.
inline Field ungauge_profile(const Field& f, double beta) { return gauge_profile(f, -beta); }

/// psi from its ingredients: im_cross = Im int v conj(v_x), l4_4 = int |v|^4.
inline double psi_value(double im_cross_val, double l4_4, double beta, double mu_val, double period,
                        MuSquaredSign sign = kDefaultMuSquaredSign) {
  const double s = sign == MuSquaredSign::plus ? 1.0 : -1.0;
  return beta / period * (2.0 * im_cross_val + (1.5 - 2.0 * beta) * l4_4) + s * beta * beta * mu_val * mu_val;
}

/// The spatially constant coefficient psi(v) of the gauged equation.
inline double psi(const Field& v, double beta, double mu_val, MuSquaredSign sign = kDefaultMuSquaredSign) {
  if (mu_val < 0.0) throw std::invalid_argument("psi: mu must be nonnegative");
  return psi_value(im_cross(v), std::pow(lp_norm(v, 4), 4), beta, mu_val, v.grid().period(), sign);
}

/// Applies the moving-frame gauge to every frame; mu is frozen at t = 0.
inline Trajectory gauge_trajectory(const Trajectory& traj, double beta) {
  if (traj.frames.empty()) throw std::invalid_argument("gauge_trajectory: empty trajectory");
  const double m = mu(traj.frames.front().field);
  Trajectory out;
  out.config = traj.config;
  out.config.equation = Equation::dnls2;
  out.config.beta = beta;
  out.frames.reserve(traj.frames.size());
  for (const auto& fr : traj.frames) {
    if (beta == 0.0) {
      out.frames.push_back(fr);
      continue;
    }
    out.frames.push_back({fr.t, translate(gauge_profile(fr.field, beta), 2.0 * beta * m * fr.t)});
  }
  return out;
}

}  // namespace dnls
