#pragma once

// Pseudospectral time integration of
//   (dnls1)  u_t = i u_xx + (|u|^2 u)_x
//   (dnls2)  v_t = i v_xx - i [ 2(1-b) i |v|^2 v_x + (1-2b) i v^2 conj(v_x)
//                               + b mu |v|^2 v + b(1/2-b) |v|^4 v - psi(v) v ]
// The linear part i d_xx is diagonal in Fourier space (symbol -i k^2) and is
// propagated exactly; nonlinear products are formed on the grid and
// optionally dealiased with the 2/3 rule.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/functionals.hpp"
#include "dnls/gauge.hpp"
#include "dnls/spectral_grid.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

/// Maps Fourier coefficients of the state to Fourier coefficients of the
/// nonlinear part of its time derivative.
using SpectralOperator = std::function<void(std::span<const cplx>, std::span<cplx>)>;

/// Per-mode multiplier -i k^2 of the operator i d_xx.
inline CVec linear_symbol(const TorusGrid& g) {
  CVec s(g.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double k = g.wavenumber(j);
    s[j] = cplx(0.0, -k * k);
  }
  return s;
}

class Dnls1Nonlinearity {
 public:
  Dnls1Nonlinearity(GridPtr grid, Dealias rule)
      : grid_(std::move(grid)), rule_(rule), u_(grid_->size()), w_(grid_->size()) {}

  void operator()(std::span<const cplx> uhat, std::span<cplx> out) {
    detail::fft_inverse(uhat, u_);
    for (std::size_t j = 0; j < u_.size(); ++j) w_[j] = std::norm(u_[j]) * u_[j];
    detail::fft_forward(w_, out);
    apply_dealias(out, *grid_, rule_);
    const auto& k = grid_->wavenumbers();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= cplx(0.0, k[j]);
    out[grid_->nyquist_slot()] = 0.0;
  }

 private:
  GridPtr grid_;
  Dealias rule_;
  CVec u_, w_;
};

class Dnls2Nonlinearity {
 public:
  Dnls2Nonlinearity(GridPtr grid, Dealias rule, double beta, double mu_val,
                    MuSquaredSign sign = kDefaultMuSquaredSign)
      : grid_(std::move(grid)), rule_(rule), beta_(beta), mu_(mu_val), sign_(sign),
        v_(grid_->size()), vx_(grid_->size()), tmp_(grid_->size()), w_(grid_->size()) {
    if (mu_val < 0.0) throw std::invalid_argument("dnls2: mu must be nonnegative");
  }

  void operator()(std::span<const cplx> vhat, std::span<cplx> out) {
    const auto& k = grid_->wavenumbers();
    const std::size_t n = vhat.size();
    detail::fft_inverse(vhat, v_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = vhat[j] * cplx(0.0, k[j]);
    tmp_[grid_->nyquist_slot()] = 0.0;
    detail::fft_inverse(tmp_, vx_);

    const double h = grid_->spacing();
    cplx cross{};
    double l4_4 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cross += v_[j] * std::conj(vx_[j]);
      const double a2 = std::norm(v_[j]);
      l4_4 += a2 * a2;
    }
    const double psi_v = psi_value(cross.imag() * h, l4_4 * h, beta_, mu_, grid_->period(), sign_);

    const double b = beta_;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = v_[j];
      const cplx vx = vx_[j];
      const double a2 = std::norm(v);
      const cplx r = 2.0 * (1.0 - b) * kI * a2 * vx + (1.0 - 2.0 * b) * kI * v * v * std::conj(vx) +
                     b * mu_ * a2 * v + b * (0.5 - b) * a2 * a2 * v;
      w_[j] = -kI * r;
    }
    detail::fft_forward(w_, out);
    apply_dealias(out, *grid_, rule_);
    for (std::size_t j = 0; j < n; ++j) out[j] += kI * psi_v * vhat[j];
  }

 private:
  GridPtr grid_;
  Dealias rule_;
  double beta_, mu_;
  MuSquaredSign sign_;
  CVec v_, vx_, tmp_, w_;
};

/// Nonlinear part for the given equation. At beta = 0 the gauged equation is
/// dnls1 itself and shares its evaluation.
inline SpectralOperator make_nonlinearity(GridPtr grid, Equation equation, Dealias rule, double beta, double mu_val,
                                          MuSquaredSign sign = kDefaultMuSquaredSign) {
  if (equation == Equation::dnls1 || beta == 0.0) return Dnls1Nonlinearity(std::move(grid), rule);
  return Dnls2Nonlinearity(std::move(grid), rule, beta, mu_val, sign);
}

/// One-step propagator for u_t = (symbol) u + N(u) in Fourier space.
/// ifrk4: classical RK4 in the integrating-factor variable (Lawson).
/// etdrk4: Cox-Matthews exponential time differencing, coefficients by
/// contour averaging.
class Stepper {
 public:
  Stepper(std::span<const cplx> symbol, double dt, Integrator kind) : kind_(kind), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be positive");
    const std::size_t n = symbol.size();
    e_.resize(n);
    e2_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      e_[j] = std::exp(symbol[j] * dt);
      e2_[j] = std::exp(symbol[j] * (0.5 * dt));
    }
    if (kind == Integrator::etdrk4) etd_coefficients(symbol);
    for (auto* b : {&k1_, &k2_, &k3_, &k4_, &a_, &b_}) b->resize(n);
  }

  double dt() const noexcept { return dt_; }

  void advance(CVec& u, const SpectralOperator& nonlinear) {
    if (kind_ == Integrator::ifrk4) {
      advance_ifrk4(u, nonlinear);
    } else {
      advance_etdrk4(u, nonlinear);
    }
  }

 private:
  void advance_ifrk4(CVec& u, const SpectralOperator& nl) {
    const std::size_t n = u.size();
    const double h = dt_;
    nl(u, k1_);
    for (std::size_t j = 0; j < n; ++j) a_[j] = e2_[j] * (u[j] + 0.5 * h * k1_[j]);
    nl(a_, k2_);
    for (std::size_t j = 0; j < n; ++j) a_[j] = e2_[j] * u[j] + 0.5 * h * k2_[j];
    nl(a_, k3_);
    for (std::size_t j = 0; j < n; ++j) a_[j] = e_[j] * u[j] + h * e2_[j] * k3_[j];
    nl(a_, k4_);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] = e_[j] * u[j] + (h / 6.0) * (e_[j] * k1_[j] + 2.0 * e2_[j] * (k2_[j] + k3_[j]) + k4_[j]);
    }
  }

  void advance_etdrk4(CVec& u, const SpectralOperator& nl) {
    const std::size_t n = u.size();
    nl(u, k1_);
    for (std::size_t j = 0; j < n; ++j) a_[j] = e2_[j] * u[j] + q_[j] * k1_[j];
    nl(a_, k2_);
    for (std::size_t j = 0; j < n; ++j) b_[j] = e2_[j] * u[j] + q_[j] * k2_[j];
    nl(b_, k3_);
    for (std::size_t j = 0; j < n; ++j) a_[j] = e2_[j] * a_[j] + q_[j] * (2.0 * k3_[j] - k1_[j]);
    nl(a_, k4_);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] = e_[j] * u[j] + f1_[j] * k1_[j] + 2.0 * f2_[j] * (k2_[j] + k3_[j]) + f3_[j] * k4_[j];
    }
  }

  void etd_coefficients(std::span<const cplx> symbol) {
    constexpr int kContour = 64;
    const std::size_t n = symbol.size();
    q_.assign(n, 0.0);
    f1_.assign(n, 0.0);
    f2_.assign(n, 0.0);
    f3_.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx z = symbol[j] * dt_;
      cplx q{}, f1{}, f2{}, f3{};
      for (int p = 0; p < kContour; ++p) {
        const cplx r = z + std::polar(1.0, 2.0 * kPi * (p + 0.5) / kContour);
        const cplx er = std::exp(r);
        const cplx r3 = r * r * r;
        q += (std::exp(0.5 * r) - 1.0) / r;
        f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
        f2 += (2.0 + r + er * (r - 2.0)) / r3;
        f3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
      }
      const double s = dt_ / kContour;
      q_[j] = q * s;
      f1_[j] = f1 * s;
      f2_[j] = f2 * s;
      f3_[j] = f3 * s;
    }
  }

  Integrator kind_;
  double dt_;
  CVec e_, e2_, q_, f1_, f2_, f3_;
  CVec k1_, k2_, k3_, k4_, a_, b_;
};

/// One step of size dt for u_t = L u + N(u), L given by its per-mode symbol.
inline Field step(const Field& f, double dt, const SpectralOperator& nonlinear, std::span<const cplx> symbol,
                  Integrator kind = Integrator::ifrk4) {
  if (symbol.size() != f.size()) throw std::invalid_argument("step: symbol size mismatch");
  Stepper stepper(symbol, dt, kind);
  CVec c(f.size());
  detail::fft_forward(f.values(), c);
  stepper.advance(c, nonlinear);
  CVec v(f.size());
  detail::fft_inverse(c, v);
  return Field(f.grid_ptr(), std::move(v));
}

namespace detail {

inline Field full_rhs(const Field& u, const SpectralOperator& nl) {
  const auto sym = linear_symbol(u.grid());
  CVec c(u.size()), out(u.size());
  detail::fft_forward(u.values(), c);
  nl(c, out);
  for (std::size_t j = 0; j < c.size(); ++j) out[j] += sym[j] * c[j];
  CVec v(u.size());
  detail::fft_inverse(out, v);
  return Field(u.grid_ptr(), std::move(v));
}

}  // namespace detail

inline Field rhs_dnls1(const Field& u, Dealias rule = Dealias::two_thirds) {
  return detail::full_rhs(u, Dnls1Nonlinearity(u.grid_ptr(), rule));
}

inline Field rhs_dnls2(const Field& v, double beta, double mu_val, Dealias rule = Dealias::two_thirds,
                       MuSquaredSign sign = kDefaultMuSquaredSign) {
  if (mu_val < 0.0) throw std::invalid_argument("dnls2: mu must be nonnegative");
  return detail::full_rhs(v, make_nonlinearity(v.grid_ptr(), Equation::dnls2, rule, beta, mu_val, sign));
}

enum class Termination { completed, blowup_guard, non_finite };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup_guard: return "blowup_guard";
    case Termination::non_finite: return "non_finite";
  }
  return "unknown";
}

struct SimResult {
  Trajectory trajectory;
  Termination status = Termination::completed;
  /// Time reached (the hit time when a guard fired).
  double stop_time = 0.0;
  std::size_t steps = 0;
  double dt_effective = 0.0;
  double h1dot_initial = 0.0;
  double h1dot_max = 0.0;
  double guard_threshold = 0.0;
  std::vector<std::string> warnings;
  std::string message;

  bool ok() const noexcept { return status == Termination::completed; }
};

namespace detail {

inline double h1dot_from_spectrum(std::span<const cplx> c, const TorusGrid& g) {
  const auto& k = g.wavenumbers();
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (j == g.nyquist_slot()) continue;
    s += k[j] * k[j] * std::norm(c[j]);
  }
  return std::sqrt(s * g.period());
}

inline bool all_finite(std::span<const cplx> c) {
  return std::all_of(c.begin(), c.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace detail

/// Number of uniform steps used for horizon T at requested step dt.
inline std::size_t step_count(double T, double dt) {
  const double r = T / dt;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(r - 1e-9 * r)));
}

/// Integrates from u0 over [0, T]. Equation dnls2 uses mu = mu(u0).
inline SimResult simulate(const Field& u0, const SimConfig& config,
                          MuSquaredSign sign = kDefaultMuSquaredSign) {
  validate(config);
  const GridPtr grid = u0.grid_ptr();
  const auto& g = *grid;
  const std::size_t nsteps = step_count(config.T, config.dt);
  const double h = config.T / static_cast<double>(nsteps);

  SimResult res;
  res.trajectory.config = config;
  res.dt_effective = h;
  res.trajectory.frames.push_back({0.0, u0});

  const SpectralOperator nl = make_nonlinearity(grid, config.equation, config.dealias, config.beta, mu(u0), sign);
  const auto sym = linear_symbol(g);
  Stepper stepper(sym, h, config.integrator);

  CVec c(g.size());
  detail::fft_forward(u0.values(), c);
  res.h1dot_initial = detail::h1dot_from_spectrum(c, g);
  res.h1dot_max = res.h1dot_initial;
  const double reference = std::max(res.h1dot_initial, g.fundamental() * std::sqrt(mass(u0)));
  res.guard_threshold = config.blowup_factor * reference;

  const double umax2 = u0.max_abs() * u0.max_abs();
  const int kcut = config.dealias == Dealias::two_thirds ? g.dealias_cutoff() : static_cast<int>(g.size() / 2);
  const double kmax = g.fundamental() * kcut;
  if (umax2 > 0.0 && h > 0.5 / (kmax * umax2)) {
    res.warnings.push_back("dt " + std::to_string(h) + " exceeds advective CFL estimate " +
                           std::to_string(0.5 / (kmax * umax2)));
  }

  CVec v(g.size());
  for (std::size_t s = 1; s <= nsteps; ++s) {
    stepper.advance(c, nl);
    const double t = static_cast<double>(s) * h;
    res.steps = s;
    res.stop_time = t;
    if (!detail::all_finite(c)) {
      res.status = Termination::non_finite;
      res.message = "non-finite state at t = " + std::to_string(t);
      return res;
    }
    const double h1 = detail::h1dot_from_spectrum(c, g);
    if (!std::isfinite(h1)) {
      res.status = Termination::non_finite;
      res.message = "non-finite H1 seminorm at t = " + std::to_string(t);
      return res;
    }
    res.h1dot_max = std::max(res.h1dot_max, h1);
    if (h1 > res.guard_threshold) {
      res.status = Termination::blowup_guard;
      res.message = "H1 seminorm " + std::to_string(h1) + " exceeded guard " +
                    std::to_string(res.guard_threshold) + " at t = " + std::to_string(t);
      return res;
    }
    if (s % static_cast<std::size_t>(config.record_stride) == 0) {
      detail::fft_inverse(c, v);
      if (!detail::all_finite(v)) {
        res.status = Termination::non_finite;
        res.message = "non-finite samples at t = " + std::to_string(t);
        return res;
      }
      res.trajectory.frames.push_back({t, Field(grid, v)});
    }
  }
  return res;
}

/// Per interior frame, || D_t u - rhs(u) ||_{L^2} with D_t the centered
/// difference over the (uniform) frame spacing.
inline std::vector<double> pde_residual(const Trajectory& traj, Equation equation, double beta, double mu_val,
                                        MuSquaredSign sign = kDefaultMuSquaredSign) {
  const auto& fr = traj.frames;
  if (fr.size() < 3) throw std::invalid_argument("pde_residual: need at least 3 frames");
  const double spacing = fr[1].t - fr[0].t;
  if (!(spacing > 0.0)) throw std::invalid_argument("pde_residual: frames not increasing");
  for (std::size_t i = 1; i + 1 < fr.size(); ++i) {
    if (std::abs((fr[i + 1].t - fr[i].t) - spacing) > 1e-9 * spacing) {
      throw std::invalid_argument("pde_residual: frames not uniformly spaced");
    }
  }
  const auto rule = traj.config.dealias;
  std::vector<double> out;
  out.reserve(fr.size() - 2);
  for (std::size_t i = 1; i + 1 < fr.size(); ++i) {
    const Field rhs = equation == Equation::dnls1 ? rhs_dnls1(fr[i].field, rule)
                                                  : rhs_dnls2(fr[i].field, beta, mu_val, rule, sign);
    const Field dt = cplx(1.0 / (2.0 * spacing)) * (fr[i + 1].field - fr[i - 1].field);
    out.push_back(l2_distance(dt, rhs));
  }
  return out;
}

}  // namespace dnls
