#pragma once

// Discrete circle T_L = R/(L Z): equispaced nodes, Fourier pseudospectral
// calculus, rectangle-rule quadrature and L^p norms.
//
// Spectral coefficients are stored in FFT order: slot j holds mode m = j for
// j < N/2 and m = j - N otherwise, normalized so that
//   f(x_j) = sum_m c_m exp(i k_m x_j),  k_m = 2 pi m / L.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

enum class Dealias { two_thirds, none };

class TorusGrid {
 public:
  TorusGrid(double period, std::size_t n) : period_(period), n_(n) {
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw std::invalid_argument("TorusGrid: period L must be positive and finite");
    }
    if (n % 2 != 0) throw std::invalid_argument("TorusGrid: N must be even");
    if (n < 8) throw std::invalid_argument("TorusGrid: N must be at least 8");
    nodes_.resize(n);
    wavenumbers_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      nodes_[j] = period * static_cast<double>(j) / static_cast<double>(n);
      wavenumbers_[j] = fundamental() * mode(j);
    }
  }

  double period() const noexcept { return period_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return period_ / static_cast<double>(n_); }
  /// Lattice spacing 2 pi / L of the frequency lattice.
  double fundamental() const noexcept { return 2.0 * kPi / period_; }

  double node(std::size_t j) const { return nodes_.at(j); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  int mode(std::size_t slot) const noexcept {
    const auto half = n_ / 2;
    return slot < half ? static_cast<int>(slot)
                       : static_cast<int>(slot) - static_cast<int>(n_);
  }
  std::size_t slot(int m) const {
    const int half = static_cast<int>(n_ / 2);
    if (m < -half || m >= half) throw std::out_of_range("TorusGrid: mode outside [-N/2, N/2)");
    return m >= 0 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m + static_cast<int>(n_));
  }
  std::size_t nyquist_slot() const noexcept { return n_ / 2; }
  /// Wavenumbers k_m in FFT order.
  const std::vector<double>& wavenumbers() const noexcept { return wavenumbers_; }
  double wavenumber(std::size_t slot) const { return wavenumbers_.at(slot); }

  /// Largest |m| kept by the 2/3 rule.
  int dealias_cutoff() const noexcept { return static_cast<int>(n_ / 3); }

  bool same_as(const TorusGrid& other) const noexcept {
    return n_ == other.n_ && period_ == other.period_;
  }

 private:
  double period_;
  std::size_t n_;
  std::vector<double> nodes_;
  std::vector<double> wavenumbers_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

inline GridPtr make_grid(double period, std::size_t n) {
  return std::make_shared<const TorusGrid>(period, n);
}

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
  if (!a.same_as(b)) throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

/// Complex samples f(x_j) on a grid. Always finite, always grid.size() long.
class Field {
 public:
  Field(GridPtr grid, CVec values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("Field: null grid");
    if (values_.size() != grid_->size()) {
      throw std::invalid_argument("Field: sample count does not match grid size");
    }
    for (const auto& z : values_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw std::invalid_argument("Field: non-finite sample");
      }
    }
  }

  static Field zeros(GridPtr grid) {
    const auto n = grid->size();
    return Field(std::move(grid), CVec(n, cplx{}));
  }

  template <class Fn>
  static Field sample(GridPtr grid, Fn&& fn) {
    CVec v(grid->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = cplx(fn(grid->node(j)));
    return Field(std::move(grid), std::move(v));
  }

  const TorusGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  const CVec& data() const noexcept { return values_; }
  cplx operator[](std::size_t j) const { return values_[j]; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& z : values_) m = std::max(m, std::abs(z));
    return m;
  }

 private:
  GridPtr grid_;
  CVec values_;
};

namespace detail {

// FFTW planning is not thread-safe; execution of an existing plan on fresh
// arrays is. Plans are created once per size and shared.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  std::pair<fftw_plan, fftw_plan> get(std::size_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int ni = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_1d(ni, in, out, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_dft_1d(ni, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (!fwd || !bwd) throw std::runtime_error("FFTW planning failed");
    return plans_.emplace(n, std::make_pair(fwd, bwd)).first->second;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.first);
      fftw_destroy_plan(p.second);
    }
  }

  std::mutex mutex_;
  std::map<std::size_t, std::pair<fftw_plan, fftw_plan>> plans_;
};

inline fftw_complex* as_fftw(const cplx* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

/// Samples -> coefficients (divides by N). `in` and `out` must not alias.
inline void fft_forward(std::span<const cplx> in, std::span<cplx> out) {
  const auto n = in.size();
  fftw_execute_dft(FftPlans::instance().get(n).first, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& z : out) z *= scale;
}

/// Coefficients -> samples. `in` and `out` must not alias.
inline void fft_inverse(std::span<const cplx> in, std::span<cplx> out) {
  fftw_execute_dft(FftPlans::instance().get(in.size()).second, as_fftw(in.data()), as_fftw(out.data()));
}

}  // namespace detail

class Spectrum {
 public:
  Spectrum(GridPtr grid, CVec coefficients) : grid_(std::move(grid)), coeffs_(std::move(coefficients)) {
    if (!grid_ || coeffs_.size() != grid_->size()) {
      throw std::invalid_argument("Spectrum: coefficient count does not match grid size");
    }
  }

  const TorusGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  /// Coefficient of mode m in [-N/2, N/2).
  cplx at(int m) const { return coeffs_[grid_->slot(m)]; }
  std::span<const cplx> coefficients() const noexcept { return coeffs_; }
  const CVec& data() const noexcept { return coeffs_; }

 private:
  GridPtr grid_;
  CVec coeffs_;
};

inline Spectrum to_spectrum(const Field& f) {
  CVec c(f.size());
  detail::fft_forward(f.values(), c);
  return Spectrum(f.grid_ptr(), std::move(c));
}

inline Field to_field(const Spectrum& s) {
  CVec v(s.data().size());
  detail::fft_inverse(s.coefficients(), v);
  return Field(s.grid_ptr(), std::move(v));
}

/// Zero every coefficient outside the band kept by `rule`.
inline void apply_dealias(std::span<cplx> coeffs, const TorusGrid& grid, Dealias rule) {
  if (rule == Dealias::none) return;
  const int cut = grid.dealias_cutoff();
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (std::abs(grid.mode(j)) > cut) coeffs[j] = 0.0;
  }
}

/// Spectral derivative; the Nyquist mode is mapped to zero.
inline Field deriv(const Field& f) {
  const auto& g = f.grid();
  CVec c(f.size());
  detail::fft_forward(f.values(), c);
  const auto& k = g.wavenumbers();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= cplx(0.0, k[j]);
  c[g.nyquist_slot()] = 0.0;
  CVec out(f.size());
  detail::fft_inverse(c, out);
  return Field(f.grid_ptr(), std::move(out));
}

/// Mean-zero periodic antiderivative I of a real field g: dI/dx = g - mean(g).
/// The Nyquist coefficient is dropped: I is real and deriv(I) matches.
inline Field antideriv_meanzero(const Field& g) {
  double max_im = 0.0;
  for (const auto& z : g.values()) max_im = std::max(max_im, std::abs(z.imag()));
  if (max_im > 1e-12 * g.max_abs()) {
    throw std::invalid_argument("antideriv_meanzero: input is not real-valued");
  }
  const auto& grid = g.grid();
  CVec c(g.size());
  detail::fft_forward(g.values(), c);
  const auto& k = grid.wavenumbers();
  c[0] = 0.0;
  for (std::size_t j = 1; j < c.size(); ++j) c[j] /= cplx(0.0, k[j]);
  c[grid.nyquist_slot()] = 0.0;
  CVec out(g.size());
  detail::fft_inverse(c, out);
  for (auto& z : out) z = z.real();
  return Field(g.grid_ptr(), std::move(out));
}

/// Rectangle rule (L/N) sum_j f(x_j).
inline cplx integrate(const Field& f) {
  cplx s{};
  for (const auto& z : f.values()) s += z;
  return s * f.grid().spacing();
}

/// Trigonometric interpolant of f resampled on a grid `factor` times finer.
inline Field refine(const Field& f, std::size_t factor = 2) {
  if (factor == 1) return f;
  if (factor == 0) throw std::invalid_argument("refine: factor must be positive");
  const auto& g = f.grid();
  auto fine = make_grid(g.period(), g.size() * factor);
  CVec c(f.size());
  detail::fft_forward(f.values(), c);
  CVec cf(fine->size(), cplx{});
  for (std::size_t j = 0; j < c.size(); ++j) cf[fine->slot(g.mode(j))] = c[j];
  CVec out(fine->size());
  detail::fft_inverse(cf, out);
  return Field(std::move(fine), std::move(out));
}

/// (int |f|^p)^(1/p) for p in {2, 4, 6}; p = 4, 6 use a 2x zero-padded grid.
inline double lp_norm(const Field& f, int p) {
  if (p != 2 && p != 4 && p != 6) throw std::invalid_argument("lp_norm: p must be 2, 4 or 6");
  if (p == 2) {
    double s = 0.0;
    for (const auto& z : f.values()) s += std::norm(z);
    return std::sqrt(s * f.grid().spacing());
  }
  const Field fine = refine(f, 2);
  double s = 0.0;
  for (const auto& z : fine.values()) {
    const double a2 = std::norm(z);
    s += p == 4 ? a2 * a2 : a2 * a2 * a2;
  }
  return std::pow(s * fine.grid().spacing(), 1.0 / p);
}

/// g(x) = f(x - s), via phase factors exp(-i k_m s).
inline Field translate(const Field& f, double s) {
  CVec c(f.size());
  detail::fft_forward(f.values(), c);
  const auto& k = f.grid().wavenumbers();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, -k[j] * s);
  CVec out(f.size());
  detail::fft_inverse(c, out);
  return Field(f.grid_ptr(), std::move(out));
}

/// Integer n with alpha = n * 2 pi / L; throws if alpha is off the lattice.
inline long lattice_index(double alpha, const TorusGrid& grid) {
  const double n = alpha / grid.fundamental();
  const double r = std::round(n);
  if (!std::isfinite(n) || std::abs(n - r) > 1e-9 * std::max(1.0, std::abs(n))) {
    throw std::invalid_argument("frequency is not on the lattice 2 pi Z / L");
  }
  return static_cast<long>(r);
}

/// exp(i alpha x) f(x) for alpha in 2 pi Z / L.
inline Field modulate(const Field& f, double alpha) {
  const long n = lattice_index(alpha, f.grid());
  const auto N = static_cast<long>(f.size());
  CVec out(f.size());
  for (long j = 0; j < N; ++j) {
    // reduce n*j mod N before forming the angle
    const long r = ((n % N) * j) % N;
    out[j] = f[j] * std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(N));
  }
  return Field(f.grid_ptr(), std::move(out));
}

// Pointwise arithmetic.

inline Field operator+(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "operator+");
  CVec v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] + b[j];
  return Field(a.grid_ptr(), std::move(v));
}

inline Field operator-(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "operator-");
  CVec v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] - b[j];
  return Field(a.grid_ptr(), std::move(v));
}

inline Field operator*(cplx s, const Field& a) {
  CVec v(a.data());
  for (auto& z : v) z *= s;
  return Field(a.grid_ptr(), std::move(v));
}

inline Field pointwise(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise");
  CVec v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] * b[j];
  return Field(a.grid_ptr(), std::move(v));
}

inline Field conj(const Field& a) {
  CVec v(a.data());
  for (auto& z : v) z = std::conj(z);
  return Field(a.grid_ptr(), std::move(v));
}

inline Field abs2(const Field& a) {
  CVec v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::norm(a[j]);
  return Field(a.grid_ptr(), std::move(v));
}

/// Discrete L^2 distance ||a - b||.
inline double l2_distance(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "l2_distance");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(s * a.grid().spacing());
}

}  // namespace dnls
