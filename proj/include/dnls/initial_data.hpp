#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "dnls/functionals.hpp"
#include "dnls/spectral_grid.hpp"

namespace dnls {

enum class DataKind { plane_wave, multimode, bump };

struct DataSpec {
  DataKind kind = DataKind::multimode;
  double amplitude = 1.0;
  /// Plane-wave index m (u = A e^{i k_m x}); carrier index for bumps.
  int mode = 1;
  /// Multimode: random coefficients on |m| <= max_mode.
  int max_mode = 4;
  /// Multimode: coefficient envelope exp(-decay |m|).
  double decay = 0.5;
  /// Bump: Gaussian width and center, in length units.
  double width = 0.5;
  double center = 0.0;
  std::optional<double> target_mass;
  std::uint64_t seed = 0;
};

inline void validate(const DataSpec& s, const TorusGrid& g) {
  const int band = g.dealias_cutoff();
  if (!std::isfinite(s.amplitude)) throw std::invalid_argument("data.amplitude must be finite");
  if (s.target_mass && !(*s.target_mass > 0.0)) throw std::invalid_argument("data.target_mass must be positive");
  switch (s.kind) {
    case DataKind::plane_wave:
    case DataKind::bump:
      if (std::abs(s.mode) > band) {
        throw std::invalid_argument("data.mode " + std::to_string(s.mode) + " outside dealiasing band [-N/3, N/3]");
      }
      if (s.kind == DataKind::bump && !(s.width > 0.0)) throw std::invalid_argument("data.width must be positive");
      break;
    case DataKind::multimode:
      if (s.max_mode < 0 || s.max_mode > band) {
        throw std::invalid_argument("data.max_mode outside dealiasing band [0, N/3]");
      }
      if (!(s.decay >= 0.0)) throw std::invalid_argument("data.decay must be nonnegative");
      break;
  }
}

namespace detail {

inline Field band_limit(const Field& f) {
  CVec c(f.size());
  fft_forward(f.values(), c);
  apply_dealias(c, f.grid(), Dealias::two_thirds);
  CVec v(f.size());
  fft_inverse(c, v);
  return Field(f.grid_ptr(), std::move(v));
}

}  // namespace detail

inline Field build(const DataSpec& spec, GridPtr grid) {
  validate(spec, *grid);
  const auto& g = *grid;
  const double k0 = g.fundamental();
  Field f = Field::zeros(grid);
  switch (spec.kind) {
    case DataKind::plane_wave: {
      const double k = k0 * spec.mode;
      f = Field::sample(grid, [&](double x) { return spec.amplitude * std::polar(1.0, k * x); });
      break;
    }
    case DataKind::multimode: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      CVec c(g.size(), cplx{});
      for (int m = -spec.max_mode; m <= spec.max_mode; ++m) {
        const double re = normal(rng);
        const double im = normal(rng);
        c[g.slot(m)] = spec.amplitude * std::exp(-spec.decay * std::abs(m)) * cplx(re, im) / std::sqrt(2.0);
      }
      CVec v(g.size());
      detail::fft_inverse(c, v);
      f = Field(grid, std::move(v));
      break;
    }
    case DataKind::bump: {
      const double L = g.period();
      const double k = k0 * spec.mode;
      const double w2 = 2.0 * spec.width * spec.width;
      f = Field::sample(grid, [&](double x) {
        double s = 0.0;
        for (int n = -4; n <= 4; ++n) {
          const double d = x - spec.center - n * L;
          s += std::exp(-d * d / w2);
        }
        return spec.amplitude * s * std::polar(1.0, k * x);
      });
      f = detail::band_limit(f);
      break;
    }
  }
  if (spec.target_mass) {
    const double m = mass(f);
    if (!(m > 0.0)) throw std::invalid_argument("build: cannot rescale a zero field to target_mass");
    f = cplx(std::sqrt(*spec.target_mass / m)) * f;
  }
  return f;
}

}  // namespace dnls
