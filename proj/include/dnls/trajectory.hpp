#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dnls/spectral_grid.hpp"

namespace dnls {

enum class Equation { dnls1, dnls2 };
enum class Integrator { ifrk4, etdrk4 };

struct SimConfig {
  double dt = 1e-4;
  double T = 1.0;
  int record_stride = 1;
  Dealias dealias = Dealias::two_thirds;
  Integrator integrator = Integrator::ifrk4;
  Equation equation = Equation::dnls1;
  double beta = 0.75;
  std::int64_t seed = 0;
  /// Guard trips when ||u_x|| exceeds this multiple of its reference value.
  double blowup_factor = 1e3;
};

inline void validate(const SimConfig& c) {
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw std::invalid_argument("sim.dt must be positive");
  if (!(c.T > 0.0) || !std::isfinite(c.T)) throw std::invalid_argument("sim.T must be positive");
  if (c.dt > c.T) throw std::invalid_argument("sim.dt must not exceed sim.T");
  if (c.record_stride < 1) throw std::invalid_argument("sim.record_stride must be >= 1");
  if (!std::isfinite(c.beta)) throw std::invalid_argument("sim.beta must be finite");
  if (!(c.blowup_factor > 1.0)) throw std::invalid_argument("sim.blowup_factor must exceed 1");
}

struct Frame {
  double t;
  Field field;
};

struct Trajectory {
  std::vector<Frame> frames;
  SimConfig config;
};

}  // namespace dnls
