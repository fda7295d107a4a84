#pragma once

// Small optimization toolkit for the nonconvex maximizations behind the
// capacity quantities: gradient ascent on the unit sphere with Armijo
// backtracking, driven by multi-restart loops with seeded generators.

#include <cstdint>
#include <functional>

#include "qichan/linalg.hpp"

namespace qichan {

struct OptimizerConfig {
  std::uint64_t seed = 0;
  int restarts = 32;
  int max_iter = 500;
  /// Stop when the objective improves by less than this per iteration.
  double tol = 1e-12;
};

using SphereObjective = std::function<double(const ComplexVector&)>;
/// Returns the Wirtinger gradient ∂f/∂conj(x).
using SphereGradient = std::function<ComplexVector(const ComplexVector&)>;

struct SphereStep {
  ComplexVector x;
  double value = 0.0;
  double step = 1.0;        // accepted step (0 when none was found)
  double tangent_norm = 0.0;
};

/// One Armijo-backtracked ascent step along the tangent part of `grad` at the
/// unit vector `x`.  `step` is the first trial step size.
SphereStep armijo_sphere_step(const SphereObjective& f, const ComplexVector& x, double fx,
                              const ComplexVector& grad, double step);

struct AscentResult {
  ComplexVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Gradient ascent of f on the unit sphere from x0.
AscentResult sphere_ascent(const SphereObjective& f, const SphereGradient& grad, ComplexVector x0,
                           const OptimizerConfig& cfg);

}  // namespace qichan
