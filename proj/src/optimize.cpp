#include "qichan/optimize.hpp"

#include <cmath>

namespace qichan {

SphereStep armijo_sphere_step(const SphereObjective& f, const ComplexVector& x, double fx,
                              const ComplexVector& grad, double step) {
  const ComplexVector t = grad - x * x.dot(grad);
  SphereStep out{x, fx, 0.0, t.norm()};
  if (out.tangent_norm == 0.0) return out;
  // f(x + s t) ≈ f(x) + 2 s |t|^2 to first order
  const double slope = 2.0 * out.tangent_norm * out.tangent_norm;
  for (double s = step; s > 1e-14; s *= 0.5) {
    ComplexVector y = x + s * t;
    y /= y.norm();
    const double fy = f(y);
    if (fy >= fx + 1e-4 * s * slope) {
      out.x = std::move(y);
      out.value = fy;
      out.step = s;
      return out;
    }
  }
  return out;
}

AscentResult sphere_ascent(const SphereObjective& f, const SphereGradient& grad, ComplexVector x0,
                           const OptimizerConfig& cfg) {
  AscentResult r;
  r.x = x0 / x0.norm();
  r.value = f(r.x);
  double step = 1.0;
  for (r.iterations = 0; r.iterations < cfg.max_iter; ++r.iterations) {
    const SphereStep s = armijo_sphere_step(f, r.x, r.value, grad(r.x), step);
    const double gain = s.value - r.value;
    r.x = s.x;
    r.value = s.value;
    if (s.step == 0.0 || s.tangent_norm < 1e-12 || gain < cfg.tol * std::max(1.0, std::abs(r.value))) {
      r.converged = true;
      break;
    }
    step = std::min(4.0 * s.step, 1e3);
  }
  return r;
}

}  // namespace qichan
