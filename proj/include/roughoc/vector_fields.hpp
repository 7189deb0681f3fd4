#pragma once

#include <functional>
#include <vector>

#include "roughoc/grid.hpp"

namespace roughoc {

/// Right-hand side of dY = b(t,Y,u) dt + sigma(t,Y) dX.
///
/// diffusion_jacobian(t, x)[k](i, l) = d sigma_{ik} / d x_l, one n x n matrix
/// per noise channel k. diffusion_hessian(t, x, k, w) is the directional
/// derivative D(grad sigma_k)(x)[w]; when it is not supplied a central
/// difference of diffusion_jacobian is used instead.
struct VectorFieldBundle {
  int n = 0;  // state
  int m = 0;  // control
  int d = 0;  // noise

  std::function<Vec(double, const Vec&, const Vec&)> drift;
  std::function<Mat(double, const Vec&, const Vec&)> drift_jacobian;
  std::function<Mat(double, const Vec&, const Vec&)> drift_control_jacobian;  // n x m
  std::function<Mat(double, const Vec&)> diffusion;                          // n x d
  std::function<std::vector<Mat>(double, const Vec&)> diffusion_jacobian;

  std::function<Mat(double, const Vec&, int, const Vec&)> diffusion_hessian;  // optional
  /// Optional fast path for sum_k D sigma_k(x)[W.col(k)] with W n x d;
  /// defaults to contracting diffusion_jacobian.
  std::function<Vec(double, const Vec&, const Mat&)> diffusion_contraction;
};

/// D(grad sigma_k)(x)[w], analytic when available, otherwise a central
/// difference with step 1e-6 * (1 + |x|).
Mat diffusion_hessian_dir(const VectorFieldBundle& fields, double t, const Vec& x, int k,
                          const Vec& w);

struct JacobianCheck {
  double drift = 0.0;
  double drift_control = 0.0;
  double diffusion = 0.0;
};

/// Largest relative error of the analytic Jacobians against central
/// differences at (t, x, u). Relative to max(1, |analytic|_max).
JacobianCheck check_jacobians(const VectorFieldBundle& fields, double t, const Vec& x,
                              const Vec& u, double rel_step = 1e-6);

}  // namespace roughoc
