#include "roughoc/vector_fields.hpp"

#include <algorithm>

namespace roughoc {

Mat diffusion_hessian_dir(const VectorFieldBundle& fields, double t, const Vec& x, int k,
                          const Vec& w) {
  if (fields.diffusion_hessian) return fields.diffusion_hessian(t, x, k, w);
  const double scale = w.norm();
  if (scale == 0.0) return Mat::Zero(fields.n, fields.n);
  const Vec dir = w / scale;
  const double h = 1e-6 * (1.0 + x.norm());
  const auto k_idx = static_cast<std::size_t>(k);
  const Mat plus = fields.diffusion_jacobian(t, x + h * dir)[k_idx];
  const Mat minus = fields.diffusion_jacobian(t, x - h * dir)[k_idx];
  return (scale / (2.0 * h)) * (plus - minus);
}

namespace {

double rel_err(const Mat& analytic, const Mat& fd) {
  const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

JacobianCheck check_jacobians(const VectorFieldBundle& fields, double t, const Vec& x,
                              const Vec& u, double rel_step) {
  JacobianCheck out;
  const int n = fields.n;
  const double hx = rel_step * std::max(1.0, x.cwiseAbs().maxCoeff());

  Mat fd_drift(n, n);
  std::vector<Mat> fd_diff(static_cast<std::size_t>(fields.d), Mat(n, n));
  for (int l = 0; l < n; ++l) {
    Vec xp = x;
    Vec xm = x;
    xp(l) += hx;
    xm(l) -= hx;
    fd_drift.col(l) = (fields.drift(t, xp, u) - fields.drift(t, xm, u)) / (2 * hx);
    const Mat dsig = (fields.diffusion(t, xp) - fields.diffusion(t, xm)) / (2 * hx);
    for (int k = 0; k < fields.d; ++k) fd_diff[static_cast<std::size_t>(k)].col(l) = dsig.col(k);
  }
  out.drift = rel_err(fields.drift_jacobian(t, x, u), fd_drift);
  const std::vector<Mat> jac = fields.diffusion_jacobian(t, x);
  for (int k = 0; k < fields.d; ++k)
    out.diffusion = std::max(out.diffusion, rel_err(jac[static_cast<std::size_t>(k)],
                                                    fd_diff[static_cast<std::size_t>(k)]));

  if (fields.drift_control_jacobian) {
    const double hu = rel_step * std::max(1.0, u.cwiseAbs().maxCoeff());
    Mat fd_u(n, fields.m);
    for (int l = 0; l < fields.m; ++l) {
      Vec up = u;
      Vec um = u;
      up(l) += hu;
      um(l) -= hu;
      fd_u.col(l) = (fields.drift(t, x, up) - fields.drift(t, x, um)) / (2 * hu);
    }
    out.drift_control = rel_err(fields.drift_control_jacobian(t, x, u), fd_u);
  }
  return out;
}

}  // namespace roughoc
