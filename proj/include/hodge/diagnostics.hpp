#pragma once

// Divergence diagnostics for Gaussian vector fields on S2 and the
// projected-kernel antipodal correlation defect.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hodge/errors.hpp"
#include "hodge/kernels.hpp"
#include "hodge/manifold.hpp"
#include "hodge/spectrum.hpp"

namespace hodge {

namespace detail {

/// S0 = sum_{l>=lmin} (2l+1) Phi_l and S1 = sum_{l>=1} (2l+1) lambda_l Phi_l,
/// both scaled by the same constant (the largest Phi) to avoid underflow.
struct LevelSums {
  double s0 = 0.0;  // from l = 0
  double s0_vec = 0.0;  // from l = 1
  double s1 = 0.0;
};

inline LevelSums level_sums(double nu, double kappa, int lmax) {
  double mx = log_phi(nu, kappa, 0.0, 2);
  LevelSums s;
  for (int l = 0; l <= lmax; ++l) {
    const double lam = sphere_eigenvalue(l);
    const double w = (2.0 * l + 1.0) * std::exp(log_phi(nu, kappa, lam, 2) - mx);
    s.s0 += w;
    if (l >= 1) {
      s.s0_vec += w;
      s.s1 += lam * w;
    }
  }
  return s;
}

}  // namespace detail

/// Pointwise variance of div f for Hodge-Matern fields on S2 (constant in x).
/// Div part: var * S1 / sum_{l>=1}(2l+1) Phi_l. The full kernel gives half
/// of that, curl parts contribute nothing.
inline double var_div_hodge_sphere(const KernelSpec& spec) {
  spec.validate();
  if (spec.lmax < 1) throw InvalidInput("var_div_hodge_sphere: lmax must be >= 1");
  auto div_part = [&](double kappa, double variance) {
    const auto s = detail::level_sums(spec.params.nu, kappa, spec.lmax);
    return variance * s.s1 / s.s0_vec;
  };
  switch (spec.kind) {
    case KernelKind::HodgeDiv: return div_part(spec.params.kappa, spec.params.variance);
    case KernelKind::HodgeFull: return 0.5 * div_part(spec.params.kappa, spec.params.variance);
    case KernelKind::HodgeCurl: return 0.0;
    case KernelKind::HodgeCompositional: return div_part(spec.div.kappa, spec.div.variance);
    default: throw InvalidInput("var_div_hodge_sphere: not a Hodge kernel kind");
  }
}

/// Pointwise variance of div f for the projected Matern field (A = I) on the
/// unit sphere: (var / 2) (S1 / S0 + |H|^2) with mean curvature vector
/// H = -2x, i.e. |H|^2 = 4.
inline double var_div_projected_sphere(const MaternParams& p, int lmax) {
  p.validate();
  const auto s = detail::level_sums(p.nu, p.kappa, lmax);
  return 0.5 * p.variance * (s.s1 / s.s0 + 4.0);
}

inline constexpr double kDivergencePoleBandDeg = 80.0;

/// Central-difference surface divergence in spherical coordinates,
/// (1/sin t) [d_t(sin t v_t) + d_p v_p], with t the colatitude.
/// `field` maps a point to an ambient 3 x k matrix (k fields at once); the
/// result holds one divergence per column.
template <class Field>
Eigen::RowVectorXd numeric_divergence_batch(const Field& field, const SpherePoint& x, double h) {
  const auto [lon_deg, lat_deg] = point_to_lonlat(x);
  if (!(std::abs(lat_deg) < kDivergencePoleBandDeg))
    throw InvalidInput("numeric_divergence: point within the pole exclusion band");
  if (!(h >= 1e-6 && h <= 1e-2)) throw InvalidInput("numeric_divergence: step must lie in [1e-6, 1e-2]");
  const double th = kPi / 2.0 - lat_deg * kPi / 180.0;
  const double ph = lon_deg * kPi / 180.0;
  auto at = [](double t, double p) {
    return SpherePoint::normalized(Vec3(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)));
  };
  auto e_theta = [](double t, double p) { return Vec3(std::cos(t) * std::cos(p), std::cos(t) * std::sin(p), -std::sin(t)); };
  auto e_phi = [](double p) { return Vec3(-std::sin(p), std::cos(p), 0.0); };
  auto eval = [&](double t, double p) -> Eigen::MatrixXd { return Eigen::MatrixXd(field(at(t, p))); };

  const Eigen::RowVectorXd vt_plus = std::sin(th + h) * (e_theta(th + h, ph).transpose() * eval(th + h, ph));
  const Eigen::RowVectorXd vt_minus = std::sin(th - h) * (e_theta(th - h, ph).transpose() * eval(th - h, ph));
  const Eigen::RowVectorXd vp_plus = e_phi(ph + h).transpose() * eval(th, ph + h);
  const Eigen::RowVectorXd vp_minus = e_phi(ph - h).transpose() * eval(th, ph - h);
  return ((vt_plus - vt_minus) + (vp_plus - vp_minus)) / (2.0 * h * std::sin(th));
}

/// Divergence of a single tangent field given as x -> ambient vector.
inline double numeric_divergence(const std::function<Vec3(const SpherePoint&)>& field, const SpherePoint& x,
                                 double h = 1e-4) {
  auto wrapped = [&](const SpherePoint& p) -> Eigen::MatrixXd { return field(p); };
  return numeric_divergence_batch(wrapped, x, h)[0];
}

struct DivergenceReport {
  double analytic = 0.0;
  double monte_carlo = 0.0;
  std::size_t samples = 0;
  double relative_gap = 0.0;
};

/// Columns s_k with f = sum_k w_k s_k, w_k iid N(0, 1), for the given kernel
/// (Hodge kinds or Projected) on a sphere spectrum.
inline Eigen::MatrixXd whitened_fields(const KernelSpec& spec, const SphereSpectrum& spectrum, const SpherePoint& x) {
  if (spec.kind == KernelKind::Projected) {
    const Eigen::VectorXd v = scalar_variances(spec, spectrum);
    const Eigen::VectorXd y = spectrum.scalar_values(x).cwiseProduct(v.cwiseSqrt());
    const Mat3 pa = std::sqrt(0.5) * projection_matrix(x) * spec.A;
    Eigen::MatrixXd out(3, 3 * y.size());
    for (int j = 0; j < 3; ++j) out.middleCols(j * y.size(), y.size()) = pa.col(j) * y.transpose();
    return out;
  }
  const Eigen::VectorXd v = field_variances(spec, spectrum);
  return spectrum.field_values(x) * v.cwiseSqrt().asDiagonal();
}

/// Monte-Carlo estimate of Var(div f(x)) from `samples` prior draws, pooled
/// over `points` (the variance is the same at every point by symmetry).
/// Each draw's divergence is computed by finite differences.
inline DivergenceReport monte_carlo_var_div(const KernelSpec& spec, double analytic,
                                            const std::vector<SpherePoint>& points, std::size_t samples, Rng& rng,
                                            double h = 1e-4) {
  if (points.empty() || samples == 0) throw InvalidInput("monte_carlo_var_div: need points and samples");
  const SphereSpectrum spectrum = sphere_spectrum(spec.lmax);
  std::vector<Eigen::RowVectorXd> div_rows;
  for (const auto& p : points)
    div_rows.push_back(numeric_divergence_batch(
        [&](const SpherePoint& q) { return whitened_fields(spec, spectrum, q); }, p, h));
  const Eigen::Index k = div_rows.front().size();
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum_sq = 0.0;
  Eigen::VectorXd w(k);
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < k; ++i) w[i] = normal(rng);
    for (const auto& row : div_rows) {
      const double d = row.dot(w);
      sum_sq += d * d;
    }
  }
  DivergenceReport r;
  r.analytic = analytic;
  r.samples = samples;
  r.monte_carlo = sum_sq / static_cast<double>(samples * points.size());  // zero-mean field
  r.relative_gap = std::abs(r.monte_carlo - analytic) / std::max(std::abs(analytic), 1e-300);
  return r;
}

struct LimitationReport {
  SpherePoint x;
  SpherePoint x_near;  // x' of the proposition
  double norm_near = 0.0;       // |C(x, x')|_F at finite kappa
  double norm_antipodal = 0.0;  // |C(x, -x)|_F at finite kappa
  double limit_near = 0.0;       // lambda_3
  double limit_antipodal = 0.0;  // sqrt(lambda_2^2 + lambda_3^2)
};

/// Antipodal correlation defect of the projected construction g = A h with
/// stacked unit-variance scalar Matern components, Cov = k P_x A A^T P_x'.
/// x, x' are the eigenvectors of A A^T for its two smallest eigenvalues.
inline LimitationReport limitation_demo(const Mat3& A, double kappa, double nu = 0.5, int lmax = 30) {
  if (!A.allFinite()) throw InvalidInput("limitation_demo: A must be finite");
  const Eigen::JacobiSVD<Mat3> svd(A);
  const auto sv = svd.singularValues();
  const double tol = 1e-12 * std::max(sv[0], 1e-300);
  int rank = 0;
  for (int i = 0; i < 3; ++i) rank += sv[i] > tol ? 1 : 0;
  if (rank <= 1) throw InvalidInput("limitation_demo: A must have rank > 1");

  const Mat3 aat = A * A.transpose();
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(aat);
  const Vec3 lam = eig.eigenvalues();  // ascending
  const Mat3 U = eig.eigenvectors();

  LimitationReport r;
  r.x = SpherePoint::normalized(U.col(0));
  r.x_near = SpherePoint::normalized(U.col(1));
  MaternParams p;
  p.nu = nu;
  p.kappa = kappa;
  p.variance = 1.0;
  const double k_near = scalar_matern_sphere(p, lmax, r.x, r.x_near);
  const double k_anti = scalar_matern_sphere(p, lmax, r.x, r.x.antipode());
  r.norm_near = (k_near * projection_matrix(r.x) * aat * projection_matrix(r.x_near)).norm();
  r.norm_antipodal = (k_anti * projection_matrix(r.x) * aat * projection_matrix(r.x.antipode())).norm();
  r.limit_near = lam[2];
  r.limit_antipodal = std::sqrt(lam[1] * lam[1] + lam[2] * lam[2]);
  return r;
}

}  // namespace hodge
