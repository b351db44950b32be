#pragma once

// Matern-type scalar and vector kernels on S2 and T^d.
//
// Every kernel is a truncated spectral sum sum_n w_n s_n(x) s_n(x')^T. On the
// sphere the sums over m are collapsed with the addition theorem, which turns
// the div part into
//   M_div(x, x') = D2(t) (P_x x')(P_x' x)^T + D1(t) P_x P_x',  t = x . x'
// with D1 = sum_l w_l P_l'(t), D2 = sum_l w_l P_l''(t) and
// w_l = (2l + 1) Phi(lambda_l) / (4 pi lambda_l C). The curl part is
// R_x M_div R_x'^T where R_x v = x cross v.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hodge/errors.hpp"
#include "hodge/manifold.hpp"
#include "hodge/spectrum.hpp"

namespace hodge {

inline constexpr double kInfiniteNu = std::numeric_limits<double>::infinity();

struct MaternParams {
  double nu = 0.5;  // kInfiniteNu selects the heat (squared exponential) limit
  double kappa = 1.0;
  double variance = 1.0;
  double noise_variance = 0.0;

  void validate() const {
    if (!(nu > 0.0)) throw InvalidInput("MaternParams: nu must be > 0");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidInput("MaternParams: kappa must be > 0");
    if (!(variance >= 0.0) || !std::isfinite(variance)) throw InvalidInput("MaternParams: variance must be >= 0");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
      throw InvalidInput("MaternParams: noise variance must be >= 0");
  }
};

/// log Phi(lambda). Kept in log space so that ratios of weights stay finite
/// for large kappa with nu = infinity.
inline double log_phi(double nu, double kappa, double lambda, int d) {
  if (std::isinf(nu)) return -0.5 * kappa * kappa * lambda;
  return -(nu + 0.5 * d) * std::log(2.0 * nu / (kappa * kappa) + lambda);
}

/// Spectral density of the Matern family evaluated at eigenvalue lambda:
/// (2 nu / kappa^2 + lambda)^(-nu - d/2), or exp(-kappa^2 lambda / 2) for nu = inf.
inline double phi(double nu, double kappa, double lambda, int d) {
  return std::exp(log_phi(nu, kappa, lambda, d));
}

enum class KernelKind { PureNoise, Scalar, HodgeFull, HodgeDiv, HodgeCurl, HodgeCompositional, Projected };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::PureNoise: return "pure-noise";
    case KernelKind::Scalar: return "scalar";
    case KernelKind::HodgeFull: return "hodge";
    case KernelKind::HodgeDiv: return "hodge-curl-free";
    case KernelKind::HodgeCurl: return "hodge-div-free";
    case KernelKind::HodgeCompositional: return "hodge-compositional";
    case KernelKind::Projected: return "projected";
  }
  return "?";
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  for (KernelKind k : {KernelKind::PureNoise, KernelKind::Scalar, KernelKind::HodgeFull, KernelKind::HodgeDiv,
                       KernelKind::HodgeCurl, KernelKind::HodgeCompositional, KernelKind::Projected})
    if (s == to_string(k)) return k;
  throw InvalidInput("unknown kernel kind '" + s + "'");
}

/// Length scale and variance of one part of a compositional kernel.
struct KernelPart {
  double kappa = 1.0;
  double variance = 1.0;
};

struct KernelSpec {
  KernelKind kind = KernelKind::HodgeFull;
  MaternParams params;  // nu and noise are shared by compositional parts
  KernelPart div;       // compositional only
  KernelPart curl;      // compositional only
  KernelPart harm;      // compositional only; unused on S2 (no harmonic fields)
  Mat3 A = Mat3::Identity();  // projected only
  Manifold manifold = Manifold::sphere();
  int lmax = 30;
  double lambda_cap = 900.0;

  /// Trace of k(x, x): the prior variance of the field at any point.
  double prior_trace() const {
    switch (kind) {
      case KernelKind::PureNoise: return 0.0;
      case KernelKind::HodgeCompositional:
        return div.variance + curl.variance +
               (manifold.kind == ManifoldKind::Sphere ? 0.0 : harm.variance);
      case KernelKind::Projected: return params.variance;  // for A = I
      default: return params.variance;
    }
  }

  void validate() const {
    params.validate();
    if (lmax < 0) throw InvalidInput("KernelSpec: lmax must be >= 0");
    if (!(lambda_cap >= 0.0)) throw InvalidInput("KernelSpec: lambda_cap must be >= 0");
    if (kind == KernelKind::HodgeCompositional) {
      for (const KernelPart* p : {&div, &curl, &harm})
        if (!(p->kappa > 0.0) || !(p->variance >= 0.0))
          throw InvalidInput("KernelSpec: compositional parts need kappa > 0, variance >= 0");
    }
    if (!A.allFinite()) throw InvalidInput("KernelSpec: A must be finite");
  }
};

// ---------------------------------------------------------------------------
// Per-level weights on the sphere

namespace detail {

/// Normalized Phi(lambda_l) for l in [lmin, lmax]: Phi_l / C with
/// C = (1/4pi) sum_{l=lmin}^{lmax} (2l + 1) Phi_l.
inline Eigen::VectorXd sphere_level_weights(double nu, double kappa, int lmin, int lmax) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(lmax + 1);
  if (lmax < lmin) throw InvalidInput("empty spectral class for the requested truncation");
  double mx = -std::numeric_limits<double>::infinity();
  for (int l = lmin; l <= lmax; ++l) mx = std::max(mx, log_phi(nu, kappa, sphere_eigenvalue(l), 2));
  double c = 0.0;
  for (int l = lmin; l <= lmax; ++l) {
    w[l] = std::exp(log_phi(nu, kappa, sphere_eigenvalue(l), 2) - mx);
    c += (2.0 * l + 1.0) * w[l];
  }
  c /= 4.0 * kPi;
  return w / c;
}

}  // namespace detail

/// Normalization constant C = (1/vol M) sum Phi(lambda_n) over the eigenfields
/// (or eigenfunctions) that make up the kernel, over the given spectrum.
template <class Point>
double normalization(const KernelSpec& spec, const Spectrum<Point>& spectrum) {
  const int d = spectrum.dim();
  const double nu = spec.params.nu;
  const double kappa = spec.params.kappa;
  double sum = 0.0;
  std::size_t count = 0;
  switch (spec.kind) {
    case KernelKind::Scalar:
    case KernelKind::Projected:
      for (const auto& s : spectrum.scalars()) {
        sum += phi(nu, kappa, s.eigenvalue, d);
        ++count;
      }
      break;
    case KernelKind::HodgeFull:
    case KernelKind::HodgeDiv:
    case KernelKind::HodgeCurl:
      for (const auto& f : spectrum.fields()) {
        const bool in = spec.kind == KernelKind::HodgeFull ||
                        (spec.kind == KernelKind::HodgeDiv && f.hodge_class == HodgeClass::Div) ||
                        (spec.kind == KernelKind::HodgeCurl && f.hodge_class == HodgeClass::Curl);
        if (!in) continue;
        sum += phi(nu, kappa, f.eigenvalue, d);
        ++count;
      }
      break;
    default:
      throw InvalidInput("normalization: kernel kind has no single normalization constant");
  }
  if (count == 0) throw InvalidInput("normalization: empty spectral class");
  return sum / spectrum.volume();
}

/// Prior variance attached to each eigenfield of `spectrum` under `spec`, so
/// that the kernel is sum_n v_n s_n(x) s_n(x')^T. Only Hodge kinds.
template <class Point>
Eigen::VectorXd field_variances(const KernelSpec& spec, const Spectrum<Point>& spectrum) {
  const int d = spectrum.dim();
  const auto& fields = spectrum.fields();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fields.size()));
  auto fill = [&](HodgeClass cls, bool all, double kappa, double variance) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& f : fields)
      if (all || f.hodge_class == cls) {
        sum += phi(spec.params.nu, kappa, f.eigenvalue, d);
        ++count;
      }
    if (count == 0) throw InvalidInput("field_variances: empty spectral class");
    const double c = sum / spectrum.volume();
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (all || fields[i].hodge_class == cls)
        v[static_cast<Eigen::Index>(i)] += variance * phi(spec.params.nu, kappa, fields[i].eigenvalue, d) / c;
  };
  switch (spec.kind) {
    case KernelKind::HodgeFull: fill(HodgeClass::Div, true, spec.params.kappa, spec.params.variance); break;
    case KernelKind::HodgeDiv: fill(HodgeClass::Div, false, spec.params.kappa, spec.params.variance); break;
    case KernelKind::HodgeCurl: fill(HodgeClass::Curl, false, spec.params.kappa, spec.params.variance); break;
    case KernelKind::HodgeCompositional:
      fill(HodgeClass::Div, false, spec.div.kappa, spec.div.variance);
      fill(HodgeClass::Curl, false, spec.curl.kappa, spec.curl.variance);
      if (spectrum.manifold().kind != ManifoldKind::Sphere)
        fill(HodgeClass::Harm, false, spec.harm.kappa, spec.harm.variance);
      break;
    default: throw InvalidInput("field_variances: not a Hodge kernel kind");
  }
  return v;
}

/// Prior variance of each scalar eigenfunction for Scalar / Projected kinds.
template <class Point>
Eigen::VectorXd scalar_variances(const KernelSpec& spec, const Spectrum<Point>& spectrum) {
  if (spec.kind != KernelKind::Scalar && spec.kind != KernelKind::Projected)
    throw InvalidInput("scalar_variances: not a scalar-based kernel kind");
  KernelSpec s = spec;
  s.kind = KernelKind::Scalar;
  const double c = normalization(s, spectrum);
  const auto& sc = spectrum.scalars();
  Eigen::VectorXd v(static_cast<Eigen::Index>(sc.size()));
  for (std::size_t i = 0; i < sc.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        spec.params.variance * phi(spec.params.nu, spec.params.kappa, sc[i].eigenvalue, spectrum.dim()) / c;
  return v;
}

/// Direct eigenfield sum sum_n v_n s_n(x) s_n(x')^T in ambient (sphere) or
/// global-frame (torus) coordinates.
template <class Point>
Eigen::MatrixXd spectral_kernel_oracle(const Eigen::VectorXd& variances, const Spectrum<Point>& spectrum,
                                       const Point& x, const Point& xp) {
  if (variances.size() != static_cast<Eigen::Index>(spectrum.fields().size()))
    throw InvalidInput("spectral_kernel_oracle: one variance per eigenfield required");
  const Eigen::MatrixXd sx = spectrum.field_values(x);
  const Eigen::MatrixXd sy = spectrum.field_values(xp);
  return sx * variances.asDiagonal() * sy.transpose();
}

/// Direct eigenfunction sum sum_n v_n f_n(x) f_n(x').
template <class Point>
double spectral_scalar_oracle(const Eigen::VectorXd& variances, const Spectrum<Point>& spectrum, const Point& x,
                              const Point& xp) {
  if (variances.size() != static_cast<Eigen::Index>(spectrum.scalars().size()))
    throw InvalidInput("spectral_scalar_oracle: one variance per eigenfunction required");
  return (spectrum.scalar_values(x).array() * variances.array() * spectrum.scalar_values(xp).array()).sum();
}

// ---------------------------------------------------------------------------
// Sphere kernels (addition-theorem path)

/// Scalar Matern on S2, normalized so that k(x, x) = variance.
inline double scalar_matern_sphere(const MaternParams& p, int lmax, const SpherePoint& x, const SpherePoint& xp) {
  p.validate();
  const Eigen::VectorXd w = detail::sphere_level_weights(p.nu, p.kappa, 0, lmax);
  Eigen::VectorXd leg, dleg, d2leg;
  legendre_series(lmax, std::clamp(x.vec().dot(xp.vec()), -1.0, 1.0), leg, dleg, d2leg);
  double s = 0.0;
  for (int l = 0; l <= lmax; ++l) s += (2.0 * l + 1.0) / (4.0 * kPi) * w[l] * leg[l];
  return p.variance * s;
}

/// Vector kernel on the sphere for every kind. Precomputes the per-level
/// coefficients once; evaluation costs one Legendre recurrence per pair.
class SphereKernel {
 public:
  using Point = SpherePoint;
  using Matrix = Mat3;

  explicit SphereKernel(KernelSpec spec) : spec_(std::move(spec)) {
    if (spec_.manifold.kind != ManifoldKind::Sphere) throw InvalidInput("SphereKernel needs a sphere spec");
    spec_.validate();
    const int L = spec_.lmax;
    const double nu = spec_.params.nu;
    scalar_coef_ = Eigen::VectorXd::Zero(L + 1);
    div_coef_ = Eigen::VectorXd::Zero(L + 1);
    curl_coef_ = Eigen::VectorXd::Zero(L + 1);
    auto vector_coef = [&](double kappa, double variance) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(L + 1);
      if (L < 1) throw InvalidInput("vector kernels on S2 need lmax >= 1");
      const Eigen::VectorXd w = detail::sphere_level_weights(nu, kappa, 1, L);
      for (int l = 1; l <= L; ++l)
        c[l] = variance * (2.0 * l + 1.0) / (4.0 * kPi * sphere_eigenvalue(l)) * w[l];
      return c;
    };
    switch (spec_.kind) {
      case KernelKind::PureNoise: break;
      case KernelKind::Scalar:
      case KernelKind::Projected: {
        const Eigen::VectorXd w = detail::sphere_level_weights(nu, spec_.params.kappa, 0, L);
        for (int l = 0; l <= L; ++l) scalar_coef_[l] = spec_.params.variance * (2.0 * l + 1.0) / (4.0 * kPi) * w[l];
        break;
      }
      case KernelKind::HodgeDiv: div_coef_ = vector_coef(spec_.params.kappa, spec_.params.variance); break;
      case KernelKind::HodgeCurl: curl_coef_ = vector_coef(spec_.params.kappa, spec_.params.variance); break;
      case KernelKind::HodgeFull:
        div_coef_ = vector_coef(spec_.params.kappa, 0.5 * spec_.params.variance);
        curl_coef_ = div_coef_;
        break;
      case KernelKind::HodgeCompositional:
        div_coef_ = vector_coef(spec_.div.kappa, spec_.div.variance);
        curl_coef_ = vector_coef(spec_.curl.kappa, spec_.curl.variance);
        break;
    }
    has_div_ = div_coef_.cwiseAbs().sum() > 0.0;
    has_curl_ = curl_coef_.cwiseAbs().sum() > 0.0;
    aat_ = spec_.A * spec_.A.transpose();
  }

  const KernelSpec& spec() const noexcept { return spec_; }
  double noise_variance() const noexcept { return spec_.params.noise_variance; }

  /// Per-level coefficients: the kernel is built from sum_l c_l P_l(t) (scalar)
  /// and sum_l c_l P_l'(t), sum_l c_l P_l''(t) (div and curl parts).
  const Eigen::VectorXd& scalar_coefficients() const noexcept { return scalar_coef_; }
  const Eigen::VectorXd& div_coefficients() const noexcept { return div_coef_; }
  const Eigen::VectorXd& curl_coefficients() const noexcept { return curl_coef_; }

  /// Scalar kernel value (Scalar and Projected kinds).
  double scalar(const SpherePoint& x, const SpherePoint& xp) const {
    const Series s = series(x.vec().dot(xp.vec()));
    return scalar_coef_.dot(s.p);
  }

  /// 3x3 ambient covariance Cov(f(x), f(x')).
  Mat3 operator()(const SpherePoint& x, const SpherePoint& xp) const {
    const Vec3& a = x.vec();
    const Vec3& b = xp.vec();
    const Series s = series(a.dot(b));
    const Mat3 px = projection_matrix(x);
    const Mat3 py = projection_matrix(xp);
    switch (spec_.kind) {
      case KernelKind::PureNoise: return Mat3::Zero();
      case KernelKind::Scalar: throw InvalidInput("scalar kernel has no vector value");
      case KernelKind::Projected: return 0.5 * scalar_coef_.dot(s.p) * px * aat_ * py;
      default: break;
    }
    const Vec3 u = px * b;  // P_x x'
    const Vec3 v = py * a;  // P_x' x
    const Mat3 pp = px * py;
    Mat3 out = Mat3::Zero();
    if (has_div_) out += div_coef_.dot(s.d2p) * u * v.transpose() + div_coef_.dot(s.dp) * pp;
    if (has_curl_) {
      const Mat3 m = curl_coef_.dot(s.d2p) * u * v.transpose() + curl_coef_.dot(s.dp) * pp;
      out += rotation_matrix(x) * m * rotation_matrix(xp).transpose();
    }
    return out;
  }

 private:
  struct Series {
    Eigen::VectorXd p, dp, d2p;
  };

  Series series(double t) const {
    Series s;
    legendre_series(spec_.lmax, std::clamp(t, -1.0, 1.0), s.p, s.dp, s.d2p);
    return s;
  }

  KernelSpec spec_;
  Eigen::VectorXd scalar_coef_, div_coef_, curl_coef_;
  bool has_div_ = false, has_curl_ = false;
  Mat3 aat_;
};

inline Mat3 hodge_matern_sphere(const KernelSpec& spec, const SpherePoint& x, const SpherePoint& xp) {
  switch (spec.kind) {
    case KernelKind::HodgeFull:
    case KernelKind::HodgeDiv:
    case KernelKind::HodgeCurl:
    case KernelKind::HodgeCompositional: return SphereKernel(spec)(x, xp);
    default: throw InvalidInput("hodge_matern_sphere: not a Hodge kernel kind");
  }
}

/// (1/2) k_scalar(x, x') P_x A A^T P_x'.
inline Mat3 projected_matern(const MaternParams& p, const Mat3& A, int lmax, const SpherePoint& x,
                             const SpherePoint& xp) {
  KernelSpec s;
  s.kind = KernelKind::Projected;
  s.params = p;
  s.A = A;
  s.lmax = lmax;
  return SphereKernel(s)(x, xp);
}

// ---------------------------------------------------------------------------
// Torus kernels

/// Kernels on T^d via the lattice sum over n in Z^d with |n|^2 <= lambda_cap.
/// Scalar: (var / C) (2pi)^-d sum Phi(|n|^2) cos(n . (x - x')).
/// Full vector kernel: (1/d) k_scalar I_d. On T^2 the div / curl parts use
/// n n^T / |n|^2 and n_perp n_perp^T / |n|^2, and the harmonic part is the
/// constant (2pi)^-2 I.
class TorusKernel {
 public:
  using Point = TorusPoint;
  using Matrix = Eigen::MatrixXd;

  explicit TorusKernel(KernelSpec spec) : spec_(std::move(spec)) {
    if (spec_.manifold.kind == ManifoldKind::Sphere) throw InvalidInput("TorusKernel needs a torus spec");
    spec_.validate();
    d_ = spec_.manifold.dim();
    if (spec_.kind == KernelKind::Projected) throw InvalidInput("projected kernel is only defined on S2");
    const bool two_d_only = spec_.kind == KernelKind::HodgeDiv || spec_.kind == KernelKind::HodgeCurl ||
                            spec_.kind == KernelKind::HodgeCompositional;
    if (two_d_only && d_ != 2) throw InvalidInput("div / curl torus kernels are implemented for T^2 only");

    const int nmax = static_cast<int>(std::floor(std::sqrt(spec_.lambda_cap) + 1e-12));
    std::vector<int> n(static_cast<std::size_t>(d_), -nmax);
    for (;;) {
      int sq = 0;
      for (int v : n) sq += v * v;
      if (sq <= spec_.lambda_cap + 1e-12) lattice_.push_back(n);
      std::size_t k = 0;
      while (k < n.size() && n[k] == nmax) n[k++] = -nmax;
      if (k == n.size()) break;
      ++n[k];
    }
    const double vol = std::pow(kTwoPi, d_);
    auto weights = [&](double kappa, double variance, bool skip_zero, double mult) {
      std::vector<double> w(lattice_.size(), 0.0);
      double c = 0.0;
      for (std::size_t i = 0; i < lattice_.size(); ++i) {
        const double lam = norm2(lattice_[i]);
        if (skip_zero && lam == 0.0) continue;
        w[i] = phi(spec_.params.nu, kappa, lam, d_);
        c += mult * w[i];
      }
      if (c == 0.0) throw InvalidInput("empty spectral class for the requested truncation");
      c /= vol;
      for (double& x : w) x *= variance / (c * vol);
      return w;
    };
    const double nu_var = spec_.params.variance;
    switch (spec_.kind) {
      case KernelKind::PureNoise: break;
      case KernelKind::Scalar: scalar_w_ = weights(spec_.params.kappa, nu_var, false, 1.0); break;
      case KernelKind::HodgeFull:
        // d fields per lattice point
        scalar_w_ = weights(spec_.params.kappa, nu_var, false, d_);
        break;
      case KernelKind::HodgeDiv: div_w_ = weights(spec_.params.kappa, nu_var, true, 1.0); break;
      case KernelKind::HodgeCurl: curl_w_ = weights(spec_.params.kappa, nu_var, true, 1.0); break;
      case KernelKind::HodgeCompositional:
        div_w_ = weights(spec_.div.kappa, spec_.div.variance, true, 1.0);
        curl_w_ = weights(spec_.curl.kappa, spec_.curl.variance, true, 1.0);
        harm_coef_ = spec_.harm.variance / 2.0;  // two unit fields e_j / 2pi, normalized over vol
        break;
      default: break;
    }
  }

  const KernelSpec& spec() const noexcept { return spec_; }
  double noise_variance() const noexcept { return spec_.params.noise_variance; }
  int dim() const noexcept { return d_; }

  double scalar(const TorusPoint& x, const TorusPoint& xp) const {
    check(x, xp);
    if (spec_.kind != KernelKind::Scalar) throw InvalidInput("TorusKernel::scalar needs a scalar spec");
    return lattice_sum(scalar_w_, x, xp);
  }

  Eigen::MatrixXd operator()(const TorusPoint& x, const TorusPoint& xp) const {
    check(x, xp);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, d_);
    switch (spec_.kind) {
      case KernelKind::PureNoise: return out;
      case KernelKind::Scalar: throw InvalidInput("scalar kernel has no vector value");
      case KernelKind::HodgeFull:
        out.diagonal().setConstant(lattice_sum(scalar_w_, x, xp));
        return out;
      default: break;
    }
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
      const double wd = div_w_.empty() ? 0.0 : div_w_[i];
      const double wc = curl_w_.empty() ? 0.0 : curl_w_[i];
      if (wd == 0.0 && wc == 0.0) continue;
      const double n1 = lattice_[i][0], n2 = lattice_[i][1];
      const double c = std::cos(n1 * (x[0] - xp[0]) + n2 * (x[1] - xp[1])) / (n1 * n1 + n2 * n2);
      out(0, 0) += c * (wd * n1 * n1 + wc * n2 * n2);
      out(1, 1) += c * (wd * n2 * n2 + wc * n1 * n1);
      out(0, 1) += c * (wd - wc) * n1 * n2;
    }
    out(1, 0) = out(0, 1);
    out.diagonal().array() += harm_coef_;
    return out;
  }

 private:
  static double norm2(const std::vector<int>& n) {
    double s = 0.0;
    for (int v : n) s += static_cast<double>(v) * v;
    return s;
  }

  void check(const TorusPoint& x, const TorusPoint& xp) const {
    if (x.dim() != d_ || xp.dim() != d_) throw InvalidInput("torus kernel: point dimension mismatch");
  }

  double lattice_sum(const std::vector<double>& w, const TorusPoint& x, const TorusPoint& xp) const {
    double s = 0.0;
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
      double arg = 0.0;
      for (int k = 0; k < d_; ++k) arg += lattice_[i][static_cast<std::size_t>(k)] * (x[k] - xp[k]);
      s += w[i] * std::cos(arg);
    }
    return s;
  }

  KernelSpec spec_;
  int d_ = 1;
  std::vector<std::vector<int>> lattice_;
  std::vector<double> scalar_w_, div_w_, curl_w_;
  double harm_coef_ = 0.0;
};

/// Vector Hodge-Matern kernel on T^d.
inline Eigen::MatrixXd torus_matern(const KernelSpec& spec, const TorusPoint& x, const TorusPoint& xp) {
  return TorusKernel(spec)(x, xp);
}

}  // namespace hodge
