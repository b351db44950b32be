#pragma once

// Gaussian process regression for tangent vector fields.
//
// Observations are stored in ambient coordinates (R^3 on the sphere, the
// global frame on tori) and converted to tangent-frame coordinates for all
// linear algebra, so every Gram block is B_i^T M(x_i, x_j) B_j. Noise is
// isotropic in the tangent plane.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hodge/errors.hpp"
#include "hodge/kernels.hpp"
#include "hodge/manifold.hpp"
#include "hodge/optimize.hpp"
#include "hodge/spectrum.hpp"

namespace hodge {

template <class Point>
struct Dataset {
  std::vector<Point> points;
  std::vector<Eigen::VectorXd> values;  // ambient (sphere) or frame (torus) coordinates
  double scale = 1.0;                   // factor already applied to values

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  void validate() const {
    if (points.size() != values.size()) throw InvalidInput("dataset: points and values differ in length");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!values[i].allFinite()) throw InvalidInput("dataset: non-finite observation");
      if constexpr (std::is_same_v<Point, SpherePoint>) {
        if (values[i].size() != 3) throw InvalidInput("dataset: sphere observations need 3 components");
        const double n = values[i].norm();
        if (n > 0.0 && std::abs(values[i].dot(points[i].vec())) > 1e-8 * n)
          throw InvalidInput("dataset: observation is not tangent at its point");
      } else {
        if (values[i].size() != points[i].dim()) throw InvalidInput("dataset: observation dimension mismatch");
      }
    }
  }
};

using SphereDataset = Dataset<SpherePoint>;
using TorusDataset = Dataset<TorusPoint>;

namespace detail {

/// Stacked frame-coordinate Gram matrix between two point lists.
template <class Kernel, class Point>
Eigen::MatrixXd cross_gram(const Kernel& k, const std::vector<Point>& a, const std::vector<Eigen::MatrixXd>& ba,
                           const std::vector<Point>& b, const std::vector<Eigen::MatrixXd>& bb) {
  const Eigen::Index ra = a.empty() ? 0 : ba.front().cols();
  const Eigen::Index rb = b.empty() ? 0 : bb.front().cols();
  Eigen::MatrixXd g(static_cast<Eigen::Index>(a.size()) * ra, static_cast<Eigen::Index>(b.size()) * rb);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      g.block(static_cast<Eigen::Index>(i) * ra, static_cast<Eigen::Index>(j) * rb, ra, rb) =
          ba[i].transpose() * k(a[i], b[j]) * bb[j];
  return g;
}

template <class Point>
std::vector<Eigen::MatrixXd> frames_for(const std::vector<Point>& pts) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(basis_at(p));
  return out;
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

/// Cholesky of K + noise I. With zero noise, a jitter of 1e-10 * ref is added;
/// on failure the jitter grows by 10x up to 1e-4 * ref.
inline Factorization factor_with_jitter(const Eigen::MatrixXd& k, double noise, double ref) {
  ref = ref > 0.0 ? ref : 1.0;
  const double max_jitter = 1e-4 * ref;
  double jitter = noise > 0.0 ? 0.0 : 1e-10 * ref;
  const Eigen::Index n = k.rows();
  for (;;) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += noise + jitter;
    Factorization f{Eigen::LLT<Eigen::MatrixXd>(a), jitter};
    if (f.llt.info() == Eigen::Success) {
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = f.llt.matrixLLT()(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) ok = false;
      }
      if (ok) return f;
    }
    if (jitter >= max_jitter * (1.0 - 1e-12))
      throw NumericalFailure("Cholesky failed with jitter " + std::to_string(jitter) + " (n = " +
                             std::to_string(n) + ", noise = " + std::to_string(noise) + ")");
    jitter = jitter == 0.0 ? 1e-10 * ref : std::min(jitter * 10.0, max_jitter);
  }
}

}  // namespace detail

/// 2n x 2n (sphere) or dn x dn (torus) Gram matrix with blocks B_i^T M(x_i, x_j) B_j.
template <class Kernel>
Eigen::MatrixXd gram(const Kernel& k, const std::vector<typename Kernel::Point>& pts,
                     const std::vector<Eigen::MatrixXd>& frames) {
  if (pts.size() != frames.size()) throw InvalidInput("gram: one frame per point required");
  return detail::cross_gram(k, pts, frames, pts, frames);
}

template <class Kernel>
Eigen::MatrixXd gram(const Kernel& k, const std::vector<typename Kernel::Point>& pts) {
  return gram(k, pts, detail::frames_for(pts));
}

template <class Point>
struct Prediction {
  Point point;
  Eigen::MatrixXd frame;  // ambient x r tangent basis at the point
  Eigen::VectorXd mean;   // ambient coordinates
  Eigen::MatrixXd cov;    // frame coordinates, r x r
};

/// Conditioned GP. Immutable after construction.
template <class Kernel>
class PosteriorModel {
 public:
  using Point = typename Kernel::Point;

  PosteriorModel(Kernel kernel, Dataset<Point> data) : kernel_(std::move(kernel)), data_(std::move(data)) {
    data_.validate();
    frames_ = detail::frames_for(data_.points);
    r_ = data_.empty() ? 0 : frames_.front().cols();
    y_.resize(static_cast<Eigen::Index>(data_.size()) * r_);
    for (std::size_t i = 0; i < data_.size(); ++i)
      y_.segment(static_cast<Eigen::Index>(i) * r_, r_) = frames_[i].transpose() * data_.values[i];
    gram_ = gram(kernel_, data_.points, frames_);
    auto f = detail::factor_with_jitter(gram_, kernel_.noise_variance(), kernel_.spec().prior_trace());
    llt_ = std::move(f.llt);
    jitter_ = f.jitter;
    alpha_ = data_.empty() ? Eigen::VectorXd() : Eigen::VectorXd(llt_.solve(y_));
  }

  const Kernel& kernel() const noexcept { return kernel_; }
  const Dataset<Point>& data() const noexcept { return data_; }
  const std::vector<Eigen::MatrixXd>& frames() const noexcept { return frames_; }
  const Eigen::MatrixXd& gram_matrix() const noexcept { return gram_; }
  const Eigen::LLT<Eigen::MatrixXd>& factor() const noexcept { return llt_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Eigen::VectorXd& frame_observations() const noexcept { return y_; }
  /// Jitter added on top of the noise variance to make the factorization succeed.
  double jitter() const noexcept { return jitter_; }
  double effective_noise() const noexcept { return kernel_.noise_variance() + jitter_; }

  double log_marginal_likelihood() const {
    if (data_.empty()) throw InvalidInput("log marginal likelihood of an empty dataset");
    const Eigen::Index n = y_.size();
    const double logdet = llt_.matrixLLT().diagonal().array().log().sum();
    return -0.5 * y_.dot(alpha_) - logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * kPi);
  }

  /// Posterior mean and marginal covariance at each query.
  std::vector<Prediction<Point>> predict(const std::vector<Point>& queries) const {
    std::vector<Prediction<Point>> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
      Prediction<Point> p{q, basis_at(q), {}, {}};
      const std::vector<Point> qv{q};
      const std::vector<Eigen::MatrixXd> bq{p.frame};
      Eigen::MatrixXd prior = p.frame.transpose() * kernel_(q, q) * p.frame;
      Eigen::VectorXd mf = Eigen::VectorXd::Zero(p.frame.cols());
      if (!data_.empty()) {
        const Eigen::MatrixXd kq = detail::cross_gram(kernel_, qv, bq, data_.points, frames_);
        mf = kq * alpha_;
        prior -= kq * llt_.solve(kq.transpose());
      }
      p.cov = 0.5 * (prior + prior.transpose());
      p.mean = p.frame * mf;
      out.push_back(std::move(p));
    }
    return out;
  }

  /// Joint posterior covariance of the frame coordinates at the queries.
  Eigen::MatrixXd joint_covariance(const std::vector<Point>& queries, const std::vector<Eigen::MatrixXd>& bq) const {
    Eigen::MatrixXd c = detail::cross_gram(kernel_, queries, bq, queries, bq);
    if (!data_.empty()) {
      const Eigen::MatrixXd kq = detail::cross_gram(kernel_, queries, bq, data_.points, frames_);
      c -= kq * llt_.solve(kq.transpose());
    }
    return 0.5 * (c + c.transpose());
  }

 private:
  Kernel kernel_;
  Dataset<Point> data_;
  std::vector<Eigen::MatrixXd> frames_;
  Eigen::Index r_ = 0;
  Eigen::VectorXd y_;
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

template <class Kernel>
PosteriorModel<Kernel> condition(const Kernel& k, const Dataset<typename Kernel::Point>& data) {
  return PosteriorModel<Kernel>(k, data);
}

template <class Kernel>
double log_marginal_likelihood(const Kernel& k, const Dataset<typename Kernel::Point>& data) {
  return condition(k, data).log_marginal_likelihood();
}

/// Posterior mean computed in ambient R^3 instead of tangent frames: the
/// 3n x 3n system uses blocks M(x_i, x_j), tangential noise P_x and unit
/// variance along each normal (which the bitangent kernel never couples to).
inline std::vector<Vec3> predict_mean_ambient(const PosteriorModel<SphereKernel>& model,
                                              const std::vector<SpherePoint>& queries) {
  const auto& data = model.data();
  const auto& k = model.kernel();
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd big(3 * n, 3 * n);
  Eigen::VectorXd y(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& xi = data.points[static_cast<std::size_t>(i)];
    y.segment<3>(3 * i) = data.values[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) big.block<3, 3>(3 * i, 3 * j) = k(xi, data.points[static_cast<std::size_t>(j)]);
    big.block<3, 3>(3 * i, 3 * i) +=
        model.effective_noise() * projection_matrix(xi) + xi.vec() * xi.vec().transpose();
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(big);
  if (ldlt.info() != Eigen::Success) throw NumericalFailure("ambient system factorization failed");
  const Eigen::VectorXd alpha = ldlt.solve(y);
  std::vector<Vec3> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    Vec3 m = Vec3::Zero();
    for (Eigen::Index j = 0; j < n; ++j) m += k(q, data.points[static_cast<std::size_t>(j)]) * alpha.segment<3>(3 * j);
    out.push_back(m);
  }
  return out;
}

/// Exact draw from the joint posterior at the queries (ambient coordinates).
template <class Kernel>
std::vector<Eigen::VectorXd> sample_posterior(const PosteriorModel<Kernel>& model,
                                              const std::vector<typename Kernel::Point>& queries, Rng& rng) {
  const auto bq = detail::frames_for(queries);
  const auto preds = model.predict(queries);
  const Eigen::MatrixXd cov = model.joint_covariance(queries, bq);
  const auto f = detail::factor_with_jitter(cov, 0.0, model.kernel().spec().prior_trace());
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(cov.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  const Eigen::VectorXd draw = f.llt.matrixL() * z;
  std::vector<Eigen::VectorXd> out;
  out.reserve(queries.size());
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Eigen::Index r = bq[i].cols();
    out.push_back(preds[i].mean + bq[i] * draw.segment(off, r));
    off += r;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  double mse = 0.0;
  double pnll = 0.0;
};

/// MSE: mean squared norm of (mean - truth). PNLL: mean negative log density
/// of the truth under N(mean, cov + noise I) in each query's tangent frame.
template <class Point>
Metrics metrics(const std::vector<Prediction<Point>>& preds, const std::vector<Eigen::VectorXd>& truths,
                double noise_variance) {
  if (preds.size() != truths.size()) throw InvalidInput("metrics: predictions and truths differ in length");
  if (preds.empty()) throw InvalidInput("metrics: empty test set");
  Metrics m;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Eigen::VectorXd diff = truths[i] - preds[i].mean;
    m.mse += diff.squaredNorm();
    const Eigen::VectorXd r = preds[i].frame.transpose() * diff;
    Eigen::MatrixXd s = preds[i].cov;
    s.diagonal().array() += noise_variance;
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().minCoeff() > 0.0))
      throw NumericalFailure("metrics: predictive covariance is singular");
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    m.pnll += 0.5 * r.dot(llt.solve(r)) + 0.5 * logdet + 0.5 * static_cast<double>(r.size()) * std::log(2.0 * kPi);
  }
  m.mse /= static_cast<double>(preds.size());
  m.pnll /= static_cast<double>(preds.size());
  return m;
}

// ---------------------------------------------------------------------------
// Prior sampling (truncated Karhunen-Loeve expansion)

/// A frozen random field f(x) = sum_n sqrt(v_n) w_n s_n(x).
template <class Point>
class PriorSample {
 public:
  PriorSample(std::shared_ptr<const Spectrum<Point>> spectrum, KernelSpec spec, Eigen::MatrixXd coef)
      : spectrum_(std::move(spectrum)), spec_(std::move(spec)), coef_(std::move(coef)) {}

  const KernelSpec& spec() const noexcept { return spec_; }

  Eigen::VectorXd operator()(const Point& x) const {
    switch (spec_.kind) {
      case KernelKind::PureNoise: return Eigen::VectorXd::Zero(spectrum_->ambient_dim());
      case KernelKind::Scalar: return coef_.transpose() * spectrum_->scalar_values(x);
      case KernelKind::Projected:
        if constexpr (std::is_same_v<Point, SpherePoint>) {
          const Vec3 h = coef_.transpose() * spectrum_->scalar_values(x);
          return std::sqrt(0.5) * projection_matrix(x) * spec_.A * h;
        } else {
          throw InvalidInput("projected samples exist on S2 only");
        }
      default: return spectrum_->field_values(x) * coef_.col(0);
    }
  }

 private:
  std::shared_ptr<const Spectrum<Point>> spectrum_;
  KernelSpec spec_;
  Eigen::MatrixXd coef_;
};

template <class Point>
PriorSample<Point> sample_prior(const KernelSpec& spec, std::shared_ptr<const Spectrum<Point>> spectrum, Rng& rng) {
  spec.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd coef;
  switch (spec.kind) {
    case KernelKind::PureNoise: break;
    case KernelKind::Scalar:
    case KernelKind::Projected: {
      const Eigen::VectorXd v = scalar_variances(spec, *spectrum);
      const int cols = spec.kind == KernelKind::Scalar ? 1 : 3;
      coef.resize(v.size(), cols);
      for (int c = 0; c < cols; ++c)
        for (Eigen::Index i = 0; i < v.size(); ++i) coef(i, c) = std::sqrt(v[i]) * normal(rng);
      break;
    }
    default: {
      const Eigen::VectorXd v = field_variances(spec, *spectrum);
      coef.resize(v.size(), 1);
      for (Eigen::Index i = 0; i < v.size(); ++i) coef(i, 0) = std::sqrt(v[i]) * normal(rng);
    }
  }
  return PriorSample<Point>(std::move(spectrum), spec, std::move(coef));
}

/// Spectrum that represents `spec` exactly under its truncation.
inline std::shared_ptr<const SphereSpectrum> sphere_spectrum_for(const KernelSpec& spec) {
  return std::make_shared<const SphereSpectrum>(sphere_spectrum(spec.lmax));
}

inline std::shared_ptr<const TorusSpectrum> torus_spectrum_for(const KernelSpec& spec) {
  const int d = spec.manifold.dim();
  if (spec.kind == KernelKind::HodgeDiv || spec.kind == KernelKind::HodgeCurl ||
      spec.kind == KernelKind::HodgeCompositional) {
    if (d != 2) throw InvalidInput("div / curl torus spectra are implemented for T^2 only");
    return std::make_shared<const TorusSpectrum>(torus2_hodge_spectrum(spec.lambda_cap));
  }
  return std::make_shared<const TorusSpectrum>(torus_spectrum(d, spec.lambda_cap));
}

// ---------------------------------------------------------------------------
// Hyperparameter fitting

namespace detail {

/// Gram matrices for a fixed point set under varying hyperparameters. The
/// generic version simply re-evaluates the kernel.
template <class Kernel>
class GramCache {
 public:
  explicit GramCache(const std::vector<typename Kernel::Point>& pts) : pts_(pts), frames_(frames_for(pts)) {}
  Eigen::MatrixXd operator()(const Kernel& k) const { return gram(k, pts_, frames_); }

 private:
  std::vector<typename Kernel::Point> pts_;
  std::vector<Eigen::MatrixXd> frames_;
};

/// On S2 the Legendre series at every x_i . x_j and the 2x2 frame blocks of
/// each geometric term are hyperparameter independent and stored once.
template <>
class GramCache<SphereKernel> {
 public:
  explicit GramCache(const std::vector<SpherePoint>& pts) : n_(pts.size()) {
    const auto frames = frames_for(pts);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) {
        Pair pr;
        pr.t = std::clamp(pts[i].vec().dot(pts[j].vec()), -1.0, 1.0);
        const Mat3 px = projection_matrix(pts[i]);
        const Mat3 py = projection_matrix(pts[j]);
        const Mat3 rx = rotation_matrix(pts[i]);
        const Mat3 ry = rotation_matrix(pts[j]);
        const Mat3 uv = (px * pts[j].vec()) * (py * pts[i].vec()).transpose();
        const Mat3 pp = px * py;
        const Eigen::MatrixXd& bi = frames[i];
        const Eigen::MatrixXd& bj = frames[j];
        pr.rank1 = bi.transpose() * uv * bj;
        pr.proj = bi.transpose() * pp * bj;
        pr.rank1_rot = bi.transpose() * rx * uv * ry.transpose() * bj;
        pr.proj_rot = bi.transpose() * rx * pp * ry.transpose() * bj;
        pr.px = px;
        pr.py = py;
        pr.bi = bi;
        pr.bj = bj;
        pairs_.push_back(std::move(pr));
      }
  }

  Eigen::MatrixXd operator()(const SphereKernel& k) const {
    const auto& spec = k.spec();
    const int L = spec.lmax;
    if (L != lmax_) {
      for (auto& pr : pairs_) legendre_series(L, pr.t, pr.p, pr.dp, pr.d2p);
      lmax_ = L;
    }
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    if (spec.kind == KernelKind::PureNoise) return g;
    if (spec.kind == KernelKind::Scalar) throw InvalidInput("scalar kernel has no vector Gram matrix");
    const Mat3 aat = spec.A * spec.A.transpose();
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j, ++idx) {
        const Pair& pr = pairs_[idx];
        Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
        if (spec.kind == KernelKind::Projected) {
          b = 0.5 * k.scalar_coefficients().dot(pr.p) * (pr.bi.transpose() * pr.px * aat * pr.py * pr.bj);
        } else {
          const auto& cd = k.div_coefficients();
          const auto& cc = k.curl_coefficients();
          b = cd.dot(pr.d2p) * pr.rank1 + cd.dot(pr.dp) * pr.proj + cc.dot(pr.d2p) * pr.rank1_rot +
              cc.dot(pr.dp) * pr.proj_rot;
        }
        g.block<2, 2>(2 * i, 2 * j) = b;
        if (i != j) g.block<2, 2>(2 * j, 2 * i) = b.transpose();
      }
    return g;
  }

 private:
  struct Pair {
    double t = 0.0;
    Eigen::Matrix2d rank1, proj, rank1_rot, proj_rot;
    Mat3 px, py;
    Eigen::Matrix<double, 3, 2> bi, bj;
    Eigen::VectorXd p, dp, d2p;
  };
  std::size_t n_;
  mutable std::vector<Pair> pairs_;
  mutable int lmax_ = -1;
};

/// Log marginal likelihood from a Gram matrix and frame observations.
inline double log_marginal_likelihood_from_gram(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double noise,
                                                double ref) {
  const auto f = factor_with_jitter(k, noise, ref);
  const Eigen::VectorXd alpha = f.llt.solve(y);
  const double logdet = f.llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - logdet - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * kPi);
}

template <class Point>
Eigen::VectorXd frame_observations(const Dataset<Point>& data) {
  const auto frames = frames_for(data.points);
  Eigen::Index total = 0;
  for (const auto& b : frames) total += b.cols();
  Eigen::VectorXd y(total);
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    y.segment(off, frames[i].cols()) = frames[i].transpose() * data.values[i];
    off += frames[i].cols();
  }
  return y;
}

}  // namespace detail

struct LogBounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitConfig {
  int restarts = 5;
  int max_iterations = 400;
  double tolerance = 1e-4;  // simplex size in the unconstrained coordinates
  LogBounds log_kappa{std::log(0.01), std::log(10.0)};
  LogBounds log_variance{-6.0, 6.0};
  LogBounds log_noise{-10.0, 2.0};
  std::uint64_t seed = 0;
  std::optional<double> frozen_kappa;

  void validate() const {
    if (restarts < 1) throw InvalidInput("FitConfig: restarts must be >= 1");
    if (max_iterations < 1) throw InvalidInput("FitConfig: max_iterations must be >= 1");
    for (const LogBounds* b : {&log_kappa, &log_variance, &log_noise})
      if (!(b->lo < b->hi)) throw InvalidInput("FitConfig: empty bound interval");
    if (frozen_kappa && !(*frozen_kappa > 0.0)) throw InvalidInput("FitConfig: frozen kappa must be > 0");
  }
};

struct FitResult {
  KernelSpec spec;
  double log_likelihood = 0.0;
  int best_restart = 0;
  int failed_restarts = 0;
};

namespace detail {

struct ParamSlot {
  LogBounds bounds;
  std::function<void(KernelSpec&, double)> set;  // receives log value
};

inline std::vector<ParamSlot> fit_slots(const KernelSpec& base, const FitConfig& cfg) {
  std::vector<ParamSlot> slots;
  const bool free_kappa = !cfg.frozen_kappa.has_value();
  const bool torus = base.manifold.kind != ManifoldKind::Sphere;
  switch (base.kind) {
    case KernelKind::PureNoise: break;
    case KernelKind::HodgeCompositional:
      if (free_kappa) {
        slots.push_back({cfg.log_kappa, [](KernelSpec& s, double v) { s.div.kappa = std::exp(v); }});
        slots.push_back({cfg.log_kappa, [](KernelSpec& s, double v) { s.curl.kappa = std::exp(v); }});
      }
      slots.push_back({cfg.log_variance, [](KernelSpec& s, double v) { s.div.variance = std::exp(v); }});
      slots.push_back({cfg.log_variance, [](KernelSpec& s, double v) { s.curl.variance = std::exp(v); }});
      if (torus)
        slots.push_back({cfg.log_variance, [](KernelSpec& s, double v) { s.harm.variance = std::exp(v); }});
      break;
    default:
      if (free_kappa) slots.push_back({cfg.log_kappa, [](KernelSpec& s, double v) { s.params.kappa = std::exp(v); }});
      slots.push_back({cfg.log_variance, [](KernelSpec& s, double v) { s.params.variance = std::exp(v); }});
  }
  slots.push_back({cfg.log_noise, [](KernelSpec& s, double v) { s.params.noise_variance = std::exp(v); }});
  return slots;
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline KernelSpec spec_from(const KernelSpec& base, const std::vector<ParamSlot>& slots, const Eigen::VectorXd& z) {
  KernelSpec s = base;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& b = slots[i].bounds;
    slots[i].set(s, b.lo + (b.hi - b.lo) * logistic(z[static_cast<Eigen::Index>(i)]));
  }
  return s;
}

}  // namespace detail

/// Maximizes the log marginal likelihood over log-parameters with a bounded
/// Nelder-Mead simplex from `restarts` random starting points. The best
/// restart wins; ties go to the lowest restart index. A is kept fixed.
template <class Kernel>
FitResult fit(const Dataset<typename Kernel::Point>& data, const KernelSpec& base, const FitConfig& cfg = {}) {
  cfg.validate();
  if (data.empty()) throw InvalidInput("fit: empty dataset");
  data.validate();
  KernelSpec start = base;
  if (cfg.frozen_kappa) {
    start.params.kappa = *cfg.frozen_kappa;
    start.div.kappa = *cfg.frozen_kappa;
    start.curl.kappa = *cfg.frozen_kappa;
  }
  const auto slots = detail::fit_slots(start, cfg);
  const detail::GramCache<Kernel> cache(data.points);
  const Eigen::VectorXd y = detail::frame_observations(data);
  auto objective = [&](const Eigen::VectorXd& z) {
    try {
      const KernelSpec s = detail::spec_from(start, slots, z);
      const Kernel k(s);
      return -detail::log_marginal_likelihood_from_gram(cache(k), y, s.params.noise_variance, s.prior_trace());
    } catch (const NumericalFailure&) {
      return 1e100;
    }
  };

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  SimplexOptions opt;
  opt.max_iterations = cfg.max_iterations;
  opt.size_tolerance = cfg.tolerance;
  FitResult best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Eigen::VectorXd z0(static_cast<Eigen::Index>(slots.size()));
    for (Eigen::Index i = 0; i < z0.size(); ++i) {
      const double u = std::clamp(uni(rng), 0.02, 0.98);
      z0[i] = std::log(u / (1.0 - u));
    }
    const SimplexResult res = minimize_simplex(objective, z0, opt);
    if (!(res.value < 1e99)) {
      ++best.failed_restarts;
      continue;
    }
    if (res.value < best_value) {
      best_value = res.value;
      best.spec = detail::spec_from(start, slots, res.x);
      best.best_restart = r;
    }
  }
  if (!std::isfinite(best_value)) throw NumericalFailure("fit: every restart failed to evaluate");
  best.log_likelihood = -best_value;
  return best;
}

}  // namespace hodge
