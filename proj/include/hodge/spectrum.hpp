#pragma once

// Eigenvalues and eigenfunctions / eigenfields of the Laplace-Beltrami and
// Hodge Laplacians on S2, S1 and T^d.
//
// Sphere conventions: real spherical harmonics without the Condon-Shortley
// phase, unit L2(S2) norm,
//   Y_{l,0}  = u_{l,0}(cos t)
//   Y_{l,m}  = sqrt(2) sin^m(t) u_{l,m}(cos t) cos(m p)   (m > 0)
//   Y_{l,-m} = sqrt(2) sin^m(t) u_{l,m}(cos t) sin(m p)
// where u_{l,m} = K_{l,m} d^m P_l / dx^m is polynomial in cos t. Keeping the
// sin^m factor explicit lets the tangential gradient be written without any
// 1/sin(t) division, so it is exact at the poles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hodge/errors.hpp"
#include "hodge/manifold.hpp"

namespace hodge {

// ---------------------------------------------------------------------------
// Legendre polynomials

struct LegendreValue {
  double p = 0.0;
  double dp = 0.0;
  double d2p = 0.0;
};

/// P_l, P_l' and P_l'' for l = 0..lmax at t. Uses Bonnet's recurrence and the
/// derivative recurrences P'_{l+1} = P'_{l-1} + (2l+1) P_l (same for P''),
/// which stay exact at t = +-1.
inline void legendre_series(int lmax, double t, Eigen::VectorXd& p, Eigen::VectorXd& dp,
                            Eigen::VectorXd& d2p) {
  p.setZero(lmax + 1);
  dp.setZero(lmax + 1);
  d2p.setZero(lmax + 1);
  p[0] = 1.0;
  if (lmax == 0) return;
  p[1] = t;
  dp[1] = 1.0;
  for (int l = 1; l < lmax; ++l) {
    p[l + 1] = ((2.0 * l + 1.0) * t * p[l] - l * p[l - 1]) / (l + 1.0);
    dp[l + 1] = dp[l - 1] + (2.0 * l + 1.0) * p[l];
    d2p[l + 1] = d2p[l - 1] + (2.0 * l + 1.0) * dp[l];
  }
}

inline LegendreValue legendre(int l, double t) {
  if (l < 0) throw InvalidInput("legendre: degree must be >= 0");
  if (!(std::abs(t) <= 1.0 + 1e-12)) throw InvalidInput("legendre: argument outside [-1, 1]");
  t = std::clamp(t, -1.0, 1.0);
  Eigen::VectorXd p, dp, d2p;
  legendre_series(l, t, p, dp, d2p);
  return {p[l], dp[l], d2p[l]};
}

inline double sphere_eigenvalue(int l) {
  if (l < 0) throw InvalidInput("sphere_eigenvalue: degree must be >= 0");
  return static_cast<double>(l) * (l + 1.0);
}

// ---------------------------------------------------------------------------
// Real spherical harmonics

/// Flat index of Y_{l,m}: l^2 + l + m.
inline int sh_index(int l, int m) { return l * l + l + m; }

/// All Y_{l,m}(x), l <= lmax, and optionally their tangential gradients
/// (ambient coordinates, one column per harmonic).
class SphericalHarmonicTable {
 public:
  SphericalHarmonicTable(int lmax, const SpherePoint& x, bool with_gradients) : lmax_(lmax) {
    if (lmax < 0) throw InvalidInput("spherical harmonics: lmax must be >= 0");
    const int count = (lmax + 1) * (lmax + 1);
    values_.setZero(count);
    if (with_gradients) gradients_.setZero(3, count);
    compute(x, with_gradients);
  }

  int lmax() const noexcept { return lmax_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  const Eigen::Matrix3Xd& gradients() const noexcept { return gradients_; }

  double value(int l, int m) const { return values_[sh_index(l, m)]; }
  Vec3 gradient(int l, int m) const { return gradients_.col(sh_index(l, m)); }

 private:
  static int tri(int l, int m) { return l * (l + 1) / 2 + m; }

  void compute(const SpherePoint& x, bool with_gradients) {
    const Vec3& v = x.vec();
    const double t = std::clamp(v.z(), -1.0, 1.0);
    const double s = std::hypot(v.x(), v.y());
    const double phi = std::atan2(v.y(), v.x());

    // u_{l,m}(t) for 0 <= m <= l <= lmax.
    const int n_tri = (lmax_ + 1) * (lmax_ + 2) / 2;
    std::vector<double> u(static_cast<std::size_t>(n_tri), 0.0);
    auto at = [&](int l, int m) -> double& { return u[static_cast<std::size_t>(tri(l, m))]; };
    at(0, 0) = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 1; m <= lmax_; ++m) at(m, m) = at(m - 1, m - 1) * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    for (int m = 0; m < lmax_; ++m) at(m + 1, m) = t * std::sqrt(2.0 * m + 3.0) * at(m, m);
    for (int m = 0; m <= lmax_; ++m) {
      for (int l = m + 2; l <= lmax_; ++l) {
        const double l2 = static_cast<double>(l) * l;
        const double m2 = static_cast<double>(m) * m;
        const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
        const double b = std::sqrt((2.0 * l + 1.0) / (2.0 * l - 3.0) * ((l - 1.0) * (l - 1.0) - m2) / (l2 - m2));
        at(l, m) = a * t * at(l - 1, m) - b * at(l - 2, m);
      }
    }
    auto u_at = [&](int l, int m) { return m > l ? 0.0 : at(l, m); };

    // sin^k for k = 0..lmax+1
    std::vector<double> spow(static_cast<std::size_t>(lmax_ + 2), 1.0);
    for (std::size_t k = 1; k < spow.size(); ++k) spow[k] = spow[k - 1] * s;

    const Vec3 e_theta(t * std::cos(phi), t * std::sin(phi), -s);
    const Vec3 e_phi(-std::sin(phi), std::cos(phi), 0.0);
    const double r2 = std::sqrt(2.0);

    for (int l = 0; l <= lmax_; ++l) {
      values_[sh_index(l, 0)] = at(l, 0);
      if (with_gradients && l >= 1) {
        const double d_theta = -s * std::sqrt(l * (l + 1.0)) * u_at(l, 1);
        gradients_.col(sh_index(l, 0)) = d_theta * e_theta;
      }
      for (int m = 1; m <= l; ++m) {
        const double c = std::cos(m * phi);
        const double sn = std::sin(m * phi);
        const double radial = spow[static_cast<std::size_t>(m)] * at(l, m);
        values_[sh_index(l, m)] = r2 * radial * c;
        values_[sh_index(l, -m)] = r2 * radial * sn;
        if (with_gradients) {
          const double sm1 = spow[static_cast<std::size_t>(m - 1)];
          const double g = m * sm1 * t * at(l, m) -
                           spow[static_cast<std::size_t>(m + 1)] *
                               std::sqrt((l + m + 1.0) * (l - m)) * u_at(l, m + 1);
          const double h = m * sm1 * at(l, m);  // (1/sin) d/dphi of the radial part
          gradients_.col(sh_index(l, m)) = r2 * (g * c * e_theta - h * sn * e_phi);
          gradients_.col(sh_index(l, -m)) = r2 * (g * sn * e_theta + h * c * e_phi);
        }
      }
    }
  }

  int lmax_;
  Eigen::VectorXd values_;
  Eigen::Matrix3Xd gradients_;
};

inline double spherical_harmonic(int l, int m, const SpherePoint& x) {
  if (l < 0 || std::abs(m) > l) throw InvalidInput("spherical_harmonic: need |m| <= l");
  return SphericalHarmonicTable(l, x, false).value(l, m);
}

enum class HodgeClass { Div, Curl, Harm, Mixed };

inline const char* to_string(HodgeClass c) {
  switch (c) {
    case HodgeClass::Div: return "div";
    case HodgeClass::Curl: return "curl";
    case HodgeClass::Harm: return "harm";
    case HodgeClass::Mixed: return "mixed";
  }
  return "?";
}

/// grad Y_{l,m} / sqrt(lambda_l) (Div) or x cross grad Y_{l,m} / sqrt(lambda_l) (Curl).
inline TangentVector sphere_eigenfield(HodgeClass cls, int l, int m, const SpherePoint& x) {
  if (l < 1) throw InvalidInput("sphere_eigenfield: l = 0 has no eigenfield");
  if (std::abs(m) > l) throw InvalidInput("sphere_eigenfield: need |m| <= l");
  if (cls != HodgeClass::Div && cls != HodgeClass::Curl)
    throw InvalidInput("sphere_eigenfield: class must be Div or Curl");
  const SphericalHarmonicTable table(l, x, true);
  Vec3 g = table.gradient(l, m) / std::sqrt(sphere_eigenvalue(l));
  if (cls == HodgeClass::Curl) g = x.vec().cross(g);
  return TangentVector{x, g};
}

// ---------------------------------------------------------------------------
// Spectrum container

struct ScalarEigenpair {
  double eigenvalue = 0.0;
  std::vector<int> label;  // sphere (l, m); circle (n, parity); products concatenate
};

struct EigenfieldIndex {
  HodgeClass hodge_class = HodgeClass::Harm;
  std::size_t scalar_index = 0;  // underlying scalar eigenfunction
  double eigenvalue = 0.0;
  int component = -1;  // frame direction e_j for torus fields, -1 otherwise
};

/// Truncated spectrum with batch evaluators. Immutable after construction.
///
/// `eval_scalars(x)` returns all scalar eigenfunctions at x (one entry per
/// scalar eigenpair); `eval_fields(x)` returns the eigenfields as columns of
/// an ambient_dim x n_fields matrix (ambient R^3 on the sphere, the global
/// frame on tori).
template <class Point>
class Spectrum {
 public:
  using ScalarEval = std::function<Eigen::VectorXd(const Point&)>;
  using FieldEval = std::function<Eigen::MatrixXd(const Point&)>;

  Spectrum(Manifold manifold, int ambient_dim, std::vector<ScalarEigenpair> scalars,
           std::vector<EigenfieldIndex> fields, ScalarEval eval_scalars, FieldEval eval_fields)
      : manifold_(manifold),
        ambient_dim_(ambient_dim),
        scalars_(std::move(scalars)),
        fields_(std::move(fields)),
        eval_scalars_(std::move(eval_scalars)),
        eval_fields_(std::move(eval_fields)) {}

  const Manifold& manifold() const noexcept { return manifold_; }
  int dim() const { return manifold_.dim(); }
  int ambient_dim() const noexcept { return ambient_dim_; }
  double volume() const { return manifold_.volume(); }

  const std::vector<ScalarEigenpair>& scalars() const noexcept { return scalars_; }
  const std::vector<EigenfieldIndex>& fields() const noexcept { return fields_; }

  Eigen::VectorXd scalar_values(const Point& x) const { return eval_scalars_(x); }
  Eigen::MatrixXd field_values(const Point& x) const { return eval_fields_(x); }

 private:
  Manifold manifold_;
  int ambient_dim_;
  std::vector<ScalarEigenpair> scalars_;
  std::vector<EigenfieldIndex> fields_;
  ScalarEval eval_scalars_;
  FieldEval eval_fields_;
};

using SphereSpectrum = Spectrum<SpherePoint>;
using TorusSpectrum = Spectrum<TorusPoint>;

/// Scalar harmonics for l <= lmax and the eigenfields grad Y / sqrt(lambda),
/// star grad Y / sqrt(lambda) for 1 <= l <= lmax. Fields are ordered by level,
/// then class (Div before Curl), then m. There are no harmonic fields on S2.
inline SphereSpectrum sphere_spectrum(int lmax) {
  if (lmax < 0) throw InvalidInput("sphere_spectrum: lmax must be >= 0");
  std::vector<ScalarEigenpair> scalars;
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) scalars.push_back({sphere_eigenvalue(l), {l, m}});

  std::vector<EigenfieldIndex> fields;
  for (int l = 1; l <= lmax; ++l)
    for (HodgeClass cls : {HodgeClass::Div, HodgeClass::Curl})
      for (int m = -l; m <= l; ++m)
        fields.push_back({cls, static_cast<std::size_t>(sh_index(l, m)), sphere_eigenvalue(l), -1});

  auto eval_scalars = [lmax](const SpherePoint& x) -> Eigen::VectorXd {
    return SphericalHarmonicTable(lmax, x, false).values();
  };
  auto eval_fields = [lmax](const SpherePoint& x) -> Eigen::MatrixXd {
    const SphericalHarmonicTable table(lmax, x, true);
    const int n = lmax >= 1 ? 2 * ((lmax + 1) * (lmax + 1) - 1) : 0;
    Eigen::MatrixXd out(3, n);
    const Mat3 rot = rotation_matrix(x);
    int col = 0;
    for (int l = 1; l <= lmax; ++l) {
      const double inv = 1.0 / std::sqrt(sphere_eigenvalue(l));
      const int first = sh_index(l, -l);
      const int width = 2 * l + 1;
      const Eigen::Matrix3Xd grad = table.gradients().middleCols(first, width) * inv;
      out.middleCols(col, width) = grad;
      out.middleCols(col + width, width) = rot * grad;
      col += 2 * width;
    }
    return out;
  };
  return SphereSpectrum(Manifold::sphere(), 3, std::move(scalars), std::move(fields),
                        eval_scalars, eval_fields);
}

// ---------------------------------------------------------------------------
// Circle, products, tori

/// Circle eigenfunctions 1/sqrt(2pi), cos(n t)/sqrt(pi), sin(n t)/sqrt(pi)
/// for 1 <= n <= nmax, lambda = n^2. As vector fields each is multiplied by
/// the unit field e_1; the constant is harmonic, the others exact (Div).
inline TorusSpectrum circle_spectrum(int nmax) {
  if (nmax < 0) throw InvalidInput("circle_spectrum: nmax must be >= 0");
  std::vector<ScalarEigenpair> scalars;
  std::vector<EigenfieldIndex> fields;
  scalars.push_back({0.0, {0, 0}});
  fields.push_back({HodgeClass::Harm, 0, 0.0, 0});
  for (int n = 1; n <= nmax; ++n) {
    const double lam = static_cast<double>(n) * n;
    for (int parity = 0; parity < 2; ++parity) {
      fields.push_back({HodgeClass::Div, scalars.size(), lam, 0});
      scalars.push_back({lam, {n, parity}});
    }
  }
  auto eval_scalars = [nmax](const TorusPoint& x) -> Eigen::VectorXd {
    if (x.dim() != 1) throw InvalidInput("circle spectrum evaluated at a non-circle point");
    Eigen::VectorXd out(2 * nmax + 1);
    out[0] = 1.0 / std::sqrt(kTwoPi);
    const double c = 1.0 / std::sqrt(kPi);
    for (int n = 1; n <= nmax; ++n) {
      out[2 * n - 1] = c * std::cos(n * x[0]);
      out[2 * n] = c * std::sin(n * x[0]);
    }
    return out;
  };
  auto eval_fields = [eval_scalars](const TorusPoint& x) -> Eigen::MatrixXd {
    return eval_scalars(x).transpose();
  };
  return TorusSpectrum(Manifold::circle(), 1, std::move(scalars), std::move(fields), eval_scalars,
                       eval_fields);
}

namespace detail {

inline TorusPoint slice(const TorusPoint& x, int first, int count) {
  return TorusPoint(std::vector<double>(x.angles().begin() + first, x.angles().begin() + first + count));
}

template <class T>
std::vector<std::size_t> stable_order_by_eigenvalue(const std::vector<T>& items) {
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return items[a].eigenvalue < items[b].eigenvalue;
  });
  return idx;
}

}  // namespace detail

/// Spectrum of a product of two angle-coordinate manifolds, keeping entries
/// with lambda_a + lambda_b <= lambda_cap. Scalars are products f_i g_j;
/// vector fields pair a scalar of one factor with a field of the other
/// (scalar x field and field x scalar). Both factors must contain every
/// eigenvalue up to the cap for the result to be a complete truncation.
inline TorusSpectrum product_spectrum(const TorusSpectrum& a, const TorusSpectrum& b,
                                      double lambda_cap) {
  if (a.scalars().empty() || b.scalars().empty())
    throw InvalidInput("product_spectrum: empty factor spectrum");
  const int da = a.dim();
  const int db = b.dim();
  constexpr double tol = 1e-12;

  struct ScalarPair {
    double eigenvalue;
    std::size_t i, j;
  };
  std::vector<ScalarPair> pairs;
  for (std::size_t i = 0; i < a.scalars().size(); ++i)
    for (std::size_t j = 0; j < b.scalars().size(); ++j) {
      const double lam = a.scalars()[i].eigenvalue + b.scalars()[j].eigenvalue;
      if (lam <= lambda_cap + tol) pairs.push_back({lam, i, j});
    }
  const auto sorder = detail::stable_order_by_eigenvalue(pairs);

  std::vector<ScalarEigenpair> scalars;
  std::vector<std::pair<std::size_t, std::size_t>> scalar_src;
  std::vector<std::vector<std::size_t>> scalar_lookup(a.scalars().size(),
                                                      std::vector<std::size_t>(b.scalars().size(), SIZE_MAX));
  for (std::size_t k : sorder) {
    const auto& pr = pairs[k];
    std::vector<int> label = a.scalars()[pr.i].label;
    const auto& lb = b.scalars()[pr.j].label;
    label.insert(label.end(), lb.begin(), lb.end());
    scalar_lookup[pr.i][pr.j] = scalars.size();
    scalars.push_back({pr.eigenvalue, std::move(label)});
    scalar_src.emplace_back(pr.i, pr.j);
  }

  // Field sources: (kind 0) scalar a_i x field b_j, (kind 1) field a_i x scalar b_j.
  struct FieldPair {
    double eigenvalue;
    int kind;
    std::size_t i, j;
  };
  std::vector<FieldPair> fpairs;
  for (std::size_t i = 0; i < a.scalars().size(); ++i)
    for (std::size_t j = 0; j < b.fields().size(); ++j) {
      const double lam = a.scalars()[i].eigenvalue + b.fields()[j].eigenvalue;
      if (lam <= lambda_cap + tol) fpairs.push_back({lam, 0, i, j});
    }
  for (std::size_t i = 0; i < a.fields().size(); ++i)
    for (std::size_t j = 0; j < b.scalars().size(); ++j) {
      const double lam = a.fields()[i].eigenvalue + b.scalars()[j].eigenvalue;
      if (lam <= lambda_cap + tol) fpairs.push_back({lam, 1, i, j});
    }
  const auto forder = detail::stable_order_by_eigenvalue(fpairs);

  std::vector<EigenfieldIndex> fields;
  std::vector<FieldPair> field_src;
  for (std::size_t k : forder) {
    const auto& fp = fpairs[k];
    EigenfieldIndex e;
    e.eigenvalue = fp.eigenvalue;
    if (fp.kind == 0) {
      const auto& fb = b.fields()[fp.j];
      e.scalar_index = scalar_lookup[fp.i][fb.scalar_index];
      e.component = fb.component >= 0 ? da + fb.component : -1;
      const bool harm = fb.hodge_class == HodgeClass::Harm && a.scalars()[fp.i].eigenvalue == 0.0;
      e.hodge_class = harm ? HodgeClass::Harm : HodgeClass::Mixed;
    } else {
      const auto& fa = a.fields()[fp.i];
      e.scalar_index = scalar_lookup[fa.scalar_index][fp.j];
      e.component = fa.component;
      const bool harm = fa.hodge_class == HodgeClass::Harm && b.scalars()[fp.j].eigenvalue == 0.0;
      e.hodge_class = harm ? HodgeClass::Harm : HodgeClass::Mixed;
    }
    fields.push_back(e);
    field_src.push_back(fp);
  }

  const int amb_a = a.ambient_dim();
  const int amb_b = b.ambient_dim();
  auto eval_scalars = [a, b, da, db, scalar_src](const TorusPoint& x) -> Eigen::VectorXd {
    if (x.dim() != da + db) throw InvalidInput("product spectrum: point dimension mismatch");
    const Eigen::VectorXd fa = a.scalar_values(detail::slice(x, 0, da));
    const Eigen::VectorXd fb = b.scalar_values(detail::slice(x, da, db));
    Eigen::VectorXd out(static_cast<Eigen::Index>(scalar_src.size()));
    for (std::size_t k = 0; k < scalar_src.size(); ++k)
      out[static_cast<Eigen::Index>(k)] = fa[static_cast<Eigen::Index>(scalar_src[k].first)] *
                                          fb[static_cast<Eigen::Index>(scalar_src[k].second)];
    return out;
  };
  auto eval_fields = [a, b, da, db, amb_a, amb_b, field_src](const TorusPoint& x) -> Eigen::MatrixXd {
    if (x.dim() != da + db) throw InvalidInput("product spectrum: point dimension mismatch");
    const TorusPoint xa = detail::slice(x, 0, da);
    const TorusPoint xb = detail::slice(x, da, db);
    const Eigen::VectorXd sa = a.scalar_values(xa);
    const Eigen::VectorXd sb = b.scalar_values(xb);
    const Eigen::MatrixXd va = a.field_values(xa);
    const Eigen::MatrixXd vb = b.field_values(xb);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(amb_a + amb_b, static_cast<Eigen::Index>(field_src.size()));
    for (std::size_t k = 0; k < field_src.size(); ++k) {
      const auto& fp = field_src[k];
      const auto i = static_cast<Eigen::Index>(fp.i);
      const auto j = static_cast<Eigen::Index>(fp.j);
      const auto col = static_cast<Eigen::Index>(k);
      if (fp.kind == 0)
        out.block(amb_a, col, amb_b, 1) = sa[i] * vb.col(j);
      else
        out.block(0, col, amb_a, 1) = va.col(i) * sb[j];
    }
    return out;
  };
  return TorusSpectrum(Manifold::torus(da + db), amb_a + amb_b, std::move(scalars), std::move(fields),
                       eval_scalars, eval_fields);
}

/// Spectrum of T^d truncated at lambda <= lambda_cap, built as an iterated
/// product of circle spectra. Fields are f_n e_j.
inline TorusSpectrum torus_spectrum(int d, double lambda_cap) {
  if (d < 1) throw InvalidInput("torus_spectrum: dimension must be >= 1");
  if (lambda_cap < 0.0) throw InvalidInput("torus_spectrum: negative cap");
  const int nmax = static_cast<int>(std::floor(std::sqrt(lambda_cap) + 1e-12));
  TorusSpectrum s = circle_spectrum(nmax);
  if (d == 1) return s;
  for (int k = 1; k < d; ++k) s = product_spectrum(s, circle_spectrum(nmax), lambda_cap);
  return s;
}

/// Hodge-classified eigenfields of the flat T^2: grad f / sqrt(lambda) (Div),
/// star grad f / sqrt(lambda) (Curl) for every non-constant scalar
/// eigenfunction f, plus the harmonic fields e_1 / 2pi, e_2 / 2pi.
/// Here star(a, b) = (-b, a).
inline TorusSpectrum torus2_hodge_spectrum(double lambda_cap) {
  const TorusSpectrum scalar = torus_spectrum(2, lambda_cap);
  std::vector<EigenfieldIndex> fields;
  std::vector<std::size_t> src;
  for (std::size_t i = 0; i < scalar.scalars().size(); ++i) {
    const double lam = scalar.scalars()[i].eigenvalue;
    if (lam == 0.0) {
      fields.push_back({HodgeClass::Harm, i, 0.0, 0});
      fields.push_back({HodgeClass::Harm, i, 0.0, 1});
    } else {
      fields.push_back({HodgeClass::Div, i, lam, -1});
      fields.push_back({HodgeClass::Curl, i, lam, -1});
    }
    src.push_back(i);
    src.push_back(i);
  }
  std::vector<std::vector<int>> labels;
  for (const auto& s : scalar.scalars()) labels.push_back(s.label);

  // d/dt of the circle factor (n, parity): cos -> -n sin, sin -> n cos.
  auto factor = [](int n, int parity, double t, double& value, double& deriv) {
    if (n == 0) {
      value = 1.0 / std::sqrt(kTwoPi);
      deriv = 0.0;
      return;
    }
    const double c = 1.0 / std::sqrt(kPi);
    if (parity == 0) {
      value = c * std::cos(n * t);
      deriv = -c * n * std::sin(n * t);
    } else {
      value = c * std::sin(n * t);
      deriv = c * n * std::cos(n * t);
    }
  };
  std::vector<EigenfieldIndex> fields_copy = fields;
  auto eval_fields = [labels, fields_copy, factor](const TorusPoint& x) -> Eigen::MatrixXd {
    if (x.dim() != 2) throw InvalidInput("torus2 spectrum evaluated at a non-T2 point");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(fields_copy.size()));
    for (std::size_t k = 0; k < fields_copy.size(); ++k) {
      const auto& e = fields_copy[k];
      const auto col = static_cast<Eigen::Index>(k);
      if (e.hodge_class == HodgeClass::Harm) {
        out(e.component, col) = 1.0 / kTwoPi;
        continue;
      }
      const auto& lab = labels[e.scalar_index];
      double v1, d1, v2, d2;
      factor(lab[0], lab[1], x[0], v1, d1);
      factor(lab[2], lab[3], x[1], v2, d2);
      const double inv = 1.0 / std::sqrt(e.eigenvalue);
      const double g1 = d1 * v2 * inv;
      const double g2 = v1 * d2 * inv;
      if (e.hodge_class == HodgeClass::Div) {
        out(0, col) = g1;
        out(1, col) = g2;
      } else {
        out(0, col) = -g2;
        out(1, col) = g1;
      }
    }
    return out;
  };
  auto eval_scalars = [scalar](const TorusPoint& x) -> Eigen::VectorXd { return scalar.scalar_values(x); };
  return TorusSpectrum(Manifold::torus(2), 2, scalar.scalars(), std::move(fields), eval_scalars,
                       eval_fields);
}

}  // namespace hodge
