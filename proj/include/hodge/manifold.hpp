#pragma once

// Supported manifolds (unit sphere S2, circle S1, flat hypertorus T^d), tangent
// projections and frames, and uniform point sampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hodge/errors.hpp"

namespace hodge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// A point on the unit sphere, stored as a unit 3-vector.
class SpherePoint {
 public:
  SpherePoint() : x_(0.0, 0.0, 1.0) {}

  /// Accepts vectors whose norm is 1 up to 1e-9 and renormalizes them.
  explicit SpherePoint(const Vec3& x) {
    const double n = x.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9)
      throw InvalidInput("sphere point must have unit norm");
    x_ = x / n;
  }

  SpherePoint(double x, double y, double z) : SpherePoint(Vec3(x, y, z)) {}

  /// Projects any nonzero vector radially onto the sphere.
  static SpherePoint normalized(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("cannot normalize a zero vector");
    return SpherePoint(Vec3(v / n));
  }

  const Vec3& vec() const noexcept { return x_; }
  double operator[](int i) const { return x_[i]; }

  /// Colatitude in [0, pi].
  double colatitude() const { return std::acos(std::clamp(x_.z(), -1.0, 1.0)); }
  /// Longitude in (-pi, pi].
  double longitude() const { return std::atan2(x_.y(), x_.x()); }

  SpherePoint antipode() const { return SpherePoint(Vec3(-x_)); }

 private:
  Vec3 x_;
};

/// A point on the flat torus T^d = (R / 2pi Z)^d; the circle is d = 1.
class TorusPoint {
 public:
  TorusPoint() = default;

  explicit TorusPoint(std::vector<double> angles) : theta_(std::move(angles)) {
    if (theta_.empty()) throw InvalidInput("torus point needs at least one angle");
    for (double& a : theta_) {
      if (!std::isfinite(a)) throw InvalidInput("torus angle must be finite");
      a = wrap_angle(a);
    }
  }

  int dim() const noexcept { return static_cast<int>(theta_.size()); }
  double operator[](int i) const { return theta_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& angles() const noexcept { return theta_; }

 private:
  std::vector<double> theta_;
};

enum class ManifoldKind { Sphere, Circle, Torus };

struct Manifold {
  ManifoldKind kind = ManifoldKind::Sphere;
  int torus_dim = 1;  // only meaningful for Torus

  static Manifold sphere() { return {ManifoldKind::Sphere, 2}; }
  static Manifold circle() { return {ManifoldKind::Circle, 1}; }
  static Manifold torus(int d) {
    if (d < 1) throw InvalidInput("torus dimension must be >= 1");
    return {d == 1 ? ManifoldKind::Circle : ManifoldKind::Torus, d};
  }

  int dim() const { return kind == ManifoldKind::Sphere ? 2 : torus_dim; }

  double volume() const {
    if (kind == ManifoldKind::Sphere) return 4.0 * kPi;
    return std::pow(kTwoPi, torus_dim);
  }
};

using ManifoldPoint = std::variant<SpherePoint, TorusPoint>;

/// (I - x x^T) v.
inline Vec3 project_tangent(const SpherePoint& x, const Vec3& v) {
  return v - x.vec() * x.vec().dot(v);
}

inline Mat3 projection_matrix(const SpherePoint& x) {
  return Mat3::Identity() - x.vec() * x.vec().transpose();
}

/// Cross-product matrix R_x with R_x v = x cross v.
inline Mat3 rotation_matrix(const SpherePoint& x) {
  const Vec3& p = x.vec();
  Mat3 r;
  r << 0.0, -p.z(), p.y(),
       p.z(), 0.0, -p.x(),
       -p.y(), p.x(), 0.0;
  return r;
}

/// Tangent vector at a sphere point, in ambient coordinates.
struct TangentVector {
  SpherePoint base;
  Vec3 v = Vec3::Zero();

  /// Validates tangency: |v . x| <= 1e-10 * max(|v|, 1e-300).
  static TangentVector make(const SpherePoint& base, const Vec3& v) {
    const double n = v.norm();
    if (std::abs(v.dot(base.vec())) > 1e-10 * std::max(n, 1.0e-300) && n > 0.0)
      throw InvalidInput("vector is not tangent at its base point");
    return TangentVector{base, v};
  }
};

/// 90 degree rotation about the outward normal: x cross v.
inline TangentVector hodge_star(const TangentVector& t) {
  const double n = t.v.norm();
  if (n > 0.0 && std::abs(t.v.dot(t.base.vec())) > 1e-10 * n)
    throw InvalidInput("hodge_star: input is not tangent");
  return TangentVector{t.base, t.base.vec().cross(t.v)};
}

/// Orthonormal oriented basis (b1, b2) of the tangent plane with b2 = x cross b1.
struct TangentFrame {
  SpherePoint base;
  Mat32 basis;

  Vec3 b1() const { return basis.col(0); }
  Vec3 b2() const { return basis.col(1); }
};

inline constexpr double kPoleThreshold = 1.0 - 1e-9;

/// b1 = local east, b2 = local north. Within 1e-9 of a pole the east
/// direction is undefined, so b1 = (1, 0, 0) is used there.
inline TangentFrame frame_at(const SpherePoint& x) {
  const Vec3& p = x.vec();
  Vec3 b1;
  if (std::abs(p.z()) > kPoleThreshold) {
    b1 = project_tangent(x, Vec3::UnitX()).normalized();
  } else {
    const double phi = std::atan2(p.y(), p.x());
    b1 = Vec3(-std::sin(phi), std::cos(phi), 0.0);
  }
  TangentFrame f{x, Mat32::Zero()};
  f.basis.col(0) = b1;
  f.basis.col(1) = p.cross(b1);
  return f;
}

inline SpherePoint lonlat_to_point(double lon_deg, double lat_deg) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0)) throw InvalidInput("latitude out of [-90, 90]");
  if (!std::isfinite(lon_deg)) throw InvalidInput("longitude must be finite");
  const double lon = lon_deg * kPi / 180.0;
  const double lat = lat_deg * kPi / 180.0;
  return SpherePoint::normalized(
      Vec3(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)));
}

/// (lon_deg, lat_deg) of a sphere point.
inline std::pair<double, double> point_to_lonlat(const SpherePoint& x) {
  const double lat = std::asin(std::clamp(x.vec().z(), -1.0, 1.0));
  return {x.longitude() * 180.0 / kPi, lat * 180.0 / kPi};
}

inline TangentVector tangent_from_east_north(const SpherePoint& x, double u_east, double v_north) {
  const TangentFrame f = frame_at(x);
  return TangentVector{x, u_east * f.b1() + v_north * f.b2()};
}

/// Inverse of tangent_from_east_north.
inline std::pair<double, double> east_north_components(const TangentVector& t) {
  const TangentFrame f = frame_at(t.base);
  return {f.b1().dot(t.v), f.b2().dot(t.v)};
}

/// Tangent basis used for frame coordinates: 3x2 on the sphere, identity on tori.
inline Eigen::MatrixXd basis_at(const SpherePoint& x) { return frame_at(x).basis; }
inline Eigen::MatrixXd basis_at(const TorusPoint& x) {
  return Eigen::MatrixXd::Identity(x.dim(), x.dim());
}

inline std::vector<SpherePoint> sample_uniform_sphere(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SpherePoint> out;
  out.reserve(n);
  while (out.size() < n) {
    Vec3 g(normal(rng), normal(rng), normal(rng));
    if (g.norm() < 1e-12) continue;
    out.push_back(SpherePoint::normalized(g));
  }
  return out;
}

/// Uniform on the hemisphere z > 0 (north) or z < 0 (south).
inline std::vector<SpherePoint> sample_uniform_hemisphere(std::size_t n, bool north, Rng& rng) {
  std::vector<SpherePoint> pts = sample_uniform_sphere(n, rng);
  for (auto& p : pts) {
    Vec3 v = p.vec();
    v.z() = north ? std::abs(v.z()) : -std::abs(v.z());
    p = SpherePoint::normalized(v);
  }
  return pts;
}

inline std::vector<TorusPoint> sample_uniform_torus(int d, std::size_t n, Rng& rng) {
  if (d < 1) throw InvalidInput("torus dimension must be >= 1");
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  std::vector<TorusPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> a(static_cast<std::size_t>(d));
    for (double& v : a) v = uni(rng);
    out.emplace_back(std::move(a));
  }
  return out;
}

/// Uniform with respect to the Riemannian volume of `m`.
inline std::vector<ManifoldPoint> sample_uniform(const Manifold& m, std::size_t n, Rng& rng) {
  std::vector<ManifoldPoint> out;
  out.reserve(n);
  if (m.kind == ManifoldKind::Sphere) {
    for (auto& p : sample_uniform_sphere(n, rng)) out.emplace_back(p);
  } else {
    for (auto& p : sample_uniform_torus(m.torus_dim, n, rng)) out.emplace_back(std::move(p));
  }
  return out;
}

}  // namespace hodge
