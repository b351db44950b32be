#include <gtest/gtest.h>

#include <cmath>

#include "hodge/spectrum.hpp"
#include "oracles.hpp"

using namespace hodge;

TEST(Legendre, LowOrders) {
  const auto p0 = legendre(0, 0.37);
  EXPECT_EQ(p0.p, 1.0);
  EXPECT_EQ(p0.dp, 0.0);
  EXPECT_EQ(p0.d2p, 0.0);
  const auto p2 = legendre(2, 1.0);
  EXPECT_DOUBLE_EQ(p2.p, 1.0);
  EXPECT_DOUBLE_EQ(p2.dp, 3.0);
  EXPECT_DOUBLE_EQ(p2.d2p, 3.0);
}

TEST(Legendre, MatchesRodriguesExpansion) {
  for (int l : {1, 3, 5, 8, 12}) {
    for (double t : {-1.0, -0.83, -0.2, 0.0, 0.3, 0.91, 1.0}) {
      const auto a = legendre(l, t);
      const auto b = oracle::rodrigues_legendre(l, t);
      EXPECT_NEAR(a.p, b.p, 1e-10) << l << " " << t;
      EXPECT_NEAR(a.dp, b.dp, 1e-9 * std::max(1.0, std::abs(b.dp)));
      EXPECT_NEAR(a.d2p, b.d2p, 1e-9 * std::max(1.0, std::abs(b.d2p)));
    }
  }
}

TEST(Legendre, EndpointDerivativesExact) {
  for (int l = 0; l <= 30; ++l) {
    const double lam = l * (l + 1.0);
    EXPECT_NEAR(legendre(l, 1.0).dp, lam / 2.0, 1e-9 * std::max(1.0, lam));
    EXPECT_NEAR(legendre(l, -1.0).dp, ((l % 2) ? 1.0 : -1.0) * lam / 2.0, 1e-9 * std::max(1.0, lam));
  }
}

TEST(Legendre, RejectsOutOfRange) {
  EXPECT_THROW(legendre(2, 1.01), InvalidInput);
  EXPECT_THROW(legendre(-1, 0.0), InvalidInput);
  EXPECT_NO_THROW(legendre(2, 1.0 + 1e-13));
}

TEST(SphereEigenvalue, Values) {
  EXPECT_EQ(sphere_eigenvalue(0), 0.0);
  EXPECT_EQ(sphere_eigenvalue(3), 12.0);
  EXPECT_EQ(sphere_eigenvalue(7), 56.0);
}

TEST(SphericalHarmonic, ClosedFormsLowDegree) {
  Rng rng(1);
  for (const auto& x : sample_uniform_sphere(10, rng))
    for (int l = 0; l <= 2; ++l)
      for (int m = -l; m <= l; ++m)
        EXPECT_NEAR(spherical_harmonic(l, m, x), oracle::closed_form_harmonic(l, m, x.vec()), 1e-13);
}

TEST(SphericalHarmonic, AdditionTheoremDiagonal) {
  Rng rng(2);
  for (const auto& x : sample_uniform_sphere(5, rng)) {
    double s = 0.0;
    for (int m = -4; m <= 4; ++m) s += std::pow(spherical_harmonic(4, m, x), 2);
    EXPECT_NEAR(s, 9.0 / (4.0 * kPi), 1e-12);
  }
  EXPECT_NEAR(spherical_harmonic(0, 0, SpherePoint(0, 1, 0)), 1.0 / std::sqrt(4.0 * kPi), 1e-15);
  EXPECT_THROW(spherical_harmonic(2, 3, SpherePoint()), InvalidInput);
}

TEST(SphericalHarmonic, QuadratureOrthonormality) {
  const oracle::SphereQuadrature q;
  const int L = 6;
  const int n = (L + 1) * (L + 1);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < q.points().size(); ++i) {
    const Eigen::VectorXd y = SphericalHarmonicTable(L, q.points()[i], false).values();
    g += q.weights()[i] * y * y.transpose();
  }
  EXPECT_LT((g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(g(sh_index(2, 1), sh_index(3, 1)), 0.0, 1e-8);
}

TEST(SphericalHarmonic, SurfaceLaplacianEigenRelation) {
  const double h = 1e-3;
  for (auto [l, m] : {std::pair{2, 1}, std::pair{3, -2}, std::pair{5, 4}}) {
    const double th = 1.1, ph = 0.7;
    auto f = [&](double t, double p) {
      return spherical_harmonic(l, m, SpherePoint(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)));
    };
    const double ftt = (std::sin(th + h / 2) * (f(th + h, ph) - f(th, ph)) -
                        std::sin(th - h / 2) * (f(th, ph) - f(th - h, ph))) /
                       (h * h * std::sin(th));
    const double fpp = (f(th, ph + h) - 2 * f(th, ph) + f(th, ph - h)) / (h * h * std::sin(th) * std::sin(th));
    const double lap = ftt + fpp;
    EXPECT_NEAR(lap, -l * (l + 1.0) * f(th, ph), 1e-3 * std::abs(l * (l + 1.0) * f(th, ph)));
  }
}

TEST(SphereEigenfield, TangentAndMatchesFiniteDifferences) {
  Rng rng(3);
  const double h = 1e-5;
  for (const auto& x : sample_uniform_sphere(10, rng)) {
    const auto f = frame_at(x);
    for (auto [l, m] : {std::pair{1, 0}, std::pair{3, 2}, std::pair{4, -3}, std::pair{7, 7}}) {
      const Vec3 g = sphere_eigenfield(HodgeClass::Div, l, m, x).v * std::sqrt(sphere_eigenvalue(l));
      EXPECT_LT(std::abs(g.dot(x.vec())), 1e-10);
      for (const Vec3& b : {Vec3(f.b1()), Vec3(f.b2())}) {
        auto along = [&](double s) {
          return spherical_harmonic(l, m, SpherePoint::normalized(std::cos(s) * x.vec() + std::sin(s) * b));
        };
        const double fd = (along(h) - along(-h)) / (2 * h);
        EXPECT_NEAR(g.dot(b), fd, 1e-6);
      }
      const Vec3 c = sphere_eigenfield(HodgeClass::Curl, l, m, x).v;
      EXPECT_LT(std::abs(c.dot(x.vec())), 1e-10);
    }
  }
}

TEST(SphereEigenfield, RegularAtPoles) {
  for (const SpherePoint& x : {SpherePoint(0, 0, 1), SpherePoint(0, 0, -1)}) {
    for (int l = 1; l <= 5; ++l)
      for (int m = -l; m <= l; ++m) {
        const Vec3 g = sphere_eigenfield(HodgeClass::Div, l, m, x).v;
        EXPECT_TRUE(g.allFinite());
        EXPECT_LT(std::abs(g.z()), 1e-14);
        // only |m| = 1 harmonics have a nonzero gradient at the pole
        if (std::abs(m) != 1) {
          EXPECT_LT(g.norm(), 1e-12);
        }
      }
  }
}

TEST(SphereEigenfield, RejectsConstant) {
  EXPECT_THROW(sphere_eigenfield(HodgeClass::Div, 0, 0, SpherePoint()), InvalidInput);
  EXPECT_THROW(sphere_eigenfield(HodgeClass::Harm, 1, 0, SpherePoint()), InvalidInput);
}

TEST(SphereSpectrum, EigenfieldGramIsIdentity) {
  const auto s = sphere_spectrum(4);
  const oracle::SphereQuadrature q;
  const auto nf = static_cast<Eigen::Index>(s.fields().size());
  ASSERT_EQ(nf, 2 * (25 - 1));
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nf, nf);
  for (std::size_t i = 0; i < q.points().size(); ++i) {
    const Eigen::MatrixXd v = s.field_values(q.points()[i]);
    g += q.weights()[i] * v.transpose() * v;
  }
  // covers the first 20 eigenfields and the div/curl cross terms
  EXPECT_LT((g - Eigen::MatrixXd::Identity(nf, nf)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SphereSpectrum, GradientNormByQuadrature) {
  const oracle::SphereQuadrature q;
  const double n = q.integrate([](const SpherePoint& x) {
    return sphere_eigenfield(HodgeClass::Div, 3, 2, x).v.squaredNorm();
  });
  EXPECT_NEAR(n, 1.0, 1e-6);
}

TEST(SphereSpectrum, LayoutAndInvariants) {
  const auto s = sphere_spectrum(5);
  EXPECT_EQ(s.scalars().size(), 36u);
  double last = 0.0;
  for (const auto& f : s.fields()) {
    EXPECT_NE(f.hodge_class, HodgeClass::Harm);
    EXPECT_GT(f.eigenvalue, 0.0);
    EXPECT_GE(f.eigenvalue, last);
    last = f.eigenvalue;
    EXPECT_EQ(s.scalars()[f.scalar_index].eigenvalue, f.eigenvalue);
  }
  const SpherePoint x = lonlat_to_point(10, 20);
  const Eigen::MatrixXd v = s.field_values(x);
  for (std::size_t k = 0; k < s.fields().size(); ++k) {
    const auto& f = s.fields()[k];
    const auto& lab = s.scalars()[f.scalar_index].label;
    const Vec3 ref = sphere_eigenfield(f.hodge_class, lab[0], lab[1], x).v;
    EXPECT_LT((v.col(static_cast<Eigen::Index>(k)) - ref).norm(), 1e-13);
  }
}

TEST(CircleSpectrum, EntriesAndOrthonormality) {
  const auto c0 = circle_spectrum(0);
  ASSERT_EQ(c0.scalars().size(), 1u);
  EXPECT_EQ(c0.scalars()[0].eigenvalue, 0.0);
  EXPECT_EQ(c0.fields()[0].hodge_class, HodgeClass::Harm);

  const auto c = circle_spectrum(2);
  EXPECT_EQ(c.scalars()[3].eigenvalue, 4.0);
  // trapezoid rule is exact for trigonometric polynomials of low degree
  const int n = 64;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd f = c.scalar_values(TorusPoint({kTwoPi * i / n}));
    g += (kTwoPi / n) * f * f.transpose();
  }
  EXPECT_LT((g - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProductSpectrum, MatchesDirectTorusEnumeration) {
  const double cap = 10.0;
  const auto t = torus_spectrum(2, cap);
  // scalars: one per n in Z^2 with |n|^2 <= cap; fields: two per scalar
  std::size_t lattice = 0;
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b)
      if (a * a + b * b <= cap) ++lattice;
  EXPECT_EQ(t.scalars().size(), lattice);
  EXPECT_EQ(t.fields().size(), 2 * lattice);
  double last = 0.0;
  for (const auto& f : t.fields()) {
    EXPECT_GE(f.eigenvalue, last);
    last = f.eigenvalue;
    if (f.eigenvalue == 0.0) {
      EXPECT_EQ(f.hodge_class, HodgeClass::Harm);
    }
  }
  bool found = false;
  for (const auto& s : t.scalars())
    if (s.label[0] == 1 && s.label[2] == 2) {
      EXPECT_EQ(s.eigenvalue, 5.0);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(ProductSpectrum, HarmonicFieldsAreConstantFrameVectors) {
  const auto t = torus_spectrum(2, 4.0);
  const TorusPoint x({0.3, 2.0});
  const Eigen::MatrixXd v = t.field_values(x);
  int harm = 0;
  for (std::size_t k = 0; k < t.fields().size(); ++k) {
    if (t.fields()[k].hodge_class != HodgeClass::Harm) continue;
    ++harm;
    const Eigen::VectorXd col = v.col(static_cast<Eigen::Index>(k));
    EXPECT_NEAR(col.norm(), 1.0 / kTwoPi, 1e-14);
    EXPECT_NEAR(col.cwiseAbs().minCoeff(), 0.0, 1e-15);
  }
  EXPECT_EQ(harm, 2);
}

TEST(ProductSpectrum, FieldOrthonormalityOnT2) {
  for (const auto& t : {torus_spectrum(2, 5.0), torus2_hodge_spectrum(5.0)}) {
    const auto nf = static_cast<Eigen::Index>(t.fields().size());
    const int n = 24;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nf, nf);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Eigen::MatrixXd v = t.field_values(TorusPoint({kTwoPi * i / n, kTwoPi * j / n}));
        g += (kTwoPi / n) * (kTwoPi / n) * v.transpose() * v;
      }
    EXPECT_LT((g - Eigen::MatrixXd::Identity(nf, nf)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ProductSpectrum, RejectsEmptyFactor) {
  const auto c = circle_spectrum(1);
  const TorusSpectrum empty(Manifold::circle(), 1, {}, {}, [](const TorusPoint&) { return Eigen::VectorXd(); },
                            [](const TorusPoint&) { return Eigen::MatrixXd(); });
  EXPECT_THROW(product_spectrum(c, empty, 4.0), InvalidInput);
}

TEST(TorusHodgeSpectrum, ClassesAndStarRelation) {
  const auto t = torus2_hodge_spectrum(8.0);
  const TorusPoint x({1.1, 4.2});
  const Eigen::MatrixXd v = t.field_values(x);
  const auto& f = t.fields();
  for (std::size_t k = 0; k + 1 < f.size(); k += 2) {
    if (f[k].hodge_class == HodgeClass::Harm) continue;
    ASSERT_EQ(f[k].hodge_class, HodgeClass::Div);
    ASSERT_EQ(f[k + 1].hodge_class, HodgeClass::Curl);
    const Eigen::Vector2d a = v.col(static_cast<Eigen::Index>(k));
    const Eigen::Vector2d b = v.col(static_cast<Eigen::Index>(k + 1));
    EXPECT_NEAR(b[0], -a[1], 1e-15);
    EXPECT_NEAR(b[1], a[0], 1e-15);
  }
}
