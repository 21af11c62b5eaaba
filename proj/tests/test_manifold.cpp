#include <cmath>

#include "doctest.h"
#include "geocut/manifold.hpp"
#include "geocut/rng.hpp"
#include "oracles.hpp"

using namespace geocut;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Point random_klein_point(RngStream& rng, double max_r = 0.85) {
  double a = rng.uniform(0.0, 2.0 * M_PI);
  double r = max_r * std::sqrt(rng.uniform());
  return Point{vec2(r * std::cos(a), r * std::sin(a))};
}

// random spd chart point built by spectral synthesis, independent of the
// library's exponential map
Point random_spd_point(RngStream& rng, int n = 2) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Vec d(n);
  for (int i = 0; i < n; ++i) d[i] = std::exp(rng.uniform(-1.2, 1.2));
  Mat x = q * d.asDiagonal() * q.transpose();
  return Point{pack_sym(0.5 * (x + x.transpose()))};
}

Tangent random_tangent(const Manifold& m, const Point& x, RngStream& rng,
                       double norm_lo, double norm_hi) {
  Vec raw(m.dim());
  for (int i = 0; i < m.dim(); ++i) raw[i] = rng.normal();
  Tangent t{x.coords, raw};
  double n = m.norm(x, t);
  double target = rng.uniform(norm_lo, norm_hi);
  t.vec *= target / n;
  return t;
}

}  // namespace

TEST_CASE("euclidean basics") {
  Manifold m = Manifold::euclidean(2);
  Point zero{Vec::Zero(2)};
  Vec v = vec2(0.7, -0.4);
  CHECK(m.exp(zero, Tangent{zero.coords, v}).coords.isApprox(v));
  Point x{vec2(1.0, 2.0)}, y{vec2(-0.5, 3.0)};
  CHECK(m.log(x, y).vec.isApprox(y.coords - x.coords));
  CHECK(m.inner(x, Tangent{x.coords, vec2(1, 2)}, Tangent{x.coords, vec2(3, -1)}) ==
        doctest::Approx(1.0));
  CHECK(m.dist(x, x) == 0.0);
  CHECK(m.volume_density(x) == 1.0);
}

TEST_CASE("klein exp at origin follows tanh along the axis") {
  Manifold m = Manifold::klein(2);
  Point origin{Vec::Zero(2)};
  for (double t : {0.3, 1.0, 2.0}) {
    Point y = m.exp(origin, Tangent{origin.coords, vec2(t, 0.0)});
    CHECK(y.coords[0] == doctest::Approx(std::tanh(t)).epsilon(1e-12));
    CHECK(std::abs(y.coords[1]) < 1e-15);
  }
}

TEST_CASE("klein exp matches geodesic ODE integration") {
  Manifold m = Manifold::klein(2);
  Point x{vec2(0.2, -0.3)};
  Vec v = vec2(0.5, 0.9);
  Point got = m.exp(x, Tangent{x.coords, v});
  Vec expect = oracles::integrate_geodesic(oracles::klein_metric, x.coords, v);
  CHECK((got.coords - expect).norm() < 1e-6);
}

TEST_CASE("klein log at origin has arctanh metric length") {
  Manifold m = Manifold::klein(2);
  Point origin{Vec::Zero(2)};
  Point y{vec2(0.5, 0.0)};
  Tangent l = m.log(origin, y);
  // frozen from the metric line-integral oracle: arctanh(0.5)
  CHECK(m.norm(origin, l) == doctest::Approx(0.5493061443340549).epsilon(1e-10));
  double oracle_len = oracles::segment_length(oracles::klein_metric, origin.coords,
                                              y.coords);
  CHECK(m.dist(origin, y) == doctest::Approx(oracle_len).epsilon(1e-8));
}

TEST_CASE("klein dist is arctanh of the chart radius from the origin") {
  Manifold m = Manifold::klein(3);
  Point origin{Vec::Zero(3)};
  Vec y = Vec::Zero(3);
  y[0] = 0.5;
  CHECK(m.dist(origin, Point{y}) == doctest::Approx(0.549306).epsilon(1e-6));
}

TEST_CASE("klein metric and density values from the volume form") {
  Manifold m = Manifold::klein(2);
  Point origin{Vec::Zero(2)};
  // metric at the origin is the identity
  CHECK(m.inner(origin, Tangent{origin.coords, vec2(1, 0)},
                Tangent{origin.coords, vec2(0, 1)}) == doctest::Approx(0.0));
  CHECK(m.inner(origin, Tangent{origin.coords, vec2(1, 2)},
                Tangent{origin.coords, vec2(1, 2)}) == doctest::Approx(5.0));
  CHECK(m.volume_density(origin) == doctest::Approx(1.0));
  // |x|^2 = 0.5: density (1 - 0.5)^(-3/2)
  Point x{vec2(0.5, 0.5)};
  CHECK(m.volume_density(x) == doctest::Approx(std::pow(0.5, -1.5)).epsilon(1e-12));
  // Gram matrix matches the oracle formula
  Point z{vec2(0.3, -0.4)};
  CHECK(m.metric_gram(z).isApprox(oracles::klein_metric(z.coords), 1e-12));
}

TEST_CASE("spd exp at the identity is the matrix exponential") {
  Manifold m = Manifold::spd(2);
  Point eye{pack_sym(Mat::Identity(2, 2))};
  Mat v(2, 2);
  v << 0.3, -0.2, -0.2, 0.5;
  Point y = m.exp(eye, Tangent{eye.coords, pack_sym(v)});
  Eigen::SelfAdjointEigenSolver<Mat> es(v);
  Mat expect = es.eigenvectors() *
               es.eigenvalues().array().exp().matrix().asDiagonal() *
               es.eigenvectors().transpose();
  CHECK(unpack_sym(y.coords).isApprox(expect, 1e-12));
  // and against the geodesic ODE oracle in packed coordinates
  Vec ode = oracles::integrate_geodesic(oracles::spd_metric_packed, eye.coords,
                                        pack_sym(v));
  CHECK((y.coords - ode).norm() < 1e-6);
}

TEST_CASE("spd dist of commuting matrices is the log-eigenvalue norm") {
  Manifold m = Manifold::spd(2);
  Point eye{pack_sym(Mat::Identity(2, 2))};
  Mat d = Mat::Identity(2, 2);
  d(0, 0) = std::exp(1.0);
  CHECK(m.dist(eye, Point{pack_sym(d)}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spd inner matches the trace formula and the distance") {
  Manifold m = Manifold::spd(2);
  RngStream rng(2024);
  for (int i = 0; i < 50; ++i) {
    Point x = random_spd_point(rng);
    Tangent v = random_tangent(m, x, rng, 0.05, 1.5);
    Mat xm = unpack_sym(x.coords), vm = unpack_sym(v.vec);
    Mat xi = xm.inverse();
    CHECK(m.inner(x, v, v) ==
          doctest::Approx((xi * vm * xi * vm).trace()).epsilon(1e-10));
    // dist(x, exp_x(v)) = sqrt(<v,v>)
    CHECK(m.dist(x, m.exp(x, v)) ==
          doctest::Approx(std::sqrt(m.inner(x, v, v))).epsilon(1e-9));
  }
}

TEST_CASE("spd volume density equals sqrt(det Gram) in packed coordinates") {
  Manifold m = Manifold::spd(2);
  RngStream rng(77);
  for (int i = 0; i < 20; ++i) {
    Point x = random_spd_point(rng);
    double direct = std::sqrt(oracles::spd_metric_packed(x.coords).determinant());
    CHECK(m.volume_density(x) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("exp/log roundtrip over 1000 draws per manifold") {
  RngStream rng(42);
  auto roundtrip = [&](const Manifold& m, auto make_point) {
    for (int i = 0; i < 1000; ++i) {
      Point x = make_point(rng);
      Tangent v = random_tangent(m, x, rng, 0.01, 2.0);
      Tangent back = m.log(x, m.exp(x, v));
      double rel = (back.vec - v.vec).norm() / v.vec.norm();
      CHECK(rel < 1e-9);
    }
  };
  roundtrip(Manifold::euclidean(2), [](RngStream& r) {
    return Point{vec2(r.normal(), r.normal())};
  });
  roundtrip(Manifold::klein(2), [](RngStream& r) { return random_klein_point(r); });
  roundtrip(Manifold::spd(2), [](RngStream& r) { return random_spd_point(r); });
}

TEST_CASE("geodesic speed: dist(x, exp_x(t v)) = |t| for unit v") {
  RngStream rng(7);
  auto speed = [&](const Manifold& m, auto make_point) {
    for (int i = 0; i < 60; ++i) {
      Point x = make_point(rng);
      Tangent v = random_tangent(m, x, rng, 1.0, 1.0);
      double t = rng.uniform(-5.0, 5.0);
      Point y = m.exp(x, Tangent{x.coords, t * v.vec});
      CHECK(m.dist(x, y) == doctest::Approx(std::abs(t)).epsilon(1e-8));
    }
  };
  speed(Manifold::euclidean(2), [](RngStream& r) {
    return Point{vec2(r.normal(), r.normal())};
  });
  speed(Manifold::klein(2), [](RngStream& r) { return random_klein_point(r, 0.6); });
  speed(Manifold::spd(2), [](RngStream& r) { return random_spd_point(r); });
}

TEST_CASE("klein geodesics are chart-straight segments") {
  Manifold m = Manifold::klein(2);
  RngStream rng(11);
  for (int i = 0; i < 100; ++i) {
    Point x = random_klein_point(rng);
    Point y = random_klein_point(rng);
    Tangent l = m.log(x, y);
    Vec seg = y.coords - x.coords;
    double seg2 = seg.squaredNorm();
    if (seg2 < 1e-20) continue;
    for (int j = 1; j <= 10; ++j) {
      double t = j / 11.0;
      Point z = m.exp(x, Tangent{x.coords, t * l.vec});
      double s = (z.coords - x.coords).dot(seg) / seg2;
      double off = (z.coords - x.coords - s * seg).norm();
      CHECK(off < 1e-9);
      CHECK(s > -1e-12);
      CHECK(s < 1.0 + 1e-12);
    }
  }
}

TEST_CASE("log of the same point is the zero tangent") {
  Manifold m = Manifold::klein(2);
  Point x{vec2(0.3, 0.1)};
  CHECK(m.norm(x, m.log(x, x)) < 1e-12);
}

TEST_CASE("chart validity errors") {
  Manifold k = Manifold::klein(2);
  CHECK(!k.chart_valid(vec2(1.0, 0.0)));
  CHECK(!k.chart_valid(vec2(0.8, 0.8)));
  CHECK_THROWS_AS(k.dist(Point{vec2(1.2, 0.0)}, Point{vec2(0, 0)}), Error);
  // within 1e-12 of the boundary is rejected, not clamped
  double r = std::sqrt(1.0 - 1e-13);
  CHECK(!k.chart_valid(vec2(r, 0.0)));

  Manifold s = Manifold::spd(2);
  Mat neg(2, 2);
  neg << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK(!s.chart_valid(pack_sym(neg)));
  CHECK_THROWS_AS(s.volume_density(Point{pack_sym(neg)}), Error);
}

TEST_CASE("mismatched tangent base errors") {
  Manifold m = Manifold::euclidean(2);
  Point x{vec2(0, 0)}, y{vec2(1, 0)};
  Tangent at_y{y.coords, vec2(1, 1)};
  CHECK_THROWS_AS(m.exp(x, at_y), Error);
  CHECK_THROWS_AS(m.inner(x, at_y, at_y), Error);
}

TEST_CASE("packed symmetric helpers") {
  Mat s(3, 3);
  s << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  CHECK(unpack_sym(pack_sym(s)).isApprox(s));
  CHECK(sym_size_from_packed(6) == 3);
  CHECK_THROWS_AS(sym_size_from_packed(4), Error);
}
