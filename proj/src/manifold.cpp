#include "geocut/manifold.hpp"

#include <cmath>

namespace geocut {

namespace {

constexpr double kKleinBoundaryMargin = 1e-12;
constexpr double kBaseTol = 1e-12;

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

// Spectral matrix function of a symmetric matrix.
template <typename F>
Mat sym_matrix_function(const Mat& a, F f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Vec d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) d[i] = f(d[i]);
  return sym(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}

// sinh(t)/t with a series fallback near zero.
double sinhc(double t) {
  if (std::abs(t) < 1e-6) return 1.0 + t * t / 6.0;
  return std::sinh(t) / t;
}

struct KleinLift {
  double x0;  // 1/sqrt(1-|x|^2)
  Vec spatial;
};

KleinLift klein_lift(const Vec& x) {
  double s = 1.0 - x.squaredNorm();
  KleinLift l;
  l.x0 = 1.0 / std::sqrt(s);
  l.spatial = l.x0 * x;
  return l;
}

// Stable sinh^2 of the hyperbolic distance between two chart points:
//   cosh^2 d - 1 = (|x-y|^2 - |x ^ y|^2) / ((1-|x|^2)(1-|y|^2)),
// where |x ^ y|^2 = |x|^2 |y|^2 - (x.y)^2 is the Gram determinant.
double klein_sinh2(const Vec& x, const Vec& y) {
  double diff2 = (x - y).squaredNorm();
  // Gram determinant via the wedge components, which stay accurate when
  // x and y are close.
  double wedge2 = 0.0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = i + 1; j < x.size(); ++j) {
      double w = x[i] * y[j] - x[j] * y[i];
      wedge2 += w * w;
    }
  double denom = (1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm());
  double s2 = (diff2 - wedge2) / denom;
  return s2 > 0.0 ? s2 : 0.0;
}

}  // namespace

Vec pack_sym(const Mat& s) {
  int n = static_cast<int>(s.rows());
  Vec v(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i) v[k++] = s(i, i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v[k++] = 0.5 * (s(i, j) + s(j, i));
  return v;
}

Mat unpack_sym(const Vec& v) {
  int n = sym_size_from_packed(static_cast<int>(v.size()));
  Mat s(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) s(i, i) = v[k++];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      s(i, j) = v[k];
      s(j, i) = v[k];
      ++k;
    }
  return s;
}

int sym_size_from_packed(int packed_dim) {
  int n = static_cast<int>(std::round((std::sqrt(8.0 * packed_dim + 1.0) - 1.0) / 2.0));
  if (n * (n + 1) / 2 != packed_dim)
    throw Error(ErrorCode::InvalidArgument,
                "packed symmetric dimension " + std::to_string(packed_dim) +
                    " is not triangular");
  return n;
}

Manifold Manifold::euclidean(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "euclidean: dim must be >= 1");
  return Manifold(ManifoldKind::Euclidean, n, n);
}

Manifold Manifold::klein(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "klein: dim must be >= 1");
  return Manifold(ManifoldKind::KleinHyperbolic, n, n);
}

Manifold Manifold::spd(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "spd: matrix size must be >= 1");
  return Manifold(ManifoldKind::Spd, n, n * (n + 1) / 2);
}

Manifold Manifold::make(ManifoldKind kind, int n) {
  switch (kind) {
    case ManifoldKind::Euclidean: return euclidean(n);
    case ManifoldKind::KleinHyperbolic: return klein(n);
    case ManifoldKind::Spd: return spd(n);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown manifold kind");
}

std::string Manifold::kind_name() const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return "euclidean";
    case ManifoldKind::KleinHyperbolic: return "klein";
    case ManifoldKind::Spd: return "spd";
  }
  return "?";
}

bool Manifold::chart_valid(const Vec& x) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return true;
    case ManifoldKind::KleinHyperbolic:
      // points within 1e-12 of the ideal boundary are rejected, not clamped
      return x.squaredNorm() < 1.0 - kKleinBoundaryMargin;
    case ManifoldKind::Spd: {
      Eigen::SelfAdjointEigenSolver<Mat> es(unpack_sym(x));
      return es.eigenvalues().minCoeff() > 0.0;
    }
  }
  return false;
}

void Manifold::require_chart(const Vec& x, const char* who) const {
  if (!chart_valid(x))
    throw Error(ErrorCode::ChartDomain,
                std::string(who) + ": point outside the " + kind_name() + " chart");
}

void Manifold::require_base(const Point& x, const Tangent& v, const char* who) const {
  if (v.base.size() != x.coords.size() ||
      (v.base - x.coords).norm() > kBaseTol * (1.0 + x.coords.norm()))
    throw Error(ErrorCode::BaseMismatch,
                std::string(who) + ": tangent base does not match the point");
  if (!v.vec.allFinite() || v.vec.size() != dim_)
    throw Error(ErrorCode::InvalidArgument, std::string(who) + ": bad tangent vector");
}

Point Manifold::exp(const Point& x, const Tangent& v) const {
  require_chart(x.coords, "exp_map");
  require_base(x, v, "exp_map");
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return Point{x.coords + v.vec};
    case ManifoldKind::KleinHyperbolic: {
      KleinLift l = klein_lift(x.coords);
      double xu = x.coords.dot(v.vec);
      // hyperboloid lift of the tangent: W = (w0, wS) with <X,W>_L = 0
      double w0 = l.x0 * l.x0 * l.x0 * xu;
      Vec ws = l.x0 * v.vec + w0 * x.coords;
      double t2 = ws.squaredNorm() - w0 * w0;  // Minkowski norm^2, >= 0
      double t = std::sqrt(std::max(t2, 0.0));
      double c = std::cosh(t), sc = sinhc(t);
      double y0 = c * l.x0 + sc * w0;
      Vec ys = c * l.spatial + sc * ws;
      return Point{ys / y0};
    }
    case ManifoldKind::Spd: {
      Mat x_mat = unpack_sym(x.coords);
      Eigen::SelfAdjointEigenSolver<Mat> es(x_mat);
      Vec sqrt_d = es.eigenvalues().cwiseSqrt();
      Mat xs = es.eigenvectors() * sqrt_d.asDiagonal() * es.eigenvectors().transpose();
      Mat xis = es.eigenvectors() * sqrt_d.cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
      Mat s = sym(xis * unpack_sym(v.vec) * xis);
      Mat e = sym_matrix_function(s, [](double t) { return std::exp(t); });
      return Point{pack_sym(sym(xs * e * xs))};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "exp_map: unknown kind");
}

Tangent Manifold::log(const Point& x, const Point& y) const {
  require_chart(x.coords, "log_map");
  require_chart(y.coords, "log_map");
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return Tangent{x.coords, y.coords - x.coords};
    case ManifoldKind::KleinHyperbolic: {
      KleinLift lx = klein_lift(x.coords);
      KleinLift ly = klein_lift(y.coords);
      double s2 = klein_sinh2(x.coords, y.coords);
      double sh = std::sqrt(s2);
      double d = std::asinh(sh);
      double c = std::sqrt(1.0 + s2);  // cosh d
      // W = (Y - cosh(d) X) * d / sinh(d) in hyperboloid coordinates
      double f = (d < 1e-12) ? 1.0 : d / sh;
      double w0 = f * (ly.x0 - c * lx.x0);
      Vec ws = f * (ly.spatial - c * lx.spatial);
      // push forward through the chart projection X -> spatial/x0
      Vec u = (ws - w0 * x.coords) / lx.x0;
      return Tangent{x.coords, u};
    }
    case ManifoldKind::Spd: {
      Mat x_mat = unpack_sym(x.coords);
      Eigen::SelfAdjointEigenSolver<Mat> es(x_mat);
      Vec sqrt_d = es.eigenvalues().cwiseSqrt();
      Mat xs = es.eigenvectors() * sqrt_d.asDiagonal() * es.eigenvectors().transpose();
      Mat xis = es.eigenvectors() * sqrt_d.cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
      Mat m = sym(xis * unpack_sym(y.coords) * xis);
      Mat l = sym_matrix_function(m, [](double t) { return std::log(t); });
      return Tangent{x.coords, pack_sym(sym(xs * l * xs))};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "log_map: unknown kind");
}

double Manifold::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  require_chart(x.coords, "inner");
  require_base(x, u, "inner");
  require_base(x, v, "inner");
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return u.vec.dot(v.vec);
    case ManifoldKind::KleinHyperbolic: {
      double s = 1.0 - x.coords.squaredNorm();
      return u.vec.dot(v.vec) / s + x.coords.dot(u.vec) * x.coords.dot(v.vec) / (s * s);
    }
    case ManifoldKind::Spd: {
      Mat x_mat = unpack_sym(x.coords);
      Eigen::LLT<Mat> llt(x_mat);
      Mat a = llt.solve(unpack_sym(u.vec));
      Mat b = llt.solve(unpack_sym(v.vec));
      return (a * b).trace();
    }
  }
  throw Error(ErrorCode::InvalidArgument, "inner: unknown kind");
}

double Manifold::norm(const Point& x, const Tangent& v) const {
  return std::sqrt(std::max(inner(x, v, v), 0.0));
}

double Manifold::dist(const Point& x, const Point& y) const {
  require_chart(x.coords, "dist");
  require_chart(y.coords, "dist");
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return (x.coords - y.coords).norm();
    case ManifoldKind::KleinHyperbolic:
      return std::asinh(std::sqrt(klein_sinh2(x.coords, y.coords)));
    case ManifoldKind::Spd: {
      Mat x_mat = unpack_sym(x.coords);
      Mat y_mat = unpack_sym(y.coords);
      Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(y_mat, x_mat);
      double acc = 0.0;
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double l = std::log(es.eigenvalues()[i]);
        acc += l * l;
      }
      return std::sqrt(acc);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "dist: unknown kind");
}

double Manifold::volume_density(const Point& x) const {
  require_chart(x.coords, "volume_density");
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return 1.0;
    case ManifoldKind::KleinHyperbolic:
      return std::pow(1.0 - x.coords.squaredNorm(), -0.5 * (n_ + 1));
    case ManifoldKind::Spd: {
      // sqrt(det G) = 2^(n(n-1)/4) det(X)^-(n+1)/2 in packed-entry coordinates
      Mat x_mat = unpack_sym(x.coords);
      double det = x_mat.determinant();
      return std::pow(2.0, 0.25 * n_ * (n_ - 1)) * std::pow(det, -0.5 * (n_ + 1));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "volume_density: unknown kind");
}

Mat Manifold::metric_gram(const Point& x) const {
  require_chart(x.coords, "metric_gram");
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return Mat::Identity(dim_, dim_);
    case ManifoldKind::KleinHyperbolic: {
      double s = 1.0 - x.coords.squaredNorm();
      return Mat::Identity(dim_, dim_) / s +
             (x.coords * x.coords.transpose()) / (s * s);
    }
    case ManifoldKind::Spd: {
      Mat x_mat = unpack_sym(x.coords);
      Eigen::LLT<Mat> llt(x_mat);
      Mat g(dim_, dim_);
      std::vector<Mat> basis(dim_);
      for (int a = 0; a < dim_; ++a) {
        Vec e = Vec::Zero(dim_);
        e[a] = 1.0;
        basis[a] = llt.solve(unpack_sym(e));  // X^-1 E_a
      }
      for (int a = 0; a < dim_; ++a)
        for (int b = a; b < dim_; ++b) {
          g(a, b) = (basis[a] * basis[b]).trace();
          g(b, a) = g(a, b);
        }
      return g;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "metric_gram: unknown kind");
}

Mat Manifold::metric_chol(const Point& x) const {
  Eigen::LLT<Mat> llt(metric_gram(x));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::ChartDomain, "metric_chol: Gram matrix not positive definite");
  return llt.matrixL();
}

Tangent Manifold::unit(const Point& x, const Tangent& v) const {
  double nv = norm(x, v);
  if (nv <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "unit: zero tangent vector");
  return Tangent{v.base, v.vec / nv};
}

}  // namespace geocut
