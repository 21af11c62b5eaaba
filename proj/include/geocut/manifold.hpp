#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace geocut {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidArgument,
  ChartDomain,
  BaseMismatch,
  DegenerateRegion,
  NoConvergence,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// A manifold point in the fixed global chart.  euclidean/klein: an
/// n-vector; spd: the packed lower-dimensional coordinates of a symmetric
/// positive-definite matrix (see pack_sym).
struct Point {
  Vec coords;
};

/// A tangent vector expressed in chart-basis components at `base`.
struct Tangent {
  Vec base;
  Vec vec;
};

/// Pack a symmetric matrix into (diag..., strict-upper row-major...) order.
/// Chart Lebesgue measure for the spd manifold is the product of these
/// independent entries.
Vec pack_sym(const Mat& s);
Mat unpack_sym(const Vec& v);
int sym_size_from_packed(int packed_dim);

enum class ManifoldKind { Euclidean, KleinHyperbolic, Spd };

/// Geometry kernel.  Immutable; all operations are pure functions of their
/// inputs, so a handle can be shared freely across threads.
///
/// Charts:
///   euclidean(n) - R^n itself.
///   klein(n)     - the open unit ball with straight-chord geodesics and
///                  volume density (1-|x|^2)^(-(n+1)/2).
///   spd(n)       - positive-definite n x n matrices with the
///                  affine-invariant metric <U,V>_X = tr(X^-1 U X^-1 V).
class Manifold {
 public:
  static Manifold euclidean(int n);
  static Manifold klein(int n);
  static Manifold spd(int n);
  static Manifold make(ManifoldKind kind, int n);

  ManifoldKind kind() const { return kind_; }
  /// Intrinsic dimension (= chart coordinate count).
  int dim() const { return dim_; }
  /// Space parameter n (matrix size for spd, dimension otherwise).
  int n() const { return n_; }
  std::string kind_name() const;

  bool chart_valid(const Vec& x) const;
  void require_chart(const Vec& x, const char* who) const;

  Point exp(const Point& x, const Tangent& v) const;
  Tangent log(const Point& x, const Point& y) const;
  double inner(const Point& x, const Tangent& u, const Tangent& v) const;
  double norm(const Point& x, const Tangent& v) const;
  double dist(const Point& x, const Point& y) const;
  /// Density of the Riemannian volume relative to chart Lebesgue measure.
  double volume_density(const Point& x) const;

  /// Gram matrix of the metric in the chart basis at x.
  Mat metric_gram(const Point& x) const;
  /// Lower-triangular L with metric_gram = L L^T.  Columns of L^-T form a
  /// metric-orthonormal frame in chart coordinates.
  Mat metric_chol(const Point& x) const;

  /// Scale v to unit metric norm.  Zero vectors are a ChartDomain error.
  Tangent unit(const Point& x, const Tangent& v) const;

 private:
  Manifold(ManifoldKind kind, int n, int dim) : kind_(kind), n_(n), dim_(dim) {}
  void require_base(const Point& x, const Tangent& v, const char* who) const;

  ManifoldKind kind_;
  int n_;
  int dim_;
};

}  // namespace geocut
