#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geocut/manifold.hpp"
#include "geocut/oracle.hpp"

namespace geocut {

/// Open halfspace H_x(v) = { exp_x(w) : <w, v>_x < 0 }.  The normal is kept
/// at unit metric length; the boundary (inner product zero) is excluded.
struct HalfspaceCut {
  Point base;
  Tangent normal;
};

/// Ambient geodesic ball intersected with a list of cuts.  Immutable;
/// with_cut produces an extended copy.
struct FeasibleRegion {
  Point ambient_center;
  double ambient_radius = 0.0;
  std::vector<HalfspaceCut> cuts;

  FeasibleRegion with_cut(const HalfspaceCut& cut) const {
    FeasibleRegion r = *this;
    r.cuts.push_back(cut);
    return r;
  }
};

HalfspaceCut make_cut(const Manifold& m, const Point& base, const Tangent& normal);
FeasibleRegion make_region(const Manifold& m, const Point& center, double radius);

bool halfspace_contains(const Manifold& m, const HalfspaceCut& cut, const Point& y);
bool region_contains(const Manifold& m, const FeasibleRegion& region, const Point& y);

/// Cut through x normal to a subgradient.  Returns nullopt when the
/// subgradient is (numerically) zero, which signals that x is a global
/// minimizer.
std::optional<HalfspaceCut> cut_from_subgradient(const Manifold& m,
                                                 const SubgradientOracle& oracle,
                                                 const Point& x);

/// Halfspace based at p that is disjoint from the closed geodesic ball
/// B(ball_center, ball_radius); requires p strictly outside the ball.
HalfspaceCut separate(const Manifold& m, const Point& ball_center,
                      double ball_radius, const Point& p);

// ---------------------------------------------------------------------------
// Chart geometry (euclidean / klein charts, where geodesics are chart lines).

/// Chart halfplane { y : normal . y < offset }.
struct ChartHalfplane {
  Vec normal;
  double offset;
};

/// Chart quadric { y : y^T a y + 2 b . y + c <= 0 }; the chart image of a
/// geodesic ball in the euclidean and klein charts.
struct ChartQuadric {
  Mat a;
  Vec b;
  double c;

  double eval(const Vec& y) const { return y.dot(a * y) + 2.0 * b.dot(y) + c; }
};

/// Chart halfplane equal to the cut's halfspace (euclidean/klein only).
ChartHalfplane chart_halfplane(const Manifold& m, const HalfspaceCut& cut);

/// Chart quadric of the region's ambient ball (euclidean/klein only).
ChartQuadric ambient_chart_quadric(const Manifold& m, const FeasibleRegion& region);

/// Axis-aligned bounding box of a chart quadric's interior (any dim).
std::pair<Vec, Vec> quadric_bbox(const ChartQuadric& q);

/// Exact bounding box of the chart image of the region (dim 2, euclidean or
/// klein).  Returns nullopt for other manifolds/dims or when the region is
/// numerically empty.
std::optional<std::pair<Vec, Vec>> region_chart_bbox(const Manifold& m,
                                                     const FeasibleRegion& region);

/// Fast membership tests, chart-algebraic where the chart allows it.
/// Agrees with region_contains away from boundaries.
class RegionEvaluator {
 public:
  RegionEvaluator(const Manifold& m, const FeasibleRegion& region);
  bool contains(const Vec& chart_point) const;

 private:
  const Manifold* m_;
  const FeasibleRegion* region_;
  bool chart_linear_ = false;
  ChartQuadric ball_;
  std::vector<ChartHalfplane> planes_;
};

// ---------------------------------------------------------------------------
// Serialization (versioned record format used by the CLI for resumable runs).

std::string region_to_json(const Manifold& m, const FeasibleRegion& region);
std::pair<Manifold, FeasibleRegion> region_from_json(const std::string& text);
void save_region(const Manifold& m, const FeasibleRegion& region,
                 const std::string& path);
std::pair<Manifold, FeasibleRegion> load_region(const std::string& path);

}  // namespace geocut
