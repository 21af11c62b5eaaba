#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "geocut/manifold.hpp"
#include "geocut/sampling.hpp"

namespace geocut {

/// Empirical halfspace depth of a query point: the point is an empirical
/// beta-centerpoint with beta = depth.  g_value = 1 - depth is the largest
/// halfspace mass found; worst_direction is a unit tangent attaining it.
struct DepthEstimate {
  double depth = 0.0;
  double g_value = 1.0;
  Tangent worst_direction;
};

/// Depth of y against the sample measure.  Samples are mapped to T_yM via
/// log_map, where halfspace membership is exactly linear.  For dim 2 the
/// direction search is an exact circular sweep; for dim >= 3 it maximizes
/// over `directions` random unit directions plus all sample directions,
/// so the reported depth upper-bounds the true empirical depth.
DepthEstimate centrality(const Manifold& m, const Point& y, const SampleSet& samples,
                         int directions, std::uint64_t direction_seed);
DepthEstimate centrality(const Manifold& m, const Point& y, const SampleSet& samples,
                         int directions = 512);

class KarcherError : public Error {
 public:
  KarcherError(const std::string& what, Point last)
      : Error(ErrorCode::NoConvergence, what), last_iterate(std::move(last)) {}
  Point last_iterate;
};

/// Intrinsic mean: fixed point of x <- exp_x(mean log_x(p_i)), unique on
/// Hadamard manifolds.  Throws KarcherError (with the last iterate) if the
/// step norm does not fall below tol within the iteration budget.
Point karcher_mean(const Manifold& m, const SampleSet& samples, double tol = 1e-10,
                   int max_iters = 1000);

struct CenterpointOptions {
  int candidates = 16;      ///< sample points tried besides the Karcher mean
  int directions = 512;     ///< random directions per centrality call (dim >= 3)
  int max_halvings = 6;     ///< pattern-search step halvings
  int max_evals = 64;       ///< hard cap on centrality evaluations
};

/// Best empirical centerpoint found by candidate evaluation plus pattern
/// search along reversals of the worst direction.  The returned depth is
/// never below the Karcher mean's depth.
std::pair<Point, DepthEstimate> find_centerpoint(const Manifold& m,
                                                 const SampleSet& samples,
                                                 const CenterpointOptions& opts = {});

/// Checks quasi-convexity of the centrality function g along the chart
/// segment from y0 to y1 at k interior points, allowing 3-sigma sampling
/// noise.  Chart-linear manifolds only.
bool quasiconvexity_probe(const Manifold& m, const SampleSet& samples,
                          const Point& y0, const Point& y1, int k);

/// CSV grid of (chart point, g_value) for contour plots; dim 2 only.
void export_depth_profile(const Manifold& m, const SampleSet& samples, int grid,
                          const std::string& path);

}  // namespace geocut
