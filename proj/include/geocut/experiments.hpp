#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geocut/cuts.hpp"
#include "geocut/manifold.hpp"
#include "geocut/optimizer.hpp"
#include "geocut/sampling.hpp"

namespace geocut {

// ---------------------------------------------------------------------------
// Sharpness experiment: truncated near-ideal simplex in the klein chart.

struct SharpnessConfig {
  int n = 2;
  double delta = 0.05;                  ///< circumradius excess of the simplex
  std::vector<double> eps_list = {0.1, 0.05, 0.02, 0.01, 0.005};
  std::uint64_t trials = 1000000;       ///< proposal draws per eps
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Unit directions of the n+1 vertices of a regular n-simplex centered at
/// the origin (deterministic orientation).
std::vector<Vec> regular_simplex_directions(int n);

/// S_eps: chart simplex with facets at distance (1+delta)/(n) from the
/// origin, intersected with the chart ball of radius 1-eps.  Returned as a
/// feasible region on the given klein manifold.
FeasibleRegion build_truncated_simplex(const Manifold& m, double delta, double eps);

/// Halfspace through the chart origin parallel to facet i, containing only
/// vertex i.
std::vector<HalfspaceCut> vertex_halfspaces(const Manifold& m);

struct SharpnessRow {
  double eps = 0.0;
  double volume = 0.0;
  double volume_stderr = 0.0;
  std::vector<double> vertex_mass;
  std::vector<double> vertex_mass_stderr;
};

/// Volume of S_eps and the mass of each single-vertex halfspace, one row per
/// eps, sorted by decreasing eps.
std::vector<SharpnessRow> sharpness_run(const SharpnessConfig& cfg);

void write_sharpness_csv(const std::vector<SharpnessRow>& rows,
                         const std::string& path);

// ---------------------------------------------------------------------------
// Euclidean Grünbaum check on simple planar shapes.

enum class GrunbaumShape { Triangle, Square };

/// Uniform triangle (0,0),(1,0),(0,1) or unit square as a feasible region in
/// the flat plane.
FeasibleRegion planar_shape_region(const Manifold& m, GrunbaumShape shape);
Point planar_shape_centroid(GrunbaumShape shape);

struct GrunbaumResult {
  Point found_point;
  double found_depth = 0.0;
  double centroid_depth = 0.0;
};

GrunbaumResult euclidean_grunbaum_check(GrunbaumShape shape, std::uint64_t samples,
                                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Convergence study on the built-in problems.

struct Problem {
  Manifold manifold;
  SubgradientOracle oracle;
  FeasibleRegion region;
  double f_reference;   ///< known optimum, or NaN when it must be measured
  std::string name;
};

/// "euclidean_quadratic", "klein_fermat_weber", or "spd_logdet".
Problem make_problem(const std::string& label);
std::vector<std::string> problem_labels();

/// Projected Riemannian gradient descent with backtracking; the reference
/// method for problems without a closed-form optimum.
double reference_descent(const Manifold& m, const SubgradientOracle& oracle,
                         const FeasibleRegion& region, int iters = 2000);

struct ConvergenceRow {
  double eps = 0.0;
  std::uint64_t cuts_used = 0;
  double best_value = 0.0;
  double f_reference = 0.0;
  double suboptimality = 0.0;
  std::uint64_t budget = 0;   ///< iteration_budget at the problem's known volume
  std::string termination;
};

struct ConvergenceResult {
  std::string problem;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;   ///< least-squares slope of cuts_used vs log(1/eps)
};

ConvergenceResult convergence_run(const std::string& problem_label,
                                  const std::vector<double>& eps_list,
                                  std::uint64_t seed, int threads = 1);

void write_convergence_csv(const ConvergenceResult& result, const std::string& path);

/// Closed-form area of the hyperbolic disk of geodesic radius r (n = 2).
double hyperbolic_disk_area(double r);

}  // namespace geocut
