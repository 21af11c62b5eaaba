#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geocut/centerpoint.hpp"
#include "geocut/cuts.hpp"
#include "geocut/manifold.hpp"
#include "geocut/oracle.hpp"
#include "geocut/sampling.hpp"

namespace geocut {

/// Lemma-3.1 volume threshold (eps/L)^n / n^n.
double stopping_threshold(int dim, double eps, double lipschitz);

/// Smallest N with vol * (n/(n+1))^N below the stopping threshold; 0 when the
/// volume is already below it.
std::uint64_t iteration_budget(int dim, double lipschitz, double vol, double eps);

enum class Termination { VolumeThreshold, Budget, ZeroSubgradient, Degenerate };
std::string termination_name(Termination t);

struct TraceIterate {
  Point point;
  double f_value = 0.0;
  double depth = 0.0;
  double volume = 0.0;          ///< volume estimate of the region cut so far
  double volume_stderr = 0.0;
  bool depth_flagged = false;   ///< search fell short of 1/(n+1) - slack
};

struct OptimizerTrace {
  std::vector<TraceIterate> iterates;
  Point best_point;
  double best_value = 0.0;
  std::uint64_t cuts_used = 0;
  Termination termination = Termination::Budget;
  FeasibleRegion final_region;
  std::string diagnostic;
};

struct MinimizeConfig {
  std::uint64_t seed = 0;
  std::uint64_t search_samples = 4096;   ///< samples per centerpoint search
  std::uint64_t volume_trials = 100000;  ///< draws per volume estimate
  std::uint64_t pool_size = 200000;      ///< rejection pool for non-chart-linear manifolds
  std::uint64_t min_pool = 256;          ///< below this the sampler is declared exhausted
  std::uint64_t max_cuts = 0;            ///< 0: 3 x iteration_budget from measured volume
  int centerpoint_candidates = 16;
  int directions = 512;
  double depth_flag_slack = 0.05;
  int threads = 1;
};

/// Centerpoint cutting-plane minimization of a geodesically convex function
/// over a feasible region (initial geodesic ball).  Stops when the Monte
/// Carlo volume (plus a 3-sigma guard) falls below the Lemma-3.1 threshold,
/// on cut budget, or on a zero subgradient.
OptimizerTrace minimize(const Manifold& m, const SubgradientOracle& oracle,
                        const FeasibleRegion& region, double eps,
                        const MinimizeConfig& config = {});

// ---------------------------------------------------------------------------
// Built-in geodesically convex oracles.

/// f(x) = dist(x, p)^2, subgradient -2 log_x(p); L valid on `domain`.
SubgradientOracle squared_distance_oracle(const Manifold& m, const Point& p,
                                          const FeasibleRegion& domain);

/// Fermat-Weber f(x) = sum_i dist(x, p_i); terms at x = p_i are omitted.
SubgradientOracle fermat_weber_oracle(const Manifold& m, std::vector<Point> points);

/// f(x) = max_i dist(x, p_i).
SubgradientOracle max_distance_oracle(const Manifold& m, std::vector<Point> points);

/// spd only: f(X) = log det(sum_i B_i^T X B_i) with Riemannian gradient
/// X (sum_i B_i S^-1 B_i^T) X, S = sum_i B_i^T X B_i.  The Lipschitz constant
/// is probed over the domain ball (seeded, deterministic).
SubgradientOracle logdet_oracle(const Manifold& m, std::vector<Mat> bs,
                                const FeasibleRegion& domain,
                                std::uint64_t probe_seed = 17);

/// Canonical instances of every oracle family applicable to the manifold,
/// parameterized against the given domain ball.
std::vector<SubgradientOracle> builtin_oracles(const Manifold& m,
                                               const FeasibleRegion& domain);

// ---------------------------------------------------------------------------

/// JSON-lines export (schema header record, then one record per iteration).
void export_trace_jsonl(const Manifold& m, const OptimizerTrace& trace,
                        const std::string& path);
/// CSV summary, one row per iteration.
void export_trace_csv(const OptimizerTrace& trace, const std::string& path);

}  // namespace geocut
