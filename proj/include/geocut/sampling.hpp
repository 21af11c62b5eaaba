#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geocut/cuts.hpp"
#include "geocut/manifold.hpp"

namespace geocut {

/// Proposal set for rejection sampling: a chart Euclidean ball or an
/// axis-aligned chart box, together with its Lebesgue volume and an upper
/// bound on the Riemannian volume density over the target region.
struct Proposal {
  enum class Kind { Ball, Box };
  Kind kind = Kind::Ball;
  Vec center;
  double radius = 0.0;
  Vec lo, hi;
  double lebesgue_volume = 0.0;
  double density_bound = 1.0;

  static Proposal ball(Vec center, double radius, double density_bound);
  static Proposal box(Vec lo, Vec hi, double density_bound);
};

/// Proposal from the chart image of the region's ambient ball: the ball
/// itself (euclidean; klein at the chart origin) or a bounding box of it.
Proposal default_proposal(const Manifold& m, const FeasibleRegion& region);

/// Tighter proposal from the exact chart bounding box of the full region
/// (dim-2 euclidean/klein); nullopt when unavailable.
std::optional<Proposal> tightened_proposal(const Manifold& m,
                                           const FeasibleRegion& region);

struct SamplerOptions {
  std::uint64_t chunk = 8192;             ///< trials per RNG substream
  std::uint64_t max_trials = 200000000;   ///< degenerate-region trial budget
  int threads = 1;                        ///< chunk workers; result is thread-count independent
  std::optional<Proposal> proposal;       ///< override the default proposal
};

/// i.i.d. points from vol_g restricted to a region, with the trial-level
/// statistics of the rejection run that produced them.
struct SampleSet {
  std::vector<Point> points;
  FeasibleRegion region;
  std::uint64_t seed = 0;
  double proposal_volume = 0.0;
  double acceptance_rate = 0.0;
  std::uint64_t trials = 0;
  double weight_sum = 0.0;     ///< sum of density * region-indicator over trials
  double weight_sq_sum = 0.0;

  /// Volume estimate implied by the recorded trial weights.
  double volume_from_weights() const {
    return trials == 0 ? 0.0 : proposal_volume * weight_sum / static_cast<double>(trials);
  }
};

SampleSet sample_region(const Manifold& m, const FeasibleRegion& region,
                        std::uint64_t count, std::uint64_t seed,
                        const SamplerOptions& opts = {});

struct VolumeEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  std::uint64_t trials = 0;
};

/// Unbiased Monte Carlo estimate of vol_g(region) from `trials` proposal
/// draws: proposal_volume * mean(density * indicator).
VolumeEstimate estimate_volume(const Manifold& m, const FeasibleRegion& region,
                               std::uint64_t trials, std::uint64_t seed,
                               const SamplerOptions& opts = {});

/// Fraction of sample points inside the halfspace.
double empirical_mass(const Manifold& m, const HalfspaceCut& cut,
                      const SampleSet& samples);

struct MassEstimate {
  VolumeEstimate volume;
  std::vector<double> mass;         ///< per cut: vol(region ∩ H)/vol(region)
  std::vector<double> mass_stderr;  ///< delta-method stderr of the ratio
};

/// One-pass ratio estimates of halfspace masses within a region.
MassEstimate estimate_masses(const Manifold& m, const FeasibleRegion& region,
                             const std::vector<HalfspaceCut>& cuts,
                             std::uint64_t trials, std::uint64_t seed,
                             const SamplerOptions& opts = {});

/// CSV export (one row of chart coordinates per point).
void export_samples_csv(const SampleSet& samples, const std::string& path);

}  // namespace geocut
