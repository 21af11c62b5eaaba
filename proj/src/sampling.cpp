#include "geocut/sampling.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <functional>
#include <future>

#include "geocut/rng.hpp"

namespace geocut {

namespace {

const std::uint64_t kScanLabel = stream_label("region-scan");

double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double klein_density_bound(int n, double chart_radius) {
  double r = std::min(chart_radius, 1.0 - 1e-12);
  return std::pow(1.0 - r * r, -0.5 * (n + 1));
}

// One proposal trial: a chart point, the acceptance coin, and the
// density-times-indicator weight.  RNG consumption per trial is fixed
// (dim normals + 1 uniform for a ball; dim uniforms for a box; then the coin),
// so every consumer of a chunk sees identical draws.
struct Trial {
  Vec y;
  double coin;
  double weight;
  bool inside;
};

class TrialScanner {
 public:
  TrialScanner(const Manifold& m, const FeasibleRegion& region, const Proposal& prop)
      : m_(m), prop_(prop), eval_(m, region) {}

  template <typename Visitor>
  void scan_chunk(std::uint64_t seed, std::uint64_t chunk_index,
                  std::uint64_t count, Visitor&& visit) const {
    RngStream rng = derive_stream(seed, {kScanLabel, chunk_index});
    int d = m_.dim();
    Vec y(d);
    for (std::uint64_t i = 0; i < count; ++i) {
      if (prop_.kind == Proposal::Kind::Ball) {
        double nrm2 = 0.0;
        for (int k = 0; k < d; ++k) {
          y[k] = rng.normal();
          nrm2 += y[k] * y[k];
        }
        double r = prop_.radius * std::pow(rng.uniform(), 1.0 / d);
        y = nrm2 > 0.0 ? Vec(prop_.center + (r / std::sqrt(nrm2)) * y) : prop_.center;
      } else {
        for (int k = 0; k < d; ++k) y[k] = rng.uniform(prop_.lo[k], prop_.hi[k]);
      }
      Trial t;
      t.coin = rng.uniform();
      t.inside = eval_.contains(y);
      t.weight = t.inside ? m_.volume_density(Point{y}) : 0.0;
      t.y = y;
      visit(t);
    }
  }

 private:
  const Manifold& m_;
  const Proposal& prop_;
  RegionEvaluator eval_;
};

struct ChunkResult {
  double w = 0.0;
  double w2 = 0.0;
  std::uint64_t trials = 0;
  std::vector<Vec> accepted;
  std::vector<double> cut_w;   // per extra cut: sum of w * indicator
  std::vector<double> cut_w2;  // per extra cut: sum of (w * indicator)^2
};

// Runs chunks [first, first+n) in parallel but always combines in index order.
template <typename RunChunk, typename Combine>
void run_chunks(int threads, std::uint64_t first, std::uint64_t n,
                RunChunk&& run, Combine&& combine) {
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) combine(run(first + i));
    return;
  }
  std::vector<std::future<ChunkResult>> futs;
  futs.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i)
    futs.push_back(std::async(std::launch::async, run, first + i));
  for (auto& f : futs) combine(f.get());
}

}  // namespace

Proposal Proposal::ball(Vec center, double radius, double density_bound) {
  Proposal p;
  p.kind = Kind::Ball;
  p.center = std::move(center);
  p.radius = radius;
  p.lebesgue_volume = unit_ball_volume(static_cast<int>(p.center.size())) *
                      std::pow(radius, static_cast<int>(p.center.size()));
  p.density_bound = density_bound;
  return p;
}

Proposal Proposal::box(Vec lo, Vec hi, double density_bound) {
  Proposal p;
  p.kind = Kind::Box;
  p.lo = std::move(lo);
  p.hi = std::move(hi);
  p.lebesgue_volume = 1.0;
  for (int i = 0; i < p.lo.size(); ++i) {
    double side = p.hi[i] - p.lo[i];
    if (!(side > 0.0))
      throw Error(ErrorCode::InvalidArgument, "Proposal::box: empty side");
    p.lebesgue_volume *= side;
  }
  p.density_bound = density_bound;
  return p;
}

Proposal default_proposal(const Manifold& m, const FeasibleRegion& region) {
  const Vec& c = region.ambient_center.coords;
  double r = region.ambient_radius;
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      return Proposal::ball(c, r, 1.0);
    case ManifoldKind::KleinHyperbolic: {
      double reach = std::atanh(std::min(c.norm(), 1.0 - 1e-12)) + r;
      double bound = klein_density_bound(m.n(), std::tanh(reach));
      if (c.norm() < 1e-15) return Proposal::ball(c, std::tanh(r), bound);
      auto [lo, hi] = quadric_bbox(ambient_chart_quadric(m, region));
      return Proposal::box(lo, hi, bound);
    }
    case ManifoldKind::Spd: {
      Mat cm = unpack_sym(c);
      Eigen::SelfAdjointEigenSolver<Mat> es(cm);
      double lmin = es.eigenvalues().minCoeff();
      double lmax = es.eigenvalues().maxCoeff();
      int n = m.n();
      double top = lmax * std::exp(r);
      Vec lo(m.dim()), hi(m.dim());
      for (int i = 0; i < n; ++i) {
        lo[i] = lmin * std::exp(-r);
        hi[i] = top;
      }
      for (int i = n; i < m.dim(); ++i) {
        lo[i] = -top;
        hi[i] = top;
      }
      // on the ball, det X >= det C * exp(-sqrt(n) r)
      double det_min = cm.determinant() * std::exp(-std::sqrt(double(n)) * r);
      double bound =
          std::pow(2.0, 0.25 * n * (n - 1)) * std::pow(det_min, -0.5 * (n + 1));
      return Proposal::box(lo, hi, bound);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "default_proposal: unknown kind");
}

std::optional<Proposal> tightened_proposal(const Manifold& m,
                                           const FeasibleRegion& region) {
  auto bbox = region_chart_bbox(m, region);
  if (!bbox) return std::nullopt;
  auto [lo, hi] = *bbox;
  double bound = 1.0;
  if (m.kind() == ManifoldKind::KleinHyperbolic) {
    double corner2 = 0.0;
    for (int i = 0; i < lo.size(); ++i)
      corner2 += std::max(lo[i] * lo[i], hi[i] * hi[i]);
    double reach = std::tanh(std::atanh(std::min(
                       region.ambient_center.coords.norm(), 1.0 - 1e-12)) +
                   region.ambient_radius);
    bound = klein_density_bound(m.n(), std::min(std::sqrt(corner2), reach));
  }
  return Proposal::box(lo, hi, bound);
}

SampleSet sample_region(const Manifold& m, const FeasibleRegion& region,
                        std::uint64_t count, std::uint64_t seed,
                        const SamplerOptions& opts) {
  if (count < 1)
    throw Error(ErrorCode::InvalidArgument, "sample_region: count must be >= 1");
  Proposal prop = opts.proposal ? *opts.proposal : default_proposal(m, region);
  TrialScanner scanner(m, region, prop);

  SampleSet out;
  out.region = region;
  out.seed = seed;
  out.proposal_volume = prop.lebesgue_volume;

  std::uint64_t accepted_total = 0;
  std::uint64_t next_chunk = 0;
  auto run = [&](std::uint64_t idx) {
    ChunkResult r;
    r.trials = opts.chunk;
    scanner.scan_chunk(seed, idx, opts.chunk, [&](const Trial& t) {
      r.w += t.weight;
      r.w2 += t.weight * t.weight;
      if (t.inside && t.coin * prop.density_bound < t.weight)
        r.accepted.push_back(t.y);
    });
    return r;
  };

  while (accepted_total < count) {
    std::uint64_t round = std::max<std::uint64_t>(1, opts.threads);
    run_chunks(opts.threads, next_chunk, round, run, [&](const ChunkResult& r) {
      // everything after the chunk that reaches the target is discarded, so
      // the recorded statistics do not depend on the round size
      if (accepted_total >= count) return;
      out.trials += r.trials;
      out.weight_sum += r.w;
      out.weight_sq_sum += r.w2;
      for (const Vec& y : r.accepted) {
        if (out.points.size() < count) out.points.push_back(Point{y});
      }
      accepted_total += r.accepted.size();
    });
    next_chunk += round;
    double rate = static_cast<double>(accepted_total) / static_cast<double>(out.trials);
    if (accepted_total < count &&
        ((out.trials >= 4000000 && rate < 1e-6) || out.trials >= opts.max_trials))
      throw Error(ErrorCode::DegenerateRegion,
                  "sample_region: acceptance rate " + std::to_string(rate) +
                      " after " + std::to_string(out.trials) + " trials");
  }
  if (out.points.size() > count) out.points.resize(count);
  out.acceptance_rate =
      static_cast<double>(accepted_total) / static_cast<double>(out.trials);
  return out;
}

VolumeEstimate estimate_volume(const Manifold& m, const FeasibleRegion& region,
                               std::uint64_t trials, std::uint64_t seed,
                               const SamplerOptions& opts) {
  if (trials < 1)
    throw Error(ErrorCode::InvalidArgument, "estimate_volume: trials must be >= 1");
  Proposal prop = opts.proposal ? *opts.proposal : default_proposal(m, region);
  TrialScanner scanner(m, region, prop);

  double w_sum = 0.0, w2_sum = 0.0;
  std::uint64_t n_chunks = (trials + opts.chunk - 1) / opts.chunk;
  auto run = [&](std::uint64_t idx) {
    ChunkResult r;
    std::uint64_t begin = idx * opts.chunk;
    r.trials = std::min<std::uint64_t>(opts.chunk, trials - begin);
    scanner.scan_chunk(seed, idx, r.trials, [&](const Trial& t) {
      r.w += t.weight;
      r.w2 += t.weight * t.weight;
    });
    return r;
  };
  std::uint64_t done = 0;
  while (done < n_chunks) {
    std::uint64_t round =
        std::min<std::uint64_t>(n_chunks - done, std::max<std::uint64_t>(1, opts.threads));
    run_chunks(opts.threads, done, round, run, [&](const ChunkResult& r) {
      w_sum += r.w;
      w2_sum += r.w2;
    });
    done += round;
  }

  VolumeEstimate est;
  est.trials = trials;
  double n = static_cast<double>(trials);
  est.value = prop.lebesgue_volume * w_sum / n;
  if (trials > 1) {
    double var = (w2_sum - w_sum * w_sum / n) / (n - 1.0);
    est.stderr_value = prop.lebesgue_volume * std::sqrt(std::max(var, 0.0) / n);
  }
  return est;
}

double empirical_mass(const Manifold& m, const HalfspaceCut& cut,
                      const SampleSet& samples) {
  if (samples.points.empty())
    throw Error(ErrorCode::InvalidArgument, "empirical_mass: empty sample set");
  std::uint64_t inside = 0;
  for (const Point& p : samples.points)
    if (halfspace_contains(m, cut, p)) ++inside;
  return static_cast<double>(inside) / static_cast<double>(samples.points.size());
}

MassEstimate estimate_masses(const Manifold& m, const FeasibleRegion& region,
                             const std::vector<HalfspaceCut>& cuts,
                             std::uint64_t trials, std::uint64_t seed,
                             const SamplerOptions& opts) {
  if (trials < 1)
    throw Error(ErrorCode::InvalidArgument, "estimate_masses: trials must be >= 1");
  Proposal prop = opts.proposal ? *opts.proposal : default_proposal(m, region);
  TrialScanner scanner(m, region, prop);

  // halfspace membership tests, chart-algebraic where possible
  std::vector<std::function<bool(const Vec&)>> in_half;
  for (const HalfspaceCut& cut : cuts) {
    if (m.kind() != ManifoldKind::Spd) {
      ChartHalfplane hp = chart_halfplane(m, cut);
      in_half.push_back([hp](const Vec& y) { return hp.normal.dot(y) < hp.offset; });
    } else {
      in_half.push_back([&m, cut](const Vec& y) {
        return halfspace_contains(m, cut, Point{y});
      });
    }
  }

  size_t k = cuts.size();
  double w_sum = 0.0, w2_sum = 0.0;
  std::vector<double> a_sum(k, 0.0), a2_sum(k, 0.0);
  std::uint64_t n_chunks = (trials + opts.chunk - 1) / opts.chunk;
  auto run = [&](std::uint64_t idx) {
    ChunkResult r;
    r.cut_w.assign(k, 0.0);
    r.cut_w2.assign(k, 0.0);
    std::uint64_t begin = idx * opts.chunk;
    r.trials = std::min<std::uint64_t>(opts.chunk, trials - begin);
    scanner.scan_chunk(seed, idx, r.trials, [&](const Trial& t) {
      r.w += t.weight;
      r.w2 += t.weight * t.weight;
      if (!t.inside) return;
      for (size_t j = 0; j < k; ++j)
        if (in_half[j](t.y)) {
          r.cut_w[j] += t.weight;
          r.cut_w2[j] += t.weight * t.weight;
        }
    });
    return r;
  };
  std::uint64_t done = 0;
  while (done < n_chunks) {
    std::uint64_t round =
        std::min<std::uint64_t>(n_chunks - done, std::max<std::uint64_t>(1, opts.threads));
    run_chunks(opts.threads, done, round, run, [&](const ChunkResult& r) {
      w_sum += r.w;
      w2_sum += r.w2;
      for (size_t j = 0; j < k; ++j) {
        a_sum[j] += r.cut_w[j];
        a2_sum[j] += r.cut_w2[j];
      }
    });
    done += round;
  }

  MassEstimate est;
  est.volume.trials = trials;
  double n = static_cast<double>(trials);
  est.volume.value = prop.lebesgue_volume * w_sum / n;
  if (trials > 1) {
    double var = (w2_sum - w_sum * w_sum / n) / (n - 1.0);
    est.volume.stderr_value = prop.lebesgue_volume * std::sqrt(std::max(var, 0.0) / n);
  }
  est.mass.assign(k, std::numeric_limits<double>::quiet_NaN());
  est.mass_stderr.assign(k, std::numeric_limits<double>::quiet_NaN());
  if (w_sum > 0.0) {
    double b_bar = w_sum / n;
    double s_bb = (w2_sum / n - b_bar * b_bar);
    for (size_t j = 0; j < k; ++j) {
      double a_bar = a_sum[j] / n;
      double ratio = a_bar / b_bar;
      // delta method for the ratio of correlated means; note a*b = a^2 here
      // because the numerator indicator implies the denominator indicator.
      double s_aa = (a2_sum[j] / n - a_bar * a_bar);
      double s_ab = (a2_sum[j] / n - a_bar * b_bar);
      double var =
          (s_aa - 2.0 * ratio * s_ab + ratio * ratio * s_bb) / (n * b_bar * b_bar);
      est.mass[j] = ratio;
      est.mass_stderr[j] = std::sqrt(std::max(var, 0.0));
    }
  }
  return est;
}

void export_samples_csv(const SampleSet& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "export_samples_csv: cannot open " + path);
  out << "# schema: geocut.samples/1\n";
  int d = samples.points.empty() ? 0 : static_cast<int>(samples.points[0].coords.size());
  for (int i = 0; i < d; ++i) out << (i ? "," : "") << "x" << i;
  out << "\n";
  char buf[32];
  for (const Point& p : samples.points) {
    for (int i = 0; i < d; ++i) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), p.coords[i]);
      (void)ec;
      if (i) out << ',';
      out.write(buf, ptr - buf);
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::Io, "export_samples_csv: write failed for " + path);
}

}  // namespace geocut
