#include "geocut/optimizer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "geocut/rng.hpp"
#include "json.hpp"

namespace geocut {

namespace {

const std::uint64_t kMinimizeLabel = stream_label("minimize");
const std::uint64_t kProbeLabel = stream_label("lipschitz-probe");

// Draw a uniform point of the geodesic ball B(center, radius): random metric
// direction, radius with the r^(dim-1) profile of the tangent ball.  Used for
// Lipschitz probing, not for volume-exact sampling.
Point random_ball_point(const Manifold& m, const Point& center, double radius,
                        RngStream& rng) {
  int d = m.dim();
  Mat f = m.metric_chol(center).transpose().triangularView<Eigen::Upper>().solve(
      Mat::Identity(d, d));
  Vec g(d);
  for (int i = 0; i < d; ++i) g[i] = rng.normal();
  double nrm = g.norm();
  if (nrm == 0.0) return center;
  double r = radius * std::pow(rng.uniform(), 1.0 / d);
  return m.exp(center, Tangent{center.coords, f * (g / nrm) * r});
}

}  // namespace

double stopping_threshold(int dim, double eps, double lipschitz) {
  if (dim < 1 || !(eps > 0.0) || !(lipschitz > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "stopping_threshold: need dim >= 1, eps > 0, L > 0");
  return std::pow(eps / lipschitz, dim) / std::pow(static_cast<double>(dim), dim);
}

std::uint64_t iteration_budget(int dim, double lipschitz, double vol, double eps) {
  if (!(vol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "iteration_budget: vol must be positive");
  double threshold = stopping_threshold(dim, eps, lipschitz);
  if (vol < threshold) return 0;
  double n = static_cast<double>(dim);
  double steps = std::log(vol / threshold) / std::log((n + 1.0) / n);
  return static_cast<std::uint64_t>(std::ceil(steps));
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::VolumeThreshold: return "volume_threshold";
    case Termination::Budget: return "budget";
    case Termination::ZeroSubgradient: return "zero_subgradient";
    case Termination::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

// Per-iteration region sampling and volume tracking for the minimize loop.
//
// Chart-linear manifolds get fresh rejection runs against the exact chart
// bounding box of the current region, which keeps acceptance healthy as the
// region shrinks.  Other manifolds keep a fixed pool of region points that is
// filtered exactly through each new cut (survivors of a uniform sample stay
// uniform on the cut region); volumes follow from the survival fraction.
class MinimizeSampler {
 public:
  MinimizeSampler(const Manifold& m, const FeasibleRegion& region,
                  const MinimizeConfig& cfg)
      : m_(m), cfg_(cfg), pooled_(m.kind() == ManifoldKind::Spd) {
    if (pooled_) {
      SamplerOptions opts;
      opts.threads = cfg.threads;
      pool_ = sample_region(m, region, cfg.pool_size, mix_seed(cfg.seed ^ kMinimizeLabel),
                            opts);
      base_volume_ = pool_.volume_from_weights();
      double n = static_cast<double>(pool_.trials);
      double var = (pool_.weight_sq_sum - pool_.weight_sum * pool_.weight_sum / n) /
                   std::max(n - 1.0, 1.0);
      base_volume_stderr_ = pool_.proposal_volume * std::sqrt(std::max(var, 0.0) / n);
      base_size_ = pool_.points.size();
    }
  }

  struct Step {
    SampleSet samples;
    double volume = 0.0;
    double volume_stderr = 0.0;
  };

  Step step(const FeasibleRegion& region, const HalfspaceCut* latest_cut,
            std::uint64_t iter) {
    if (!pooled_) return fresh(region, iter);
    if (latest_cut) {
      std::vector<Point> kept;
      kept.reserve(pool_.points.size());
      for (Point& p : pool_.points)
        if (halfspace_contains(m_, *latest_cut, p)) kept.push_back(std::move(p));
      pool_.points = std::move(kept);
      pool_.region = region;
    }
    if (pool_.points.size() < cfg_.min_pool)
      throw Error(ErrorCode::DegenerateRegion,
                  "minimize: sample pool exhausted (" +
                      std::to_string(pool_.points.size()) + " points left)");
    Step s;
    double p_surv =
        static_cast<double>(pool_.points.size()) / static_cast<double>(base_size_);
    s.volume = base_volume_ * p_surv;
    s.volume_stderr =
        base_volume_ * std::sqrt(p_surv * (1.0 - p_surv) /
                                 static_cast<double>(base_size_)) +
        base_volume_stderr_ * p_surv;
    s.samples = pool_;
    if (s.samples.points.size() > cfg_.search_samples)
      s.samples.points.resize(cfg_.search_samples);
    s.samples.seed = mix_seed(cfg_.seed ^ kMinimizeLabel ^ (iter + 1));
    return s;
  }

 private:
  Step fresh(const FeasibleRegion& region, std::uint64_t iter) {
    SamplerOptions opts;
    opts.threads = cfg_.threads;
    opts.proposal = tightened_proposal(m_, region);
    if (!opts.proposal) opts.proposal = default_proposal(m_, region);
    Step s;
    s.samples = sample_region(m_, region, cfg_.search_samples,
                              derive_stream(cfg_.seed, {kMinimizeLabel, iter, 0}).bits(),
                              opts);
    VolumeEstimate ve = estimate_volume(
        m_, region, cfg_.volume_trials,
        derive_stream(cfg_.seed, {kMinimizeLabel, iter, 1}).bits(), opts);
    s.volume = ve.value;
    s.volume_stderr = ve.stderr_value;
    return s;
  }

  const Manifold& m_;
  MinimizeConfig cfg_;
  bool pooled_;
  SampleSet pool_;
  double base_volume_ = 0.0;
  double base_volume_stderr_ = 0.0;
  std::size_t base_size_ = 0;
};

}  // namespace

OptimizerTrace minimize(const Manifold& m, const SubgradientOracle& oracle,
                        const FeasibleRegion& region, double eps,
                        const MinimizeConfig& config) {
  if (!(eps > 0.0) || !(oracle.lipschitz > 0.0))
    throw Error(ErrorCode::InvalidArgument, "minimize: eps and L must be positive");
  double threshold = stopping_threshold(m.dim(), eps, oracle.lipschitz);
  double depth_floor = 1.0 / (m.dim() + 1.0) - config.depth_flag_slack;

  OptimizerTrace trace;
  trace.final_region = region;
  FeasibleRegion current = region;
  std::uint64_t max_cuts = config.max_cuts;
  const HalfspaceCut* latest_cut = nullptr;
  HalfspaceCut last_cut_storage;

  CenterpointOptions cp;
  cp.candidates = config.centerpoint_candidates;
  cp.directions = config.directions;

  try {
    MinimizeSampler sampler(m, current, config);
    for (std::uint64_t k = 0;; ++k) {
      MinimizeSampler::Step step = sampler.step(current, latest_cut, k);
      if (k == 0 && max_cuts == 0) {
        double v0 = std::max(step.volume + 3.0 * step.volume_stderr, threshold * 1.0001);
        max_cuts = std::max<std::uint64_t>(
            1, 3 * iteration_budget(m.dim(), oracle.lipschitz, v0, eps));
      }
      if (k > 0 && step.volume + 3.0 * step.volume_stderr < threshold) {
        trace.termination = Termination::VolumeThreshold;
        break;
      }
      if (trace.cuts_used >= max_cuts) {
        trace.termination = Termination::Budget;
        break;
      }

      auto [c, depth] = find_centerpoint(m, step.samples, cp);
      TraceIterate it;
      it.point = c;
      it.f_value = oracle.eval(c);
      it.depth = depth.depth;
      it.volume = step.volume;
      it.volume_stderr = step.volume_stderr;
      it.depth_flagged = depth.depth < depth_floor;
      trace.iterates.push_back(it);

      std::optional<HalfspaceCut> cut = cut_from_subgradient(m, oracle, c);
      if (!cut) {
        trace.termination = Termination::ZeroSubgradient;
        break;
      }
      current = current.with_cut(*cut);
      ++trace.cuts_used;
      last_cut_storage = *cut;
      latest_cut = &last_cut_storage;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateRegion) throw;
    trace.termination = Termination::Degenerate;
    trace.diagnostic = e.what();
  }

  trace.final_region = current;
  if (!trace.iterates.empty()) {
    const TraceIterate* best = &trace.iterates.front();
    for (const TraceIterate& it : trace.iterates)
      if (it.f_value < best->f_value) best = &it;
    trace.best_point = best->point;
    trace.best_value = best->f_value;
  } else {
    trace.best_point = region.ambient_center;
    trace.best_value = std::numeric_limits<double>::quiet_NaN();
  }
  return trace;
}

// ---------------------------------------------------------------------------

SubgradientOracle squared_distance_oracle(const Manifold& m, const Point& p,
                                          const FeasibleRegion& domain) {
  m.require_chart(p.coords, "squared_distance_oracle");
  SubgradientOracle o;
  o.name = "squared_distance";
  o.lipschitz = 2.0 * (domain.ambient_radius + m.dist(domain.ambient_center, p));
  o.eval = [m, p](const Point& x) {
    double d = m.dist(x, p);
    return d * d;
  };
  o.subgrad = [m, p](const Point& x) {
    Tangent l = m.log(x, p);
    return Tangent{l.base, -2.0 * l.vec};
  };
  return o;
}

SubgradientOracle fermat_weber_oracle(const Manifold& m, std::vector<Point> points) {
  if (points.empty())
    throw Error(ErrorCode::InvalidArgument, "fermat_weber_oracle: no points");
  for (const Point& p : points) m.require_chart(p.coords, "fermat_weber_oracle");
  SubgradientOracle o;
  o.name = "fermat_weber";
  o.lipschitz = static_cast<double>(points.size());
  o.eval = [m, points](const Point& x) {
    double f = 0.0;
    for (const Point& p : points) f += m.dist(x, p);
    return f;
  };
  o.subgrad = [m, points](const Point& x) {
    Vec g = Vec::Zero(x.coords.size());
    for (const Point& p : points) {
      Tangent l = m.log(x, p);
      double d = m.norm(x, l);
      if (d > 1e-14) g -= l.vec / d;  // omit the term at x = p_i
    }
    return Tangent{x.coords, g};
  };
  return o;
}

SubgradientOracle max_distance_oracle(const Manifold& m, std::vector<Point> points) {
  if (points.empty())
    throw Error(ErrorCode::InvalidArgument, "max_distance_oracle: no points");
  for (const Point& p : points) m.require_chart(p.coords, "max_distance_oracle");
  SubgradientOracle o;
  o.name = "max_distance";
  o.lipschitz = 1.0;
  o.eval = [m, points](const Point& x) {
    double f = 0.0;
    for (const Point& p : points) f = std::max(f, m.dist(x, p));
    return f;
  };
  o.subgrad = [m, points](const Point& x) {
    double best = -1.0;
    const Point* arg = nullptr;
    for (const Point& p : points) {
      double d = m.dist(x, p);
      if (d > best) {
        best = d;
        arg = &p;
      }
    }
    if (best <= 1e-14) return Tangent{x.coords, Vec::Zero(x.coords.size())};
    Tangent l = m.log(x, *arg);
    return Tangent{l.base, -l.vec / best};
  };
  return o;
}

SubgradientOracle logdet_oracle(const Manifold& m, std::vector<Mat> bs,
                                const FeasibleRegion& domain,
                                std::uint64_t probe_seed) {
  if (m.kind() != ManifoldKind::Spd)
    throw Error(ErrorCode::InvalidArgument, "logdet_oracle: spd manifolds only");
  if (bs.empty())
    throw Error(ErrorCode::InvalidArgument, "logdet_oracle: no B matrices");
  int n = m.n();
  for (const Mat& b : bs)
    if (b.rows() != n || b.cols() != n)
      throw Error(ErrorCode::InvalidArgument, "logdet_oracle: B size mismatch");

  auto mix_sum = [bs, n](const Mat& x) {
    Mat s = Mat::Zero(n, n);
    for (const Mat& b : bs) s += b.transpose() * x * b;
    return Mat(0.5 * (s + s.transpose()));
  };
  auto eval = [mix_sum](const Point& xp) {
    Mat s = mix_sum(unpack_sym(xp.coords));
    Eigen::LLT<Mat> llt(s);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::ChartDomain, "logdet_oracle: S(X) not positive definite");
    double ld = 0.0;
    for (int i = 0; i < s.rows(); ++i) ld += std::log(llt.matrixL()(i, i));
    return 2.0 * ld;
  };
  auto subgrad = [mix_sum, bs, n](const Point& xp) {
    Mat x = unpack_sym(xp.coords);
    Mat s = mix_sum(x);
    Eigen::LLT<Mat> llt(s);
    Mat g_euc = Mat::Zero(n, n);
    for (const Mat& b : bs) g_euc += b * llt.solve(b.transpose());
    Mat g = x * g_euc * x;
    return Tangent{xp.coords, pack_sym(0.5 * (g + g.transpose()))};
  };

  SubgradientOracle o;
  o.name = "spd_logdet";
  o.eval = eval;
  o.subgrad = subgrad;
  // probe a Lipschitz bound over the domain ball
  RngStream rng = derive_stream(probe_seed, {kProbeLabel});
  double worst = 0.0;
  for (int i = 0; i < 256; ++i) {
    Point x = random_ball_point(m, domain.ambient_center, domain.ambient_radius, rng);
    worst = std::max(worst, m.norm(x, subgrad(x)));
  }
  o.lipschitz = 1.5 * worst;
  return o;
}

std::vector<SubgradientOracle> builtin_oracles(const Manifold& m,
                                               const FeasibleRegion& domain) {
  // deterministic instance points inside the domain ball
  RngStream rng = derive_stream(91, {stream_label("builtin-oracles")});
  auto pt = [&](double frac) {
    return random_ball_point(m, domain.ambient_center,
                             frac * domain.ambient_radius, rng);
  };
  std::vector<Point> cloud = {pt(0.5), pt(0.5), pt(0.5)};

  std::vector<SubgradientOracle> list;
  list.push_back(squared_distance_oracle(m, pt(0.4), domain));
  list.push_back(fermat_weber_oracle(m, cloud));
  list.push_back(max_distance_oracle(m, cloud));
  if (m.kind() == ManifoldKind::Spd) {
    Mat a(m.n(), m.n());
    a.setIdentity();
    if (m.n() >= 2) {
      a(0, 1) = 0.4;
      a(1, 1) = 0.9;
    }
    list.push_back(logdet_oracle(m, {Mat::Identity(m.n(), m.n()), a}, domain));
  }
  return list;
}

// ---------------------------------------------------------------------------

void export_trace_jsonl(const Manifold& m, const OptimizerTrace& trace,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "export_trace_jsonl: cannot open " + path);
  nlohmann::json head;
  head["schema"] = "geocut.trace/1";
  head["manifold"] = {{"kind", m.kind_name()}, {"n", m.n()}};
  head["termination"] = termination_name(trace.termination);
  head["cuts_used"] = trace.cuts_used;
  head["best_value"] = trace.best_value;
  if (!trace.diagnostic.empty()) head["diagnostic"] = trace.diagnostic;
  out << head.dump() << "\n";
  std::uint64_t k = 0;
  for (const TraceIterate& it : trace.iterates) {
    nlohmann::json j;
    j["iter"] = k++;
    j["f"] = it.f_value;
    j["depth"] = it.depth;
    j["volume"] = it.volume;
    j["volume_stderr"] = it.volume_stderr;
    j["depth_flagged"] = it.depth_flagged;
    nlohmann::json pt = nlohmann::json::array();
    for (int i = 0; i < it.point.coords.size(); ++i) pt.push_back(it.point.coords[i]);
    j["point"] = pt;
    out << j.dump() << "\n";
  }
  if (!out) throw Error(ErrorCode::Io, "export_trace_jsonl: write failed for " + path);
}

void export_trace_csv(const OptimizerTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "export_trace_csv: cannot open " + path);
  out << "# schema: geocut.trace_summary/1\n";
  out << "iter,f,depth,volume,volume_stderr,depth_flagged\n";
  char buf[32];
  auto put = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.write(buf, ptr - buf);
  };
  std::uint64_t k = 0;
  for (const TraceIterate& it : trace.iterates) {
    out << k++ << ',';
    put(it.f_value);
    out << ',';
    put(it.depth);
    out << ',';
    put(it.volume);
    out << ',';
    put(it.volume_stderr);
    out << ',' << (it.depth_flagged ? 1 : 0) << "\n";
  }
  if (!out) throw Error(ErrorCode::Io, "export_trace_csv: write failed for " + path);
}

}  // namespace geocut
