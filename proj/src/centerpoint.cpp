#include "geocut/centerpoint.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <vector>

#include "geocut/rng.hpp"

namespace geocut {

namespace {

const std::uint64_t kDirLabel = stream_label("centrality-directions");
const std::uint64_t kCandLabel = stream_label("centerpoint-candidates");

// Max number of angles inside an open semicircle, plus an angle whose
// semicircle attains it.  Angles must be sorted.
std::pair<std::uint64_t, double> sweep_max(const std::vector<double>& theta) {
  size_t k = theta.size();
  std::uint64_t best = 0;
  double best_angle = 0.0;
  if (k == 0) return {0, 0.0};
  // critical sweep positions: every angle and every angle shifted by -pi
  std::vector<double> crit(theta);
  crit.reserve(2 * k);
  for (double t : theta) crit.push_back(t - M_PI);
  std::sort(crit.begin(), crit.end());

  const double two_pi = 2.0 * M_PI;
  for (size_t j = 0; j < k; ++j) {
    // window (a, a + pi) with a just below theta[j] counts angles in
    // [theta[j], theta[j] + pi) (wrapping)
    double target = theta[j] + M_PI;
    size_t hi;
    if (target <= theta.back()) {
      hi = std::lower_bound(theta.begin(), theta.end(), target) - theta.begin();
    } else {
      hi = k + (std::lower_bound(theta.begin(), theta.end(), target - two_pi) -
                theta.begin());
    }
    std::uint64_t count = hi - j;
    if (count > best) {
      best = count;
      // back off half the gap to the previous critical position so the
      // reported direction lies strictly inside the optimal interval
      auto it = std::lower_bound(crit.begin(), crit.end(), theta[j]);
      double prev = (it == crit.begin()) ? crit.back() - two_pi : *(it - 1);
      double gap = theta[j] - prev;
      if (gap <= 0.0) gap = 1e-12;
      best_angle = theta[j] - 0.5 * std::min(gap, 1e-6);
    }
  }
  return {best, best_angle};
}

struct TangentCloud {
  Mat z;                 // samples mapped to T_yM, orthonormal coordinates (k x dim)
  std::uint64_t zeros;   // samples coinciding with y
  Mat frame_inv_t;       // L^-T, maps orthonormal coords back to chart basis
};

TangentCloud map_samples(const Manifold& m, const Point& y, const SampleSet& samples) {
  int d = m.dim();
  Mat l = m.metric_chol(y);
  Mat lt = l.transpose();
  TangentCloud cloud;
  cloud.frame_inv_t =
      l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(d, d));
  cloud.z.resize(static_cast<Eigen::Index>(samples.points.size()), d);
  cloud.zeros = 0;
  Eigen::Index row = 0;
  for (const Point& p : samples.points) {
    Vec w = m.log(y, p).vec;
    Vec z = lt * w;
    if (z.squaredNorm() == 0.0) {
      ++cloud.zeros;
      continue;
    }
    cloud.z.row(row++) = z.transpose();
  }
  cloud.z.conservativeResize(row, d);
  return cloud;
}

}  // namespace

DepthEstimate centrality(const Manifold& m, const Point& y, const SampleSet& samples,
                         int directions, std::uint64_t direction_seed) {
  if (samples.points.empty())
    throw Error(ErrorCode::InvalidArgument, "centrality: empty sample set");
  m.require_chart(y.coords, "centrality");
  int d = m.dim();
  double total = static_cast<double>(samples.points.size());
  TangentCloud cloud = map_samples(m, y, samples);
  Eigen::Index k = cloud.z.rows();

  DepthEstimate est;
  Vec worst_z = Vec::Zero(d);
  worst_z[0] = 1.0;
  std::uint64_t best_count = 0;

  if (k > 0 && d == 2) {
    std::vector<double> theta(static_cast<size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i)
      theta[static_cast<size_t>(i)] = std::atan2(cloud.z(i, 1), cloud.z(i, 0));
    std::sort(theta.begin(), theta.end());
    auto [count, a] = sweep_max(theta);
    best_count = count;
    // window (a, a+pi) holds the mass; it is the halfspace of direction
    // psi = a + 3*pi/2 (mass sits where <z, v> < 0)
    double psi = a + 1.5 * M_PI;
    worst_z << std::cos(psi), std::sin(psi);
  } else if (k > 0) {
    Eigen::Index n_dirs = static_cast<Eigen::Index>(std::max(directions, 0)) + k;
    RngStream rng = derive_stream(direction_seed, {kDirLabel});
    const Eigen::Index block = 64;
    Mat dirs(d, block);
    Mat prod;
    for (Eigen::Index j0 = 0; j0 < n_dirs; j0 += block) {
      Eigen::Index b = std::min(block, n_dirs - j0);
      for (Eigen::Index j = 0; j < b; ++j) {
        Vec v(d);
        if (j0 + j < directions) {
          for (int t = 0; t < d; ++t) v[t] = rng.normal();
        } else {
          v = cloud.z.row(j0 + j - directions).transpose();
        }
        double nv = v.norm();
        dirs.col(j) = nv > 0.0 ? Vec(v / nv) : Vec(Vec::Unit(d, 0));
      }
      prod.noalias() = cloud.z * dirs.leftCols(b);
      for (Eigen::Index j = 0; j < b; ++j) {
        std::uint64_t count = (prod.col(j).array() < 0.0).count();
        if (count > best_count) {
          best_count = count;
          worst_z = dirs.col(j);
        }
      }
    }
  }

  est.g_value = static_cast<double>(best_count) / total;
  est.depth = 1.0 - est.g_value;
  Vec w = cloud.frame_inv_t * worst_z;
  est.worst_direction = Tangent{y.coords, w};
  double nw = m.norm(y, est.worst_direction);
  if (nw > 0.0) est.worst_direction.vec /= nw;
  return est;
}

DepthEstimate centrality(const Manifold& m, const Point& y, const SampleSet& samples,
                         int directions) {
  return centrality(m, y, samples, directions, mix_seed(samples.seed ^ kDirLabel));
}

Point karcher_mean(const Manifold& m, const SampleSet& samples, double tol,
                   int max_iters) {
  if (samples.points.empty())
    throw Error(ErrorCode::InvalidArgument, "karcher_mean: empty sample set");
  double inv_k = 1.0 / static_cast<double>(samples.points.size());

  // chart mean is a valid chart point on all three manifolds and is a good
  // starting iterate
  Vec x0 = Vec::Zero(m.dim());
  for (const Point& p : samples.points) x0 += p.coords;
  Point x{x0 * inv_k};
  if (!m.chart_valid(x.coords)) x = samples.points.front();

  auto objective = [&](const Point& q) {
    double f = 0.0;
    for (const Point& p : samples.points) {
      double dd = m.dist(q, p);
      f += dd * dd;
    }
    return f * inv_k;
  };

  double fx = objective(x);
  for (int it = 0; it < max_iters; ++it) {
    Vec g = Vec::Zero(m.dim());
    for (const Point& p : samples.points) g += m.log(x, p).vec;
    Tangent step{x.coords, g * inv_k};
    if (m.norm(x, step) < tol) return x;
    double alpha = 1.0;
    for (int h = 0; h < 40; ++h) {
      Point trial = m.exp(x, Tangent{x.coords, alpha * step.vec});
      double ft = objective(trial);
      if (ft < fx) {
        x = trial;
        fx = ft;
        break;
      }
      alpha *= 0.5;
      if (h == 39)
        return x;  // step no longer reduces the objective: converged to rounding
    }
  }
  throw KarcherError("karcher_mean: no convergence within iteration budget", x);
}

std::pair<Point, DepthEstimate> find_centerpoint(const Manifold& m,
                                                 const SampleSet& samples,
                                                 const CenterpointOptions& opts) {
  Point km = karcher_mean(m, samples);
  int evals = 0;
  auto eval = [&](const Point& y, std::uint64_t tag) {
    ++evals;
    return centrality(m, y, samples, opts.directions,
                      mix_seed(samples.seed ^ kDirLabel) ^ tag);
  };

  Point best_pt = km;
  DepthEstimate best = eval(km, 0);
  auto consider = [&](const Point& y, const DepthEstimate& d) {
    bool better = d.depth > best.depth;
    if (!better && d.depth == best.depth) {
      // break ties toward the Karcher mean
      better = (y.coords - km.coords).norm() < (best_pt.coords - km.coords).norm();
    }
    if (better) {
      best_pt = y;
      best = d;
    }
  };

  // chart mean of the samples, then seeded sample candidates
  {
    Vec c = Vec::Zero(m.dim());
    for (const Point& p : samples.points) c += p.coords;
    Point chart_mean{c / static_cast<double>(samples.points.size())};
    if (m.chart_valid(chart_mean.coords)) consider(chart_mean, eval(chart_mean, 1));
  }
  RngStream rng = derive_stream(samples.seed, {kCandLabel});
  for (int i = 0; i < opts.candidates && evals < opts.max_evals; ++i) {
    const Point& y = samples.points[rng.below(samples.points.size())];
    consider(y, eval(y, 2 + static_cast<std::uint64_t>(i)));
  }

  // pattern search: step into the heavy halfspace (against the worst
  // direction), halving the step on failure
  Vec lo = samples.points.front().coords, hi = lo;
  for (const Point& p : samples.points) {
    lo = lo.cwiseMin(p.coords);
    hi = hi.cwiseMax(p.coords);
  }
  double step = 0.1 * (hi - lo).norm();
  int halvings = 0;
  std::uint64_t tag = 1000;
  while (halvings <= opts.max_halvings && evals < opts.max_evals && step > 0.0) {
    Tangent dir{best_pt.coords, -step * best.worst_direction.vec};
    Point trial = m.exp(best_pt, dir);
    DepthEstimate d = eval(trial, tag++);
    bool better = d.depth > best.depth ||
                  (d.depth == best.depth &&
                   (trial.coords - km.coords).norm() < (best_pt.coords - km.coords).norm());
    if (better) {
      best_pt = trial;
      best = d;
    } else {
      step *= 0.5;
      ++halvings;
    }
  }
  return {best_pt, best};
}

bool quasiconvexity_probe(const Manifold& m, const SampleSet& samples,
                          const Point& y0, const Point& y1, int k) {
  if (m.kind() == ManifoldKind::Spd)
    throw Error(ErrorCode::InvalidArgument,
                "quasiconvexity_probe: requires a chart-linear manifold");
  m.require_chart(y0.coords, "quasiconvexity_probe");
  m.require_chart(y1.coords, "quasiconvexity_probe");
  double g0 = centrality(m, y0, samples).g_value;
  double g1 = centrality(m, y1, samples).g_value;
  double gmax = std::max(g0, g1);
  double p = std::min(std::max(gmax, 1e-3), 1.0 - 1e-3);
  double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(samples.points.size()));
  for (int i = 1; i <= k; ++i) {
    double t = static_cast<double>(i) / (k + 1);
    Point yt{(1.0 - t) * y0.coords + t * y1.coords};
    double gt = centrality(m, yt, samples).g_value;
    if (gt > gmax + 3.0 * sigma) return false;
  }
  return true;
}

void export_depth_profile(const Manifold& m, const SampleSet& samples, int grid,
                          const std::string& path) {
  if (m.dim() != 2)
    throw Error(ErrorCode::InvalidArgument, "export_depth_profile: dim 2 only");
  if (grid < 2)
    throw Error(ErrorCode::InvalidArgument, "export_depth_profile: grid too small");
  Vec lo = samples.points.front().coords, hi = lo;
  for (const Point& p : samples.points) {
    lo = lo.cwiseMin(p.coords);
    hi = hi.cwiseMax(p.coords);
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "export_depth_profile: cannot open " + path);
  out << "# schema: geocut.depth_profile/1\n";
  out << "x0,x1,g_value\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.write(buf, ptr - buf);
    out << sep;
  };
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      Vec y(2);
      y << lo[0] + (hi[0] - lo[0]) * i / (grid - 1.0),
          lo[1] + (hi[1] - lo[1]) * j / (grid - 1.0);
      if (!m.chart_valid(y)) continue;
      double g = centrality(m, Point{y}, samples).g_value;
      put(y[0], ',');
      put(y[1], ',');
      put(g, '\n');
    }
  if (!out) throw Error(ErrorCode::Io, "export_depth_profile: write failed for " + path);
}

}  // namespace geocut
