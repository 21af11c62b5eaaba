#include "geocut/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "geocut/centerpoint.hpp"
#include "geocut/rng.hpp"

namespace geocut {

namespace {

const std::uint64_t kSharpLabel = stream_label("sharpness");
const std::uint64_t kGrunbaumLabel = stream_label("grunbaum");
const std::uint64_t kConvLabel = stream_label("convergence");

void put_double(std::ofstream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.write(buf, ptr - buf);
}

}  // namespace

std::vector<Vec> regular_simplex_directions(int n) {
  if (n < 1)
    throw Error(ErrorCode::InvalidArgument, "regular_simplex_directions: n >= 1");
  // vertices of the standard simplex in R^(n+1), centered, expressed in the
  // Helmert orthonormal basis of the hyperplane orthogonal to (1,...,1)
  Mat h(n, n + 1);
  for (int k = 1; k <= n; ++k) {
    double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int j = 0; j < k; ++j) h(k - 1, j) = s;
    h(k - 1, k) = -s * k;
    for (int j = k + 1; j <= n; ++j) h(k - 1, j) = 0.0;
  }
  std::vector<Vec> dirs;
  dirs.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    Vec e = Vec::Zero(n + 1);
    e[i] = 1.0;
    Vec centered = e - Vec::Constant(n + 1, 1.0 / (n + 1));
    Vec d = h * centered;
    dirs.push_back(d / d.norm());
  }
  return dirs;
}

FeasibleRegion build_truncated_simplex(const Manifold& m, double delta, double eps) {
  if (m.kind() != ManifoldKind::KleinHyperbolic)
    throw Error(ErrorCode::InvalidArgument, "build_truncated_simplex: klein only");
  int n = m.n();
  if (!(delta >= 0.0) || !((1.0 + delta) / n < 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "build_truncated_simplex: invalid delta (chart ball inscribed in the simplex)");
  if (!(eps > 0.0 && eps < 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "build_truncated_simplex: eps must be in (0, 1)");
  double chart_radius = 1.0 - eps;
  FeasibleRegion region =
      make_region(m, Point{Vec::Zero(n)}, std::atanh(chart_radius));
  double facet_dist = (1.0 + delta) / n;  // chart inradius of the simplex
  for (const Vec& u : regular_simplex_directions(n)) {
    Point base{-facet_dist * u};
    // tangent normal whose chart halfplane is { y . (-u) < facet_dist }
    Vec chart_normal = -u;
    Vec v = m.metric_gram(base).ldlt().solve(chart_normal);
    region.cuts.push_back(make_cut(m, base, Tangent{base.coords, v}));
  }
  return region;
}

std::vector<HalfspaceCut> vertex_halfspaces(const Manifold& m) {
  if (m.kind() != ManifoldKind::KleinHyperbolic)
    throw Error(ErrorCode::InvalidArgument, "vertex_halfspaces: klein only");
  int n = m.n();
  std::vector<HalfspaceCut> cuts;
  Point origin{Vec::Zero(n)};
  for (const Vec& u : regular_simplex_directions(n)) {
    // halfspace { y . u > 0 }: the metric at the origin is the identity
    cuts.push_back(make_cut(m, origin, Tangent{origin.coords, -u}));
  }
  return cuts;
}

std::vector<SharpnessRow> sharpness_run(const SharpnessConfig& cfg) {
  if (!(cfg.delta > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sharpness_run: delta must be positive");
  if (cfg.eps_list.empty() || cfg.trials < 1)
    throw Error(ErrorCode::InvalidArgument, "sharpness_run: empty eps list or trials");
  Manifold m = Manifold::klein(cfg.n);
  std::vector<double> eps_sorted = cfg.eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<double>());
  std::vector<HalfspaceCut> vh = vertex_halfspaces(m);

  std::vector<SharpnessRow> rows;
  rows.reserve(eps_sorted.size());
  for (std::size_t i = 0; i < eps_sorted.size(); ++i) {
    FeasibleRegion region = build_truncated_simplex(m, cfg.delta, eps_sorted[i]);
    SamplerOptions opts;
    opts.threads = cfg.threads;
    MassEstimate est = estimate_masses(m, region, vh, cfg.trials,
                                       mix_seed(cfg.seed ^ kSharpLabel ^ i), opts);
    SharpnessRow row;
    row.eps = eps_sorted[i];
    row.volume = est.volume.value;
    row.volume_stderr = est.volume.stderr_value;
    row.vertex_mass = est.mass;
    row.vertex_mass_stderr = est.mass_stderr;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sharpness_csv(const std::vector<SharpnessRow>& rows,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "write_sharpness_csv: cannot open " + path);
  out << "# schema: geocut.sharpness/1\n";
  std::size_t k = rows.empty() ? 0 : rows.front().vertex_mass.size();
  out << "eps,volume,volume_stderr";
  for (std::size_t j = 0; j < k; ++j)
    out << ",mass_vertex_" << j << ",mass_stderr_" << j;
  out << "\n";
  for (const SharpnessRow& r : rows) {
    put_double(out, r.eps);
    out << ',';
    put_double(out, r.volume);
    out << ',';
    put_double(out, r.volume_stderr);
    for (std::size_t j = 0; j < k; ++j) {
      out << ',';
      put_double(out, r.vertex_mass[j]);
      out << ',';
      put_double(out, r.vertex_mass_stderr[j]);
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::Io, "write_sharpness_csv: write failed for " + path);
}

// ---------------------------------------------------------------------------

FeasibleRegion planar_shape_region(const Manifold& m, GrunbaumShape shape) {
  if (m.kind() != ManifoldKind::Euclidean || m.dim() != 2)
    throw Error(ErrorCode::InvalidArgument, "planar_shape_region: euclidean dim 2 only");
  Vec c(2);
  c << 0.5, 0.5;
  FeasibleRegion region = make_region(m, Point{c}, std::sqrt(0.5) * 1.0000001);
  auto add = [&](double bx, double by, double vx, double vy) {
    Vec b(2), v(2);
    b << bx, by;
    v << vx, vy;
    region.cuts.push_back(make_cut(m, Point{b}, Tangent{b, v}));
  };
  add(0.0, 0.5, -1.0, 0.0);  // x > 0
  add(0.5, 0.0, 0.0, -1.0);  // y > 0
  if (shape == GrunbaumShape::Triangle) {
    add(0.5, 0.5, 1.0, 1.0);  // x + y < 1
  } else {
    add(1.0, 0.5, 1.0, 0.0);  // x < 1
    add(0.5, 1.0, 0.0, 1.0);  // y < 1
  }
  return region;
}

Point planar_shape_centroid(GrunbaumShape shape) {
  Vec c(2);
  if (shape == GrunbaumShape::Triangle)
    c << 1.0 / 3.0, 1.0 / 3.0;
  else
    c << 0.5, 0.5;
  return Point{c};
}

GrunbaumResult euclidean_grunbaum_check(GrunbaumShape shape, std::uint64_t samples,
                                        std::uint64_t seed) {
  Manifold m = Manifold::euclidean(2);
  FeasibleRegion region = planar_shape_region(m, shape);
  SampleSet set = sample_region(m, region, samples, mix_seed(seed ^ kGrunbaumLabel));
  auto [pt, depth] = find_centerpoint(m, set);
  GrunbaumResult res;
  res.found_point = pt;
  res.found_depth = depth.depth;
  res.centroid_depth = centrality(m, planar_shape_centroid(shape), set).depth;
  return res;
}

// ---------------------------------------------------------------------------

double hyperbolic_disk_area(double r) { return 2.0 * M_PI * (std::cosh(r) - 1.0); }

std::vector<std::string> problem_labels() {
  return {"euclidean_quadratic", "klein_fermat_weber", "spd_logdet"};
}

Problem make_problem(const std::string& label) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (label == "euclidean_quadratic") {
    Manifold m = Manifold::euclidean(2);
    FeasibleRegion region = make_region(m, Point{Vec::Zero(2)}, 1.0);
    Vec p(2);
    p << 0.3, 0.2;
    return Problem{m, squared_distance_oracle(m, Point{p}, region), region, 0.0, label};
  }
  if (label == "klein_fermat_weber") {
    Manifold m = Manifold::klein(2);
    FeasibleRegion region = make_region(m, Point{Vec::Zero(2)}, 1.0);
    std::vector<Point> pts;
    double chart_r = 0.4;
    for (int i = 0; i < 3; ++i) {
      double a = M_PI / 2.0 + i * 2.0 * M_PI / 3.0;
      Vec p(2);
      p << chart_r * std::cos(a), chart_r * std::sin(a);
      pts.push_back(Point{p});
    }
    // symmetric anchors: the minimizer is the origin, f* = 3 arctanh(0.4)
    return Problem{m, fermat_weber_oracle(m, pts), region, 3.0 * std::atanh(chart_r),
                   label};
  }
  if (label == "spd_logdet") {
    Manifold m = Manifold::spd(2);
    FeasibleRegion region =
        make_region(m, Point{pack_sym(Mat::Identity(2, 2))}, 0.75);
    Mat a(2, 2);
    a << 1.0, 0.4, 0.0, 0.9;
    return Problem{m, logdet_oracle(m, {Mat::Identity(2, 2), a}, region), region, nan,
                   label};
  }
  throw Error(ErrorCode::InvalidArgument, "make_problem: unknown label " + label);
}

double reference_descent(const Manifold& m, const SubgradientOracle& oracle,
                         const FeasibleRegion& region, int iters) {
  // stay strictly inside the ball so chart validity is never marginal
  double radius = region.ambient_radius * (1.0 - 1e-9);
  Point x = region.ambient_center;
  double fx = oracle.eval(x);
  double alpha0 = region.ambient_radius / std::max(oracle.lipschitz, 1e-9);
  for (int it = 0; it < iters; ++it) {
    Tangent g = oracle.subgrad(x);
    double ng = m.norm(x, g);
    if (ng < 1e-13) break;
    double alpha = alpha0;
    bool accepted = false;
    while (alpha * ng > 1e-15) {
      Point y = m.exp(x, Tangent{x.coords, -alpha * g.vec});
      double d = m.dist(region.ambient_center, y);
      if (d > radius) {
        Tangent back = m.log(region.ambient_center, y);
        y = m.exp(region.ambient_center,
                  Tangent{region.ambient_center.coords, (radius / d) * back.vec});
      }
      double fy = oracle.eval(y);
      if (fy < fx - 1e-14) {
        x = y;
        fx = fy;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  return fx;
}

ConvergenceResult convergence_run(const std::string& problem_label,
                                  const std::vector<double>& eps_list,
                                  std::uint64_t seed, int threads) {
  if (eps_list.empty())
    throw Error(ErrorCode::InvalidArgument, "convergence_run: empty eps list");
  Problem prob = make_problem(problem_label);
  const Manifold& m = prob.manifold;

  double f_ref = prob.f_reference;
  if (std::isnan(f_ref)) f_ref = reference_descent(m, prob.oracle, prob.region);

  // known initial volumes for the budget column; measured for spd
  double vol0;
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      vol0 = M_PI * prob.region.ambient_radius * prob.region.ambient_radius;
      break;
    case ManifoldKind::KleinHyperbolic:
      vol0 = hyperbolic_disk_area(prob.region.ambient_radius);
      break;
    default: {
      SamplerOptions opts;
      opts.threads = threads;
      vol0 = estimate_volume(m, prob.region, 200000, mix_seed(seed ^ kConvLabel), opts)
                 .value;
    }
  }

  ConvergenceResult result;
  result.problem = problem_label;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    MinimizeConfig cfg;
    cfg.seed = mix_seed(seed ^ kConvLabel ^ (i + 1));
    cfg.threads = threads;
    if (m.kind() == ManifoldKind::Spd) {
      cfg.search_samples = 2048;
      cfg.max_cuts = 22;  // bounded by what the rejection pool supports
    }
    OptimizerTrace trace = minimize(m, prob.oracle, prob.region, eps_list[i], cfg);
    ConvergenceRow row;
    row.eps = eps_list[i];
    row.cuts_used = trace.cuts_used;
    row.best_value = trace.best_value;
    row.f_reference = f_ref;
    row.suboptimality = trace.best_value - f_ref;
    row.budget = iteration_budget(m.dim(), prob.oracle.lipschitz, vol0, eps_list[i]);
    row.termination = termination_name(trace.termination);
    result.rows.push_back(std::move(row));
  }

  // least-squares slope of cuts_used against log(1/eps)
  if (result.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(result.rows.size());
    for (const ConvergenceRow& r : result.rows) {
      double x = std::log(1.0 / r.eps);
      double y = static_cast<double>(r.cuts_used);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    result.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom
                                : std::numeric_limits<double>::quiet_NaN();
  } else {
    result.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

void write_convergence_csv(const ConvergenceResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "write_convergence_csv: cannot open " + path);
  out << "# schema: geocut.convergence/1\n";
  out << "problem,eps,cuts_used,best_value,f_reference,suboptimality,budget,termination\n";
  for (const ConvergenceRow& r : result.rows) {
    out << result.problem << ',';
    put_double(out, r.eps);
    out << ',' << r.cuts_used << ',';
    put_double(out, r.best_value);
    out << ',';
    put_double(out, r.f_reference);
    out << ',';
    put_double(out, r.suboptimality);
    out << ',' << r.budget << ',' << r.termination << "\n";
  }
  if (!out)
    throw Error(ErrorCode::Io, "write_convergence_csv: write failed for " + path);
}

}  // namespace geocut
