#include "geocut/cuts.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace geocut {

namespace {

bool chart_linear_kind(const Manifold& m) {
  return m.kind() == ManifoldKind::Euclidean ||
         m.kind() == ManifoldKind::KleinHyperbolic;
}

void require_chart_linear(const Manifold& m, const char* who) {
  if (!chart_linear_kind(m))
    throw Error(ErrorCode::InvalidArgument,
                std::string(who) + ": only meaningful for chart-linear manifolds "
                                   "(euclidean, klein)");
}

}  // namespace

HalfspaceCut make_cut(const Manifold& m, const Point& base, const Tangent& normal) {
  m.require_chart(base.coords, "make_cut");
  return HalfspaceCut{base, m.unit(base, normal)};
}

FeasibleRegion make_region(const Manifold& m, const Point& center, double radius) {
  m.require_chart(center.coords, "make_region");
  if (!(radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "make_region: radius must be positive");
  return FeasibleRegion{center, radius, {}};
}

bool halfspace_contains(const Manifold& m, const HalfspaceCut& cut, const Point& y) {
  m.require_chart(y.coords, "halfspace_contains");
  Tangent w = m.log(cut.base, y);
  return m.inner(cut.base, w, cut.normal) < 0.0;
}

bool region_contains(const Manifold& m, const FeasibleRegion& region, const Point& y) {
  m.require_chart(y.coords, "region_contains");
  if (!(m.dist(region.ambient_center, y) < region.ambient_radius)) return false;
  for (const HalfspaceCut& cut : region.cuts)
    if (!halfspace_contains(m, cut, y)) return false;
  return true;
}

std::optional<HalfspaceCut> cut_from_subgradient(const Manifold& m,
                                                 const SubgradientOracle& oracle,
                                                 const Point& x) {
  Tangent w = oracle.subgrad(x);
  double nw = m.norm(x, w);
  if (nw <= 1e-12 * std::max(1.0, oracle.lipschitz)) return std::nullopt;
  return HalfspaceCut{x, Tangent{w.base, w.vec / nw}};
}

HalfspaceCut separate(const Manifold& m, const Point& ball_center,
                      double ball_radius, const Point& p) {
  if (!(ball_radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "separate: radius must be positive");
  if (!(m.dist(ball_center, p) > ball_radius))
    throw Error(ErrorCode::InvalidArgument,
                "separate: point is not strictly outside the ball");
  // Unit tangent at p toward the ball center; every ball point y then has
  // <log_p(y), v> >= 0 by CAT(0) angle comparison, so H_p(v) misses the ball.
  Tangent v = m.unit(p, m.log(p, ball_center));
  return HalfspaceCut{p, v};
}

ChartHalfplane chart_halfplane(const Manifold& m, const HalfspaceCut& cut) {
  require_chart_linear(m, "chart_halfplane");
  // <log_x(y), v>_x has the sign of (y - x)^T G(x) v because the chart image
  // of the geodesic from x to y is the straight segment.
  Vec n = m.metric_gram(cut.base) * cut.normal.vec;
  return ChartHalfplane{n, n.dot(cut.base.coords)};
}

ChartQuadric ambient_chart_quadric(const Manifold& m, const FeasibleRegion& region) {
  require_chart_linear(m, "ambient_chart_quadric");
  int d = m.dim();
  const Vec& c = region.ambient_center.coords;
  double r = region.ambient_radius;
  if (m.kind() == ManifoldKind::Euclidean) {
    return ChartQuadric{Mat::Identity(d, d), -c, c.squaredNorm() - r * r};
  }
  // klein: cosh d(c,y) <= cosh r  <=>  (1 - c.y)^2 <= cosh^2(r)(1-|c|^2)(1-|y|^2)
  double k = std::cosh(r);
  k = k * k * (1.0 - c.squaredNorm());
  Mat a = c * c.transpose() + k * Mat::Identity(d, d);
  return ChartQuadric{a, -c, 1.0 - k};
}

std::pair<Vec, Vec> quadric_bbox(const ChartQuadric& q) {
  Eigen::LLT<Mat> llt(q.a);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidArgument, "quadric_bbox: quadric is not an ellipsoid");
  Vec center = -llt.solve(q.b);
  double radius2 = center.dot(q.a * center) - q.c;
  if (radius2 < 0.0)
    throw Error(ErrorCode::DegenerateRegion, "quadric_bbox: empty ellipsoid");
  Mat ainv = llt.solve(Mat::Identity(q.a.rows(), q.a.cols()));
  int d = static_cast<int>(q.b.size());
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    double w = std::sqrt(std::max(radius2 * ainv(i, i), 0.0));
    lo[i] = center[i] - w;
    hi[i] = center[i] + w;
  }
  return {lo, hi};
}

std::optional<std::pair<Vec, Vec>> region_chart_bbox(const Manifold& m,
                                                     const FeasibleRegion& region) {
  if (!chart_linear_kind(m) || m.dim() != 2) return std::nullopt;
  ChartQuadric q = ambient_chart_quadric(m, region);
  std::vector<ChartHalfplane> planes;
  planes.reserve(region.cuts.size());
  for (const HalfspaceCut& cut : region.cuts)
    planes.push_back(chart_halfplane(m, cut));

  std::vector<Vec> cand;
  auto admit = [&](const Vec& y) {
    double scale = 1.0 + y.norm();
    if (q.eval(y) > 1e-9 * scale) return;
    for (const ChartHalfplane& p : planes)
      if (p.normal.dot(y) > p.offset + 1e-9 * scale * p.normal.norm()) return;
    cand.push_back(y);
  };

  // ellipse extrema in each coordinate direction
  Eigen::LLT<Mat> llt(q.a);
  Vec yc = -llt.solve(q.b);
  double r2 = yc.dot(q.a * yc) - q.c;
  if (r2 > 0.0) {
    Mat ainv = llt.solve(Mat::Identity(2, 2));
    for (int i = 0; i < 2; ++i) {
      Vec e = Vec::Zero(2);
      e[i] = 1.0;
      double denom = e.dot(ainv * e);
      if (denom <= 0.0) continue;
      Vec step = std::sqrt(r2 / denom) * (ainv * e);
      admit(yc + step);
      admit(yc - step);
    }
  }
  // ellipse / line intersections
  for (const ChartHalfplane& p : planes) {
    double nn = p.normal.squaredNorm();
    if (nn <= 0.0) continue;
    Vec p0 = (p.offset / nn) * p.normal;
    Vec t(2);
    t << -p.normal[1], p.normal[0];
    double a2 = t.dot(q.a * t);
    double a1 = t.dot(q.a * p0 + q.b);
    double a0 = q.eval(p0);
    double disc = a1 * a1 - a2 * a0;
    if (a2 <= 0.0 || disc < 0.0) continue;
    double s = std::sqrt(disc);
    admit(p0 + ((-a1 + s) / a2) * t);
    admit(p0 + ((-a1 - s) / a2) * t);
  }
  // line / line intersections
  for (size_t i = 0; i < planes.size(); ++i)
    for (size_t j = i + 1; j < planes.size(); ++j) {
      Mat a(2, 2);
      a.row(0) = planes[i].normal.transpose();
      a.row(1) = planes[j].normal.transpose();
      double det = a.determinant();
      double scale = planes[i].normal.norm() * planes[j].normal.norm();
      if (std::abs(det) < 1e-14 * scale) continue;
      Vec rhs(2);
      rhs << planes[i].offset, planes[j].offset;
      admit(a.partialPivLu().solve(rhs));
    }

  if (cand.empty()) return std::nullopt;
  Vec lo = cand.front(), hi = cand.front();
  for (const Vec& y : cand) {
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  // inflate slightly so roundoff cannot clip the region
  for (int i = 0; i < 2; ++i) {
    double pad = std::max(1e-12, 1e-9 * (hi[i] - lo[i]));
    lo[i] -= pad;
    hi[i] += pad;
  }
  return std::make_pair(lo, hi);
}

RegionEvaluator::RegionEvaluator(const Manifold& m, const FeasibleRegion& region)
    : m_(&m), region_(&region), chart_linear_(chart_linear_kind(m)) {
  if (chart_linear_) {
    ball_ = ambient_chart_quadric(m, region);
    planes_.reserve(region.cuts.size());
    for (const HalfspaceCut& cut : region.cuts)
      planes_.push_back(chart_halfplane(m, cut));
  }
}

bool RegionEvaluator::contains(const Vec& y) const {
  if (!chart_linear_) {
    if (!m_->chart_valid(y)) return false;
    return region_contains(*m_, *region_, Point{y});
  }
  if (m_->kind() == ManifoldKind::KleinHyperbolic && y.squaredNorm() >= 1.0 - 1e-12)
    return false;
  if (!(ball_.eval(y) < 0.0)) return false;
  for (const ChartHalfplane& p : planes_)
    if (!(p.normal.dot(y) < p.offset)) return false;
  return true;
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kRegionSchema = "geocut.region/1";

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const nlohmann::json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

std::string region_to_json(const Manifold& m, const FeasibleRegion& region) {
  nlohmann::json j;
  j["schema"] = kRegionSchema;
  j["manifold"] = {{"kind", m.kind_name()}, {"n", m.n()}};
  j["center"] = vec_to_json(region.ambient_center.coords);
  j["radius"] = region.ambient_radius;
  j["cuts"] = nlohmann::json::array();
  for (const HalfspaceCut& cut : region.cuts)
    j["cuts"].push_back({{"base", vec_to_json(cut.base.coords)},
                         {"normal", vec_to_json(cut.normal.vec)}});
  return j.dump(2);
}

std::pair<Manifold, FeasibleRegion> region_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Io, std::string("region_from_json: ") + e.what());
  }
  if (j.value("schema", "") != kRegionSchema)
    throw Error(ErrorCode::Io, "region_from_json: unknown schema " +
                                   j.value("schema", std::string("<missing>")));
  std::string kind = j["manifold"]["kind"].get<std::string>();
  int n = j["manifold"]["n"].get<int>();
  Manifold m = kind == "euclidean" ? Manifold::euclidean(n)
               : kind == "klein"   ? Manifold::klein(n)
               : kind == "spd"     ? Manifold::spd(n)
                                   : throw Error(ErrorCode::Io,
                                                 "region_from_json: bad kind " + kind);
  FeasibleRegion r = make_region(m, Point{vec_from_json(j["center"])},
                                 j["radius"].get<double>());
  for (const auto& cj : j["cuts"]) {
    Point base{vec_from_json(cj["base"])};
    r.cuts.push_back(make_cut(m, base, Tangent{base.coords, vec_from_json(cj["normal"])}));
  }
  return {m, r};
}

void save_region(const Manifold& m, const FeasibleRegion& region,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "save_region: cannot open " + path);
  out << region_to_json(m, region) << "\n";
  if (!out) throw Error(ErrorCode::Io, "save_region: write failed for " + path);
}

std::pair<Manifold, FeasibleRegion> load_region(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "load_region: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return region_from_json(text);
}

}  // namespace geocut
