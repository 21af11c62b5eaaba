#include "geocut.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <filesystem>
#include <string>

#include "geocut/centerpoint.hpp"
#include "geocut/cuts.hpp"
#include "geocut/experiments.hpp"
#include "geocut/manifold.hpp"
#include "geocut/optimizer.hpp"
#include "geocut/sampling.hpp"
#include "json.hpp"

using geocut::ErrorCode;

struct geocut_manifold {
  geocut::Manifold m;
};
struct geocut_region {
  geocut::Manifold m;
  geocut::FeasibleRegion r;
};
struct geocut_samples {
  geocut::Manifold m;
  geocut::SampleSet s;
};
struct geocut_oracle {
  geocut::Manifold m;
  geocut::SubgradientOracle o;
};
struct geocut_trace {
  geocut::Manifold m;
  geocut::OptimizerTrace t;
};

namespace {

thread_local std::string g_last_error;

geocut_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return GEOCUT_ERR_INVALID_ARGUMENT;
    case ErrorCode::ChartDomain: return GEOCUT_ERR_CHART_DOMAIN;
    case ErrorCode::BaseMismatch: return GEOCUT_ERR_BASE_MISMATCH;
    case ErrorCode::DegenerateRegion: return GEOCUT_ERR_DEGENERATE_REGION;
    case ErrorCode::NoConvergence: return GEOCUT_ERR_NO_CONVERGENCE;
    case ErrorCode::Io: return GEOCUT_ERR_IO;
  }
  return GEOCUT_ERR_UNKNOWN;
}

template <typename Fn>
geocut_status guarded(Fn&& fn) {
  try {
    fn();
    return GEOCUT_OK;
  } catch (const geocut::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GEOCUT_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return GEOCUT_ERR_UNKNOWN;
  }
}

geocut_status fail(geocut_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

geocut::Vec to_vec(const double* data, int dim) {
  geocut::Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = data[i];
  return v;
}

void from_vec(const geocut::Vec& v, double* out) {
  for (int i = 0; i < v.size(); ++i) out[i] = v[i];
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json convergence_json(const geocut::ConvergenceResult& res) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : res.rows)
    rows.push_back({{"eps", r.eps},
                    {"cuts_used", r.cuts_used},
                    {"best_value", r.best_value},
                    {"f_reference", r.f_reference},
                    {"suboptimality", r.suboptimality},
                    {"budget", r.budget},
                    {"termination", r.termination}});
  return {{"schema", "geocut.convergence_summary/1"},
          {"problem", res.problem},
          {"slope", res.slope},
          {"rows", rows}};
}

}  // namespace

extern "C" {

const char* geocut_status_name(geocut_status s) {
  switch (s) {
    case GEOCUT_OK: return "ok";
    case GEOCUT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case GEOCUT_ERR_CHART_DOMAIN: return "chart_domain";
    case GEOCUT_ERR_BASE_MISMATCH: return "base_mismatch";
    case GEOCUT_ERR_DEGENERATE_REGION: return "degenerate_region";
    case GEOCUT_ERR_NO_CONVERGENCE: return "no_convergence";
    case GEOCUT_ERR_IO: return "io";
    case GEOCUT_ERR_UNKNOWN: return "unknown";
  }
  return "?";
}

const char* geocut_last_error(void) { return g_last_error.c_str(); }

void geocut_string_free(char* s) { std::free(s); }

geocut_status geocut_manifold_create(const char* kind, int n, geocut_manifold** out) {
  if (!kind || !out) return fail(GEOCUT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string k(kind);
    geocut::Manifold m = k == "euclidean" ? geocut::Manifold::euclidean(n)
                         : k == "klein"   ? geocut::Manifold::klein(n)
                         : k == "spd"     ? geocut::Manifold::spd(n)
                                          : throw geocut::Error(
                                                ErrorCode::InvalidArgument,
                                                "unknown manifold kind: " + k);
    *out = new geocut_manifold{m};
  });
}

void geocut_manifold_destroy(geocut_manifold* m) { delete m; }

int geocut_manifold_dim(const geocut_manifold* m) { return m ? m->m.dim() : 0; }

const char* geocut_manifold_kind(const geocut_manifold* m) {
  if (!m) return "?";
  switch (m->m.kind()) {
    case geocut::ManifoldKind::Euclidean: return "euclidean";
    case geocut::ManifoldKind::KleinHyperbolic: return "klein";
    case geocut::ManifoldKind::Spd: return "spd";
  }
  return "?";
}

#define GEOCUT_CHECK_PTRS(...)                                             \
  do {                                                                     \
    const void* ptrs[] = {__VA_ARGS__};                                    \
    for (const void* p : ptrs)                                             \
      if (!p) return fail(GEOCUT_ERR_INVALID_ARGUMENT, "null argument");   \
  } while (0)

geocut_status geocut_exp(const geocut_manifold* m, const double* x, const double* v,
                         double* out) {
  GEOCUT_CHECK_PTRS(m, x, v, out);
  return guarded([&] {
    int d = m->m.dim();
    geocut::Vec xv = to_vec(x, d);
    geocut::Point y = m->m.exp(geocut::Point{xv}, geocut::Tangent{xv, to_vec(v, d)});
    from_vec(y.coords, out);
  });
}

geocut_status geocut_log(const geocut_manifold* m, const double* x, const double* y,
                         double* out) {
  GEOCUT_CHECK_PTRS(m, x, y, out);
  return guarded([&] {
    int d = m->m.dim();
    geocut::Tangent t = m->m.log(geocut::Point{to_vec(x, d)}, geocut::Point{to_vec(y, d)});
    from_vec(t.vec, out);
  });
}

geocut_status geocut_inner(const geocut_manifold* m, const double* x, const double* u,
                           const double* v, double* out) {
  GEOCUT_CHECK_PTRS(m, x, u, v, out);
  return guarded([&] {
    int d = m->m.dim();
    geocut::Vec xv = to_vec(x, d);
    *out = m->m.inner(geocut::Point{xv}, geocut::Tangent{xv, to_vec(u, d)},
                      geocut::Tangent{xv, to_vec(v, d)});
  });
}

geocut_status geocut_dist(const geocut_manifold* m, const double* x, const double* y,
                          double* out) {
  GEOCUT_CHECK_PTRS(m, x, y, out);
  return guarded([&] {
    *out = m->m.dist(geocut::Point{to_vec(x, m->m.dim())},
                     geocut::Point{to_vec(y, m->m.dim())});
  });
}

geocut_status geocut_volume_density(const geocut_manifold* m, const double* x,
                                    double* out) {
  GEOCUT_CHECK_PTRS(m, x, out);
  return guarded([&] {
    *out = m->m.volume_density(geocut::Point{to_vec(x, m->m.dim())});
  });
}

geocut_status geocut_region_create(const geocut_manifold* m, const double* center,
                                   double radius, geocut_region** out) {
  GEOCUT_CHECK_PTRS(m, center, out);
  return guarded([&] {
    geocut::FeasibleRegion r =
        geocut::make_region(m->m, geocut::Point{to_vec(center, m->m.dim())}, radius);
    *out = new geocut_region{m->m, std::move(r)};
  });
}

void geocut_region_destroy(geocut_region* r) { delete r; }

geocut_status geocut_region_add_cut(geocut_region* r, const double* base,
                                    const double* normal) {
  GEOCUT_CHECK_PTRS(r, base, normal);
  return guarded([&] {
    geocut::Vec b = to_vec(base, r->m.dim());
    r->r.cuts.push_back(geocut::make_cut(
        r->m, geocut::Point{b}, geocut::Tangent{b, to_vec(normal, r->m.dim())}));
  });
}

size_t geocut_region_cut_count(const geocut_region* r) {
  return r ? r->r.cuts.size() : 0;
}

geocut_status geocut_region_contains(const geocut_region* r, const double* y,
                                     int* out) {
  GEOCUT_CHECK_PTRS(r, y, out);
  return guarded([&] {
    *out = geocut::region_contains(r->m, r->r,
                                   geocut::Point{to_vec(y, r->m.dim())})
               ? 1
               : 0;
  });
}

geocut_status geocut_region_save(const geocut_region* r, const char* path) {
  GEOCUT_CHECK_PTRS(r, path);
  return guarded([&] { geocut::save_region(r->m, r->r, path); });
}

geocut_status geocut_region_load(const char* path, geocut_region** out) {
  GEOCUT_CHECK_PTRS(path, out);
  return guarded([&] {
    auto [m, r] = geocut::load_region(path);
    *out = new geocut_region{m, std::move(r)};
  });
}

geocut_status geocut_region_manifold(const geocut_region* r, geocut_manifold** out) {
  GEOCUT_CHECK_PTRS(r, out);
  *out = new geocut_manifold{r->m};
  return GEOCUT_OK;
}

geocut_status geocut_sample_region(const geocut_region* r, uint64_t count,
                                   uint64_t seed, int threads, geocut_samples** out) {
  GEOCUT_CHECK_PTRS(r, out);
  return guarded([&] {
    geocut::SamplerOptions opts;
    opts.threads = threads > 0 ? threads : 1;
    *out = new geocut_samples{r->m,
                              geocut::sample_region(r->m, r->r, count, seed, opts)};
  });
}

void geocut_samples_destroy(geocut_samples* s) { delete s; }

size_t geocut_samples_count(const geocut_samples* s) {
  return s ? s->s.points.size() : 0;
}

geocut_status geocut_samples_get(const geocut_samples* s, size_t index, double* out) {
  GEOCUT_CHECK_PTRS(s, out);
  if (index >= s->s.points.size())
    return fail(GEOCUT_ERR_INVALID_ARGUMENT, "sample index out of range");
  from_vec(s->s.points[index].coords, out);
  return GEOCUT_OK;
}

geocut_status geocut_samples_export_csv(const geocut_samples* s, const char* path) {
  GEOCUT_CHECK_PTRS(s, path);
  return guarded([&] { geocut::export_samples_csv(s->s, path); });
}

geocut_status geocut_estimate_volume(const geocut_region* r, uint64_t trials,
                                     uint64_t seed, int threads, double* value,
                                     double* stderr_out) {
  GEOCUT_CHECK_PTRS(r, value, stderr_out);
  return guarded([&] {
    geocut::SamplerOptions opts;
    opts.threads = threads > 0 ? threads : 1;
    // the exact chart bounding box of the region keeps the estimator
    // resolving long after cuts have shrunk it far below the ambient ball
    opts.proposal = geocut::tightened_proposal(r->m, r->r);
    geocut::VolumeEstimate est = geocut::estimate_volume(r->m, r->r, trials, seed, opts);
    *value = est.value;
    *stderr_out = est.stderr_value;
  });
}

geocut_status geocut_empirical_mass(const geocut_samples* s, const double* cut_base,
                                    const double* cut_normal, double* out) {
  GEOCUT_CHECK_PTRS(s, cut_base, cut_normal, out);
  return guarded([&] {
    geocut::Vec b = to_vec(cut_base, s->m.dim());
    geocut::HalfspaceCut cut = geocut::make_cut(
        s->m, geocut::Point{b}, geocut::Tangent{b, to_vec(cut_normal, s->m.dim())});
    *out = geocut::empirical_mass(s->m, cut, s->s);
  });
}

geocut_status geocut_centrality(const geocut_samples* s, const double* y,
                                int directions, double* depth,
                                double* worst_direction) {
  GEOCUT_CHECK_PTRS(s, y, depth);
  return guarded([&] {
    geocut::DepthEstimate est = geocut::centrality(
        s->m, geocut::Point{to_vec(y, s->m.dim())}, s->s, directions);
    *depth = est.depth;
    if (worst_direction) from_vec(est.worst_direction.vec, worst_direction);
  });
}

geocut_status geocut_karcher_mean(const geocut_samples* s, double tol, double* out) {
  GEOCUT_CHECK_PTRS(s, out);
  return guarded([&] {
    geocut::Point p = geocut::karcher_mean(s->m, s->s, tol > 0 ? tol : 1e-10);
    from_vec(p.coords, out);
  });
}

geocut_status geocut_find_centerpoint(const geocut_samples* s, int candidates,
                                      double* point, double* depth) {
  GEOCUT_CHECK_PTRS(s, point, depth);
  return guarded([&] {
    geocut::CenterpointOptions opts;
    if (candidates > 0) opts.candidates = candidates;
    auto [p, est] = geocut::find_centerpoint(s->m, s->s, opts);
    from_vec(p.coords, point);
    *depth = est.depth;
  });
}

geocut_status geocut_depth_profile_csv(const geocut_samples* s, int grid,
                                       const char* path) {
  GEOCUT_CHECK_PTRS(s, path);
  return guarded([&] { geocut::export_depth_profile(s->m, s->s, grid, path); });
}

geocut_status geocut_oracle_squared_distance(const geocut_region* domain,
                                             const double* p, geocut_oracle** out) {
  GEOCUT_CHECK_PTRS(domain, p, out);
  return guarded([&] {
    *out = new geocut_oracle{
        domain->m, geocut::squared_distance_oracle(
                       domain->m, geocut::Point{to_vec(p, domain->m.dim())}, domain->r)};
  });
}

static geocut_status make_point_cloud_oracle(const geocut_region* domain,
                                             const double* points, size_t count,
                                             bool fermat, geocut_oracle** out) {
  GEOCUT_CHECK_PTRS(domain, points, out);
  return guarded([&] {
    int d = domain->m.dim();
    std::vector<geocut::Point> pts;
    pts.reserve(count);
    for (size_t i = 0; i < count; ++i)
      pts.push_back(geocut::Point{to_vec(points + i * d, d)});
    *out = new geocut_oracle{
        domain->m, fermat ? geocut::fermat_weber_oracle(domain->m, std::move(pts))
                          : geocut::max_distance_oracle(domain->m, std::move(pts))};
  });
}

geocut_status geocut_oracle_fermat_weber(const geocut_region* domain,
                                         const double* points, size_t point_count,
                                         geocut_oracle** out) {
  return make_point_cloud_oracle(domain, points, point_count, true, out);
}

geocut_status geocut_oracle_max_distance(const geocut_region* domain,
                                         const double* points, size_t point_count,
                                         geocut_oracle** out) {
  return make_point_cloud_oracle(domain, points, point_count, false, out);
}

geocut_status geocut_oracle_logdet(const geocut_region* domain, const double* b_mats,
                                   size_t mat_count, geocut_oracle** out) {
  GEOCUT_CHECK_PTRS(domain, b_mats, out);
  return guarded([&] {
    int n = domain->m.n();
    std::vector<geocut::Mat> bs;
    bs.reserve(mat_count);
    for (size_t i = 0; i < mat_count; ++i) {
      geocut::Mat b(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) b(r, c) = b_mats[i * n * n + r * n + c];
      bs.push_back(std::move(b));
    }
    *out = new geocut_oracle{domain->m,
                             geocut::logdet_oracle(domain->m, std::move(bs), domain->r)};
  });
}

void geocut_oracle_destroy(geocut_oracle* o) { delete o; }

double geocut_oracle_lipschitz(const geocut_oracle* o) {
  return o ? o->o.lipschitz : 0.0;
}

geocut_status geocut_oracle_eval(const geocut_oracle* o, const double* x, double* out) {
  GEOCUT_CHECK_PTRS(o, x, out);
  return guarded([&] { *out = o->o.eval(geocut::Point{to_vec(x, o->m.dim())}); });
}

geocut_status geocut_oracle_subgrad(const geocut_oracle* o, const double* x,
                                    double* out) {
  GEOCUT_CHECK_PTRS(o, x, out);
  return guarded([&] {
    from_vec(o->o.subgrad(geocut::Point{to_vec(x, o->m.dim())}).vec, out);
  });
}

geocut_status geocut_stopping_threshold(int dim, double eps, double lipschitz,
                                        double* out) {
  GEOCUT_CHECK_PTRS(out);
  return guarded([&] { *out = geocut::stopping_threshold(dim, eps, lipschitz); });
}

geocut_status geocut_iteration_budget(int dim, double lipschitz, double vol,
                                      double eps, uint64_t* out) {
  GEOCUT_CHECK_PTRS(out);
  return guarded([&] { *out = geocut::iteration_budget(dim, lipschitz, vol, eps); });
}

geocut_status geocut_minimize(const geocut_region* r, const geocut_oracle* o,
                              double eps, const geocut_minimize_options* opts,
                              geocut_trace** out) {
  GEOCUT_CHECK_PTRS(r, o, out);
  if (r->m.kind() != o->m.kind() || r->m.dim() != o->m.dim())
    return fail(GEOCUT_ERR_INVALID_ARGUMENT, "region/oracle manifold mismatch");
  return guarded([&] {
    geocut::MinimizeConfig cfg;
    if (opts) {
      cfg.seed = opts->seed;
      if (opts->search_samples) cfg.search_samples = opts->search_samples;
      if (opts->volume_trials) cfg.volume_trials = opts->volume_trials;
      cfg.max_cuts = opts->max_cuts;
      if (opts->threads > 0) cfg.threads = opts->threads;
    }
    *out = new geocut_trace{r->m, geocut::minimize(r->m, o->o, r->r, eps, cfg)};
  });
}

void geocut_trace_destroy(geocut_trace* t) { delete t; }

size_t geocut_trace_length(const geocut_trace* t) {
  return t ? t->t.iterates.size() : 0;
}

uint64_t geocut_trace_cuts_used(const geocut_trace* t) {
  return t ? t->t.cuts_used : 0;
}

const char* geocut_trace_termination(const geocut_trace* t) {
  static thread_local std::string name;
  if (!t) return "?";
  name = geocut::termination_name(t->t.termination);
  return name.c_str();
}

double geocut_trace_best_value(const geocut_trace* t) {
  return t ? t->t.best_value : 0.0;
}

geocut_status geocut_trace_best_point(const geocut_trace* t, double* out) {
  GEOCUT_CHECK_PTRS(t, out);
  from_vec(t->t.best_point.coords, out);
  return GEOCUT_OK;
}

geocut_status geocut_trace_iterate(const geocut_trace* t, size_t index, double* f,
                                   double* depth, double* volume,
                                   double* volume_stderr, int* flagged) {
  GEOCUT_CHECK_PTRS(t);
  if (index >= t->t.iterates.size())
    return fail(GEOCUT_ERR_INVALID_ARGUMENT, "iterate index out of range");
  const geocut::TraceIterate& it = t->t.iterates[index];
  if (f) *f = it.f_value;
  if (depth) *depth = it.depth;
  if (volume) *volume = it.volume;
  if (volume_stderr) *volume_stderr = it.volume_stderr;
  if (flagged) *flagged = it.depth_flagged ? 1 : 0;
  return GEOCUT_OK;
}

geocut_status geocut_trace_export_jsonl(const geocut_trace* t, const char* path) {
  GEOCUT_CHECK_PTRS(t, path);
  return guarded([&] { geocut::export_trace_jsonl(t->m, t->t, path); });
}

geocut_status geocut_trace_export_csv(const geocut_trace* t, const char* path) {
  GEOCUT_CHECK_PTRS(t, path);
  return guarded([&] { geocut::export_trace_csv(t->t, path); });
}

geocut_status geocut_trace_save_region(const geocut_trace* t, const char* path) {
  GEOCUT_CHECK_PTRS(t, path);
  return guarded([&] { geocut::save_region(t->m, t->t.final_region, path); });
}

geocut_status geocut_run_sharpness(const geocut_sharpness_params* params,
                                   const char* csv_path, char** summary_json) {
  GEOCUT_CHECK_PTRS(params, csv_path);
  return guarded([&] {
    geocut::SharpnessConfig cfg;
    cfg.n = params->n;
    cfg.delta = params->delta;
    if (params->eps_list && params->eps_count)
      cfg.eps_list.assign(params->eps_list, params->eps_list + params->eps_count);
    if (params->trials) cfg.trials = params->trials;
    cfg.seed = params->seed;
    cfg.threads = params->threads > 0 ? params->threads : 1;
    std::vector<geocut::SharpnessRow> rows = geocut::sharpness_run(cfg);
    geocut::write_sharpness_csv(rows, csv_path);
    if (summary_json) {
      nlohmann::json jrows = nlohmann::json::array();
      for (const auto& r : rows)
        jrows.push_back({{"eps", r.eps},
                         {"volume", r.volume},
                         {"volume_stderr", r.volume_stderr},
                         {"vertex_mass", r.vertex_mass},
                         {"vertex_mass_stderr", r.vertex_mass_stderr}});
      nlohmann::json j = {{"schema", "geocut.sharpness_summary/1"},
                          {"n", cfg.n},
                          {"delta", cfg.delta},
                          {"trials", cfg.trials},
                          {"rows", jrows}};
      *summary_json = dup_string(j.dump());
    }
  });
}

geocut_status geocut_run_grunbaum(const char* shape, uint64_t samples, uint64_t seed,
                                  const char* csv_path, char** summary_json) {
  GEOCUT_CHECK_PTRS(shape, csv_path);
  return guarded([&] {
    std::string s(shape);
    geocut::GrunbaumShape sh = s == "triangle" ? geocut::GrunbaumShape::Triangle
                               : s == "square" ? geocut::GrunbaumShape::Square
                                               : throw geocut::Error(
                                                     ErrorCode::InvalidArgument,
                                                     "unknown shape: " + s);
    geocut::GrunbaumResult res =
        geocut::euclidean_grunbaum_check(sh, samples ? samples : 100000, seed);
    std::ofstream out(csv_path);
    if (!out) throw geocut::Error(ErrorCode::Io, std::string("cannot open ") + csv_path);
    out << "# schema: geocut.grunbaum/1\n";
    out << "shape,samples,found_depth,centroid_depth,point_x,point_y\n";
    out << s << ',' << samples << ',' << res.found_depth << ',' << res.centroid_depth
        << ',' << res.found_point.coords[0] << ',' << res.found_point.coords[1] << "\n";
    if (summary_json) {
      nlohmann::json j = {{"schema", "geocut.grunbaum_summary/1"},
                          {"shape", s},
                          {"samples", samples},
                          {"found_depth", res.found_depth},
                          {"centroid_depth", res.centroid_depth},
                          {"point", {res.found_point.coords[0], res.found_point.coords[1]}}};
      *summary_json = dup_string(j.dump());
    }
  });
}

geocut_status geocut_run_convergence(const geocut_convergence_params* params,
                                     const char* csv_path, char** summary_json) {
  GEOCUT_CHECK_PTRS(params, csv_path);
  if (!params->problem) return fail(GEOCUT_ERR_INVALID_ARGUMENT, "null problem");
  return guarded([&] {
    std::vector<double> eps_list;
    if (params->eps_list && params->eps_count)
      eps_list.assign(params->eps_list, params->eps_list + params->eps_count);
    else
      eps_list = {0.1, 0.03, 0.01};
    geocut::ConvergenceResult res = geocut::convergence_run(
        params->problem, eps_list, params->seed,
        params->threads > 0 ? params->threads : 1);
    geocut::write_convergence_csv(res, csv_path);
    if (summary_json) *summary_json = dup_string(convergence_json(res).dump());
  });
}

geocut_status geocut_run_optimize(const geocut_optimize_params* params,
                                  const char* out_dir, char** summary_json) {
  GEOCUT_CHECK_PTRS(params, out_dir);
  if (!params->problem) return fail(GEOCUT_ERR_INVALID_ARGUMENT, "null problem");
  return guarded([&] {
    geocut::Problem prob = geocut::make_problem(params->problem);
    geocut::MinimizeConfig cfg;
    cfg.seed = params->seed;
    if (params->search_samples) cfg.search_samples = params->search_samples;
    if (params->threads > 0) cfg.threads = params->threads;
    if (prob.manifold.kind() == geocut::ManifoldKind::Spd) {
      cfg.search_samples = std::min<uint64_t>(cfg.search_samples, 2048);
      cfg.max_cuts = 22;
    }
    geocut::OptimizerTrace trace =
        geocut::minimize(prob.manifold, prob.oracle, prob.region, params->eps, cfg);

    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    geocut::export_trace_jsonl(prob.manifold, trace, (dir / "trace.jsonl").string());
    geocut::export_trace_csv(trace, (dir / "trace_summary.csv").string());
    geocut::save_region(prob.manifold, trace.final_region,
                        (dir / "region.json").string());

    double f_ref = prob.f_reference;
    if (std::isnan(f_ref))
      f_ref = geocut::reference_descent(prob.manifold, prob.oracle, prob.region);
    if (summary_json) {
      nlohmann::json j = {{"schema", "geocut.optimize_summary/1"},
                          {"problem", prob.name},
                          {"eps", params->eps},
                          {"lipschitz", prob.oracle.lipschitz},
                          {"cuts_used", trace.cuts_used},
                          {"best_value", trace.best_value},
                          {"f_reference", f_ref},
                          {"suboptimality", trace.best_value - f_ref},
                          {"termination", geocut::termination_name(trace.termination)}};
      *summary_json = dup_string(j.dump());
    }
  });
}

}  // extern "C"
