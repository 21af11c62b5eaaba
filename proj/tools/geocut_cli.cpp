// geocut command-line front end.  All numerical work goes through the C API
// in geocut.h; this file only parses flags, wires seeds and paths, and
// formats summaries.

#include <cstdint>
#include <fstream>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geocut.h"
#include "json.hpp"

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool json = false;
  int threads = 1;
};

int fail(geocut_status status, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what.c_str(), geocut_last_error(),
               geocut_status_name(status));
  return 1;
}

void print_summary(const GlobalOpts& g, char* summary_json,
                   const std::string& human_prefix) {
  if (!summary_json) return;
  if (g.json) {
    std::printf("%s\n", summary_json);
  } else {
    nlohmann::json j = nlohmann::json::parse(summary_json);
    std::printf("%s %s\n", human_prefix.c_str(), j.dump(2).c_str());
  }
  geocut_string_free(summary_json);
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / name).string();
}

using ManifoldPtr = std::unique_ptr<geocut_manifold, decltype(&geocut_manifold_destroy)>;
using RegionPtr = std::unique_ptr<geocut_region, decltype(&geocut_region_destroy)>;
using SamplesPtr = std::unique_ptr<geocut_samples, decltype(&geocut_samples_destroy)>;

// identity-centered chart point: the origin, or the identity matrix for spd
std::vector<double> default_center(geocut_manifold* m, const std::string& kind, int n) {
  std::vector<double> c(static_cast<size_t>(geocut_manifold_dim(m)), 0.0);
  if (kind == "spd")
    for (int i = 0; i < n; ++i) c[static_cast<size_t>(i)] = 1.0;
  return c;
}

RegionPtr default_triangle_region() {
  geocut_manifold* m = nullptr;
  if (geocut_manifold_create("euclidean", 2, &m) != GEOCUT_OK) return {nullptr, geocut_region_destroy};
  ManifoldPtr mp(m, geocut_manifold_destroy);
  double center[2] = {0.5, 0.5};
  geocut_region* r = nullptr;
  if (geocut_region_create(m, center, 0.7071068, &r) != GEOCUT_OK)
    return {nullptr, geocut_region_destroy};
  RegionPtr rp(r, geocut_region_destroy);
  const double edges[3][4] = {
      {0.0, 0.5, -1.0, 0.0},  // x > 0
      {0.5, 0.0, 0.0, -1.0},  // y > 0
      {0.5, 0.5, 1.0, 1.0},   // x + y < 1
  };
  for (const auto& e : edges)
    if (geocut_region_add_cut(r, e, e + 2) != GEOCUT_OK)
      return {nullptr, geocut_region_destroy};
  return rp;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geocut: centerpoint cutting-plane optimization on Hadamard manifolds"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a config file");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master RNG seed (all randomness derives from it)")
      ->capture_default_str();
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_flag("--json", g.json, "machine-readable summaries on stdout");
  app.add_option("--threads", g.threads, "sampler worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // ---- sharpness -----------------------------------------------------
  auto* sharp = app.add_subcommand(
      "sharpness", "truncated near-ideal simplex: volume and vertex-halfspace masses");
  int sharp_dim = 2;
  double sharp_delta = 0.05;
  std::vector<double> sharp_eps = {0.1, 0.05, 0.02, 0.01, 0.005};
  std::uint64_t sharp_samples = 1000000;
  sharp->add_option("--dim", sharp_dim, "hyperbolic dimension n")
      ->check(CLI::Range(2, 6))
      ->capture_default_str();
  sharp->add_option("--delta", sharp_delta, "simplex circumradius excess")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sharp->add_option("--eps", sharp_eps, "truncation radii (chart units)")
      ->capture_default_str();
  sharp->add_option("--samples", sharp_samples, "Monte Carlo draws per eps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // ---- grunbaum ------------------------------------------------------
  auto* grun = app.add_subcommand(
      "grunbaum", "euclidean centerpoint depth on a planar shape");
  std::string grun_shape = "triangle";
  std::uint64_t grun_samples = 100000;
  grun->add_option("--shape", grun_shape, "triangle or square")
      ->check(CLI::IsMember({"triangle", "square"}))
      ->capture_default_str();
  grun->add_option("--samples", grun_samples, "sample count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // ---- optimize ------------------------------------------------------
  auto* opt = app.add_subcommand("optimize",
                                 "cutting-plane minimization of a built-in problem");
  std::string opt_manifold = "klein";
  std::string opt_problem;
  int opt_dim = 2;
  double opt_eps = 0.01;
  std::uint64_t opt_samples = 0;
  opt->add_option("--manifold", opt_manifold, "euclidean, klein or spd")
      ->check(CLI::IsMember({"euclidean", "klein", "spd"}))
      ->capture_default_str();
  opt->add_option("--problem", opt_problem,
                  "problem label (default: the manifold's canonical problem)");
  opt->add_option("--dim", opt_dim, "space dimension (built-in problems use 2)")
      ->check(CLI::Range(2, 2))
      ->capture_default_str();
  opt->add_option("--eps", opt_eps, "target suboptimality")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  opt->add_option("--samples", opt_samples, "samples per centerpoint search (0: default)");

  // ---- volume --------------------------------------------------------
  auto* vol = app.add_subcommand("volume",
                                 "Monte Carlo Riemannian volume of a ball or region");
  std::string vol_manifold = "klein";
  int vol_dim = 2;
  double vol_radius = 1.0;
  std::uint64_t vol_samples = 100000;
  std::string vol_region_file;
  vol->add_option("--manifold", vol_manifold, "euclidean, klein or spd")
      ->check(CLI::IsMember({"euclidean", "klein", "spd"}))
      ->capture_default_str();
  vol->add_option("--dim", vol_dim, "dimension n")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  vol->add_option("--radius", vol_radius, "geodesic ball radius")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  vol->add_option("--samples", vol_samples, "Monte Carlo draws")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  vol->add_option("--region", vol_region_file,
                  "estimate a saved region instead of a ball");

  // ---- depth-profile ---------------------------------------------------
  auto* prof = app.add_subcommand("depth-profile",
                                  "grid of centrality g-values for contour plots");
  std::string prof_region_file;
  int prof_grid = 33;
  std::uint64_t prof_samples = 4096;
  prof->add_option("--region", prof_region_file,
                   "saved region (default: the unit triangle)");
  prof->add_option("--grid", prof_grid, "grid resolution per axis")
      ->check(CLI::Range(2, 2048))
      ->capture_default_str();
  prof->add_option("--samples", prof_samples, "sample count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (sharp->parsed()) {
    geocut_sharpness_params params{};
    params.n = sharp_dim;
    params.delta = sharp_delta;
    params.eps_list = sharp_eps.data();
    params.eps_count = sharp_eps.size();
    params.trials = sharp_samples;
    params.seed = g.seed;
    params.threads = g.threads;
    char* summary = nullptr;
    geocut_status s =
        geocut_run_sharpness(&params, out_path(g, "sharpness.csv").c_str(), &summary);
    if (s != GEOCUT_OK) return fail(s, "sharpness");
    print_summary(g, summary, "sharpness:");
    return 0;
  }

  if (grun->parsed()) {
    char* summary = nullptr;
    geocut_status s = geocut_run_grunbaum(grun_shape.c_str(), grun_samples, g.seed,
                                          out_path(g, "grunbaum.csv").c_str(), &summary);
    if (s != GEOCUT_OK) return fail(s, "grunbaum");
    print_summary(g, summary, "grunbaum:");
    return 0;
  }

  if (opt->parsed()) {
    if (opt_problem.empty()) {
      opt_problem = opt_manifold == "euclidean" ? "euclidean_quadratic"
                    : opt_manifold == "klein"   ? "klein_fermat_weber"
                                                : "spd_logdet";
    }
    geocut_optimize_params params{};
    params.problem = opt_problem.c_str();
    params.eps = opt_eps;
    params.seed = g.seed;
    params.search_samples = opt_samples;
    params.threads = g.threads;
    std::filesystem::create_directories(g.out_dir);
    char* summary = nullptr;
    geocut_status s = geocut_run_optimize(&params, g.out_dir.c_str(), &summary);
    if (s != GEOCUT_OK) return fail(s, "optimize");
    print_summary(g, summary, "optimize:");
    return 0;
  }

  if (vol->parsed()) {
    RegionPtr region{nullptr, geocut_region_destroy};
    if (!vol_region_file.empty()) {
      geocut_region* r = nullptr;
      geocut_status s = geocut_region_load(vol_region_file.c_str(), &r);
      if (s != GEOCUT_OK) return fail(s, "volume: load region");
      region.reset(r);
    } else {
      geocut_manifold* m = nullptr;
      geocut_status s = geocut_manifold_create(vol_manifold.c_str(), vol_dim, &m);
      if (s != GEOCUT_OK) return fail(s, "volume: manifold");
      ManifoldPtr mp(m, geocut_manifold_destroy);
      std::vector<double> center = default_center(m, vol_manifold, vol_dim);
      geocut_region* r = nullptr;
      s = geocut_region_create(m, center.data(), vol_radius, &r);
      if (s != GEOCUT_OK) return fail(s, "volume: region");
      region.reset(r);
    }
    double value = 0.0, se = 0.0;
    geocut_status s =
        geocut_estimate_volume(region.get(), vol_samples, g.seed, g.threads, &value, &se);
    if (s != GEOCUT_OK) return fail(s, "volume");
    nlohmann::json j = {{"schema", "geocut.volume/1"},
                        {"volume", value},
                        {"stderr", se},
                        {"samples", vol_samples},
                        {"seed", g.seed}};
    std::ofstream out(out_path(g, "volume.json"));
    out << j.dump(2) << "\n";
    if (g.json)
      std::printf("%s\n", j.dump().c_str());
    else
      std::printf("volume: %.10g +/- %.3g\n", value, se);
    return 0;
  }

  if (prof->parsed()) {
    RegionPtr region{nullptr, geocut_region_destroy};
    if (!prof_region_file.empty()) {
      geocut_region* r = nullptr;
      geocut_status s = geocut_region_load(prof_region_file.c_str(), &r);
      if (s != GEOCUT_OK) return fail(s, "depth-profile: load region");
      region.reset(r);
    } else {
      region = default_triangle_region();
      if (!region) return fail(GEOCUT_ERR_UNKNOWN, "depth-profile: triangle region");
    }
    geocut_samples* smp = nullptr;
    geocut_status s =
        geocut_sample_region(region.get(), prof_samples, g.seed, g.threads, &smp);
    if (s != GEOCUT_OK) return fail(s, "depth-profile: sampling");
    SamplesPtr sp(smp, geocut_samples_destroy);
    std::string path = out_path(g, "depth_profile.csv");
    s = geocut_depth_profile_csv(smp, prof_grid, path.c_str());
    if (s != GEOCUT_OK) return fail(s, "depth-profile");
    if (g.json) {
      nlohmann::json j = {{"schema", "geocut.depth_profile_summary/1"},
                          {"csv", path},
                          {"grid", prof_grid},
                          {"samples", prof_samples}};
      std::printf("%s\n", j.dump().c_str());
    } else {
      std::printf("depth profile written to %s\n", path.c_str());
    }
    return 0;
  }

  return 0;
}
