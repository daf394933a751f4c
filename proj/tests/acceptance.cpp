// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [--criterion N]...   (default: all)
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "danzer/lattice_forest.hpp"
#include "danzer/optical_net.hpp"
#include "danzer/peres.hpp"
#include "danzer/rng.hpp"
#include "danzer/sud.hpp"
#include "danzer/verifiers.hpp"
#include "oracles.hpp"

#ifndef DANZER_CLI_PATH
#define DANZER_CLI_PATH "danzer-cli"
#endif

using namespace danzer;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome hitting() {
  const auto spec = corollary_forest_spec(2, 1.0);
  const LatticeForest forest(spec);
  std::ostringstream detail;
  bool ok = true;
  for (int j = 1; j <= 6; ++j) {
    const auto [e, V] = spec.schedule()[static_cast<std::size_t>(j - 1)];
    SegmentSamplerConfig cfg;
    cfg.seed = 1000 + static_cast<std::uint64_t>(j);
    cfg.count = 2000;
    cfg.length = spec.guaranteed_length(j);
    cfg.region = AxisBox::cube(2, -2 * V, 2 * V);
    cfg.hyperplanes = forest.hyperplane_hints();
    const auto segs = sample_segments(cfg);
    const auto rep = visibility_probe(forest, segs, e + 1e-9, {workers(), false});
    ok = ok && rep.pass;
    detail << " j=" << j << ":" << fmt("%.4g", rep.worst_min_distance) << "/" << e;
  }
  return {ok, detail.str()};
}

Outcome density_chain() {
  const auto spec = corollary_forest_spec(2, 1.0);
  std::ostringstream detail;
  bool ok = true;
  for (double T = 4; T <= 512; T *= 2) {
    const double ratio = static_cast<double>(count_in_ball(spec, T)) / (T * T);
    const double bound = series_density_bound(spec, spec.density_index(T));
    ok = ok && ratio <= bound;
    detail << " T=" << T << ":" << fmt("%.4g", ratio) << "<=" << fmt("%.4g", bound);
  }
  return {ok, detail.str()};
}

Outcome net_check() {
  std::ostringstream detail;
  bool ok = true;
  double lo = INFINITY;
  double hi = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto net = epsilon_net(2, n);
    const double area = largest_empty_rectangle_2d(net.points).volume;
    ok = ok && area < net.spec.epsilon;
    lo = std::min(lo, net.bound_ratio);
    hi = std::max(hi, net.bound_ratio);
    detail << " n=" << n << ":area=" << fmt("%.5g", area) << "<" << net.spec.epsilon << ",#=" << net.cardinality;
  }
  ok = ok && hi / lo <= 4.0;
  detail << " band=" << fmt("%.4g", hi / lo);
  return {ok, detail.str()};
}

Outcome block_bound() {
  std::ostringstream detail;
  bool ok = true;
  const BlockVerifyOptions opt{std::uint64_t{1} << 30, std::uint64_t{1} << 30, workers()};
  for (int i = 1; i <= 3; ++i) {
    const auto rep = block_sud_verify(i, opt);
    const double target = std::ldexp(1.0, -i * i);
    const bool good = rep.pass && rep.certified_bound && *rep.certified_bound <= target;
    ok = ok && good;
    detail << " i=" << i << ":" << (good ? "certified" : "not certified") << "(bound="
           << (rep.continuum_complete ? fmt("%.4g", rep.continuum_bound) : std::string("incomplete"))
           << ",target=" << target << ",window=" << rep.window_defect.to_string() << ")";
  }
  // Every single-value mutation at i=2 must flip the verdict. The mutation
  // moves the value by half a turn, the largest possible change.
  const auto block = block_values(2);
  const std::uint64_t half = std::uint64_t{1} << (block.u - 1);
  const std::uint64_t mask = (std::uint64_t{1} << block.u) - 1;
  std::size_t flips = 0;
  for (std::size_t p = 0; p < block.numerators.size(); ++p) {
    auto mutated = block.numerators;
    mutated[p] = (mutated[p] + half) & mask;
    flips += !block_sud_verify_values(2, mutated, opt).pass;
  }
  ok = ok && flips == block.numerators.size();
  detail << " mutation flips=" << flips << "/" << block.numerators.size();
  return {ok, detail.str()};
}

Outcome consistency() {
  std::uint64_t bad_u = 0;
  for (std::uint64_t n = 1; n <= 100000; ++n) bad_u += !(u_value(n) == interleave(n));
  std::uint64_t bad_idx = 0;
  for (std::uint64_t n = 1; n <= 1000000; ++n) {
    const auto d = decompose_index(n);
    const std::uint64_t p = std::uint64_t{1} << d.i;
    const bool odd_shape = d.i >= 1 && d.k * p + p / 2 - 2 == n;
    bad_idx += !(odd_shape && recompose_index(d) == n && decompose_index(recompose_index(d)) == d);
  }
  return {bad_u == 0 && bad_idx == 0,
          " u/interleave mismatches=" + std::to_string(bad_u) + " index mismatches=" + std::to_string(bad_idx)};
}

Outcome dispersion_oracle() {
  SplitMix64 rng(2024);
  const double tol = std::ldexp(1.0, -12);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(64);
    std::vector<double> pts(n);
    for (auto& x : pts) x = rng.uniform();
    worst = std::max(worst, std::fabs(exact_dispersion(std::span<const double>(pts)) - oracles::grid_dispersion(pts, 12)));
  }
  return {worst <= tol, " max deviation=" + fmt("%.3g", worst) + " tol=" + fmt("%.3g", tol)};
}

Outcome baseline() {
  const LatticeForest corollary(corollary_forest_spec(2, 1.0));
  const PeresForest golden(TorusSequence::golden());
  const PeresForest sud(TorusSequence::sud_digital());
  const std::vector<std::pair<const char*, const PointSource*>> sources{
      {"corollary", &corollary}, {"golden", &golden}, {"sud", &sud}};
  std::vector<double> eps;
  for (int k = 1; k <= 6; ++k) eps.push_back(std::ldexp(1.0, -k));
  std::ostringstream detail;
  bool ok = true;
  for (const auto& [name, src] : sources) {
    SegmentSamplerConfig cfg;
    cfg.seed = 77;
    cfg.count = 200;
    cfg.region = AxisBox::cube(2, -64, 64);
    cfg.hyperplanes = src->hyperplane_hints();
    const auto curve = empirical_visibility_curve(*src, cfg, eps, {0.25, 65536.0, 2.0}, {workers(), true});
    const bool bounded = std::all_of(curve.points.begin(), curve.points.end(),
                                     [](const CurvePoint& p) { return p.min_length.has_value(); });
    const bool good = bounded && curve.baseline_ok && curve.baseline_constant > 0.0;
    ok = ok && good;
    detail << " " << name << ":c=" << fmt("%.4g", curve.baseline_constant) << "[";
    for (const auto& p : curve.points) detail << (p.min_length ? fmt("%g", *p.min_length) : "inf") << ",";
    detail << "]";
  }
  return {ok, detail.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("danzer_repro_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"gen", "gen --construction corollary --dim 2 --eta 1 --window -40 40 -40 40"},
      {"gen-optical", "gen --construction optical --dim 3 --window -5 5 -5 5 -5 5"},
      {"gen-net", "gen --construction net --dim 2 --n 2"},
      {"gen-peres", "gen --construction peres-sud --window -20 20 -20 20"},
      {"visibility", "visibility --construction corollary --dim 2 --schedule-j 3 --count 300 --seed 5"},
      {"visibility-curve",
       "visibility --construction peres-golden --curve --count 50 --region -32 32 -32 32 --dominance-power 3"},
      {"netcheck", "netcheck --dim 2 --n 2"},
      {"netcheck-3d", "netcheck --dim 3 --n 1 --resolution 4"},
      {"dispersion-exact", "dispersion --exact --seq sud --N 300"},
      {"dispersion-perturbed", "dispersion --perturbed --seq sud --N 200 --m 7 --xi 0.375"},
      {"dispersion-delta", "dispersion --delta --seq sud --N 64 --m-max 16 --xi-log2 6"},
      {"dispersion-block", "dispersion --block-verify --i 2"},
      {"dispersion-w", "dispersion --w-constants --epsilon 0.01"},
      {"density", "density --construction corollary --dim 2 --eta 1"},
      {"seq", "seq --from 1 --to 5000 --kind interleave"},
  };
  std::ostringstream detail;
  bool ok = true;
  for (const auto& [name, args] : runs) {
    std::string first;
    bool same = true;
    bool ran = true;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path out = dir / (name + ".out");
      fs::remove(out);
      const std::string cmd = std::string("\"") + DANZER_CLI_PATH + "\" --threads " + threads + " --out \"" +
                              out.string() + "\" " + args + " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      ran = ran && rc != -1 && fs::exists(out);
      const std::string bytes = slurp(out);
      if (first.empty()) first = bytes;
      same = same && bytes == first && !bytes.empty();
    }
    ok = ok && ran && same;
    if (!(ran && same)) detail << " " << name << ":differs";
  }
  fs::remove_all(dir);
  if (ok) detail << " " << runs.size() << " invocations identical across repeat and thread count";
  return {ok, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"hitting at the guaranteed length", hitting},
      {"density chain", density_chain},
      {"exact epsilon-net check", net_check},
      {"block dispersion bound", block_bound},
      {"closed form equals interleaving", consistency},
      {"dispersion oracle equivalence", dispersion_oracle},
      {"visibility lower-bound baseline", baseline},
      {"reproducibility", reproducibility},
  };
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criterion" && a + 1 < argc) {
      selected.push_back(std::atoi(argv[++a]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) selected.push_back(c);
  }
  int failures = 0;
  for (int c : selected) {
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", c);
      return 2;
    }
    const auto& [name, run] = criteria[static_cast<std::size_t>(c - 1)];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string(" error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s):%s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
