// danzer-cli: generation, verification and reporting on top of the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "danzer/danzer.h"

using nlohmann::ordered_json;

namespace {

enum Exit : int { kPass = 0, kCheckFailed = 1, kUsage = 2, kBudget = 3, kInternal = 4 };

struct CliError {
  int code;
  std::string message;
};

void check(dz_status s) {
  if (s == DZ_OK) return;
  int code = kInternal;
  switch (s) {
    case DZ_ERR_INVALID_ARGUMENT:
    case DZ_ERR_OVERFLOW:
      code = kUsage;
      break;
    case DZ_ERR_BUDGET_EXCEEDED:
    case DZ_ERR_INFEASIBLE:
      code = kBudget;
      break;
    default:
      break;
  }
  throw CliError{code, dz_last_error()};
}

[[noreturn]] void usage(const std::string& msg) { throw CliError{kUsage, msg}; }

struct ForestDeleter {
  void operator()(dz_forest* f) const { dz_forest_free(f); }
};
struct PointSetDeleter {
  void operator()(dz_pointset* p) const { dz_pointset_free(p); }
};
using Forest = std::unique_ptr<dz_forest, ForestDeleter>;
using PointSet = std::unique_ptr<dz_pointset, PointSetDeleter>;

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

// Writes to the path, or stdout for "-".
void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) usage("cannot open output file " + path);
  f << text;
  if (!f) throw CliError{kInternal, "failed writing " + path};
}

void write_json(const std::string& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json dyadic_json(const dz_dyadic& d) {
  return {{"numerator", d.numerator},
          {"log2_denominator", d.log2_denominator},
          {"value", std::ldexp(static_cast<double>(d.numerator), -static_cast<int>(d.log2_denominator))}};
}

dz_dyadic to_dyadic(double x) {
  if (!std::isfinite(x)) usage("xi must be finite");
  x -= std::floor(x);
  unsigned q = 0;
  while (x != std::floor(x)) {
    if (++q > 62) usage("xi must be a dyadic rational with denominator at most 2^62");
    x *= 2.0;
  }
  return {static_cast<std::uint64_t>(x), q};
}

struct ForestFlags {
  std::string construction;
  std::size_t dim = 2;
  double eta = 1.0;
};

void add_forest_flags(CLI::App* app, ForestFlags& f, const std::vector<std::string>& kinds) {
  app->add_option("--construction", f.construction, "Point set to use")
      ->required()
      ->check(CLI::IsMember(kinds));
  app->add_option("--dim", f.dim, "Dimension d")->check(CLI::Range(2, DZ_MAX_DIM));
  app->add_option("--eta", f.eta, "Corollary forest parameter eta > 0");
}

Forest make_forest(const ForestFlags& f) {
  dz_forest* raw = nullptr;
  if (f.construction == "corollary") {
    check(dz_forest_corollary(f.dim, f.eta, &raw));
  } else if (f.construction == "optical") {
    check(dz_forest_optical(f.dim, &raw));
  } else if (f.construction == "peres-golden" || f.construction == "peres-sud") {
    if (f.dim != 2) usage("peres forests are planar; use --dim 2");
    check(dz_forest_peres(f.construction == "peres-golden" ? DZ_SEQ_GOLDEN : DZ_SEQ_SUD, &raw));
  } else {
    usage("unknown construction " + f.construction);
  }
  return Forest(raw);
}

void box_from_pairs(const std::vector<double>& pairs, std::size_t dim, const char* flag, double* lo, double* hi) {
  if (pairs.size() != 2 * dim) usage(std::string(flag) + " needs lo hi for each of the " + std::to_string(dim) + " axes");
  for (std::size_t a = 0; a < dim; ++a) {
    lo[a] = pairs[2 * a];
    hi[a] = pairs[2 * a + 1];
    if (!(lo[a] < hi[a])) usage(std::string(flag) + " needs lo < hi on every axis");
  }
}

std::string point_csv(const dz_pointset* ps) {
  const std::size_t d = dz_pointset_dim(ps);
  const std::size_t n = dz_pointset_size(ps);
  const double* x = dz_pointset_data(ps);
  std::string out = "# dim=" + std::to_string(d) + "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      if (a) out += ',';
      out += fmt(x[i * d + a]);
    }
    out += '\n';
  }
  return out;
}

ordered_json net_json(const dz_net_info& info) {
  return {{"d", info.dim},          {"n", info.n},
          {"epsilon", info.epsilon}, {"tau", info.tau},
          {"cardinality", info.cardinality}, {"bound_ratio", info.bound_ratio}};
}

ordered_json coords(const double* x, std::size_t d) { return std::vector<double>(x, x + d); }

// ---- gen --------------------------------------------------------------------

struct GenArgs {
  ForestFlags forest;
  int n = 1;
  std::vector<double> window;
  std::uint64_t budget = 0;
  std::string report;
};

int run_gen(const GenArgs& g, const std::string& out) {
  if (g.forest.construction == "net") {
    dz_net_info info{};
    dz_pointset* raw = nullptr;
    check(dz_epsilon_net(g.forest.dim, g.n, g.budget, &info, &raw));
    PointSet ps(raw);
    write_text(out, point_csv(ps.get()));
    if (!g.report.empty()) write_json(g.report, net_json(info));
    return kPass;
  }
  const Forest f = make_forest(g.forest);
  const std::size_t d = dz_forest_dim(f.get());
  if (g.window.empty()) usage("--window is required for " + g.forest.construction);
  double lo[DZ_MAX_DIM];
  double hi[DZ_MAX_DIM];
  box_from_pairs(g.window, d, "--window", lo, hi);
  dz_pointset* raw = nullptr;
  check(dz_forest_enumerate(f.get(), lo, hi, g.budget, &raw));
  PointSet ps(raw);
  write_text(out, point_csv(ps.get()));
  return kPass;
}

// ---- visibility -------------------------------------------------------------

struct VisibilityArgs {
  ForestFlags forest;
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  std::optional<double> length;
  std::optional<double> epsilon;
  std::vector<double> region;
  bool no_adversarial = false;
  std::string placement = "inside";
  std::optional<int> schedule_j;
  bool curve = false;
  std::vector<double> epsilons;
  double ladder_min = 0.25;
  double ladder_max = 65536.0;
  double ladder_factor = 2.0;
  double dominance_power = 0.0;
  std::string csv;
};

int run_visibility(const VisibilityArgs& v, unsigned threads, const std::string& out) {
  const Forest f = make_forest(v.forest);
  dz_sampler s{};
  s.seed = v.seed;
  s.count = v.count;
  s.dim = dz_forest_dim(f.get());
  s.include_adversarial = v.no_adversarial ? 0 : 1;
  s.placement = v.placement == "anchored" ? DZ_PLACE_ANCHORED : DZ_PLACE_INSIDE;

  double epsilon = v.epsilon.value_or(0.0);
  double length = v.length.value_or(0.0);
  double half = 0.0;
  if (v.schedule_j) {
    if (v.curve) usage("--schedule-j applies to a single probe");
    double e = 0.0;
    double V = 0.0;
    check(dz_forest_schedule_entry(f.get(), static_cast<std::size_t>(*v.schedule_j), &e, &V));
    if (!v.epsilon) epsilon = e;
    if (!v.length) length = 2.0 * std::sqrt(static_cast<double>(s.dim)) * V;
    half = 2.0 * V;
  }
  if (!v.region.empty()) {
    box_from_pairs(v.region, s.dim, "--region", s.region_lo, s.region_hi);
  } else {
    if (half == 0.0) half = v.curve ? 2.0 * v.ladder_max : 2.0 * length;
    if (!(half > 0.0)) usage("--region, --length or --schedule-j is required");
    for (std::size_t a = 0; a < s.dim; ++a) {
      s.region_lo[a] = -half;
      s.region_hi[a] = half;
    }
  }

  ordered_json j;
  j["construction"] = v.forest.construction;
  j["d"] = s.dim;
  j["seed"] = s.seed;
  j["count"] = s.count;
  j["placement"] = v.curve ? "anchored" : v.placement;
  j["region_lo"] = coords(s.region_lo, s.dim);
  j["region_hi"] = coords(s.region_hi, s.dim);

  if (!v.curve) {
    if (!(epsilon > 0.0)) usage("--epsilon (or --schedule-j) is required");
    if (!(length > 0.0)) usage("--length (or --schedule-j) is required");
    s.length = length;
    dz_visibility_report rep{};
    check(dz_visibility_probe(f.get(), &s, epsilon, threads, &rep));
    j["epsilon"] = rep.epsilon;
    j["segment_length"] = rep.segment_length;
    j["segments"] = rep.segments;
    j["worst_min_distance"] = rep.worst_min_distance;
    j["witness_index"] = rep.witness_index;
    j["witness_a"] = coords(rep.witness_a, s.dim);
    j["witness_b"] = coords(rep.witness_b, s.dim);
    j["pass"] = rep.pass != 0;
    write_json(out, j);
    return rep.pass ? kPass : kCheckFailed;
  }

  std::vector<double> eps = v.epsilons;
  if (eps.empty()) {
    for (int k = 1; k <= 6; ++k) eps.push_back(std::ldexp(1.0, -k));
  }
  s.length = v.ladder_min;
  std::vector<dz_curve_point> pts(eps.size());
  dz_curve_summary sum{};
  check(dz_visibility_curve(f.get(), &s, eps.data(), eps.size(), v.ladder_min, v.ladder_max, v.ladder_factor,
                            v.dominance_power, threads, pts.data(), &sum));
  ordered_json rows = ordered_json::array();
  std::string csv = "epsilon,length\n";
  for (const auto& p : pts) {
    rows.push_back({{"epsilon", p.epsilon},
                    {"min_length", p.bounded ? ordered_json(p.min_length) : ordered_json(nullptr)}});
    csv += fmt(p.epsilon) + "," + (p.bounded ? fmt(p.min_length) : std::string("inf")) + "\n";
  }
  j["ladder"] = {{"min", v.ladder_min}, {"max", v.ladder_max}, {"factor", v.ladder_factor}};
  j["points"] = rows;
  j["monotone"] = sum.monotone != 0;
  j["baseline_constant"] = sum.baseline_constant;
  j["baseline_ok"] = sum.baseline_ok != 0;
  if (v.dominance_power > 0.0) {
    j["dominance_power"] = v.dominance_power;
    j["dominance_constant"] = sum.dominance_constant;
  }
  const bool pass = sum.monotone && sum.baseline_ok;
  j["pass"] = pass;
  if (!v.csv.empty()) write_text(v.csv, csv);
  write_json(out, j);
  return pass ? kPass : kCheckFailed;
}

// ---- netcheck ---------------------------------------------------------------

struct NetcheckArgs {
  std::size_t dim = 2;
  int n = 1;
  int resolution = 4;
  std::uint64_t budget = 0;
};

int run_netcheck(const NetcheckArgs& a, unsigned threads, const std::string& out) {
  dz_net_info info{};
  dz_pointset* raw = nullptr;
  check(dz_epsilon_net(a.dim, a.n, a.budget, &info, &raw));
  PointSet ps(raw);
  ordered_json j = net_json(info);
  double lo[DZ_MAX_DIM] = {};
  double hi[DZ_MAX_DIM] = {};
  double area = 0.0;
  bool certifying = true;
  if (a.dim == 2) {
    check(dz_largest_empty_rectangle(ps.get(), &area, lo, hi));
    j["method"] = "exact";
  } else {
    int cert = 0;
    check(dz_empty_box_search(ps.get(), a.resolution, threads, &area, lo, hi, &cert));
    certifying = cert != 0;
    j["method"] = "grid search";
    j["resolution_log2"] = a.resolution;
  }
  j["max_empty_area"] = area;
  j["box_lo"] = coords(lo, a.dim);
  j["box_hi"] = coords(hi, a.dim);
  j["certifying"] = certifying;
  const bool pass = area < info.epsilon;
  j["pass"] = pass;
  write_json(out, j);
  return pass ? kPass : kCheckFailed;
}

// ---- dispersion -------------------------------------------------------------

struct DispersionArgs {
  bool exact = false;
  bool perturbed = false;
  bool delta = false;
  bool block_verify = false;
  bool w_constants = false;
  std::string seq = "sud";
  std::uint64_t N = 0;
  std::vector<double> values;
  std::uint64_t m = 0;
  double xi = 0.0;
  std::uint64_t m_max = 0;
  unsigned xi_log2 = 8;
  int i = 1;
  std::vector<std::uint64_t> mutate;
  std::uint64_t mutate_value = 0;
  std::uint64_t grid_budget = 0;
  std::uint64_t continuum_budget = 0;
  double epsilon = 0.0;
};

dz_dyadic dyadic_term(const std::string& seq, std::uint64_t n) {
  dz_dyadic d{};
  check(seq == "interleave" ? dz_interleave(n, &d) : dz_u_value(n, &d));
  return d;
}

int run_dispersion(const DispersionArgs& a, unsigned threads, const std::string& out) {
  const int modes = a.exact + a.perturbed + a.delta + a.block_verify + a.w_constants;
  if (modes != 1) usage("choose exactly one of --exact, --perturbed, --delta, --block-verify, --w-constants");
  ordered_json j;
  if (a.exact) {
    j["mode"] = "exact";
    if (!a.values.empty()) {
      double r = 0.0;
      check(dz_exact_dispersion_real(a.values.data(), a.values.size(), &r));
      j["count"] = a.values.size();
      j["dispersion"] = r;
    } else {
      if (a.N < 1) usage("--N or --values is required");
      j["seq"] = a.seq;
      j["N"] = a.N;
      if (a.seq == "golden") {
        std::vector<double> v(a.N);
        for (std::uint64_t n = 1; n <= a.N; ++n) check(dz_golden(n, &v[n - 1]));
        double r = 0.0;
        check(dz_exact_dispersion_real(v.data(), v.size(), &r));
        j["dispersion"] = r;
      } else {
        std::vector<dz_dyadic> v(a.N);
        for (std::uint64_t n = 1; n <= a.N; ++n) v[n - 1] = dyadic_term(a.seq, n);
        dz_dyadic r{};
        check(dz_exact_dispersion(v.data(), v.size(), &r));
        j["dispersion"] = dyadic_json(r);
      }
    }
    write_json(out, j);
    return kPass;
  }
  if (a.perturbed) {
    if (a.N < 1) usage("--N is required");
    j["mode"] = "perturbed";
    j["seq"] = a.seq;
    j["N"] = a.N;
    j["m"] = a.m;
    if (a.seq == "golden") {
      double r = 0.0;
      check(dz_perturbed_dispersion_golden(a.N, a.m, a.xi, &r));
      j["xi"] = a.xi;
      j["dispersion"] = r;
    } else if (a.seq == "sud") {
      const dz_dyadic xi = to_dyadic(a.xi);
      dz_dyadic r{};
      check(dz_perturbed_dispersion_sud(a.N, a.m, xi, &r));
      j["xi"] = dyadic_json(xi);
      j["dispersion"] = dyadic_json(r);
    } else {
      usage("--perturbed supports --seq sud or golden");
    }
    write_json(out, j);
    return kPass;
  }
  if (a.delta) {
    if (a.N < 1) usage("--N is required");
    if (a.seq != "sud") usage("--delta supports --seq sud");
    dz_dyadic value{};
    dz_dyadic xi{};
    std::uint64_t m = 0;
    check(dz_delta_lower_bound_sud(a.N, a.m_max, a.xi_log2, &value, &m, &xi));
    j["mode"] = "delta lower bound";
    j["N"] = a.N;
    j["m_max"] = a.m_max;
    j["xi_log2"] = a.xi_log2;
    j["value"] = dyadic_json(value);
    j["argmax_m"] = m;
    j["argmax_xi"] = dyadic_json(xi);
    write_json(out, j);
    return kPass;
  }
  if (a.w_constants) {
    int i = 0;
    double lemma = 0.0;
    double theorem = 0.0;
    check(dz_w_constants(a.epsilon, &i, &lemma, &theorem));
    j["mode"] = "w constants";
    j["epsilon"] = a.epsilon;
    j["i"] = i;
    j["lemma"] = lemma;
    j["theorem"] = theorem;
    write_json(out, j);
    return kPass;
  }

  dz_block_options opt{a.grid_budget, a.continuum_budget, threads};
  dz_block_report rep{};
  j["mode"] = "block verify";
  if (a.mutate.empty()) {
    check(dz_block_verify(a.i, &opt, &rep));
  } else {
    std::size_t len = 0;
    check(dz_block_values(a.i, nullptr, 0, &len));
    std::vector<std::uint64_t> nums(len);
    check(dz_block_values(a.i, nums.data(), nums.size(), &len));
    for (auto k : a.mutate) {
      if (k < 1 || k > len) usage("--mutate position outside [1, " + std::to_string(len) + "]");
      nums[k - 1] = a.mutate_value;
    }
    check(dz_block_verify_values(a.i, nums.data(), nums.size(), &opt, &rep));
    j["mutated_positions"] = a.mutate;
    j["mutated_value"] = a.mutate_value;
  }
  j["i"] = rep.i;
  j["u"] = rep.u;
  j["block_length"] = rep.block_length;
  j["window_defect"] = dyadic_json(rep.window_defect);
  j["window_check"] = rep.window_check != 0;
  j["grid_evaluated"] = rep.grid_evaluated != 0;
  if (rep.grid_evaluated) {
    j["grid_defect"] = dyadic_json(rep.grid_defect);
    j["grid_check"] = rep.grid_check != 0;
  }
  j["continuum_bound"] = rep.continuum_bound;
  j["continuum_lower"] = dyadic_json(rep.continuum_lower);
  j["continuum_complete"] = rep.continuum_complete != 0;
  j["cell_depth"] = rep.cell_depth;
  j["cells"] = rep.cells;
  j["work"] = rep.work;
  j["route"] = rep.route;
  j["pass"] = rep.pass != 0;
  j["certified_bound"] = rep.pass ? ordered_json(rep.certified_bound) : ordered_json(nullptr);
  write_json(out, j);
  return rep.pass ? kPass : kCheckFailed;
}

// ---- density ----------------------------------------------------------------

struct DensityArgs {
  ForestFlags forest;
  std::vector<double> T;
  std::uint64_t budget = 0;
};

int run_density(const DensityArgs& a, const std::string& out) {
  const Forest f = make_forest(a.forest);
  std::vector<double> T = a.T;
  if (T.empty()) {
    for (double t = 4.0; t <= 512.0; t *= 2.0) T.push_back(t);
  }
  std::vector<dz_growth_row> rows(T.size());
  dz_growth_summary sum{};
  check(dz_growth_fit(f.get(), T.data(), T.size(), a.budget, rows.data(), &sum));
  const bool has_bound = dz_forest_get_kind(f.get()) == DZ_FOREST_LATTICE && dz_forest_schedule_size(f.get()) > 0;
  bool pass = true;
  ordered_json jr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row = {{"T", r.T}, {"count", r.count}, {"per_volume", r.per_volume},
                        {"per_volume_log", r.per_volume_log}};
    if (has_bound) {
      int jT = 0;
      double bound = 0.0;
      check(dz_forest_density_index(f.get(), r.T, &jT));
      check(dz_forest_density_bound(f.get(), jT, &bound));
      const bool ok = r.per_volume <= bound;
      row["density_index"] = jT;
      row["series_bound"] = bound;
      row["within_bound"] = ok;
      pass = pass && ok;
    }
    jr.push_back(row);
  }
  ordered_json j;
  j["construction"] = a.forest.construction;
  j["d"] = dz_forest_dim(f.get());
  j["rows"] = jr;
  j["band_volume"] = sum.band_volume;
  j["band_volume_log"] = sum.band_volume_log;
  j["max_per_volume"] = sum.max_per_volume;
  j["max_per_volume_log"] = sum.max_per_volume_log;
  j["pass"] = pass;
  write_json(out, j);
  return pass ? kPass : kCheckFailed;
}

// ---- seq --------------------------------------------------------------------

struct SeqArgs {
  std::uint64_t from = 1;
  std::uint64_t to = 64;
  std::string kind = "u";
};

int run_seq(const SeqArgs& a, const std::string& out) {
  if (a.from < 1 || a.to < a.from) usage("need 1 <= --from <= --to");
  std::string text;
  for (std::uint64_t n = a.from;; ++n) {
    const dz_dyadic d = dyadic_term(a.kind == "interleave" ? "interleave" : "sud", n);
    text += std::to_string(n) + "," + std::to_string(d.numerator) + "," + std::to_string(d.log2_denominator) + "\n";
    if (n == a.to) break;
  }
  write_text(out, text);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense forests, optical nets and super-uniform sequences"};
  app.require_subcommand(1);
  unsigned threads = 1;
  std::string out = "-";
  app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it");
  app.add_option("--out", out, "Output file, - for stdout");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Emit a point CSV");
  add_forest_flags(g, gen.forest, {"corollary", "optical", "net", "peres-golden", "peres-sud"});
  g->add_option("--n", gen.n, "Net index n for --construction net");
  g->add_option("--window", gen.window, "lo hi per axis")->expected(4, 2 * DZ_MAX_DIM);
  g->add_option("--budget", gen.budget, "Point budget (0 = default)");
  g->add_option("--report", gen.report, "JSON net report path for --construction net");

  VisibilityArgs vis;
  auto* v = app.add_subcommand("visibility", "Segment visibility probe or empirical curve");
  add_forest_flags(v, vis.forest, {"corollary", "optical", "peres-golden", "peres-sud"});
  v->add_option("--seed", vis.seed, "Sampler seed");
  v->add_option("--count", vis.count, "Random segments");
  v->add_option("--length", vis.length, "Segment length");
  v->add_option("--epsilon", vis.epsilon, "Distance threshold");
  v->add_option("--region", vis.region, "lo hi per axis")->expected(4, 2 * DZ_MAX_DIM);
  v->add_flag("--no-adversarial", vis.no_adversarial, "Random segments only");
  v->add_option("--placement", vis.placement, "Segment placement")->check(CLI::IsMember({"inside", "anchored"}));
  v->add_option("--schedule-j", vis.schedule_j, "Use schedule entry j: eps = e_j, length = 2 sqrt(d) V_j")
      ->check(CLI::PositiveNumber);
  v->add_flag("--curve", vis.curve, "Measure the smallest passing length per epsilon");
  v->add_option("--epsilons", vis.epsilons, "Decreasing epsilons for --curve");
  v->add_option("--ladder-min", vis.ladder_min, "Smallest ladder length");
  v->add_option("--ladder-max", vis.ladder_max, "Largest ladder length");
  v->add_option("--ladder-factor", vis.ladder_factor, "Ladder ratio");
  v->add_option("--dominance-power", vis.dominance_power, "Report max length * eps^p");
  v->add_option("--csv", vis.csv, "Curve CSV path (epsilon,length)");

  NetcheckArgs net;
  auto* nc = app.add_subcommand("netcheck", "Largest empty box of an epsilon-net");
  nc->add_option("--dim", net.dim, "Dimension d")->check(CLI::Range(2, DZ_MAX_DIM));
  nc->add_option("--n", net.n, "Net index n")->check(CLI::PositiveNumber);
  nc->add_option("--resolution", net.resolution, "log2 grid resolution for d >= 3")->check(CLI::Range(0, 10));
  nc->add_option("--budget", net.budget, "Point budget (0 = default)");

  DispersionArgs dis;
  auto* ds = app.add_subcommand("dispersion", "Dispersion, perturbed dispersion and block verification");
  ds->add_flag("--exact", dis.exact, "Dispersion of the first N terms or of --values");
  ds->add_flag("--perturbed", dis.perturbed, "Dispersion of a_{i+m} - i xi");
  ds->add_flag("--delta", dis.delta, "Grid lower bound for the super-uniform dispersion");
  ds->add_flag("--block-verify", dis.block_verify, "Certify the block dispersion bound");
  ds->add_flag("--w-constants", dis.w_constants, "Visibility constants of the interleaved sequence");
  ds->add_option("--seq", dis.seq, "Sequence")->check(CLI::IsMember({"sud", "interleave", "golden"}));
  ds->add_option("--N", dis.N, "Number of terms");
  ds->add_option("--values", dis.values, "Explicit torus points");
  ds->add_option("--m", dis.m, "Index shift");
  ds->add_option("--xi", dis.xi, "Slope xi (dyadic for sud)");
  ds->add_option("--m-max", dis.m_max, "Largest shift for --delta");
  ds->add_option("--xi-log2", dis.xi_log2, "xi grid 2^-k for --delta");
  ds->add_option("--i", dis.i, "Block index")->check(CLI::PositiveNumber);
  ds->add_option("--mutate", dis.mutate, "Block positions (1-based) to overwrite");
  ds->add_option("--mutate-value", dis.mutate_value, "Numerator written at mutated positions");
  ds->add_option("--grid-budget", dis.grid_budget, "Grid check budget (0 = default)");
  ds->add_option("--continuum-budget", dis.continuum_budget, "Cell certificate budget (0 = default)");
  ds->add_option("--epsilon", dis.epsilon, "Epsilon for --w-constants");

  DensityArgs den;
  auto* dn = app.add_subcommand("density", "Exact ball counts and growth fit");
  add_forest_flags(dn, den.forest, {"corollary", "optical", "peres-golden", "peres-sud"});
  dn->add_option("--T", den.T, "Increasing radii > 1");
  dn->add_option("--budget", den.budget, "Point budget (0 = default)");

  SeqArgs seq;
  auto* sq = app.add_subcommand("seq", "Dump sequence terms as index,value_numerator,value_log2_denominator");
  sq->add_option("--from", seq.from, "First index");
  sq->add_option("--to", seq.to, "Last index");
  sq->add_option("--kind", seq.kind, "u (closed form) or interleave")->check(CLI::IsMember({"u", "interleave"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*g) return run_gen(gen, out);
    if (*v) return run_visibility(vis, threads, out);
    if (*nc) return run_netcheck(net, threads, out);
    if (*ds) return run_dispersion(dis, threads, out);
    if (*dn) return run_density(den, out);
    if (*sq) return run_seq(seq, out);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
