#include "danzer/danzer.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>

#include "danzer/errors.hpp"
#include "danzer/lattice_forest.hpp"
#include "danzer/optical_net.hpp"
#include "danzer/peres.hpp"
#include "danzer/sud.hpp"
#include "danzer/verifiers.hpp"

namespace dz = danzer;

struct dz_pointset {
  dz::PointSet set;
};

struct dz_forest {
  dz_forest_kind kind;
  std::unique_ptr<dz::PointSource> source;
  const dz::LatticeForest* lattice = nullptr;
  const dz::PeresForest* peres = nullptr;
  const dz::FinitePointSource* finite = nullptr;
};

namespace {

thread_local std::string last_error;

dz_status fail(dz_status s, const char* what) {
  last_error = what;
  return s;
}

template <typename Fn>
dz_status guard(Fn&& fn) noexcept {
  try {
    fn();
    return DZ_OK;
  } catch (const dz::BudgetExceeded& e) {
    return fail(DZ_ERR_BUDGET_EXCEEDED, e.what());
  } catch (const dz::OverflowError& e) {
    return fail(DZ_ERR_OVERFLOW, e.what());
  } catch (const dz::Infeasible& e) {
    return fail(DZ_ERR_INFEASIBLE, e.what());
  } catch (const dz::InvalidArgument& e) {
    return fail(DZ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DZ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DZ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DZ_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw dz::InvalidArgument(what);
}

dz::EnumerateOptions budget_options(std::uint64_t budget) {
  dz::EnumerateOptions opt;
  if (budget > 0) opt.budget = budget;
  return opt;
}

dz::AxisBox make_box(std::size_t dim, const double* lo, const double* hi) {
  require(lo != nullptr && hi != nullptr, "box bounds must not be null");
  return dz::AxisBox(dz::Point(std::vector<double>(lo, lo + dim)), dz::Point(std::vector<double>(hi, hi + dim)));
}

dz_forest* wrap_lattice(dz::ForestSpec spec) {
  auto f = std::make_unique<dz_forest>();
  f->kind = DZ_FOREST_LATTICE;
  auto src = std::make_unique<dz::LatticeForest>(std::move(spec));
  f->lattice = src.get();
  f->source = std::move(src);
  return f.release();
}

dz_forest* wrap_peres(dz::TorusSequence seq) {
  auto f = std::make_unique<dz_forest>();
  f->kind = DZ_FOREST_PERES;
  auto src = std::make_unique<dz::PeresForest>(std::move(seq));
  f->peres = src.get();
  f->source = std::move(src);
  return f.release();
}

const dz::ForestSpec& lattice_spec(const dz_forest* f) {
  require(f != nullptr, "forest handle must not be null");
  if (!f->lattice) throw dz::InvalidArgument("operation needs a lattice forest");
  return f->lattice->spec();
}

dz::PointSet points_in_box(const dz_forest* f, const dz::AxisBox& box, std::uint64_t budget) {
  const auto opt = budget_options(budget);
  switch (f->kind) {
    case DZ_FOREST_LATTICE:
      return dz::enumerate_points(f->lattice->spec(), box, opt);
    case DZ_FOREST_PERES:
      return dz::peres_points(f->peres->sequence(), box, opt);
    case DZ_FOREST_FINITE: {
      dz::PointSet out(f->finite->dim());
      const auto& pts = f->finite->points();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (box.contains(pts[i])) out.push_back(pts[i]);
      }
      return out;
    }
  }
  throw dz::InvalidArgument("unknown forest kind");
}

std::uint64_t ball_count(const dz_forest* f, double T, std::uint64_t budget) {
  require(T > 0.0, "ball radius must be positive");
  if (f->kind == DZ_FOREST_LATTICE) return dz::count_in_ball(f->lattice->spec(), T, budget_options(budget));
  const auto pts = points_in_box(f, dz::AxisBox::cube(f->source->dim(), -T, T), budget);
  const double r2 = (T + dz::kTolerance) * (T + dz::kTolerance);
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double s = 0.0;
    for (double x : pts[i]) s += x * x;
    if (s <= r2) ++n;
  }
  return n;
}

dz::SegmentSamplerConfig sampler_config(const dz_forest* f, const dz_sampler* s) {
  require(s != nullptr, "sampler must not be null");
  require(s->dim >= 2 && s->dim <= DZ_MAX_DIM, "sampler dimension out of range");
  require(s->dim == f->source->dim(), "sampler dimension does not match the forest");
  dz::SegmentSamplerConfig cfg;
  cfg.seed = s->seed;
  cfg.count = s->count;
  cfg.length = s->length;
  cfg.region = make_box(s->dim, s->region_lo, s->region_hi);
  cfg.include_adversarial = s->include_adversarial != 0;
  cfg.placement = s->placement == DZ_PLACE_ANCHORED ? dz::Placement::kAnchored : dz::Placement::kInside;
  cfg.hyperplanes = f->source->hyperplane_hints();
  return cfg;
}

dz_dyadic to_c(const dz::DyadicRational& r) { return {r.numerator(), r.log2_denominator()}; }

dz::DyadicRational from_c(const dz_dyadic& r) {
  require(r.log2_denominator <= dz::DyadicRational::kMaxLog2Denominator, "dyadic denominator exceeds 2^63");
  return dz::DyadicRational(r.numerator, r.log2_denominator);
}

void fill_block_report(const dz::BlockVerifyReport& r, dz_block_report* out) {
  *out = dz_block_report{};
  out->i = r.i;
  out->u = r.u;
  out->block_length = r.block_length;
  out->window_defect = to_c(r.window_defect);
  out->window_check = r.window_check;
  out->grid_evaluated = r.grid_evaluated;
  out->grid_defect = to_c(r.grid_defect);
  out->grid_check = r.grid_check;
  out->continuum_bound = r.continuum_bound;
  out->continuum_lower = to_c(r.continuum_lower);
  out->continuum_complete = r.continuum_complete;
  out->cell_depth = r.cell_depth;
  out->cells = r.cells;
  out->work = r.work;
  std::snprintf(out->route, sizeof out->route, "%s", r.route.c_str());
  out->pass = r.pass;
  out->certified_bound = r.certified_bound.value_or(0.0);
}

dz::BlockVerifyOptions block_options(const dz_block_options* opt) {
  dz::BlockVerifyOptions o;
  if (opt) {
    if (opt->grid_budget) o.grid_budget = opt->grid_budget;
    if (opt->continuum_budget) o.continuum_budget = opt->continuum_budget;
    o.threads = opt->threads;
  }
  return o;
}

}  // namespace

extern "C" {

const char* dz_last_error(void) { return last_error.c_str(); }

const char* dz_version(void) { return "1.0.0"; }

// ---- point sets -------------------------------------------------------------

dz_status dz_pointset_create(size_t dim, const double* flat, size_t count, dz_pointset** out) {
  return guard([&] {
    require(out != nullptr, "output handle must not be null");
    require(dim >= 1, "dimension must be positive");
    require(count == 0 || flat != nullptr, "coordinates must not be null");
    std::vector<double> v(flat, flat + dim * count);
    *out = new dz_pointset{dz::PointSet(dim, std::move(v))};
  });
}

void dz_pointset_free(dz_pointset* ps) { delete ps; }

size_t dz_pointset_dim(const dz_pointset* ps) { return ps ? ps->set.dim() : 0; }

size_t dz_pointset_size(const dz_pointset* ps) { return ps ? ps->set.size() : 0; }

const double* dz_pointset_data(const dz_pointset* ps) { return ps ? ps->set.flat().data() : nullptr; }

dz_status dz_pointset_write_csv(const dz_pointset* ps, const char* path) {
  return guard([&] {
    require(ps != nullptr, "point set handle must not be null");
    if (path == nullptr || std::strcmp(path, "-") == 0) {
      dz::write_point_csv(std::cout, ps->set);
      std::cout.flush();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw dz::InvalidArgument(std::string("cannot open output file ") + path);
    dz::write_point_csv(f, ps->set);
    if (!f) throw dz::InvalidArgument(std::string("failed writing ") + path);
  });
}

// ---- forests ----------------------------------------------------------------

dz_status dz_forest_corollary(size_t dim, double eta, dz_forest** out) {
  return guard([&] {
    require(out != nullptr, "output handle must not be null");
    *out = wrap_lattice(dz::corollary_forest_spec(dim, eta));
  });
}

dz_status dz_forest_theorem(size_t dim, const double* epsilon, const double* visibility, size_t count,
                            double tail_bound, dz_forest** out) {
  return guard([&] {
    require(out != nullptr, "output handle must not be null");
    require(count == 0 || (epsilon != nullptr && visibility != nullptr), "schedule arrays must not be null");
    std::vector<dz::ScheduleEntry> sched;
    for (size_t j = 0; j < count; ++j) sched.push_back({epsilon[j], visibility[j]});
    *out = wrap_lattice(dz::theorem_forest_spec(dim, std::move(sched), tail_bound));
  });
}

dz_status dz_forest_optical(size_t dim, dz_forest** out) {
  return guard([&] {
    require(out != nullptr, "output handle must not be null");
    *out = wrap_lattice(dz::optical_forest_spec(dim));
  });
}

dz_status dz_forest_peres(dz_sequence_kind kind, dz_forest** out) {
  return guard([&] {
    require(out != nullptr, "output handle must not be null");
    require(kind == DZ_SEQ_GOLDEN || kind == DZ_SEQ_SUD, "unknown sequence kind");
    *out = wrap_peres(kind == DZ_SEQ_GOLDEN ? dz::TorusSequence::golden() : dz::TorusSequence::sud_digital());
  });
}

dz_status dz_forest_peres_user(const double* values, size_t count, dz_forest** out) {
  return guard([&] {
    require(out != nullptr, "output handle must not be null");
    require(count == 0 || values != nullptr, "values must not be null");
    *out = wrap_peres(dz::TorusSequence::user(std::vector<double>(values, values + count)));
  });
}

dz_status dz_forest_from_points(const dz_pointset* ps, dz_forest** out) {
  return guard([&] {
    require(out != nullptr && ps != nullptr, "handles must not be null");
    require(ps->set.dim() >= 2, "point sets need dimension at least 2");
    auto f = std::make_unique<dz_forest>();
    f->kind = DZ_FOREST_FINITE;
    auto src = std::make_unique<dz::FinitePointSource>(ps->set);
    f->finite = src.get();
    f->source = std::move(src);
    *out = f.release();
  });
}

void dz_forest_free(dz_forest* f) { delete f; }

size_t dz_forest_dim(const dz_forest* f) { return f ? f->source->dim() : 0; }

dz_forest_kind dz_forest_get_kind(const dz_forest* f) { return f ? f->kind : DZ_FOREST_FINITE; }

size_t dz_forest_schedule_size(const dz_forest* f) {
  return f && f->lattice ? f->lattice->spec().schedule().size() : 0;
}

dz_status dz_forest_schedule_entry(const dz_forest* f, size_t j, double* epsilon, double* visibility) {
  return guard([&] {
    const auto& sched = lattice_spec(f).schedule();
    require(j >= 1 && j <= sched.size(), "schedule index out of range");
    if (epsilon) *epsilon = sched[j - 1].epsilon;
    if (visibility) *visibility = sched[j - 1].visibility;
  });
}

dz_status dz_forest_visibility(const dz_forest* f, double epsilon, double* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = lattice_spec(f).visibility(epsilon);
  });
}

dz_status dz_forest_density_index(const dz_forest* f, double T, int* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = lattice_spec(f).density_index(T);
  });
}

dz_status dz_forest_density_bound(const dz_forest* f, int j_max, double* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = dz::series_density_bound(lattice_spec(f), j_max);
  });
}

dz_status dz_forest_tail_bound(const dz_forest* f, double* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = lattice_spec(f).tail_bound();
  });
}

dz_status dz_forest_hyperplanes(const dz_forest* f, double* out, size_t cap, size_t* count) {
  return guard([&] {
    require(f != nullptr && count != nullptr, "handles must not be null");
    const auto h = f->source->hyperplane_hints();
    *count = h.size();
    if (out) {
      for (size_t i = 0; i < std::min(cap, h.size()); ++i) out[i] = h[i];
    }
  });
}

dz_status dz_forest_enumerate(const dz_forest* f, const double* lo, const double* hi, uint64_t budget,
                              dz_pointset** out) {
  return guard([&] {
    require(f != nullptr && out != nullptr, "handles must not be null");
    const auto box = make_box(f->source->dim(), lo, hi);
    *out = new dz_pointset{points_in_box(f, box, budget)};
  });
}

dz_status dz_forest_count_in_ball(const dz_forest* f, double T, uint64_t budget, uint64_t* out) {
  return guard([&] {
    require(f != nullptr && out != nullptr, "handles must not be null");
    *out = ball_count(f, T, budget);
  });
}

// ---- nets -------------------------------------------------------------------

dz_status dz_epsilon_net(size_t dim, int n, uint64_t budget, dz_net_info* info, dz_pointset** out) {
  return guard([&] {
    auto net = dz::epsilon_net(dim, n, budget_options(budget));
    if (info) *info = {net.spec.dim, net.spec.n, net.spec.epsilon, net.spec.tau, net.cardinality, net.bound_ratio};
    if (out) *out = new dz_pointset{std::move(net.points)};
  });
}

dz_status dz_net_index_for_epsilon(size_t dim, double epsilon, int* n) {
  return guard([&] {
    require(n != nullptr, "output must not be null");
    *n = dz::net_index_for_epsilon(dim, epsilon);
  });
}

// ---- verifiers --------------------------------------------------------------

dz_status dz_visibility_probe(const dz_forest* f, const dz_sampler* sampler, double epsilon, unsigned threads,
                              dz_visibility_report* out) {
  return guard([&] {
    require(f != nullptr && out != nullptr, "handles must not be null");
    const auto segs = dz::sample_segments(sampler_config(f, sampler));
    const auto rep = dz::visibility_probe(*f->source, segs, epsilon, {threads, false});
    *out = dz_visibility_report{};
    out->epsilon = rep.epsilon;
    out->segment_length = rep.segment_length;
    out->worst_min_distance = rep.worst_min_distance;
    out->witness_index = rep.witness_index;
    out->segments = rep.segments;
    out->pass = rep.pass;
    if (rep.witness_segment) {
      for (size_t a = 0; a < rep.witness_segment->dim(); ++a) {
        out->witness_a[a] = rep.witness_segment->a()[a];
        out->witness_b[a] = rep.witness_segment->b()[a];
      }
    }
  });
}

dz_status dz_visibility_curve(const dz_forest* f, const dz_sampler* sampler, const double* epsilons, size_t count,
                              double ladder_min, double ladder_max, double ladder_factor, double dominance_power,
                              unsigned threads, dz_curve_point* out, dz_curve_summary* summary) {
  return guard([&] {
    require(f != nullptr && out != nullptr && summary != nullptr, "handles must not be null");
    require(count == 0 || epsilons != nullptr, "epsilons must not be null");
    std::optional<double> power;
    if (dominance_power > 0.0) power = dominance_power;
    const auto curve = dz::empirical_visibility_curve(*f->source, sampler_config(f, sampler),
                                                      std::span<const double>(epsilons, count),
                                                      {ladder_min, ladder_max, ladder_factor}, {threads, true}, power);
    for (size_t i = 0; i < curve.points.size(); ++i) {
      out[i] = {curve.points[i].epsilon, curve.points[i].min_length.value_or(0.0),
                curve.points[i].min_length.has_value()};
    }
    *summary = {curve.monotone, curve.baseline_constant, curve.baseline_ok, curve.dominance_constant.value_or(0.0)};
  });
}

dz_status dz_largest_empty_rectangle(const dz_pointset* ps, double* area, double* lo, double* hi) {
  return guard([&] {
    require(ps != nullptr && area != nullptr, "handles must not be null");
    const auto r = dz::largest_empty_rectangle_2d(ps->set);
    *area = r.volume;
    for (size_t a = 0; a < 2; ++a) {
      if (lo) lo[a] = r.box.lo()[a];
      if (hi) hi[a] = r.box.hi()[a];
    }
  });
}

dz_status dz_empty_box_search(const dz_pointset* ps, int resolution_log2, unsigned threads, double* volume,
                              double* lo, double* hi, int* certifying) {
  return guard([&] {
    require(ps != nullptr && volume != nullptr, "handles must not be null");
    const auto r = dz::empty_box_search_nd(ps->set, resolution_log2, threads);
    *volume = r.best.volume;
    for (size_t a = 0; a < ps->set.dim(); ++a) {
      if (lo) lo[a] = r.best.box.lo()[a];
      if (hi) hi[a] = r.best.box.hi()[a];
    }
    if (certifying) *certifying = r.certifying;
  });
}

dz_status dz_growth_fit(const dz_forest* f, const double* T, size_t count, uint64_t budget, dz_growth_row* rows,
                        dz_growth_summary* summary) {
  return guard([&] {
    require(f != nullptr && rows != nullptr && summary != nullptr, "handles must not be null");
    require(count == 0 || T != nullptr, "ladder must not be null");
    const auto rep = dz::growth_fit([&](double t) { return ball_count(f, t, budget); },
                                    std::span<const double>(T, count), f->source->dim());
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      rows[i] = {rep.rows[i].T, rep.rows[i].count, rep.rows[i].per_volume, rep.rows[i].per_volume_log};
    }
    *summary = {rep.band_volume, rep.band_volume_log, rep.max_per_volume, rep.max_per_volume_log};
  });
}

// ---- sequences --------------------------------------------------------------

dz_status dz_decompose_index(uint64_t n, int* i, uint64_t* k) {
  return guard([&] {
    require(i != nullptr && k != nullptr, "outputs must not be null");
    const auto d = dz::decompose_index(n);
    *i = d.i;
    *k = d.k;
  });
}

dz_status dz_recompose_index(int i, uint64_t k, uint64_t* n) {
  return guard([&] {
    require(n != nullptr, "output must not be null");
    *n = dz::recompose_index({i, k});
  });
}

dz_status dz_block_decompose(uint64_t k, int i, uint64_t* r, uint64_t* s) {
  return guard([&] {
    require(r != nullptr && s != nullptr, "outputs must not be null");
    const auto b = dz::block_decompose(k, i);
    *r = b.r;
    *s = b.s;
  });
}

dz_status dz_u_value(uint64_t n, dz_dyadic* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = to_c(dz::u_value(n));
  });
}

dz_status dz_interleave(uint64_t n, dz_dyadic* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = to_c(dz::interleave(n));
  });
}

dz_status dz_golden(uint64_t n, double* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = dz::golden_sequence(n).value();
  });
}

dz_status dz_block_values(int i, uint64_t* out, size_t cap, size_t* length) {
  return guard([&] {
    require(length != nullptr, "length output must not be null");
    const auto b = dz::block_values(i);
    *length = b.length;
    if (out) {
      require(cap >= b.length, "output buffer is shorter than the block");
      std::copy(b.numerators.begin(), b.numerators.end(), out);
    }
  });
}

dz_status dz_exact_dispersion(const dz_dyadic* points, size_t count, dz_dyadic* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    require(count == 0 || points != nullptr, "points must not be null");
    std::vector<dz::DyadicRational> v;
    v.reserve(count);
    for (size_t i = 0; i < count; ++i) v.push_back(from_c(points[i]));
    *out = to_c(dz::exact_dispersion(v));
  });
}

dz_status dz_exact_dispersion_real(const double* points, size_t count, double* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    require(count == 0 || points != nullptr, "points must not be null");
    *out = dz::exact_dispersion(std::span<const double>(points, count));
  });
}

dz_status dz_perturbed_dispersion_sud(uint64_t N, uint64_t m, dz_dyadic xi, dz_dyadic* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = to_c(dz::perturbed_dispersion(dz::DyadicSequence(dz::u_value), {N, m, from_c(xi)}));
  });
}

dz_status dz_perturbed_dispersion_golden(uint64_t N, uint64_t m, double xi, double* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    *out = dz::perturbed_dispersion([](std::uint64_t n) { return dz::golden_sequence(n).value(); }, N, m, xi);
  });
}

dz_status dz_delta_lower_bound_sud(uint64_t N, uint64_t m_max, unsigned xi_log2, dz_dyadic* value,
                                   uint64_t* argmax_m, dz_dyadic* argmax_xi) {
  return guard([&] {
    require(value != nullptr, "output must not be null");
    const auto r = dz::delta_lower_bound(dz::DyadicSequence(dz::u_value), N, m_max, xi_log2);
    *value = to_c(r.value);
    if (argmax_m) *argmax_m = r.argmax_m;
    if (argmax_xi) *argmax_xi = to_c(r.argmax_xi);
  });
}

dz_status dz_w_constants(double epsilon, int* i, double* lemma, double* theorem) {
  return guard([&] {
    const auto w = dz::w_constants(epsilon);
    if (i) *i = w.i;
    if (lemma) *lemma = w.lemma;
    if (theorem) *theorem = w.theorem;
  });
}

dz_status dz_block_verify(int i, const dz_block_options* opt, dz_block_report* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    fill_block_report(dz::block_sud_verify(i, block_options(opt)), out);
  });
}

dz_status dz_block_verify_values(int i, const uint64_t* numerators, size_t count, const dz_block_options* opt,
                                 dz_block_report* out) {
  return guard([&] {
    require(out != nullptr, "output must not be null");
    require(count == 0 || numerators != nullptr, "numerators must not be null");
    fill_block_report(
        dz::block_sud_verify_values(i, std::span<const std::uint64_t>(numerators, count), block_options(opt)), out);
  });
}

}  // extern "C"
