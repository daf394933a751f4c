#include "danzer/verifiers.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "danzer/errors.hpp"
#include "danzer/parallel.hpp"
#include "danzer/rng.hpp"

namespace danzer {

namespace {

std::vector<double> random_direction(SplitMix64& rng, std::size_t d) {
  std::vector<double> u(d);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& x : u) {
      x = rng.normal();
      n2 += x * x;
    }
  } while (n2 < 1e-12);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : u) x *= inv;
  return u;
}

Segment make_segment(std::span<const double> start, std::span<const double> dir, double length) {
  std::vector<double> b(start.size());
  for (std::size_t a = 0; a < start.size(); ++a) b[a] = start[a] + length * dir[a];
  return Segment(Point(start), Point(std::move(b)));
}

// Segment through `centre` along `dir`; for inside placement the segment is
// centred there and must fit the region.
std::optional<Segment> placed(const SegmentSamplerConfig& cfg, std::vector<double> centre, std::span<const double> dir) {
  const double L = cfg.length;
  if (cfg.placement == Placement::kAnchored) return make_segment(centre, dir, L);
  for (std::size_t a = 0; a < centre.size(); ++a) {
    const double half = 0.5 * L * std::fabs(dir[a]);
    const double lo = cfg.region.lo()[a] + half;
    const double hi = cfg.region.hi()[a] - half;
    if (lo > hi + kTolerance) return std::nullopt;
    centre[a] = std::clamp(centre[a], lo, std::max(lo, hi)) - 0.5 * L * dir[a];
  }
  return make_segment(centre, dir, L);
}

}  // namespace

std::vector<Segment> sample_segments(const SegmentSamplerConfig& cfg) {
  const std::size_t d = cfg.region.dim();
  if (!(cfg.length > 0.0) || !std::isfinite(cfg.length)) throw InvalidArgument("segment length must be positive");
  const auto& box = cfg.region;
  std::vector<Segment> out;
  out.reserve(cfg.count);
  SplitMix64 rng(cfg.seed);
  std::vector<double> start(d);
  for (std::size_t n = 0; n < cfg.count; ++n) {
    if (cfg.placement == Placement::kAnchored) {
      for (std::size_t a = 0; a < d; ++a) start[a] = rng.uniform(box.lo()[a], box.hi()[a]);
      const auto dir = random_direction(rng, d);
      out.push_back(make_segment(start, dir, cfg.length));
      continue;
    }
    bool done = false;
    for (int attempt = 0; attempt < 1000 && !done; ++attempt) {
      const auto dir = random_direction(rng, d);
      bool fits = true;
      for (std::size_t a = 0; a < d && fits; ++a) fits = cfg.length * std::fabs(dir[a]) <= box.extent(a);
      if (!fits) continue;
      for (std::size_t a = 0; a < d; ++a) {
        const double reach = cfg.length * dir[a];
        const double lo = reach >= 0.0 ? box.lo()[a] : box.lo()[a] - reach;
        const double hi = reach >= 0.0 ? box.hi()[a] - reach : box.hi()[a];
        start[a] = rng.uniform(lo, hi);
      }
      out.push_back(make_segment(start, dir, cfg.length));
      done = true;
    }
    if (!done) throw InvalidArgument("sampling region is too small for the segment length");
  }
  if (!cfg.include_adversarial) return out;

  std::vector<double> centre(d);
  for (std::size_t a = 0; a < d; ++a) centre[a] = 0.5 * (box.lo()[a] + box.hi()[a]);
  auto at_fraction = [&](double f) {
    std::vector<double> p(d);
    for (std::size_t a = 0; a < d; ++a) p[a] = box.lo()[a] + f * box.extent(a);
    return p;
  };
  auto push = [&](std::optional<Segment> s) {
    if (s) out.push_back(std::move(*s));
  };
  constexpr double kFractions[] = {0.5, 0.25, 0.75, 0.375, 0.3125};
  for (std::size_t a = 0; a < d; ++a) {
    std::vector<double> e(d, 0.0);
    e[a] = 1.0;
    for (double f : kFractions) {
      auto p = at_fraction(f);
      if (cfg.placement == Placement::kInside) p[a] = centre[a];
      push(placed(cfg, std::move(p), e));
    }
  }
  for (std::size_t flip = 0; flip < d; ++flip) {
    std::vector<double> u(d, 1.0 / std::sqrt(static_cast<double>(d)));
    if (flip > 0) u[flip] = -u[flip];
    push(placed(cfg, centre, u));
  }
  for (double c : cfg.hyperplanes) {
    for (double sign : {1.0, -1.0}) {
      const double h = sign * c;
      for (std::size_t a = 0; a < d; ++a) {
        if (!(h > box.lo()[a] && h < box.hi()[a])) continue;
        std::vector<double> e(d, 0.0);
        e[a] = 1.0;
        for (double f : {0.5, 0.375}) {
          auto p = at_fraction(f);
          p[a] = cfg.placement == Placement::kInside ? h : h - 0.5 * cfg.length;
          push(placed(cfg, std::move(p), e));
        }
        // Parallel to the hyperplane, half a spacing off it and just beside it.
        const std::size_t b = (a + 1) % d;
        std::vector<double> eb(d, 0.0);
        eb[b] = 1.0;
        for (double off : {0.5 * c, 1e-3 * c}) {
          auto p = at_fraction(0.5);
          p[a] = h + sign * off;
          if (!(p[a] > box.lo()[a] && p[a] < box.hi()[a])) continue;
          push(placed(cfg, std::move(p), eb));
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double segment_min_distance(const PointSource& source, const Segment& s, double stop_below) {
  if (source.dim() != s.dim()) throw InvalidArgument("segment dimension does not match the point source");
  constexpr double kMaxPieces = 1 << 16;
  const SegmentQuery query(s);
  const std::size_t d = s.dim();
  const double L = s.length();
  double r = std::max(source.spacing_hint(), 1e-9);
  std::vector<double> lo(d), hi(d);
  for (int round = 0; round < 96; ++round) {
    const double piece = std::max(r, L / kMaxPieces);
    const auto pieces = static_cast<std::size_t>(std::ceil(L / piece));
    double best2 = std::numeric_limits<double>::infinity();
    bool stopped = false;
    for (std::size_t i = 0; i < pieces && !stopped; ++i) {
      const double t0 = static_cast<double>(i) / static_cast<double>(pieces);
      const double t1 = static_cast<double>(i + 1) / static_cast<double>(pieces);
      for (std::size_t a = 0; a < d; ++a) {
        const double x0 = s.a()[a] + t0 * (s.b()[a] - s.a()[a]);
        const double x1 = s.a()[a] + t1 * (s.b()[a] - s.a()[a]);
        lo[a] = std::min(x0, x1) - r;
        hi[a] = std::max(x0, x1) + r;
      }
      const AxisBox box{Point(lo), Point(hi)};
      source.visit_box(box, [&](std::span<const double> p) {
        const double d2 = query.squared_distance(p);
        if (d2 < best2) {
          best2 = d2;
          if (std::sqrt(best2) < stop_below) {
            stopped = true;
            return false;
          }
        }
        return true;
      });
    }
    if (stopped || best2 <= r * r) return std::sqrt(best2);
    r *= 2.0;
  }
  throw InvalidArgument("empty point stream: no point found near the segment");
}

VisibilityReport visibility_probe(const PointSource& source, std::span<const Segment> segments, double epsilon,
                                  const ProbeOptions& opt) {
  if (segments.empty()) throw InvalidArgument("visibility probe needs at least one segment");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const std::size_t n = segments.size();
  std::vector<double> mins(n, -1.0);
  const double limit = epsilon + kTolerance;
  VisibilityReport rep{};
  rep.epsilon = epsilon;
  rep.segments = n;
  for (const auto& s : segments) rep.segment_length = std::max(rep.segment_length, s.length());

  if (opt.fail_fast) {
    const std::size_t batch = static_cast<std::size_t>(resolve_threads(opt.threads)) * 4;
    const double stop = std::nextafter(limit, std::numeric_limits<double>::infinity());
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      parallel_for(end - begin, opt.threads,
                   [&](std::size_t i) { mins[begin + i] = segment_min_distance(source, segments[begin + i], stop); });
      for (std::size_t i = begin; i < end; ++i) {
        if (mins[i] > limit) {
          rep.worst_min_distance = mins[i];
          rep.witness_index = i;
          rep.witness_segment = segments[i];
          rep.pass = false;
          return rep;
        }
      }
    }
    // Every segment stopped at its first point within epsilon.
    const auto it = std::max_element(mins.begin(), mins.end());
    rep.worst_min_distance = *it;
    rep.witness_index = static_cast<std::size_t>(it - mins.begin());
    rep.witness_segment = segments[rep.witness_index];
    rep.pass = true;
    return rep;
  }

  // A segment can stop as soon as it finds a point strictly closer than the
  // current worst: it can no longer be the worst, and the worst stays exact.
  std::atomic<double> worst{-1.0};
  parallel_for(n, opt.threads, [&](std::size_t i) {
    const double dmin = segment_min_distance(source, segments[i], worst.load());
    mins[i] = dmin;
    double cur = worst.load();
    while (dmin > cur && !worst.compare_exchange_weak(cur, dmin)) {
    }
  });
  const auto it = std::max_element(mins.begin(), mins.end());
  rep.worst_min_distance = *it;
  rep.witness_index = static_cast<std::size_t>(it - mins.begin());
  rep.witness_segment = segments[rep.witness_index];
  rep.pass = rep.worst_min_distance <= limit;
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<double> LengthLadder::values() const {
  if (!(min_length > 0.0) || !(max_length >= min_length) || !(factor > 1.0)) {
    throw InvalidArgument("length ladder needs 0 < min <= max and factor > 1");
  }
  std::vector<double> out;
  for (double L = min_length; L <= max_length * (1.0 + 1e-12); L *= factor) out.push_back(L);
  return out;
}

VisibilityCurve empirical_visibility_curve(const PointSource& source, SegmentSamplerConfig cfg,
                                           std::span<const double> epsilons, const LengthLadder& ladder,
                                           const ProbeOptions& opt, std::optional<double> dominance_power) {
  if (epsilons.empty()) throw InvalidArgument("visibility curve needs at least one epsilon");
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) throw InvalidArgument("epsilons must be strictly decreasing");
  }
  const auto lengths = ladder.values();
  cfg.placement = Placement::kAnchored;
  std::vector<std::vector<Segment>> sets;
  sets.reserve(lengths.size());
  for (double L : lengths) {
    cfg.length = L;
    sets.push_back(sample_segments(cfg));
  }
  ProbeOptions probe = opt;
  probe.fail_fast = true;
  const auto d = static_cast<double>(source.dim());

  VisibilityCurve curve{};
  curve.monotone = true;
  curve.baseline_constant = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> prev;
  bool unbounded_before = false;
  for (double eps : epsilons) {
    auto passes = [&](std::size_t idx) { return visibility_probe(source, sets[idx], eps, probe).pass; };
    std::optional<std::size_t> found;
    if (passes(lengths.size() - 1)) {
      std::size_t lo = 0;
      std::size_t hi = lengths.size() - 1;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (passes(mid)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      found = lo;
    }
    CurvePoint pt{eps, std::nullopt};
    if (found) {
      pt.min_length = lengths[*found];
      curve.baseline_constant = std::min(curve.baseline_constant, lengths[*found] * std::pow(eps, d - 1.0));
      if (dominance_power) {
        const double c = lengths[*found] * std::pow(eps, *dominance_power);
        curve.dominance_constant = std::max(curve.dominance_constant.value_or(0.0), c);
      }
    }
    if (found && ((prev && *found < *prev) || unbounded_before)) curve.monotone = false;
    if (found) {
      prev = found;
    } else {
      unbounded_before = true;
    }
    curve.points.push_back(pt);
  }
  const bool all_finite = std::all_of(curve.points.begin(), curve.points.end(),
                                      [](const CurvePoint& p) { return p.min_length.has_value(); });
  curve.baseline_ok = all_finite && curve.baseline_constant > 0.0;
  return curve;
}

// ---------------------------------------------------------------------------

namespace {

void check_in_unit_cube(const PointSet& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (double x : points[i]) {
      if (!(x >= -0.5 && x <= 0.5)) throw InvalidArgument("points must lie in [-1/2, 1/2]^d");
    }
  }
}

AxisBox box2(double x0, double x1, double y0, double y1) { return AxisBox(Point{x0, y0}, Point{x1, y1}); }

}  // namespace

EmptyBox largest_empty_rectangle_2d(const PointSet& points) {
  if (points.dim() != 2) throw InvalidArgument("largest_empty_rectangle_2d needs planar points");
  check_in_unit_cube(points);
  const std::size_t n = points.size();
  EmptyBox best{1.0, box2(-0.5, 0.5, -0.5, 0.5)};
  if (n == 0) return best;

  std::vector<std::array<double, 2>> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = {points[i][0], points[i][1]};
  std::sort(p.begin(), p.end());
  best.volume = -1.0;
  auto consider = [&](double x0, double x1, double y0, double y1) {
    const double area = (x1 - x0) * (y1 - y0);
    if (area > best.volume && x1 > x0 && y1 > y0) best = {area, box2(x0, x1, y0, y1)};
  };

  // Full-width strips between consecutive heights.
  {
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = p[i][1];
    std::sort(ys.begin(), ys.end());
    consider(-0.5, 0.5, -0.5, ys.front());
    consider(-0.5, 0.5, ys.back(), 0.5);
    for (std::size_t i = 1; i < n; ++i) consider(-0.5, 0.5, ys[i - 1], ys[i]);
  }
  // Left edge supported by p[i]: sweep right, shrinking the vertical range.
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = p[i][0];
    const double y = p[i][1];
    double top = 0.5;
    double bottom = -0.5;
    bool blocked = false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (p[j][0] == x0) continue;
      if (p[j][1] >= top || p[j][1] <= bottom) continue;
      consider(x0, p[j][0], bottom, top);
      if (p[j][1] > y) {
        top = p[j][1];
      } else if (p[j][1] < y) {
        bottom = p[j][1];
      } else {
        blocked = true;
        break;
      }
    }
    if (!blocked) consider(x0, 0.5, bottom, top);
  }
  // Right edge supported by p[i], left edge on the wall or sweep left.
  for (std::size_t i = n; i-- > 0;) {
    const double x1 = p[i][0];
    const double y = p[i][1];
    double top = 0.5;
    double bottom = -0.5;
    bool blocked = false;
    for (std::size_t j = i; j-- > 0;) {
      if (p[j][0] == x1) continue;
      if (p[j][1] >= top || p[j][1] <= bottom) continue;
      consider(p[j][0], x1, bottom, top);
      if (p[j][1] > y) {
        top = p[j][1];
      } else if (p[j][1] < y) {
        bottom = p[j][1];
      } else {
        blocked = true;
        break;
      }
    }
    if (!blocked) consider(-0.5, x1, bottom, top);
  }
  return best;
}

EmptyBoxSearch empty_box_search_nd(const PointSet& points, int resolution_log2, unsigned threads) {
  const std::size_t d = points.dim();
  if (d < 2) throw InvalidArgument("empty box search needs d >= 2");
  if (resolution_log2 < 0 || resolution_log2 > 10) throw InvalidArgument("resolution must lie in [0, 10]");
  if (d == 2) return {largest_empty_rectangle_2d(points), resolution_log2, true};
  check_in_unit_cube(points);

  const std::uint64_t G = std::uint64_t{1} << resolution_log2;
  const double g = 1.0 / static_cast<double>(G);
  const FinitePointSource index(points);

  struct Task {
    std::size_t axis;
    std::uint64_t m;
  };
  std::vector<Task> tasks;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::uint64_t m = 1; m <= G; ++m) tasks.push_back({a, m});
  }
  struct Found {
    double volume = -1.0;
    std::vector<double> lo, hi;
  };
  std::vector<Found> found(tasks.size());

  parallel_for(tasks.size(), threads, [&](std::size_t ti) {
    const auto [axis, m] = tasks[ti];
    const double s = static_cast<double>(m) * g;
    const std::uint64_t positions = G - m + 1;
    std::vector<std::uint64_t> pos(d - 1, 0);
    std::vector<double> lo(d), hi(d), coords;
    Found& best = found[ti];
    while (true) {
      std::size_t o = 0;
      for (std::size_t b = 0; b < d; ++b) {
        if (b == axis) {
          lo[b] = -0.5;
          hi[b] = 0.5;
        } else {
          lo[b] = -0.5 + static_cast<double>(pos[o++]) * g;
          hi[b] = lo[b] + s;
        }
      }
      coords.clear();
      index.visit_box(AxisBox(Point(lo), Point(hi)), [&](std::span<const double> p) {
        for (std::size_t b = 0; b < d; ++b) {
          if (b != axis && !(p[b] > lo[b] && p[b] < hi[b])) return true;
        }
        coords.push_back(p[axis]);
        return true;
      });
      coords.push_back(-0.5);
      coords.push_back(0.5);
      std::sort(coords.begin(), coords.end());
      for (std::size_t k = 1; k < coords.size(); ++k) {
        const double vol = std::pow(s, static_cast<double>(d - 1)) * (coords[k] - coords[k - 1]);
        if (vol > best.volume && coords[k] > coords[k - 1]) {
          best.volume = vol;
          best.lo = lo;
          best.hi = hi;
          best.lo[axis] = coords[k - 1];
          best.hi[axis] = coords[k];
        }
      }
      std::size_t b = 0;
      while (b < d - 1 && ++pos[b] == positions) pos[b++] = 0;
      if (b == d - 1) break;
    }
  });

  const Found* best = &found[0];
  for (const auto& f : found) {
    if (f.volume > best->volume) best = &f;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool inside = true;
    for (std::size_t b = 0; b < d && inside; ++b) inside = points[i][b] > best->lo[b] && points[i][b] < best->hi[b];
    if (inside) throw std::logic_error("empty box search returned a box containing an input point");
  }
  return {{best->volume, AxisBox(Point(best->lo), Point(best->hi))}, resolution_log2, false};
}

// ---------------------------------------------------------------------------

GrowthReport growth_fit(const std::function<std::uint64_t(double)>& count_fn, std::span<const double> T_ladder,
                        std::size_t dim) {
  if (T_ladder.empty()) throw InvalidArgument("growth fit needs a non-empty ladder");
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  GrowthReport rep{};
  double prev = 0.0;
  for (double T : T_ladder) {
    if (!(T > 1.0)) throw InvalidArgument("ladder values must exceed 1");
    if (!(T > prev)) throw InvalidArgument("ladder must be increasing");
    prev = T;
    const std::uint64_t c = count_fn(T);
    const double vol = std::pow(T, static_cast<double>(dim));
    rep.rows.push_back({T, c, static_cast<double>(c) / vol, static_cast<double>(c) / (vol * std::log(T))});
  }
  auto band = [&](auto field, double& max_out) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& r : rep.rows) {
      lo = std::min(lo, r.*field);
      hi = std::max(hi, r.*field);
    }
    max_out = hi;
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  };
  rep.band_volume = band(&GrowthRow::per_volume, rep.max_per_volume);
  rep.band_volume_log = band(&GrowthRow::per_volume_log, rep.max_per_volume_log);
  return rep;
}

}  // namespace danzer
