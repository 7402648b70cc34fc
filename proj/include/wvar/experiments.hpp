#pragma once

// Experiment drivers shared by the command-line tool and the acceptance
// binary. Each returns plain rows plus a summary; formatting lives elsewhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wvar/approx_general.hpp"
#include "wvar/approx_planar.hpp"
#include "wvar/discretization.hpp"
#include "wvar/geometry.hpp"
#include "wvar/parallel.hpp"
#include "wvar/pipeline.hpp"
#include "wvar/sampling.hpp"
#include "wvar/training.hpp"

namespace wvar {

inline double median(std::vector<double> v) {
  require(!v.empty(), "median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// `count` equally spaced values from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, int count) {
  require(count >= 1, "linspace: count must be >= 1");
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return v;
}

// ---------------------------------------------------------------------------
// Atom norms against the weight
// ---------------------------------------------------------------------------

struct NormRow {
  int dim = 2;
  double t = 0.0;
  double norm = 0.0;
  double weight = 0.0;
  double scaled = 0.0;           // norm * (1 - t)^-(3/2 + (d - 1)/4), ball only
  double norm_over_weight = 0.0;
};

struct NormScan {
  std::vector<NormRow> rows;
  double scaled_min = 0.0, scaled_max = 0.0;
  double spread() const { return scaled_min > 0.0 ? scaled_max / scaled_min : std::numeric_limits<double>::infinity(); }
};

/// Norms of atoms with direction `xi` over the offsets `ts` (offsets past
/// the domain are skipped).
inline NormScan norm_scan(const Domain& dom, const Vec& xi, const std::vector<double>& ts, const WeightFn& wf,
                          int points = 256) {
  NormScan out;
  const double expo = 1.5 + 0.25 * (dom.dim - 1);
  out.scaled_min = std::numeric_limits<double>::infinity();
  const auto range = dom.offset_range(xi);
  for (double t : ts) {
    if (t >= range.second) continue;
    NormRow r;
    r.dim = dom.dim;
    r.t = t;
    const Atom a(xi, t);
    r.norm = atom_l2_norm(a, dom, QuadratureSpec::slice(points));
    r.weight = wf(a);
    r.scaled = dom.is_ball() ? r.norm * std::pow(1.0 - t, -expo) : 0.0;
    r.norm_over_weight = r.weight > 0.0 ? r.norm / r.weight : std::numeric_limits<double>::infinity();
    const double key = dom.is_ball() ? r.scaled : r.norm_over_weight;
    out.scaled_min = std::min(out.scaled_min, key);
    out.scaled_max = std::max(out.scaled_max, key);
    out.rows.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Planar construction suite
// ---------------------------------------------------------------------------

struct PlanarRow {
  int m = 0;
  int index = 0;
  Vec xi;
  double t = 0.0;
  std::string kind;
  int gap = 0;
  double max_coef = 0.0;
  double outside_max = 0.0;  // max |phi - g| over probes outside the strip
  double error = 0.0;
  double error_stderr = 0.0;
  double weight = 0.0;
  double scaled = 0.0;  // ball: error / (w n^-3/4); square: error / (m^-3/2 |L|^1/2)
};

struct PlanarSuite {
  std::vector<PlanarRow> rows;
  double max_coef = 0.0;
  double max_outside = 0.0;
  double max_scaled = 0.0;
  int degenerate = 0;
};

/// Random atoms (uniform directions, offsets uniform over the active range)
/// approximated at every m; outside-strip agreement probed at `probes`
/// uniform points per atom.
inline PlanarSuite planar_suite(const Domain& dom, const std::vector<int>& m_list, int atoms, std::uint64_t seed,
                                int probes = 10000, std::int64_t samples = 20000) {
  require(dom.dim == 2, "planar_suite: planar domains only");
  const WeightFn wf = dom.is_ball() ? WeightFn::ball_power(2) : WeightFn::square_chord_sqrt();
  std::vector<Atom> list;
  {
    Rng rng(seed);
    for (int k = 0; k < atoms; ++k) {
      const Vec xi = random_direction(2, rng);
      const auto [lo, hi] = dom.offset_range(xi);
      double t = uniform(rng, lo, hi);
      if (t <= lo) t = 0.5 * (lo + hi);
      list.emplace_back(xi, t);
    }
  }
  PlanarSuite out;
  out.rows.resize(m_list.size() * list.size());
  parallel_for(out.rows.size(), [&](std::size_t c) {
    const int m = m_list[c / list.size()];
    const std::size_t k = c % list.size();
    const Atom& a = list[k];
    const BoundaryGrid grid(dom, m);
    const PlanarApproximant p = approximate_atom_on(a, grid);
    PlanarRow& r = out.rows[c];
    r.m = m;
    r.index = static_cast<int>(k);
    r.xi = a.direction;
    r.t = a.offset;
    r.kind = p.kind_name();
    r.gap = p.strip.gap;
    r.max_coef = p.max_coef();
    const AtomCombination g = p.combination();
    Rng rng(subseed(seed, 1000 + c));
    for (int s = 0; s < probes; ++s) {
      Vec x(2);
      if (dom.is_ball()) {
        x = sample_ball(2, rng);
      } else {
        x(0) = uniform(rng, -1.0, 1.0);
        x(1) = uniform(rng, -1.0, 1.0);
      }
      if (strip_contains(p.strip, x)) continue;
      r.outside_max = std::max(r.outside_max, std::abs(a(x) - g(x)));
    }
    const IntegralEstimate e = planar_error(a, p, dom, samples, subseed(seed, 5000 + c));
    r.error = e.value;
    r.error_stderr = e.stderr_;
    r.weight = wf(a);
    if (dom.is_ball()) {
      r.scaled = r.weight > 0.0 ? r.error / (r.weight * std::pow(static_cast<double>(planar_dimension(m)), -0.75))
                                : 0.0;
    } else {
      const double len = square_chord_length(a.direction, a.offset);
      r.scaled = len > 0.0 ? r.error / (std::pow(m, -1.5) * std::sqrt(len)) : 0.0;
    }
  });
  for (const auto& r : out.rows) {
    out.max_coef = std::max(out.max_coef, r.max_coef);
    out.max_outside = std::max(out.max_outside, r.outside_max);
    out.max_scaled = std::max(out.max_scaled, r.scaled);
    out.degenerate += r.kind != "main" ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ball construction suite (d >= 3)
// ---------------------------------------------------------------------------

struct GeneralRow {
  int m = 0;
  int index = 0;
  double t = 0.0;
  std::string kind;
  bool skipped = false;
  std::string note;
  int neighbors = 0;
  double sum_b_error = 0.0;       // |sum b - 1|
  double reconstruction = 0.0;    // || sum b xi_i - xi || / ||xi||-scale
  double l1 = 0.0;
  bool sandwich = true;           // t <= t_i+ <= t~_i for every neighbour
  double c1 = 0.0;                // max_i (t~_i - t) m / sqrt(1 - t^2)
  double sup_constant = 0.0;
  double measure_constant = 0.0;
  double l2_error = 0.0;
  std::int64_t outside_violations = 0;
};

struct GeneralSuite {
  std::vector<GeneralRow> rows;
  std::vector<int> m_list;
  std::vector<double> c1_max;      // per m
  std::vector<double> sup_max;     // per m
  std::vector<double> measure_max; // per m
  double max_l1 = 0.0;
  double max_sum_b_error = 0.0;
  double max_reconstruction = 0.0;
  bool sandwich = true;
  int skipped = 0;
  std::int64_t outside_violations = 0;
  /// Resolutions with at least one constructed atom.
  int usable_m() const {
    int k = 0;
    for (double c : c1_max) k += c > 0.0 ? 1 : 0;
    return k;
  }
  /// max/min of C1 over the usable resolutions (1 when fewer than two).
  double c1_ratio() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double c : c1_max) {
      if (!(c > 0.0)) continue;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    return hi > 0.0 ? hi / lo : 1.0;
  }
};

/// Offsets for which the ball construction is exercised: [0.5, t_{2m-L}].
inline double general_t_max(int m, int A = 2) {
  const OffsetGrid g = build_offset_grid(m);
  const int L = (A + 1) * (A + 1);
  return 2 * m - L >= 1 ? g.t(2 * m - L) : -1.0;
}

inline GeneralSuite general_suite(int d, const std::vector<int>& m_list, int atoms, std::uint64_t seed,
                                  const GeneralOptions& opt = {}, std::int64_t samples = 20000) {
  require(d >= 3, "general_suite: d must be >= 3");
  GeneralSuite out;
  out.m_list = m_list;
  for (int m : m_list) {
    int k = 0;
    while ((1 << k) < m) ++k;
    require((1 << k) == m, "general_suite: m must be a power of two");
    const DiscreteDictionary dict = make_dictionary(build_direction_grid(d, k), build_offset_grid(m));
    const double tmax = general_t_max(m, opt.A);
    Rng rng(seed);
    std::vector<Atom> list;
    for (int i = 0; i < atoms; ++i) {
      const Vec xi = random_direction(d, rng);
      list.emplace_back(xi, uniform(rng, 0.5, std::max(0.5, tmax)));
    }
    std::vector<GeneralRow> rows(list.size());
    parallel_for(rows.size(), [&](std::size_t i) {
      GeneralRow& r = rows[i];
      const Atom& a = list[i];
      r.m = m;
      r.index = static_cast<int>(i);
      r.t = a.offset;
      GeneralApproximant g;
      if (tmax < 0.5) {
        r.skipped = true;
        r.kind = "skipped";
        r.note = "below resolution: t_{2m-L} < 1/2 at m=" + std::to_string(m);
        return;
      }
      try {
        g = approximate_atom_general(a, dict, opt);
      } catch (const BelowResolution& e) {
        r.skipped = true;
        r.kind = "skipped";
        r.note = e.what();
        return;
      }
      r.kind = general_kind_name(g.kind);
      const auto& dec = g.decomposition;
      r.neighbors = static_cast<int>(dec.pairs.size());
      if (!dec.pairs.empty()) {
        r.sum_b_error = std::abs(dec.sum() - 1.0);
        r.reconstruction = (dec.reconstruct(dict.directions) - a.direction).norm();
      }
      r.l1 = g.l1_mass();
      const double s = std::sqrt(std::max(0.0, 1.0 - a.offset * a.offset));
      for (const auto& p : g.promotions) {
        if (!(a.offset <= p.t_plus + 1e-15 && p.t_plus <= p.t_tilde)) r.sandwich = false;
        if (s > 0.0) r.c1 = std::max(r.c1, (p.t_tilde - a.offset) * m / s);
      }
      QuadratureSpec q = QuadratureSpec::monte_carlo(std::max<std::int64_t>(samples, 1000), subseed(seed, 7000 + i));
      const ErrorRegionReport rep = error_region_diagnostics(g, dict, q);
      r.sup_constant = rep.sup_constant;
      r.measure_constant = rep.measure_constant;
      r.l2_error = rep.l2_error;
      r.outside_violations = rep.outside_violations;
    });
    double c1 = 0.0, sup = 0.0, meas = 0.0;
    for (const auto& r : rows) {
      if (r.skipped) {
        ++out.skipped;
        continue;
      }
      c1 = std::max(c1, r.c1);
      sup = std::max(sup, r.sup_constant);
      meas = std::max(meas, r.measure_constant);
      out.max_l1 = std::max(out.max_l1, r.l1);
      out.max_sum_b_error = std::max(out.max_sum_b_error, r.sum_b_error);
      out.max_reconstruction = std::max(out.max_reconstruction, r.reconstruction);
      out.sandwich = out.sandwich && r.sandwich;
      out.outside_violations += r.outside_violations;
    }
    out.c1_max.push_back(c1);
    out.sup_max.push_back(sup);
    out.measure_max.push_back(meas);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maurey sampling study
// ---------------------------------------------------------------------------

struct MaureyRow {
  std::uint64_t seed = 0;
  int n = 0;
  double best_error = 0.0;
  double best_stderr = 0.0;
  double first_trial_error = 0.0;
  double mean_trial_error = 0.0;
  double variation = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  bool within_bound = false;
};

struct MaureyStudy {
  std::vector<MaureyRow> rows;
  std::vector<int> n_list;
  std::vector<double> median_best;   // per n
  std::vector<double> median_single; // per n, first trial only
  LineFit best_fit, single_fit;
  double within_fraction = 0.0;
};

/// h = equal-coefficient sum of random ball atoms with offsets in [-0.5, 0.5];
/// every (seed, n) cell is compressed with best-of-`trials` sampling.
inline MaureyStudy maurey_study(int d, int atoms, const std::vector<int>& n_list, int seeds, int trials,
                                std::uint64_t seed, std::int64_t samples = 50000) {
  require(n_list.size() >= 2, "maurey_study: need at least two n values");
  const Domain dom = Domain::ball(d);
  AtomCombination h;
  {
    Rng rng(seed);
    for (int k = 0; k < atoms; ++k) h.add(Atom(random_direction(d, rng), uniform(rng, -0.5, 0.5)), 1.0 / atoms);
  }
  const ElementExpansion e = ElementExpansion::from_combination(h, WeightFn::unweighted(d));
  MaureyStudy out;
  out.n_list = n_list;
  out.rows.resize(n_list.size() * static_cast<std::size_t>(seeds));
  parallel_for(out.rows.size(), [&](std::size_t c) {
    const std::size_t ni = c / static_cast<std::size_t>(seeds);
    const std::uint64_t s = c % static_cast<std::size_t>(seeds);
    MaureyConfig cfg;
    cfg.n = n_list[ni];
    cfg.trials = trials;
    cfg.seed = subseed(seed, 100 + s);
    cfg.workers = 1;
    const MaureyResult r = maurey_compress(e, cfg, dom, QuadratureSpec::monte_carlo(samples, subseed(seed, 1)));
    MaureyRow& row = out.rows[c];
    row.seed = s;
    row.n = cfg.n;
    row.best_error = r.error;
    row.best_stderr = r.error_stderr;
    row.first_trial_error = r.trial_errors.front();
    row.mean_trial_error = r.mean_trial_error;
    row.variation = r.variation;
    row.delta = r.delta;
    row.bound = r.bound;
    row.within_bound = r.error <= r.bound;
  });
  std::vector<double> x, yb, ys;
  int within = 0;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    std::vector<double> b, s1;
    for (const auto& r : out.rows)
      if (r.n == n_list[ni]) {
        b.push_back(r.best_error);
        s1.push_back(r.first_trial_error);
      }
    out.median_best.push_back(median(b));
    out.median_single.push_back(median(s1));
    x.push_back(std::log(static_cast<double>(n_list[ni])));
    yb.push_back(std::log(out.median_best.back()));
    ys.push_back(std::log(out.median_single.back()));
  }
  for (const auto& r : out.rows) within += r.within_bound ? 1 : 0;
  out.within_fraction = static_cast<double>(within) / static_cast<double>(out.rows.size());
  out.best_fit = ols(x, yb);
  out.single_fit = ols(x, ys);
  return out;
}

// ---------------------------------------------------------------------------
// Training problems
// ---------------------------------------------------------------------------

enum class TargetKind { Sine, Constant, Random };

inline TargetKind parse_target(const std::string& s) {
  if (s == "sine") return TargetKind::Sine;
  if (s == "constant") return TargetKind::Constant;
  if (s == "random") return TargetKind::Random;
  throw InvalidArgument("unknown target '" + s + "' (expected sine, constant or random)");
}

/// Sites uniform in the ball of radius 0.95; targets sin(3 x_1) + x_2^2, a
/// constant, or standard normal values.
inline FitProblem make_problem(int d, int points, int neurons, double lambda, Regularizer reg, TargetKind target,
                               double value, std::uint64_t seed) {
  require(points >= 1, "make_problem: need at least one point");
  FitProblem p;
  p.sites.resize(d, points);
  p.targets.resize(points);
  p.lambda = lambda;
  p.n_neurons = neurons;
  p.regularizer = reg;
  Rng rng(seed);
  for (int i = 0; i < points; ++i) p.sites.col(i) = sample_ball(d, rng, 0.95);
  for (int i = 0; i < points; ++i) {
    const auto x = p.sites.col(i);
    switch (target) {
      case TargetKind::Sine: p.targets(i) = std::sin(3.0 * x(0)) + x(1) * x(1); break;
      case TargetKind::Constant: p.targets(i) = value; break;
      case TargetKind::Random: p.targets(i) = standard_normal(rng); break;
    }
  }
  return p;
}

/// Cost of an explicit interpolant: `points` random atoms with a square
/// solve for the coefficients (smallest cost over a few draws).
inline double interpolant_cost(const FitProblem& p, const WeightFn& wf, std::uint64_t seed, int draws = 8) {
  const int m = p.points();
  double best = std::numeric_limits<double>::infinity();
  for (int dr = 0; dr < draws; ++dr) {
    Rng rng(subseed(seed, dr));
    std::vector<Atom> atoms;
    Mat Phi(m, m);
    for (int j = 0; j < m; ++j) {
      atoms.emplace_back(random_direction(p.dim(), rng), uniform(rng, -1.0, 0.0));
      Phi.col(j) = AtomCombination::single(atoms.back()).evaluate(p.sites);
    }
    Eigen::FullPivLU<Mat> lu(Phi);
    if (!lu.isInvertible()) continue;
    const Vec c = lu.solve(p.targets);
    if ((Phi * c - p.targets).norm() > 1e-8 * (1.0 + p.targets.norm())) continue;
    double cost = 0.0;
    for (int j = 0; j < m; ++j) cost += std::abs(c(j)) * wf(atoms[static_cast<std::size_t>(j)]);
    best = std::min(best, cost);
  }
  return best;
}

}  // namespace wvar
