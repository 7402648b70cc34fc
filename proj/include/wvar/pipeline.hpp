#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wvar/approx_general.hpp"
#include "wvar/approx_planar.hpp"
#include "wvar/common.hpp"
#include "wvar/discretization.hpp"
#include "wvar/geometry.hpp"
#include "wvar/parallel.hpp"
#include "wvar/rng.hpp"
#include "wvar/sampling.hpp"
#include "wvar/types.hpp"

namespace wvar {

inline Vec random_direction(int d, Rng& rng) {
  Vec v(d);
  do {
    for (int i = 0; i < d; ++i) v(i) = standard_normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

struct CombinationSpec {
  int atoms = 200;
  double budget = 1.0;  // target vw_cost
  double t_lo = -1.0;   // offsets uniform in [t_lo, t_hi), scaled to the domain's range
  double t_hi = 1.0;
  std::uint64_t seed = 0;
};

/// Random combination with directions uniform on the sphere, offsets uniform
/// in the fraction [t_lo, t_hi) of each direction's offset range, coefficients
/// of random sign and magnitude in [0.5, 1], rescaled so vw_cost = budget.
inline AtomCombination random_combination(const CombinationSpec& spec, const Domain& dom, const WeightFn& wf) {
  require(spec.atoms >= 1, "random_combination: need at least one atom");
  require(spec.t_lo < spec.t_hi, "random_combination: empty offset interval");
  Rng rng(spec.seed);
  AtomCombination f;
  for (int k = 0; k < spec.atoms; ++k) {
    const Vec xi = random_direction(dom.dim, rng);
    const auto [lo, hi] = dom.offset_range(xi);
    const double frac = uniform(rng, spec.t_lo, spec.t_hi);
    const double t = dom.is_ball() ? frac : 0.5 * (lo + hi) + 0.5 * (hi - lo) * frac;
    const double mag = uniform(rng, 0.5, 1.0);
    const double sgn = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    f.add(Atom(xi, t), sgn * mag);
  }
  const double cost = vw_cost(f, wf);
  require(cost > 0.0, "random_combination: all atoms have zero weight");
  return f.scaled(spec.budget / cost);
}

/// Same atoms as random_combination but rescaled to a given unweighted l1 mass.
inline AtomCombination random_combination_l1(const CombinationSpec& spec, const Domain& dom, double mass) {
  const AtomCombination f = random_combination(spec, dom, WeightFn::unweighted(dom.dim));
  return f.scaled(mass / f.l1_mass());
}

// ---------------------------------------------------------------------------
// Per-atom constructive approximation
// ---------------------------------------------------------------------------

struct AtomApproximation {
  AtomCombination g;
  std::vector<Region> support;  // phi - g vanishes outside the union
  std::string kind;
};

/// Planar boundary resolution for a budget: largest even m >= 4 with m(m-1) <= n.
inline int planar_resolution(std::int64_t n) {
  if (n < 12) throw BelowResolution("planar pipeline: budget n=" + std::to_string(n) + " below m(m-1) for m = 4");
  int m = 4;
  while (planar_dimension(m + 2) <= n) m += 2;
  return m;
}

/// Constructive approximation engine for a fixed budget: the planar
/// three-atom construction for d = 2, the dictionary construction for d >= 3.
class AtomApproximator {
 public:
  AtomApproximator(const Domain& dom, std::int64_t n, GeneralOptions opt = {}) : dom_(dom), opt_(opt) {
    if (dom.dim == 2) {
      m_ = planar_resolution(n);
      grid_.emplace(dom, m_);
      dimension_ = planar_dimension(m_);
    } else {
      require(dom.is_ball(), "pipeline: d >= 3 requires the ball");
      dict_.emplace(build_dictionary(dom.dim, n));
      m_ = dict_->m();
      dimension_ = static_cast<std::int64_t>(dict_->size());
    }
  }

  int m() const { return m_; }
  std::int64_t dimension() const { return dimension_; }
  const Domain& domain() const { return dom_; }
  const DiscreteDictionary* dictionary() const { return dict_ ? &*dict_ : nullptr; }

  AtomApproximation operator()(const Atom& atom) const {
    AtomApproximation out;
    if (grid_) {
      const auto [lo, hi] = dom_.offset_range(atom.direction);
      if (atom.offset >= hi) {
        out.kind = "inactive";
        return out;
      }
      if (atom.offset <= lo) {
        // Affine on the whole domain: no chord, phi is left to the residual.
        out.kind = "affine-global";
        out.support.push_back(Region::whole(dom_));
        return out;
      }
      const PlanarApproximant p = approximate_atom_on(atom, *grid_);
      out.g = p.combination();
      out.support = p.support;
      out.kind = p.kind_name();
      return out;
    }
    const GeneralApproximant p = approximate_atom_general(atom, *dict_, opt_);
    out.g = p.g;
    out.support = {general_error_region(p)};
    out.kind = general_kind_name(p.kind);
    return out;
  }

 private:
  Domain dom_;
  GeneralOptions opt_;
  int m_ = 0;
  std::int64_t dimension_ = 0;
  std::optional<BoundaryGrid> grid_;
  std::optional<DiscreteDictionary> dict_;
};

// ---------------------------------------------------------------------------
// approximate_function
// ---------------------------------------------------------------------------

struct PipelineResult {
  AtomCombination output;  // g + T, merged
  AtomCombination g;       // sum a_j g_j
  MaureyResult maurey;     // compression of h = f - g
  int m = 0;
  std::int64_t n = 0;
  std::int64_t dimension = 0;  // size of the linear space the g_j live in
  double error = 0.0;          // ||f - output||
  double error_stderr = 0.0;
  double vw_cost = 0.0;
  std::size_t terms = 0;
};

/// f -> g + T: constructive approximants for every atom, then Maurey
/// compression of h = sum a_j (phi_j - g_j) with elements rescaled by w(phi_j).
inline PipelineResult approximate_function(const AtomCombination& f, std::int64_t n, const WeightFn& wf,
                                           const Domain& dom, const MaureyConfig& cfg, const QuadratureSpec& q,
                                           const GeneralOptions& opt = {}) {
  require(n >= 1, "approximate_function: n must be >= 1");
  const AtomApproximator approx(dom, n, opt);
  PipelineResult res;
  res.n = n;
  res.m = approx.m();
  res.dimension = approx.dimension();
  res.vw_cost = vw_cost(f, wf);

  ElementExpansion h;
  for (const auto& term : f.terms()) {
    const AtomApproximation a = approx(term.atom);
    if (a.kind == "inactive") continue;
    res.g.append(a.g, term.coef);
    const AtomCombination diff = (AtomCombination::single(term.atom) - a.g).merged();
    if (diff.empty()) continue;
    const double w = wf(term.atom);
    const double s = w > 0.0 ? w : 1.0;
    h.elements.push_back(diff.scaled(1.0 / s));
    h.coefs.push_back(term.coef * s);
    h.supports.push_back(a.support);
  }
  res.g = res.g.merged();

  MaureyConfig mc = cfg;
  mc.n = static_cast<int>(std::min<std::int64_t>(n, 1 << 30));
  res.maurey = maurey_compress(h, mc, dom, q);
  res.output = (res.g + res.maurey.output).merged();
  res.error = res.maurey.error;
  res.error_stderr = res.maurey.error_stderr;
  res.terms = res.output.size();
  return res;
}

// ---------------------------------------------------------------------------
// Slope fits and rate experiments
// ---------------------------------------------------------------------------

struct RateEntry {
  std::int64_t n = 0;
  int m = 0;
  double error = 0.0;
  double error_stderr = 0.0;
  std::uint64_t seed = 0;
  bool used = true;
  std::string note;
};

struct RateReport {
  std::vector<RateEntry> entries;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double fitted_intercept = 0.0;
  double target_slope = 0.0;
  bool fitted = false;
  std::string note;
};

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope * x with the slope's standard error.
inline LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "ols: need at least two points");
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "ols: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (k - 2.0) / sxx);
  }
  return f;
}

/// Fits log error against log n over the usable entries: non-positive errors
/// are dropped, and the smallest n is dropped when its error is within three
/// standard errors of the next one.
inline void fit_rate(RateReport& rep) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    auto& e = rep.entries[i];
    e.used = e.error > 0.0 && std::isfinite(e.error) && e.note.empty();
    if (e.error <= 0.0 && e.note.empty()) e.note = "exact recovery";
    if (e.used) idx.push_back(i);
  }
  if (idx.size() >= 2) {
    auto& a = rep.entries[idx[0]];
    const auto& b = rep.entries[idx[1]];
    const double band = 3.0 * std::hypot(a.error_stderr, b.error_stderr);
    if (std::abs(a.error - b.error) <= band && idx.size() > 3) {
      a.used = false;
      a.note = "pre-asymptotic";
      idx.erase(idx.begin());
    }
  }
  rep.fitted = idx.size() >= 2;
  if (!rep.fitted) {
    rep.note = "fewer than two usable entries";
    return;
  }
  std::vector<double> x, y;
  for (std::size_t i : idx) {
    x.push_back(std::log(static_cast<double>(rep.entries[i].n)));
    y.push_back(std::log(rep.entries[i].error));
  }
  const LineFit fit = ols(x, y);
  rep.fitted_slope = fit.slope;
  rep.fitted_intercept = fit.intercept;
  rep.slope_stderr = fit.slope_stderr;
}

enum class GeneratorKind { RandomCombination, SingleAtom };

struct Generator {
  GeneratorKind kind = GeneratorKind::RandomCombination;
  CombinationSpec combination;  // RandomCombination
  double t = 0.5;               // SingleAtom offset
  int directions = 8;           // SingleAtom: RMS over this many random directions
  std::uint64_t seed = 0;

  static Generator random(int atoms, double budget, std::uint64_t seed) {
    Generator g;
    g.kind = GeneratorKind::RandomCombination;
    g.combination.atoms = atoms;
    g.combination.budget = budget;
    g.combination.seed = seed;
    g.seed = seed;
    return g;
  }
  static Generator single_atom(double t, std::uint64_t seed = 0) {
    Generator g;
    g.kind = GeneratorKind::SingleAtom;
    g.t = t;
    g.seed = seed;
    return g;
  }
};

/// Theoretical slope of error against n.
inline double target_slope(GeneratorKind kind, int d) {
  const double atom = -3.0 / (2.0 * d);
  return kind == GeneratorKind::SingleAtom ? atom : -0.5 + atom;
}

struct RateOptions {
  MaureyConfig maurey;  // n and seed are set per cell
  QuadratureSpec quadrature = QuadratureSpec::monte_carlo(200000, 1);
  GeneralOptions general;
  std::size_t workers = 0;
};

/// ||phi - g|| for one atom at budget n, importance-sampled on the support.
inline IntegralEstimate atom_error(const Atom& atom, const AtomApproximator& approx, std::int64_t samples,
                                   std::uint64_t seed) {
  const AtomApproximation a = approx(atom);
  if (a.kind == "inactive") return {};
  return l2_error_on(AtomCombination::single(atom), a.g, approx.domain(), a.support, samples, seed);
}

inline RateReport rate_experiment(const Generator& gen, const std::vector<std::int64_t>& n_list, const Domain& dom,
                                  const WeightFn& wf, const RateOptions& opt = {}) {
  require(!n_list.empty(), "rate_experiment: empty n list");
  require(n_list.size() >= 3, "rate_experiment: need at least three budgets");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    require(n_list[i] > n_list[i - 1], "rate_experiment: n list must be strictly increasing");
  RateReport rep;
  rep.target_slope = target_slope(gen.kind, dom.dim);
  rep.entries.resize(n_list.size());

  AtomCombination f;
  std::vector<Atom> atoms;
  if (gen.kind == GeneratorKind::RandomCombination) {
    f = random_combination(gen.combination, dom, wf);
  } else {
    Rng rng(gen.seed);
    for (int k = 0; k < gen.directions; ++k) atoms.emplace_back(random_direction(dom.dim, rng), gen.t);
  }
  const std::int64_t samples = quadrature_samples(opt.quadrature);

  parallel_for(
      n_list.size(),
      [&](std::size_t c) {
        RateEntry& e = rep.entries[c];
        e.n = n_list[c];
        e.seed = subseed(gen.seed, c);
        try {
          if (gen.kind == GeneratorKind::RandomCombination) {
            MaureyConfig mc = opt.maurey;
            mc.seed = e.seed;
            mc.workers = 1;
            QuadratureSpec q = opt.quadrature;
            q.seed = subseed(opt.quadrature.seed, c);
            const PipelineResult r = approximate_function(f, e.n, wf, dom, mc, q, opt.general);
            e.m = r.m;
            e.error = r.error;
            e.error_stderr = r.error_stderr;
          } else {
            const AtomApproximator approx(dom, e.n, opt.general);
            e.m = approx.m();
            double sq = 0.0, var = 0.0;
            for (std::size_t k = 0; k < atoms.size(); ++k) {
              const IntegralEstimate est = atom_error(atoms[k], approx, samples, subseed(e.seed, k));
              sq += est.value * est.value;
              var += 4.0 * est.value * est.value * est.stderr_ * est.stderr_;
            }
            const double k = static_cast<double>(atoms.size());
            e.error = std::sqrt(sq / k);
            e.error_stderr = e.error > 0.0 ? std::sqrt(var) / k / (2.0 * e.error) : 0.0;
          }
        } catch (const BelowResolution& ex) {
          e.note = std::string("skipped: ") + ex.what();
        }
      },
      opt.workers);
  fit_rate(rep);
  return rep;
}

/// Budgets n = m(m-1) for a list of planar resolutions.
inline std::vector<std::int64_t> planar_budgets(const std::vector<int>& m_list) {
  std::vector<std::int64_t> n;
  for (int m : m_list) n.push_back(planar_dimension(m));
  return n;
}

// ---------------------------------------------------------------------------
// Weighted versus unweighted budgets
// ---------------------------------------------------------------------------

struct ComparisonRow {
  std::int64_t n = 0;
  double error_boundary = 0.0;  // offsets near the boundary
  double error_bulk = 0.0;
  double stderr_boundary = 0.0;
  double stderr_bulk = 0.0;
  double ratio() const { return error_bulk > 0.0 ? error_boundary / error_bulk : 0.0; }
};

struct ComparisonReport {
  double l1_mass = 1.0;
  double vw_boundary = 0.0;
  double vw_bulk = 0.0;
  std::vector<ComparisonRow> rows;
  bool boundary_smaller_everywhere() const {
    for (const auto& r : rows)
      if (!(r.error_boundary < r.error_bulk)) return false;
    return !rows.empty();
  }
};

/// Two combinations of equal unweighted l1 mass, one with offsets in
/// [0.9, 0.999] and one with offsets in [-1, 0.9), run through the pipeline
/// at each budget.
inline ComparisonReport weighted_vs_unweighted(const Domain& dom, const WeightFn& wf,
                                               const std::vector<std::int64_t>& n_list, int atoms, double mass,
                                               std::uint64_t seed, const RateOptions& opt = {}) {
  require(!n_list.empty(), "weighted_vs_unweighted: empty n list");
  ComparisonReport rep;
  rep.l1_mass = mass;
  CombinationSpec near{atoms, 1.0, 0.9, 0.999, subseed(seed, 1)};
  CombinationSpec bulk{atoms, 1.0, -1.0, 0.9, subseed(seed, 2)};
  const AtomCombination fb = random_combination_l1(near, dom, mass);
  const AtomCombination fu = random_combination_l1(bulk, dom, mass);
  rep.vw_boundary = vw_cost(fb, wf);
  rep.vw_bulk = vw_cost(fu, wf);
  rep.rows.resize(n_list.size());
  parallel_for(
      n_list.size(),
      [&](std::size_t c) {
        ComparisonRow& row = rep.rows[c];
        row.n = n_list[c];
        MaureyConfig mc = opt.maurey;
        mc.seed = subseed(seed, 100 + c);
        mc.workers = 1;
        QuadratureSpec q = opt.quadrature;
        q.seed = subseed(opt.quadrature.seed, c);
        const PipelineResult a = approximate_function(fb, row.n, wf, dom, mc, q, opt.general);
        const PipelineResult b = approximate_function(fu, row.n, wf, dom, mc, q, opt.general);
        row.error_boundary = a.error;
        row.stderr_boundary = a.error_stderr;
        row.error_bulk = b.error;
        row.stderr_bulk = b.error_stderr;
      },
      opt.workers);
  return rep;
}

}  // namespace wvar
