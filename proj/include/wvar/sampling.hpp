#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

#include "wvar/common.hpp"
#include "wvar/discretization.hpp"
#include "wvar/measure.hpp"
#include "wvar/parallel.hpp"
#include "wvar/rng.hpp"
#include "wvar/types.hpp"

namespace wvar {

/// h = sum_j coefs[j] * elements[j], each element a finite atom combination.
/// Optional supports[j]: regions outside which elements[j] vanishes.
struct ElementExpansion {
  std::vector<AtomCombination> elements;
  std::vector<double> coefs;
  std::vector<std::vector<Region>> supports;

  std::size_t size() const { return elements.size(); }
  bool has_supports() const { return !supports.empty(); }
  double variation() const {
    double v = 0.0;
    for (double c : coefs) v += std::abs(c);
    return v;
  }
  AtomCombination sum() const {
    AtomCombination h;
    for (std::size_t j = 0; j < elements.size(); ++j) h.append(elements[j], coefs[j]);
    return h;
  }

  /// Elements phi_j / w(phi_j) with coefficients a_j w(phi_j); atoms with
  /// zero weight are kept unscaled.
  static ElementExpansion from_combination(const AtomCombination& h, const WeightFn& w) {
    ElementExpansion e;
    for (const auto& t : h.terms()) {
      const double wj = w(t.atom);
      const double s = wj > 0.0 ? wj : 1.0;
      e.elements.push_back(AtomCombination::single(t.atom, 1.0 / s));
      e.coefs.push_back(t.coef * s);
    }
    return e;
  }
};

/// Measure on which an expansion is evaluated: importance sampling over the
/// union of supports when available, else uniform on the domain.
inline EmpiricalMeasure expansion_measure(const ElementExpansion& h, const Domain& dom, std::int64_t samples,
                                          std::uint64_t seed) {
  if (!h.has_supports()) return domain_measure(dom, samples, seed);
  std::vector<Region> all;
  for (const auto& s : h.supports) all.insert(all.end(), s.begin(), s.end());
  return mixture_measure(dom, all, samples, seed);
}

inline std::int64_t quadrature_samples(const QuadratureSpec& q) { return q.is_slice() ? 200000 : q.samples; }

// ---------------------------------------------------------------------------
// Maurey sampling
// ---------------------------------------------------------------------------

struct MaureyConfig {
  int n = 1;
  int trials = 10;
  std::uint64_t seed = 0;
  WeightFn normalization = WeightFn::unweighted();
  std::size_t workers = 0;
};

struct MaureyResult {
  AtomCombination output;
  Vec weights;               // per-element weight of the chosen draw
  double error = 0.0;        // ||h - T|| on an independent measure
  double error_stderr = 0.0;
  double variation = 0.0;    // V = sum |c_j|
  double delta = 0.0;        // max_j ||psi_j|| (sampled)
  double bound = 0.0;        // V * delta / sqrt(n)
  double mean_trial_error = 0.0;
  std::vector<double> trial_errors;  // on the selection measure
  int best_trial = 0;
};

/// Index drawn with probability |c_j| / V by inverse-CDF on a portable uniform.
inline std::size_t draw_index(const std::vector<double>& cum, Rng& rng) {
  const double u = uniform01(rng) * cum.back();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  return std::min(k, cum.size() - 1);
}

inline MaureyResult maurey_compress(const ElementExpansion& h, const MaureyConfig& cfg, const Domain& dom,
                                    const QuadratureSpec& q) {
  require(cfg.n >= 1, "maurey_compress: n must be >= 1");
  require(cfg.trials >= 1, "maurey_compress: trials must be >= 1");
  require(h.coefs.size() == h.elements.size(), "maurey_compress: coefficient count mismatch");
  MaureyResult res;
  res.variation = h.variation();
  res.weights = Vec::Zero(static_cast<Eigen::Index>(h.size()));
  if (res.variation == 0.0) return res;

  const std::int64_t samples = quadrature_samples(q);
  const auto* sup = h.has_supports() ? &h.supports : nullptr;
  const EmpiricalMeasure sel = expansion_measure(h, dom, samples, subseed(q.seed, 1));
  const Eigen::SparseMatrix<double> E = evaluate_elements(h.elements, sup, sel);
  const Vec c = Eigen::Map<const Vec>(h.coefs.data(), static_cast<Eigen::Index>(h.coefs.size()));
  const Vec hv = E * c;

  for (Eigen::Index j = 0; j < E.cols(); ++j) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(E, j); it; ++it)
      s += sel.weights(it.row()) * it.value() * it.value();
    res.delta = std::max(res.delta, std::sqrt(s));
  }
  res.bound = res.variation * res.delta / std::sqrt(static_cast<double>(cfg.n));

  std::vector<double> cum(h.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) cum[j] = (acc += std::abs(h.coefs[j]));

  std::vector<Vec> draws(static_cast<std::size_t>(cfg.trials));
  res.trial_errors.assign(static_cast<std::size_t>(cfg.trials), 0.0);
  parallel_for(
      static_cast<std::size_t>(cfg.trials),
      [&](std::size_t tr) {
        Rng rng(subseed(cfg.seed, tr));
        Vec w = Vec::Zero(static_cast<Eigen::Index>(h.size()));
        const double unit = res.variation / cfg.n;
        for (int k = 0; k < cfg.n; ++k) {
          const std::size_t j = draw_index(cum, rng);
          w(static_cast<Eigen::Index>(j)) += unit * (h.coefs[j] > 0.0 ? 1.0 : -1.0);
        }
        const Vec r = hv - E * w;
        res.trial_errors[tr] = std::sqrt(std::max(0.0, sel.weights.dot(r.cwiseProduct(r))));
        draws[tr] = std::move(w);
      },
      cfg.workers);

  res.best_trial = static_cast<int>(std::min_element(res.trial_errors.begin(), res.trial_errors.end()) -
                                    res.trial_errors.begin());
  double sum = 0.0;
  for (double e : res.trial_errors) sum += e;
  res.mean_trial_error = sum / cfg.trials;
  res.weights = draws[static_cast<std::size_t>(res.best_trial)];

  AtomCombination out;
  for (std::size_t j = 0; j < h.size(); ++j)
    if (res.weights(static_cast<Eigen::Index>(j)) != 0.0) out.append(h.elements[j], res.weights(static_cast<Eigen::Index>(j)));
  res.output = out.merged();

  // Independent measure for the reported error.
  const EmpiricalMeasure fresh = expansion_measure(h, dom, samples, subseed(q.seed, 2));
  const Eigen::SparseMatrix<double> F = evaluate_elements(h.elements, sup, fresh);
  const Vec diff = F * (c - res.weights);
  const IntegralEstimate est = fresh.l2_norm(diff);
  res.error = est.value;
  res.error_stderr = est.stderr_;
  return res;
}

/// Convenience form: atoms of h rescaled by cfg.normalization.
inline MaureyResult maurey_compress(const AtomCombination& h, const MaureyConfig& cfg, const Domain& dom,
                                    const QuadratureSpec& q) {
  return maurey_compress(ElementExpansion::from_combination(h, cfg.normalization), cfg, dom, q);
}

// ---------------------------------------------------------------------------
// Orthogonal greedy baseline
// ---------------------------------------------------------------------------

struct GreedyResult {
  AtomCombination output;
  std::vector<std::size_t> selected;
  double error = 0.0;
  double error_stderr = 0.0;
};

inline GreedyResult greedy_compress(const ElementExpansion& h, int n, const Domain& dom, const QuadratureSpec& q) {
  require(n >= 1, "greedy_compress: n must be >= 1");
  GreedyResult res;
  if (h.size() == 0) return res;
  const std::int64_t samples = quadrature_samples(q);
  const auto* sup = h.has_supports() ? &h.supports : nullptr;
  const EmpiricalMeasure meas = expansion_measure(h, dom, samples, subseed(q.seed, 1));
  const Vec sw = meas.weights.cwiseSqrt();
  const Mat E = sw.asDiagonal() * Mat(evaluate_elements(h.elements, sup, meas));
  const Vec c = Eigen::Map<const Vec>(h.coefs.data(), static_cast<Eigen::Index>(h.coefs.size()));
  const Vec target = E * c;
  const Vec norms = E.colwise().norm().transpose();

  Vec r = target;
  Vec coef;
  std::vector<bool> used(h.size(), false);
  const int steps = std::min<int>(n, static_cast<int>(h.size()));
  for (int s = 0; s < steps; ++s) {
    const Vec corr = E.transpose() * r;
    Eigen::Index best = -1;
    double best_v = -1.0;
    for (Eigen::Index j = 0; j < corr.size(); ++j) {
      if (used[static_cast<std::size_t>(j)] || norms(j) == 0.0) continue;
      const double v = std::abs(corr(j)) / norms(j);
      if (v > best_v) {
        best_v = v;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    res.selected.push_back(static_cast<std::size_t>(best));
    Mat S(E.rows(), static_cast<Eigen::Index>(res.selected.size()));
    for (std::size_t k = 0; k < res.selected.size(); ++k)
      S.col(static_cast<Eigen::Index>(k)) = E.col(static_cast<Eigen::Index>(res.selected[k]));
    coef = S.colPivHouseholderQr().solve(target);
    r = target - S * coef;
  }
  AtomCombination out;
  for (std::size_t k = 0; k < res.selected.size(); ++k) out.append(h.elements[res.selected[k]], coef(static_cast<Eigen::Index>(k)));
  res.output = out.merged();
  const IntegralEstimate est = meas.l2_norm(r.cwiseQuotient(sw.unaryExpr([](double v) { return v > 0 ? v : 1.0; })));
  res.error = est.value;
  res.error_stderr = est.stderr_;
  return res;
}

inline GreedyResult greedy_compress(const AtomCombination& h, int n, const Domain& dom, const QuadratureSpec& q) {
  return greedy_compress(ElementExpansion::from_combination(h, WeightFn::unweighted(dom.dim)), n, dom, q);
}

// ---------------------------------------------------------------------------
// Least-squares projection
// ---------------------------------------------------------------------------

struct ProjectionResult {
  AtomCombination output;
  double error = 0.0;  // ||f - P f|| on the Gram measure
  double error_stderr = 0.0;
};

/// Regularized least squares onto span(atoms) with a shared Monte Carlo
/// sample set. Atoms that vanish on every sample are dropped.
inline ProjectionResult project_onto_atoms(const AtomCombination& f, const std::vector<Atom>& atoms,
                                           const Domain& dom, const QuadratureSpec& q, double ridge) {
  require(ridge >= 0.0, "project_onto_span: ridge must be >= 0");
  const EmpiricalMeasure meas = domain_measure(dom, quadrature_samples(q), q.seed);
  const Vec y = f.evaluate(meas.points);
  ProjectionResult res;
  std::vector<Atom> basis;
  std::vector<Vec> cols;
  for (const Atom& a : atoms) {
    Vec v = AtomCombination::single(a).evaluate(meas.points);
    if (v.cwiseAbs().maxCoeff() > 0.0) {
      basis.push_back(a);
      cols.push_back(std::move(v));
    }
  }
  if (basis.empty()) {
    const IntegralEstimate e = meas.l2_norm(y);
    res.error = e.value;
    res.error_stderr = e.stderr_;
    return res;
  }
  Mat B(meas.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = cols[k];
  const Mat BW = B.transpose() * meas.weights.asDiagonal();
  Mat G = BW * B;
  const Vec rhs = BW * y;
  G.diagonal().array() += ridge;
  Eigen::LDLT<Mat> ldlt(G);
  const Vec dvals = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || dvals.minCoeff() <= 1e-13 * dvals.maxCoeff()) {
    if (ridge == 0.0)
      throw InvalidArgument("project_onto_span: Gram matrix is ill-conditioned; use ridge > 0");
  }
  const Vec coef = ldlt.solve(rhs);
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (coef(static_cast<Eigen::Index>(k)) != 0.0) res.output.add(basis[k], coef(static_cast<Eigen::Index>(k)));
  const IntegralEstimate e = meas.l2_norm(y - B * coef);
  res.error = e.value;
  res.error_stderr = e.stderr_;
  return res;
}

inline ProjectionResult project_onto_span(const AtomCombination& f, const DiscreteDictionary& dict,
                                          const Domain& dom, const QuadratureSpec& q, double ridge) {
  return project_onto_atoms(f, dict.atoms, dom, q, ridge);
}

}  // namespace wvar
