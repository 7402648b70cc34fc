#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvar/common.hpp"
#include "wvar/parallel.hpp"
#include "wvar/rng.hpp"
#include "wvar/types.hpp"

namespace wvar {

// Shallow ReLU networks f(x) = sum_j a_j (xi_j . x - t_j)_+ and the
// regularized data-fitting problem.

struct Neuron {
  Vec xi;         // input weight, any norm
  double t = 0.0; // bias
  double a = 0.0; // output weight
};

struct ShallowNet {
  int dim = 2;
  std::vector<Neuron> neurons;

  std::size_t size() const { return neurons.size(); }

  template <class D>
  double operator()(const Eigen::MatrixBase<D>& x) const {
    double s = 0.0;
    for (const auto& nu : neurons) s += nu.a * std::max(0.0, nu.xi.dot(x) - nu.t);
    return s;
  }

  /// Values at the columns of `points` (dim x N).
  Vec evaluate(const Mat& points) const {
    Vec out = Vec::Zero(points.cols());
    for (const auto& nu : neurons) {
      if (nu.a == 0.0) continue;
      Eigen::ArrayXd z = (nu.xi.transpose() * points).transpose().array() - nu.t;
      out.array() += nu.a * z.max(0.0);
    }
    return out;
  }

  /// (xi, t, a) -> (c xi, c t, a / c) for every neuron.
  ShallowNet rescaled(double c) const {
    require(c > 0.0, "ShallowNet::rescaled: c must be positive");
    ShallowNet r = *this;
    for (auto& nu : r.neurons) {
      nu.xi *= c;
      nu.t *= c;
      nu.a /= c;
    }
    return r;
  }

  /// Equivalent atom combination: a ||xi|| (xi/||xi|| . x - t/||xi||)_+.
  AtomCombination to_combination() const {
    AtomCombination f;
    for (const auto& nu : neurons) {
      const double r = nu.xi.norm();
      if (r == 0.0 || nu.a == 0.0) continue;
      f.add(Atom(nu.xi / r, nu.t / r), nu.a * r);
    }
    return f;
  }

  static ShallowNet from_combination(const AtomCombination& f) {
    ShallowNet net;
    if (!f.empty()) net.dim = f.terms().front().atom.dim();
    for (const auto& t : f.terms()) net.neurons.push_back({t.atom.direction, t.atom.offset, t.coef});
    return net;
  }
};

enum class Regularizer { WeightedVw, PathNorm, WeightDecay };

inline std::string regularizer_name(Regularizer r) {
  switch (r) {
    case Regularizer::WeightedVw: return "weighted-vw";
    case Regularizer::PathNorm: return "path-norm";
    case Regularizer::WeightDecay: return "weight-decay";
  }
  return "?";
}

inline Regularizer parse_regularizer(const std::string& s) {
  if (s == "weighted-vw" || s == "weighted") return Regularizer::WeightedVw;
  if (s == "path-norm" || s == "path") return Regularizer::PathNorm;
  if (s == "weight-decay" || s == "decay") return Regularizer::WeightDecay;
  throw InvalidArgument("unknown regularizer '" + s + "'");
}

/// ||xi|| * w(xi / ||xi||, t / ||xi||).
inline double neuron_vw_norm(const Vec& xi, double t, const WeightFn& wf) {
  const double r = xi.norm();
  if (!(r > 0.0)) throw InvalidArgument("neuron_vw_norm: zero input weight");
  return r * wf(Vec(xi / r), t / r);
}

/// Per-neuron contributions; their sum is regularizer_value.
inline std::vector<double> regularizer_terms(const ShallowNet& net, Regularizer kind, const WeightFn& wf) {
  std::vector<double> out;
  out.reserve(net.size());
  for (const auto& nu : net.neurons) {
    const double r = nu.xi.norm();
    switch (kind) {
      case Regularizer::WeightedVw:
        if (r == 0.0) {
          if (nu.a != 0.0) throw InvalidArgument("regularizer_value: zero input weight with nonzero output weight");
          out.push_back(0.0);
        } else {
          out.push_back(std::abs(nu.a) * neuron_vw_norm(nu.xi, nu.t, wf));
        }
        break;
      case Regularizer::PathNorm:
        if (r == 0.0 && nu.a != 0.0)
          throw InvalidArgument("regularizer_value: zero input weight with nonzero output weight");
        out.push_back(std::abs(nu.a) * r);
        break;
      case Regularizer::WeightDecay:
        out.push_back(0.5 * (nu.a * nu.a + r * r));
        break;
    }
  }
  return out;
}

inline double regularizer_value(const ShallowNet& net, Regularizer kind, const WeightFn& wf) {
  double s = 0.0;
  for (double v : regularizer_terms(net, kind, wf)) s += v;
  return s;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

struct FitProblem {
  Mat sites;    // dim x m
  Vec targets;  // m
  double lambda = 1e-3;
  int n_neurons = 10;
  Regularizer regularizer = Regularizer::WeightedVw;

  int dim() const { return static_cast<int>(sites.rows()); }
  int points() const { return static_cast<int>(sites.cols()); }
};

struct FitReport {
  ShallowNet net;
  double objective = 0.0;
  double data_fit = 0.0;
  double regularizer = 0.0;
  int active = 0;
  int iterations = 0;
  int best_restart = 0;
  bool converged = false;
  std::vector<double> trace;  // objective per iteration of the best restart
  std::vector<double> restart_objectives;
};

inline int active_neurons(const ShallowNet& net, double rel = 1e-6) {
  double amax = 0.0;
  for (const auto& nu : net.neurons) amax = std::max(amax, std::abs(nu.a));
  if (amax == 0.0) return 0;
  int c = 0;
  for (const auto& nu : net.neurons) c += std::abs(nu.a) > rel * amax ? 1 : 0;
  return c;
}

/// Merges neurons whose normalized (xi, t) agree to `tol` and drops zero
/// output weights.
inline ShallowNet merge_neurons(const ShallowNet& net, double tol = 1e-9) {
  ShallowNet out;
  out.dim = net.dim;
  std::vector<std::pair<Vec, double>> keys;
  for (const auto& nu : net.neurons) {
    const double r = nu.xi.norm();
    if (r == 0.0 || nu.a == 0.0) continue;
    const Vec u = nu.xi / r;
    const double s = nu.t / r;
    bool merged = false;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if ((keys[k].first - u).norm() <= tol && std::abs(keys[k].second - s) <= tol) {
        const double rk = out.neurons[k].xi.norm();
        out.neurons[k].a += nu.a * r / rk;
        merged = true;
        break;
      }
    }
    if (!merged) {
      keys.emplace_back(u, s);
      out.neurons.push_back(nu);
    }
  }
  std::vector<Neuron> kept;
  for (const auto& nu : out.neurons)
    if (nu.a != 0.0) kept.push_back(nu);
  out.neurons = std::move(kept);
  return out;
}

struct FitOptions {
  int budget = 2000;    // outer iterations per restart
  int restarts = 4;
  std::uint64_t seed = 0;
  double tolerance = 1e-14;  // relative objective decrease counted as stalled
  int patience = 25;         // stalled iterations before stopping
  std::size_t workers = 0;
};

namespace detail {

struct Objective {
  const FitProblem& p;
  const WeightFn& wf;

  double data_fit(const ShallowNet& net) const {
    const Vec r = p.targets - net.evaluate(p.sites);
    return r.squaredNorm();
  }
  double operator()(const ShallowNet& net) const {
    return data_fit(net) + p.lambda * regularizer_value(net, p.regularizer, wf);
  }
};

/// Per-neuron penalty factor nu_j on |a_j| for the homogeneous regularizers.
inline double penalty_factor(const Neuron& nu, Regularizer kind, const WeightFn& wf) {
  const double r = nu.xi.norm();
  if (r == 0.0) return 0.0;
  return kind == Regularizer::WeightedVw ? neuron_vw_norm(nu.xi, nu.t, wf) : r;
}

/// Unit input weights for the homogeneous regularizers; |a| = ||xi|| for
/// weight decay. Both leave f unchanged and do not increase the objective.
inline void rebalance(ShallowNet& net, Regularizer kind) {
  for (auto& nu : net.neurons) {
    const double r = nu.xi.norm();
    if (r == 0.0) continue;
    double c = 1.0 / r;
    if (kind == Regularizer::WeightDecay) {
      if (nu.a == 0.0) continue;
      c = std::sqrt(std::abs(nu.a) / r);
    }
    nu.xi *= c;
    nu.t *= c;
    nu.a /= c;
  }
}

/// Exact minimization over the output weights with (xi, t) fixed: weighted
/// LASSO by cyclic coordinate descent, or ridge in closed form.
inline void solve_output_block(ShallowNet& net, const FitProblem& p, const WeightFn& wf) {
  const int m = p.points();
  const int n = static_cast<int>(net.size());
  Mat Phi(m, n);
  for (int j = 0; j < n; ++j) {
    const auto& nu = net.neurons[static_cast<std::size_t>(j)];
    Phi.col(j) = ((nu.xi.transpose() * p.sites).transpose().array() - nu.t).max(0.0).matrix();
  }
  Vec a(n);
  for (int j = 0; j < n; ++j) a(j) = net.neurons[static_cast<std::size_t>(j)].a;

  if (p.regularizer == Regularizer::WeightDecay) {
    Mat G = Phi.transpose() * Phi;
    G.diagonal().array() += 0.5 * p.lambda;
    a = G.ldlt().solve(Phi.transpose() * p.targets);
  } else {
    Vec pen(n), col_sq(n);
    for (int j = 0; j < n; ++j) {
      pen(j) = p.lambda * penalty_factor(net.neurons[static_cast<std::size_t>(j)], p.regularizer, wf);
      col_sq(j) = Phi.col(j).squaredNorm();
    }
    Vec r = p.targets - Phi * a;
    for (int sweep = 0; sweep < 10000; ++sweep) {
      double change = 0.0;
      for (int j = 0; j < n; ++j) {
        if (col_sq(j) == 0.0) {
          if (a(j) != 0.0) a(j) = 0.0;
          continue;
        }
        const double rho = Phi.col(j).dot(r) + col_sq(j) * a(j);
        // minimize col_sq a^2 - 2 rho a + pen |a|
        double next = 0.0;
        if (rho > 0.5 * pen(j))
          next = (rho - 0.5 * pen(j)) / col_sq(j);
        else if (rho < -0.5 * pen(j))
          next = (rho + 0.5 * pen(j)) / col_sq(j);
        const double delta = next - a(j);
        if (delta != 0.0) {
          r -= delta * Phi.col(j);
          change = std::max(change, std::abs(delta) * std::sqrt(col_sq(j)));
          a(j) = next;
        }
      }
      if (change <= 1e-15 * (1.0 + p.targets.norm())) break;
    }
  }
  for (int j = 0; j < n; ++j) net.neurons[static_cast<std::size_t>(j)].a = a(j);
}

/// Gradient of the objective in (xi_j, t_j) with a fixed; subgradient 0 at kinks.
inline void input_gradient(const ShallowNet& net, const FitProblem& p, const WeightFn& wf, std::vector<Vec>& gxi,
                           std::vector<double>& gt) {
  const Vec r = p.targets - net.evaluate(p.sites);
  const std::size_t n = net.size();
  gxi.assign(n, Vec::Zero(p.dim()));
  gt.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& nu = net.neurons[j];
    if (nu.a == 0.0) continue;
    for (int i = 0; i < p.points(); ++i) {
      if (nu.xi.dot(p.sites.col(i)) - nu.t > 0.0) {
        gxi[j] -= 2.0 * r(i) * nu.a * p.sites.col(i);
        gt[j] += 2.0 * r(i) * nu.a;
      }
    }
    const double rn = nu.xi.norm();
    switch (p.regularizer) {
      case Regularizer::WeightedVw: {
        // lambda |a| ||xi|| w(t / ||xi||) with w = (1 - s)_+^e for the ball weight.
        if (wf.kind == WeightKind::BallPower) {
          const double e = wf.ball_exponent();
          const double s = nu.t / rn;
          if (s < 1.0) {
            const double base = 1.0 - s;
            const double w = std::pow(base, e);
            const double dw = -e * std::pow(base, e - 1.0);
            const double la = p.lambda * std::abs(nu.a);
            // d/dxi [||xi|| w(t/||xi||)] = xi/||xi|| (w - s w'), d/dt = w'
            gxi[j] += la * (w - s * dw) * nu.xi / rn;
            gt[j] += la * dw;
          }
        } else {
          // Central differences for other weights.
          const double h = 1e-7;
          const double la = p.lambda * std::abs(nu.a);
          gt[j] += la * (neuron_vw_norm(nu.xi, nu.t + h, wf) - neuron_vw_norm(nu.xi, nu.t - h, wf)) / (2.0 * h);
          for (int c = 0; c < p.dim(); ++c) {
            Vec xp = nu.xi, xm = nu.xi;
            xp(c) += h;
            xm(c) -= h;
            gxi[j](c) += la * (neuron_vw_norm(xp, nu.t, wf) - neuron_vw_norm(xm, nu.t, wf)) / (2.0 * h);
          }
        }
        break;
      }
      case Regularizer::PathNorm:
        gxi[j] += p.lambda * std::abs(nu.a) * nu.xi / rn;
        break;
      case Regularizer::WeightDecay:
        gxi[j] += p.lambda * nu.xi;
        break;
    }
  }
}

struct RunResult {
  ShallowNet net;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

inline Vec pack_inputs(const ShallowNet& net) {
  const int d = net.dim;
  Vec th(static_cast<Eigen::Index>(net.size()) * (d + 1));
  for (std::size_t j = 0; j < net.size(); ++j) {
    th.segment(static_cast<Eigen::Index>(j) * (d + 1), d) = net.neurons[j].xi;
    th(static_cast<Eigen::Index>(j) * (d + 1) + d) = net.neurons[j].t;
  }
  return th;
}

inline void unpack_inputs(ShallowNet& net, const Vec& th) {
  const int d = net.dim;
  for (std::size_t j = 0; j < net.size(); ++j) {
    net.neurons[j].xi = th.segment(static_cast<Eigen::Index>(j) * (d + 1), d);
    net.neurons[j].t = th(static_cast<Eigen::Index>(j) * (d + 1) + d);
  }
}

/// L-BFGS on the reduced objective J(xi, t) = min_a J(xi, t, a). The output
/// block is solved exactly at every evaluation, so the partial gradient in
/// (xi, t) is a gradient of the reduced objective. Memory is reset (and the
/// neurons rebalanced) whenever a step fails to descend.
inline RunResult run_descent(ShallowNet net, const FitProblem& p, const WeightFn& wf, const FitOptions& opt) {
  const Objective J{p, wf};
  const int memory = 10;
  RunResult res;
  net.dim = p.dim();

  std::vector<Vec> gxi;
  std::vector<double> gt;
  auto evaluate = [&](ShallowNet& n, Vec& grad) {
    solve_output_block(n, p, wf);
    const double v = J(n);
    input_gradient(n, p, wf, gxi, gt);
    grad.resize(static_cast<Eigen::Index>(n.size()) * (p.dim() + 1));
    for (std::size_t j = 0; j < n.size(); ++j) {
      grad.segment(static_cast<Eigen::Index>(j) * (p.dim() + 1), p.dim()) = gxi[j];
      grad(static_cast<Eigen::Index>(j) * (p.dim() + 1) + p.dim()) = gt[j];
    }
    return v;
  };

  rebalance(net, p.regularizer);
  Vec g;
  double cur = evaluate(net, g);
  std::vector<Vec> S, Y;
  int stalled = 0;
  for (int it = 0; it < opt.budget; ++it) {
    if (!std::isfinite(cur)) {
      std::ostringstream msg;
      msg << "fit: objective diverged at iteration " << it << " (lambda=" << p.lambda << ")";
      throw Error(msg.str());
    }
    // Two-loop recursion.
    Vec q = g;
    std::vector<double> alpha(S.size());
    for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
      alpha[static_cast<std::size_t>(k)] = S[static_cast<std::size_t>(k)].dot(q) / Y[static_cast<std::size_t>(k)].dot(S[static_cast<std::size_t>(k)]);
      q -= alpha[static_cast<std::size_t>(k)] * Y[static_cast<std::size_t>(k)];
    }
    double gamma = 1e-2;
    if (!S.empty()) gamma = S.back().dot(Y.back()) / Y.back().squaredNorm();
    Vec dir = gamma * q;
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = Y[k].dot(dir) / Y[k].dot(S[k]);
      dir += (alpha[k] - beta) * S[k];
    }
    dir = -dir;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      dir = -1e-2 * g;
      slope = g.dot(dir);
    }

    bool moved = false;
    double next = cur;
    if (slope < 0.0) {
      const Vec th = pack_inputs(net);
      double step = 1.0;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        ShallowNet trial = net;
        unpack_inputs(trial, th + step * dir);
        Vec g2;
        const double val = evaluate(trial, g2);
        if (std::isfinite(val) && val <= cur + 1e-4 * step * slope) {
          const Vec sv = step * dir, yv = g2 - g;
          if (sv.dot(yv) > 1e-16 * sv.norm() * yv.norm()) {
            S.push_back(sv);
            Y.push_back(yv);
            if (static_cast<int>(S.size()) > memory) {
              S.erase(S.begin());
              Y.erase(Y.begin());
            }
          }
          net = std::move(trial);
          g = std::move(g2);
          next = val;
          moved = true;
          break;
        }
      }
    }
    if (!moved) {
      S.clear();
      Y.clear();
      rebalance(net, p.regularizer);
      next = evaluate(net, g);
    }
    res.trace.push_back(next);
    res.iterations = it + 1;
    if (cur - next <= opt.tolerance * std::max(1.0, std::abs(next))) {
      if (++stalled >= opt.patience) {
        res.converged = true;
        cur = next;
        break;
      }
    } else {
      stalled = 0;
    }
    cur = next;
  }
  rebalance(net, p.regularizer);
  solve_output_block(net, p, wf);
  res.objective = J(net);
  res.net = std::move(net);
  return res;
}

inline ShallowNet initial_net(const FitProblem& p, std::uint64_t seed) {
  Rng rng(seed);
  ShallowNet net;
  net.dim = p.dim();
  for (int j = 0; j < p.n_neurons; ++j) {
    Vec xi(p.dim());
    do {
      for (int c = 0; c < p.dim(); ++c) xi(c) = standard_normal(rng);
    } while (xi.norm() < 1e-12);
    xi /= xi.norm();
    net.neurons.push_back({xi, uniform(rng, -1.0, 1.0), 0.0});
  }
  return net;
}

inline void validate(const FitProblem& p) {
  require(p.sites.cols() == p.targets.size(), "fit: sites and targets differ in count");
  require(p.points() >= 1, "fit: no data");
  require(p.lambda > 0.0, "fit: lambda must be > 0");
  require(p.n_neurons >= 1, "fit: need at least one neuron");
}

inline FitReport make_report(const RunResult& r, const FitProblem& p, const WeightFn& wf) {
  FitReport rep;
  rep.net = r.net;
  rep.data_fit = Objective{p, wf}.data_fit(r.net);
  rep.regularizer = regularizer_value(r.net, p.regularizer, wf);
  rep.objective = rep.data_fit + p.lambda * rep.regularizer;
  rep.active = active_neurons(r.net);
  rep.iterations = r.iterations;
  rep.converged = r.converged;
  rep.trace = r.trace;
  return rep;
}

}  // namespace detail

/// Minimizes sum_i |y_i - f(x_i)|^2 + lambda * R(f) over the network
/// parameters: L-BFGS on (xi, t) with the output weights solved exactly at
/// every evaluation; best of several restarts.
inline FitReport fit(const FitProblem& p, const WeightFn& wf, const FitOptions& opt = {}) {
  detail::validate(p);
  require(opt.restarts >= 1, "fit: restarts must be >= 1");
  require(opt.budget >= 1, "fit: budget must be >= 1");
  std::vector<detail::RunResult> runs(static_cast<std::size_t>(opt.restarts));
  parallel_for(
      runs.size(),
      [&](std::size_t r) {
        runs[r] = detail::run_descent(detail::initial_net(p, subseed(opt.seed, r)), p, wf, opt);
      },
      opt.workers);
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective < runs[best].objective) best = r;
  FitReport rep = detail::make_report(runs[best], p, wf);
  rep.best_restart = static_cast<int>(best);
  for (const auto& r : runs) rep.restart_objectives.push_back(r.objective);
  return rep;
}

/// Continues descent from a given network (warm start).
inline FitReport fit_from(const ShallowNet& start, const FitProblem& p, const WeightFn& wf, const FitOptions& opt) {
  detail::validate(p);
  return detail::make_report(detail::run_descent(start, p, wf, opt), p, wf);
}

struct PathPoint {
  double lambda = 0.0;
  FitReport report;
  double vw_cost = 0.0;  // WeightedVw regularizer of the fitted net
  double residual = 0.0; // sqrt(data fit)
};

/// Warm-started fits along a strictly decreasing lambda list.
inline std::vector<PathPoint> min_norm_path(const FitProblem& p, const std::vector<double>& lambdas,
                                            const WeightFn& wf, const FitOptions& opt = {}) {
  require(!lambdas.empty(), "min_norm_path: empty lambda list");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(lambdas[i] > 0.0, "min_norm_path: lambdas must be > 0");
    if (i > 0) require(lambdas[i] < lambdas[i - 1], "min_norm_path: lambdas must be strictly decreasing");
  }
  std::vector<PathPoint> path;
  ShallowNet warm;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    FitProblem q = p;
    q.lambda = lambdas[i];
    PathPoint pt;
    pt.lambda = lambdas[i];
    pt.report = i == 0 ? fit(q, wf, opt) : fit_from(warm, q, wf, opt);
    warm = pt.report.net;
    pt.vw_cost = regularizer_value(pt.report.net, Regularizer::WeightedVw, wf);
    pt.residual = std::sqrt(pt.report.data_fit);
    path.push_back(std::move(pt));
  }
  return path;
}

/// JSON summary of a fit: objective terms, downsampled trace, neurons with
/// their regularizer contributions.
inline nlohmann::ordered_json fit_report_json(const FitReport& rep, const FitProblem& p, const WeightFn& wf,
                                              std::size_t trace_points = 50) {
  nlohmann::ordered_json j;
  j["objective"] = rep.objective;
  j["data_fit"] = rep.data_fit;
  j["regularizer"] = rep.regularizer;
  j["regularizer_kind"] = regularizer_name(p.regularizer);
  j["lambda"] = p.lambda;
  j["active_neurons"] = rep.active;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["best_restart"] = rep.best_restart;
  j["restart_objectives"] = rep.restart_objectives;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  if (!rep.trace.empty()) {
    const std::size_t stride = std::max<std::size_t>(1, rep.trace.size() / std::max<std::size_t>(1, trace_points));
    for (std::size_t i = 0; i < rep.trace.size(); i += stride) trace.push_back({i, rep.trace[i]});
    if ((rep.trace.size() - 1) % stride != 0) trace.push_back({rep.trace.size() - 1, rep.trace.back()});
  }
  j["trace"] = trace;
  const auto terms = regularizer_terms(rep.net, p.regularizer, wf);
  nlohmann::ordered_json neurons = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < rep.net.size(); ++k) {
    const auto& nu = rep.net.neurons[k];
    nlohmann::ordered_json n;
    n["xi"] = std::vector<double>(nu.xi.data(), nu.xi.data() + nu.xi.size());
    n["t"] = nu.t;
    n["a"] = nu.a;
    n["penalty"] = terms[k];
    const double r = nu.xi.norm();
    n["affine_on_ball"] = r > 0.0 && nu.t / r < -1.0;
    neurons.push_back(n);
  }
  j["neurons"] = neurons;
  return j;
}

}  // namespace wvar
