// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: wvar_acceptance [criterion ...]   (default: all of 1..8)
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "wvar/wvar.hpp"

using namespace wvar;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void require_that(Outcome& o, bool cond, const std::string& what) {
  if (!cond) {
    o.pass = false;
    o.detail += " [violated: " + what + "]";
  }
}

Outcome norm_equivalence() {
  Outcome o;
  for (int d : {2, 3, 4}) {
    const NormScan s = norm_scan(Domain::ball(d), unit_vector(d, 0), linspace(-0.9, 0.9999, 50), WeightFn::ball_power(d));
    o.detail += " d=" + std::to_string(d) + " spread=" + fmt("%.4f", s.spread());
    require_that(o, s.rows.size() == 50 && s.spread() <= 10.0, "spread <= 10 at d=" + std::to_string(d));
  }
  return o;
}

Outcome planar_lemma() {
  Outcome o;
  const PlanarSuite s = planar_suite(Domain::ball(2), {8, 16, 32}, 200, 3, 10000);
  o.detail = " max|c|=" + fmt("%.6f", s.max_coef) + " outside=" + fmt("%.2e", s.max_outside) +
             " max error/(w n^-3/4)=" + fmt("%.4f", s.max_scaled) + " degenerate=" + std::to_string(s.degenerate);
  require_that(o, s.rows.size() == 600, "600 atom cells");
  require_that(o, s.max_coef <= 1.0 + 1e-9, "|c| <= 1 + 1e-9");
  require_that(o, s.max_outside <= 1e-9, "outside-strip agreement <= 1e-9");
  return o;
}

RateOptions rate_options() {
  RateOptions opt;
  opt.maurey.trials = 10;
  return opt;
}

Outcome atom_rate() {
  Outcome o;
  const RateReport r = rate_experiment(Generator::single_atom(0.5, 3), planar_budgets({8, 16, 32, 64}),
                                       Domain::ball(2), WeightFn::ball_power(2), rate_options());
  o.detail = " slope=" + fmt("%.4f", r.fitted_slope) + " stderr=" + fmt("%.4f", r.slope_stderr);
  require_that(o, r.fitted && r.fitted_slope <= -0.65, "slope <= -0.65");
  return o;
}

Outcome function_rate() {
  Outcome o;
  const Domain disk = Domain::ball(2);
  const WeightFn wf = WeightFn::ball_power(2);
  const Generator gen = Generator::random(200, 1.0, 7);
  const RateReport r = rate_experiment(gen, planar_budgets({8, 16, 32, 64}), disk, wf, rate_options());
  const double cost = vw_cost(random_combination(gen.combination, disk, wf), wf);
  o.detail = " vw_cost=" + fmt("%.12f", cost) + " slope=" + fmt("%.4f", r.fitted_slope) +
             " stderr=" + fmt("%.4f", r.slope_stderr);
  require_that(o, std::abs(cost - 1.0) <= 1e-12, "vw_cost = 1");
  require_that(o, r.fitted && r.fitted_slope <= -1.0, "slope <= -1.0");
  return o;
}

Outcome general_lemma() {
  Outcome o;
  const GeneralSuite s = general_suite(3, {16, 32}, 500, 9);
  o.detail = " C1=" + fmt("%.4f", s.c1_max[0]) + "," + fmt("%.4f", s.c1_max[1]) + " ratio=" + fmt("%.4f", s.c1_ratio()) +
             " sup-const=" + fmt("%.4f", s.sup_max[0]) + "," + fmt("%.4f", s.sup_max[1]) +
             " measure-const=" + fmt("%.4f", s.measure_max[0]) + "," + fmt("%.4f", s.measure_max[1]) +
             " l1=" + fmt("%.3f", s.max_l1) + " |sum b-1|=" + fmt("%.1e", s.max_sum_b_error) +
             " recon=" + fmt("%.1e", s.max_reconstruction) + " skipped=" + std::to_string(s.skipped);
  require_that(o, s.sandwich, "t <= t+ <= t~ <= t + C1 sqrt(1-t^2)/m");
  require_that(o, s.usable_m() == 2 && s.c1_ratio() <= 2.0, "C1 ratio <= 2 across both m");
  require_that(o, s.max_reconstruction <= 1e-10, "reconstruction <= 1e-10");
  require_that(o, s.max_sum_b_error <= 1e-12, "|sum b - 1| <= 1e-12");
  require_that(o, s.max_l1 <= 20.0, "l1 <= 20");
  require_that(o, s.outside_violations == 0, "agreement outside the error region");
  return o;
}

Outcome maurey() {
  Outcome o;
  const MaureyStudy s = maurey_study(2, 100, {4, 16, 64}, 20, 10, 42);
  o.detail = " median slope=" + fmt("%.4f", s.best_fit.slope) + " stderr=" + fmt("%.4f", s.best_fit.slope_stderr) +
             " within-bound=" + fmt("%.3f", s.within_fraction);
  require_that(o, std::abs(s.best_fit.slope + 0.5) <= 0.15, "slope in -0.5 +- 0.15");
  require_that(o, s.within_fraction >= 0.95, ">= 95% within V delta n^-1/2");
  return o;
}

Outcome training() {
  Outcome o;
  const WeightFn wf = WeightFn::ball_power(2);
  Rng rng(2024);
  ShallowNet net;
  net.dim = 2;
  for (int j = 0; j < 20; ++j) {
    Vec xi = random_direction(2, rng) * uniform(rng, 0.3, 3.0);
    net.neurons.push_back({xi, uniform(rng, -1.5, 1.5), uniform(rng, -2.0, 2.0)});
  }
  Mat pts(2, 200);
  for (int i = 0; i < 200; ++i) pts.col(i) = sample_ball(2, rng);
  double f_dev = 0.0, r_dev = 0.0;
  const Vec f0 = net.evaluate(pts);
  const double r0 = regularizer_value(net, Regularizer::WeightedVw, wf);
  for (double c : {0.25, 3.0, 17.0}) {
    const ShallowNet s = net.rescaled(c);
    f_dev = std::max(f_dev, (s.evaluate(pts) - f0).cwiseAbs().maxCoeff() / f0.cwiseAbs().maxCoeff());
    r_dev = std::max(r_dev, std::abs(regularizer_value(s, Regularizer::WeightedVw, wf) - r0) / r0);
  }
  ShallowNet unit = net;
  for (auto& nu : unit.neurons) {
    const double r = nu.xi.norm();
    nu.xi /= r;
    nu.t = std::clamp(nu.t / r, -1.0, 1.0);
  }
  double oracle = 0.0;  // sum |a| (1 - t)^(1/2 + d/4), d = 2
  for (const auto& nu : unit.neurons) oracle += std::abs(nu.a) * (1.0 - nu.t);
  const double unit_dev = std::abs(regularizer_value(unit, Regularizer::WeightedVw, wf) - oracle) / oracle;
  const double vw_dev = std::abs(regularizer_value(unit, Regularizer::WeightedVw, wf) - vw_cost(unit.to_combination(), wf)) / oracle;

  FitProblem zero = make_problem(2, 10, 20, 1e-3, Regularizer::WeightedVw, TargetKind::Constant, 0.0, 5);
  FitOptions zo;
  zo.restarts = 2;
  const double zero_obj = fit(zero, wf, zo).objective;

  const FitProblem p = make_problem(2, 10, 20, 1e-3, Regularizer::WeightedVw, TargetKind::Sine, 1.0, 1);
  FitOptions base;
  base.budget = 2000;
  base.restarts = 10;
  base.seed = 1;
  FitOptions ref = base;
  ref.budget = 20000;
  const double a = fit(p, wf, base).objective, b = fit(p, wf, ref).objective;
  const double rel = std::abs(a - b) / std::abs(b);

  o.detail = " homogeneity f=" + fmt("%.1e", f_dev) + " reg=" + fmt("%.1e", r_dev) + " unit-norm=" + fmt("%.1e", std::max(unit_dev, vw_dev)) +
             " zero-target objective=" + fmt("%.1e", zero_obj) + " objective=" + fmt("%.10e", a) +
             " 10x-budget=" + fmt("%.10e", b) + " rel=" + fmt("%.1e", rel);
  require_that(o, f_dev <= 1e-12 && r_dev <= 1e-12, "homogeneity invariance");
  require_that(o, unit_dev <= 1e-12 && vw_dev <= 1e-12, "regularizer = vw_cost at unit norms");
  require_that(o, zero_obj <= 1e-8, "zero-target objective <= 1e-8");
  require_that(o, rel <= 1e-3, "within 1e-3 of the 10x-budget run");
  return o;
}

Outcome weighted_vs_unweighted_ball() {
  Outcome o;
  const ComparisonReport c = weighted_vs_unweighted(Domain::ball(2), WeightFn::ball_power(2),
                                                    planar_budgets({8, 16, 32, 64}), 200, 1.0, 11, rate_options());
  o.detail = " l1=" + fmt("%.3f", c.l1_mass) + " vw(boundary)=" + fmt("%.4f", c.vw_boundary) +
             " vw(bulk)=" + fmt("%.4f", c.vw_bulk) + " ratio curve:";
  for (const auto& r : c.rows) o.detail += " n=" + std::to_string(r.n) + ":" + fmt("%.4f", r.ratio());
  require_that(o, c.rows.size() == 4 && c.boundary_smaller_everywhere(), "boundary error < bulk error at every n");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "norm equivalence on B^d", 10.0, norm_equivalence},
      {2, "planar atom construction", 120.0, planar_lemma},
      {3, "d=2 single-atom rate", 60.0, atom_rate},
      {4, "d=2 function rate", 600.0, function_rate},
      {5, "d=3 atom construction", 300.0, general_lemma},
      {6, "Maurey sampling", 120.0, maurey},
      {7, "regularized training", 300.0, training},
      {8, "weighted vs unweighted", 600.0, weighted_vs_unweighted_ball},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool ok = true;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string(" exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_seconds) {
      o.pass = false;
      o.detail += " [violated: runtime limit " + fmt("%.0f", c.limit_seconds) + " s]";
    }
    ok = ok && o.pass;
    std::printf("%s criterion %d (%s):%s time=%.1fs\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
