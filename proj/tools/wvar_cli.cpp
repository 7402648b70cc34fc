// wvar: experiment runner for weighted variation spaces of ReLU atoms.
//
// Every subcommand reads its settings from (lowest to highest precedence)
// built-in defaults, a flat `key = value` config file, the environment
// (WVAR_SEED, WVAR_WORKERS) and command-line flags. Each run writes
// <out>.csv (data) and <out>.json (summary with checks and the full config).
// Exit status: 0 all checks pass, 1 a check failed, 2 usage or config error,
// 3 runtime error.

#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wvar/wvar.hpp"

namespace {

using json = nlohmann::ordered_json;
using wvar::CsvTable;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Settings: merged key-value view
// ---------------------------------------------------------------------------

class Settings {
 public:
  std::map<std::string, std::string> values;

  bool has(const std::string& k) const { return values.count(k) > 0 && !values.at(k).empty(); }

  std::string str(const std::string& k) const {
    auto it = values.find(k);
    if (it == values.end()) throw UsageError("missing setting '" + k + "'");
    return it->second;
  }

  double real(const std::string& k) const { return parse_real(k, str(k)); }

  long long integer(const std::string& k) const { return parse_int(k, str(k)); }

  std::uint64_t u64(const std::string& k) const {
    const std::string s = str(k);
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(s, &pos);
      if (pos != s.size() || s.front() == '-') throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("setting '" + k + "': expected a non-negative integer, got '" + s + "'");
    }
  }

  std::vector<long long> int_list(const std::string& k) const {
    std::vector<long long> out;
    for (const auto& item : split(str(k))) out.push_back(parse_int(k, item));
    if (out.empty()) throw UsageError("setting '" + k + "': empty list");
    return out;
  }

  std::vector<double> real_list(const std::string& k) const {
    std::vector<double> out;
    for (const auto& item : split(str(k))) out.push_back(parse_real(k, item));
    if (out.empty()) throw UsageError("setting '" + k + "': empty list");
    return out;
  }

  /// lo:hi:count
  std::vector<double> grid(const std::string& k) const {
    const std::string s = str(k);
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("setting '" + k + "': expected lo:hi:count, got '" + s + "'");
    const long long n = parse_int(k, parts[2]);
    if (n < 1) throw UsageError("setting '" + k + "': count must be >= 1");
    return wvar::linspace(parse_real(k, parts[0]), parse_real(k, parts[1]), static_cast<int>(n));
  }

 private:
  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
  }
  static double parse_real(const std::string& k, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("setting '" + k + "': expected a number, got '" + s + "'");
    }
  }
  static long long parse_int(const std::string& k, const std::string& s) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("setting '" + k + "': expected an integer, got '" + s + "'");
    }
  }
};

// ---------------------------------------------------------------------------
// Command table
// ---------------------------------------------------------------------------

struct Key {
  std::string name;
  std::string fallback;
  std::string help;
};

const std::vector<Key>& common_keys() {
  static const std::vector<Key> keys = {
      {"domain", "ball", "ball or square"},
      {"dim", "2", "dimension (norms accepts a list)"},
      {"weight", "", "ball-power, square-chord or unweighted (default: matches the domain)"},
      {"seed", "1", "base seed (env WVAR_SEED)"},
      {"workers", "0", "worker threads, 0 = all cores (env WVAR_WORKERS)"},
      {"samples", "200000", "Monte Carlo budget per error estimate"},
      {"out", "", "output prefix for <out>.csv and <out>.json (default wvar_<command>)"},
  };
  return keys;
}

struct Command {
  std::string name;
  std::string help;
  std::vector<Key> keys;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"norms",
       "atom norms against the weight over an offset grid",
       {{"t-grid", "-0.9:0.9999:50", "offsets lo:hi:count"},
        {"points", "256", "Gauss-Legendre points per slice interval"},
        {"spread-max", "10", "pass if max/min of the scaled norm is at most this"}}},
      {"approximate-atom",
       "constructive approximation of random atoms (d = 2 planar, d >= 3 ball)",
       {{"m", "", "list of grid resolutions (default 8,16,32 for d = 2, 16,32 for d >= 3)"},
        {"atoms", "200", "random atoms per resolution"},
        {"probes", "10000", "outside-region probes per atom (d = 2)"},
        {"A", "2", "coarse cell size for d >= 3"},
        {"dictionary-json", "", "also write the dictionary for the largest m (d >= 3) to this path"}}},
      {"rates",
       "error against budget with a log-log slope fit",
       {{"m", "", "resolutions; budgets are m(m-1) for d = 2, |W_k| 2m for d >= 3 (default 8,16,32,64 / 2,4,8,16)"},
        {"n", "", "explicit budget list (overrides m)"},
        {"generator", "random", "random (random combination) or atom (single atom)"},
        {"atoms", "200", "atoms in the random combination"},
        {"budget", "1", "weighted cost of the random combination"},
        {"t", "0.5", "offset for the single-atom generator"},
        {"directions", "8", "directions averaged by the single-atom generator"},
        {"trials", "10", "Maurey trials per cell"},
        {"slope-max", "", "pass if the fitted slope is at most this (default per generator and d)"}}},
      {"maurey",
       "Maurey sampling of an equal-weight atom sum",
       {{"n", "4,16,64", "term budgets"},
        {"atoms", "100", "atoms in h"},
        {"seeds", "20", "independent seeds per budget"},
        {"trials", "10", "draws per cell (best is kept)"},
        {"slope-tol", "0.15", "pass if |slope + 0.5| is at most this"},
        {"bound-fraction", "0.95", "pass if this fraction of cells is within V delta n^-1/2"}}},
      {"train",
       "regularized shallow network fit",
       {{"points", "10", "data sites"},
        {"neurons", "20", "network width"},
        {"lambda", "1e-3", "regularization strength"},
        {"regularizer", "weighted-vw", "weighted-vw, path-norm or weight-decay"},
        {"target", "sine", "sine, constant or random"},
        {"value", "1", "constant target value"},
        {"budget", "2000", "optimizer iterations per restart"},
        {"restarts", "10", "random restarts"}}},
      {"path",
       "warm-started fits along a decreasing lambda list",
       {{"lambdas", "1e-1,3e-2,1e-2,3e-3,1e-3,3e-4,1e-4", "strictly decreasing lambdas"},
        {"points", "10", "data sites"},
        {"neurons", "20", "network width"},
        {"regularizer", "weighted-vw", "weighted-vw, path-norm or weight-decay"},
        {"target", "sine", "sine, constant or random"},
        {"value", "1", "constant target value"},
        {"budget", "2000", "optimizer iterations per fit"},
        {"restarts", "4", "random restarts for the first lambda"}}},
  };
  return cmds;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  double value;
  double threshold;
  std::string relation;  // "<=", ">=", "=="
  bool pass;
};

struct Result {
  CsvTable csv{{}};
  json details = json::object();
  std::vector<Check> checks;
  int skipped = 0;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

Check at_most(const std::string& name, double v, double thr) { return {name, v, thr, "<=", v <= thr}; }
Check at_least(const std::string& name, double v, double thr) { return {name, v, thr, ">=", v >= thr}; }

wvar::Domain domain_of(const Settings& s, int dim) {
  const std::string d = s.str("domain");
  if (d == "ball") return wvar::Domain::ball(dim);
  if (d == "square") {
    if (dim != 2) throw UsageError("the square domain is two-dimensional");
    return wvar::Domain::square();
  }
  throw UsageError("unknown domain '" + d + "' (expected ball or square)");
}

wvar::WeightFn weight_of(const Settings& s, const wvar::Domain& dom) {
  std::string w = s.has("weight") ? s.str("weight") : (dom.is_ball() ? "ball-power" : "square-chord");
  if (w == "ball-power") return wvar::WeightFn::ball_power(dom.dim);
  if (w == "square-chord") return wvar::WeightFn::square_chord_sqrt();
  if (w == "unweighted") return wvar::WeightFn::unweighted(dom.dim);
  throw UsageError("unknown weight '" + w + "'");
}

int single_dim(const Settings& s) {
  const auto dims = s.int_list("dim");
  if (dims.size() != 1) throw UsageError("this command takes a single dimension");
  if (dims[0] < 2) throw UsageError("dim must be >= 2");
  return static_cast<int>(dims[0]);
}

std::vector<int> to_int(const std::vector<long long>& v) { return {v.begin(), v.end()}; }

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

Result run_norms(const Settings& s) {
  Result r;
  r.csv = CsvTable({"dim", "t", "norm", "weight", "scaled_norm", "norm_over_weight"});
  const auto ts = s.grid("t-grid");
  const double spread_max = s.real("spread-max");
  json per_dim = json::array();
  for (long long d : s.int_list("dim")) {
    if (d < 2) throw UsageError("dim must be >= 2");
    const wvar::Domain dom = domain_of(s, static_cast<int>(d));
    const wvar::WeightFn wf = weight_of(s, dom);
    const wvar::Vec xi = dom.is_ball() ? wvar::unit_vector(dom.dim, 0) : wvar::vec2(std::cos(0.3), std::sin(0.3));
    const wvar::NormScan scan = wvar::norm_scan(dom, xi, ts, wf, static_cast<int>(s.integer("points")));
    for (const auto& row : scan.rows)
      r.csv.row() << row.dim << row.t << row.norm << row.weight << row.scaled << row.norm_over_weight;
    json j;
    j["dim"] = d;
    j["rows"] = scan.rows.size();
    j["min"] = scan.scaled_min;
    j["max"] = scan.scaled_max;
    j["spread"] = scan.spread();
    j["statistic"] = dom.is_ball() ? "norm (1-t)^-(3/2+(d-1)/4)" : "norm / weight";
    if (dom.is_ball()) {
      r.checks.push_back(at_most("scaled norm spread, d=" + std::to_string(d), scan.spread(), spread_max));
    } else {
      const wvar::AdmissibilityReport adm = wvar::check_admissible(wf, dom, 64);
      j["admissible_full_range"] = adm.admissible();
      j["zero_weight_atoms"] = adm.flagged.size();
      r.checks.push_back(at_most("max norm/weight on the grid", scan.scaled_max, std::numeric_limits<double>::max()));
    }
    per_dim.push_back(j);
  }
  r.details["per_dim"] = per_dim;
  return r;
}

Result run_approximate_atom(const Settings& s) {
  Result r;
  const int d = single_dim(s);
  const wvar::Domain dom = domain_of(s, d);
  const auto m_list = to_int(s.int_list("m"));
  const int atoms = static_cast<int>(s.integer("atoms"));
  const std::uint64_t seed = s.u64("seed");
  const std::int64_t samples = s.integer("samples");
  if (d == 2) {
    r.csv = CsvTable({"m", "atom", "xi_0", "xi_1", "t", "kind", "gap", "max_coef", "outside_max", "error",
                      "error_stderr", "weight", "scaled_error"});
    const wvar::PlanarSuite suite =
        wvar::planar_suite(dom, m_list, atoms, seed, static_cast<int>(s.integer("probes")), samples);
    for (const auto& row : suite.rows)
      r.csv.row() << row.m << row.index << row.xi(0) << row.xi(1) << row.t << row.kind << row.gap << row.max_coef
                  << row.outside_max << row.error << row.error_stderr << row.weight << row.scaled;
    r.details["max_coef"] = suite.max_coef;
    r.details["max_outside"] = suite.max_outside;
    r.details["max_scaled_error"] = suite.max_scaled;
    r.details["scaled_error"] = dom.is_ball() ? "error / (w n^-3/4), n = m(m-1)" : "error / (m^-3/2 |L|^1/2)";
    r.details["degenerate"] = suite.degenerate;
    if (dom.is_ball()) r.checks.push_back(at_most("max |c|", suite.max_coef, 1.0 + 1e-9));
    r.checks.push_back(at_most("max |phi - g| outside the strip", suite.max_outside, 1e-9));
    return r;
  }
  if (!dom.is_ball()) throw UsageError("d >= 3 requires the ball");
  wvar::GeneralOptions opt;
  opt.A = static_cast<int>(s.integer("A"));
  r.csv = CsvTable({"m", "atom", "t", "kind", "neighbors", "sum_b_error", "reconstruction", "l1", "sandwich", "c1",
                    "sup_constant", "measure_constant", "l2_error", "outside_violations", "note"});
  const wvar::GeneralSuite suite = wvar::general_suite(d, m_list, atoms, seed, opt, std::min<std::int64_t>(samples, 20000));
  for (const auto& row : suite.rows)
    r.csv.row() << row.m << row.index << row.t << row.kind << row.neighbors << row.sum_b_error << row.reconstruction
                << row.l1 << row.sandwich << row.c1 << row.sup_constant << row.measure_constant << row.l2_error
                << static_cast<long long>(row.outside_violations) << row.note;
  r.skipped = suite.skipped;
  r.details["skipped_below_resolution"] = suite.skipped;
  r.details["c1_max"] = suite.c1_max;
  r.details["sup_constant_max"] = suite.sup_max;
  r.details["measure_constant_max"] = suite.measure_max;
  r.details["max_l1"] = suite.max_l1;
  r.checks.push_back({"sandwich t <= t+ <= t~", suite.sandwich ? 1.0 : 0.0, 1.0, "==", suite.sandwich});
  if (suite.usable_m() >= 2)
    r.checks.push_back(at_most("C1 ratio across m", suite.c1_ratio(), 2.0));
  r.details["usable_resolutions"] = suite.usable_m();
  r.checks.push_back(at_most("reconstruction error", suite.max_reconstruction, 1e-10));
  r.checks.push_back(at_most("|sum b - 1|", suite.max_sum_b_error, 1e-12));
  r.checks.push_back(at_most("max l1 mass", suite.max_l1, 20.0));
  r.checks.push_back(at_most("outside-region violations", static_cast<double>(suite.outside_violations), 0.0));
  if (s.has("dictionary-json")) {
    const int m = *std::max_element(m_list.begin(), m_list.end());
    int k = 0;
    while ((1 << k) < m) ++k;
    wvar::write_json(s.str("dictionary-json"),
                     wvar::dictionary_to_json(wvar::make_dictionary(wvar::build_direction_grid(d, k),
                                                                    wvar::build_offset_grid(1 << k))));
  }
  return r;
}

Result run_rates(const Settings& s) {
  Result r;
  const int d = single_dim(s);
  const wvar::Domain dom = domain_of(s, d);
  const wvar::WeightFn wf = weight_of(s, dom);
  const std::uint64_t seed = s.u64("seed");
  std::vector<std::int64_t> n_list;
  if (s.has("n")) {
    for (long long n : s.int_list("n")) n_list.push_back(n);
  } else {
    for (long long m : s.int_list("m")) {
      if (d == 2) {
        n_list.push_back(wvar::planar_dimension(static_cast<int>(m)));
      } else {
        int k = 0;
        while ((1LL << k) < m) ++k;
        if ((1LL << k) != m) throw UsageError("for d >= 3 each m must be a power of two");
        n_list.push_back(wvar::dictionary_size(d, k));
      }
    }
  }
  const std::string gen_name = s.str("generator");
  wvar::Generator gen;
  if (gen_name == "random") {
    gen = wvar::Generator::random(static_cast<int>(s.integer("atoms")), s.real("budget"), seed);
  } else if (gen_name == "atom") {
    gen = wvar::Generator::single_atom(s.real("t"), seed);
    gen.directions = static_cast<int>(s.integer("directions"));
  } else {
    throw UsageError("unknown generator '" + gen_name + "' (expected random or atom)");
  }
  wvar::RateOptions opt;
  opt.maurey.trials = static_cast<int>(s.integer("trials"));
  opt.quadrature = wvar::QuadratureSpec::monte_carlo(s.integer("samples"), wvar::subseed(seed, 77));
  const wvar::RateReport rep = wvar::rate_experiment(gen, n_list, dom, wf, opt);

  r.csv = CsvTable({"n", "m", "error", "stderr", "seed", "used", "note"});
  for (const auto& e : rep.entries) {
    r.csv.row() << static_cast<long long>(e.n) << e.m << e.error << e.error_stderr
                << static_cast<unsigned long long>(e.seed) << e.used << e.note;
    if (e.note.rfind("skipped", 0) == 0) ++r.skipped;
  }
  double slope_max;
  if (s.has("slope-max")) {
    slope_max = s.real("slope-max");
  } else if (gen.kind == wvar::GeneratorKind::SingleAtom) {
    slope_max = d == 2 ? -0.65 : rep.target_slope + 0.15;
  } else {
    slope_max = d == 2 ? -1.0 : rep.target_slope + 0.15;
  }
  json segments = json::array();
  const wvar::RateEntry* prev = nullptr;
  for (const auto& e : rep.entries) {
    if (!e.used) continue;
    if (prev)
      segments.push_back({{"n_from", prev->n}, {"n_to", e.n},
                          {"slope", std::log(e.error / prev->error) / std::log(double(e.n) / double(prev->n))}});
    prev = &e;
  }
  r.details["fitted_slope"] = rep.fitted_slope;
  r.details["segment_slopes"] = segments;
  r.details["slope_stderr"] = rep.slope_stderr;
  r.details["fitted_intercept"] = rep.fitted_intercept;
  r.details["target_slope"] = rep.target_slope;
  r.details["slope_max"] = slope_max;
  if (!rep.note.empty()) r.details["note"] = rep.note;
  if (rep.fitted)
    r.checks.push_back(at_most("fitted slope", rep.fitted_slope, slope_max));
  else
    r.checks.push_back({"fitted slope", 0.0, slope_max, "<=", false});
  return r;
}

Result run_maurey(const Settings& s) {
  Result r;
  const int d = single_dim(s);
  if (s.str("domain") != "ball") throw UsageError("maurey runs on the ball");
  const wvar::MaureyStudy st =
      wvar::maurey_study(d, static_cast<int>(s.integer("atoms")), to_int(s.int_list("n")),
                         static_cast<int>(s.integer("seeds")), static_cast<int>(s.integer("trials")), s.u64("seed"),
                         s.integer("samples"));
  r.csv = CsvTable({"seed", "n", "best_error", "best_stderr", "first_trial_error", "mean_trial_error", "variation",
                    "delta", "bound", "within_bound"});
  for (const auto& row : st.rows)
    r.csv.row() << static_cast<unsigned long long>(row.seed) << row.n << row.best_error << row.best_stderr
                << row.first_trial_error << row.mean_trial_error << row.variation << row.delta << row.bound
                << row.within_bound;
  r.details["median_best_error"] = st.median_best;
  r.details["median_first_trial_error"] = st.median_single;
  r.details["slope"] = st.best_fit.slope;
  r.details["slope_stderr"] = st.best_fit.slope_stderr;
  r.details["first_trial_slope"] = st.single_fit.slope;
  r.details["within_bound_fraction"] = st.within_fraction;
  r.checks.push_back(at_most("|median slope + 0.5|", std::abs(st.best_fit.slope + 0.5), s.real("slope-tol")));
  r.checks.push_back(at_least("fraction within V delta n^-1/2", st.within_fraction, s.real("bound-fraction")));
  return r;
}

wvar::FitProblem problem_of(const Settings& s, double lambda) {
  const int d = single_dim(s);
  if (s.str("domain") != "ball") throw UsageError("training runs on the ball");
  return wvar::make_problem(d, static_cast<int>(s.integer("points")), static_cast<int>(s.integer("neurons")), lambda,
                            wvar::parse_regularizer(s.str("regularizer")), wvar::parse_target(s.str("target")),
                            s.real("value"), s.u64("seed"));
}

wvar::FitOptions fit_options(const Settings& s) {
  wvar::FitOptions o;
  o.budget = static_cast<int>(s.integer("budget"));
  o.restarts = static_cast<int>(s.integer("restarts"));
  o.seed = wvar::subseed(s.u64("seed"), 11);
  return o;
}

Result run_train(const Settings& s) {
  Result r;
  const wvar::FitProblem p = problem_of(s, s.real("lambda"));
  const wvar::Domain dom = wvar::Domain::ball(p.dim());
  const wvar::WeightFn wf = weight_of(s, dom);
  const wvar::FitReport rep = wvar::fit(p, wf, fit_options(s));
  std::vector<std::string> header = {"neuron"};
  for (int c = 0; c < p.dim(); ++c) header.push_back("xi_" + std::to_string(c));
  for (const char* h : {"t", "a", "penalty"}) header.push_back(h);
  r.csv = CsvTable(header);
  const auto terms = wvar::regularizer_terms(rep.net, p.regularizer, wf);
  for (std::size_t j = 0; j < rep.net.size(); ++j) {
    auto& row = r.csv.row();
    row << static_cast<int>(j);
    for (int c = 0; c < p.dim(); ++c) row << rep.net.neurons[j].xi(c);
    row << rep.net.neurons[j].t << rep.net.neurons[j].a << terms[j];
  }
  r.details["fit"] = wvar::fit_report_json(rep, p, wf);
  r.details["merged_active_neurons"] = wvar::active_neurons(wvar::merge_neurons(rep.net));
  // Invariance of f and of the weighted regularizer under (c xi, c t, a / c).
  const wvar::ShallowNet scaled = rep.net.rescaled(3.7);
  const wvar::Vec f0 = rep.net.evaluate(p.sites), f1 = scaled.evaluate(p.sites);
  const double fdiff = (f0 - f1).cwiseAbs().maxCoeff() / std::max(1.0, f0.cwiseAbs().maxCoeff());
  const double r0 = wvar::regularizer_value(rep.net, wvar::Regularizer::WeightedVw, wf);
  const double r1 = wvar::regularizer_value(scaled, wvar::Regularizer::WeightedVw, wf);
  const double rdiff = std::abs(r0 - r1) / std::max(1.0, std::abs(r0));
  r.checks.push_back(at_most("objective <= zero network objective", rep.objective, p.targets.squaredNorm()));
  r.checks.push_back({"optimizer converged", rep.converged ? 1.0 : 0.0, 1.0, "==", rep.converged});
  r.checks.push_back(at_most("rescaling change in f", fdiff, 1e-12));
  r.checks.push_back(at_most("rescaling change in weighted regularizer", rdiff, 1e-12));
  return r;
}

Result run_path(const Settings& s) {
  Result r;
  const auto lambdas = s.real_list("lambdas");
  const wvar::FitProblem p = problem_of(s, lambdas.front());
  const wvar::Domain dom = wvar::Domain::ball(p.dim());
  const wvar::WeightFn wf = weight_of(s, dom);
  const auto path = wvar::min_norm_path(p, lambdas, wf, fit_options(s));
  r.csv = CsvTable({"lambda", "objective", "data_fit", "residual", "vw_cost", "active"});
  for (const auto& pt : path)
    r.csv.row() << pt.lambda << pt.report.objective << pt.report.data_fit << pt.residual << pt.vw_cost
                << pt.report.active;
  const double M = wvar::interpolant_cost(p, wf, wvar::subseed(s.u64("seed"), 3));
  const double bound = 10.0 * std::sqrt(lambdas.back() * M);
  double worst = 0.0;  // largest relative drop of vw_cost as lambda decreases
  for (std::size_t i = 1; i < path.size(); ++i)
    if (path[i - 1].vw_cost > 0.0) worst = std::max(worst, (path[i - 1].vw_cost - path[i].vw_cost) / path[i - 1].vw_cost);
  r.details["interpolant_cost"] = M;
  r.details["residual_bound"] = bound;
  r.details["final_vw_cost"] = path.back().vw_cost;
  r.checks.push_back(at_most("final residual", path.back().residual, bound));
  r.checks.push_back(at_most("vw_cost decrease along the path (relative)", worst, 0.05));
  return r;
}

/// Defaults that depend on the dimension.
void resolve_defaults(const std::string& cmd, Settings& s) {
  if (s.has("m")) return;
  const bool planar = s.int_list("dim").front() == 2;
  if (cmd == "approximate-atom") s.values["m"] = planar ? "8,16,32" : "16,32";
  if (cmd == "rates") s.values["m"] = planar ? "8,16,32,64" : "2,4,8,16";
}

Result dispatch(const std::string& cmd, const Settings& s) {
  if (cmd == "norms") return run_norms(s);
  if (cmd == "approximate-atom") return run_approximate_atom(s);
  if (cmd == "rates") return run_rates(s);
  if (cmd == "maurey") return run_maurey(s);
  if (cmd == "train") return run_train(s);
  if (cmd == "path") return run_path(s);
  throw UsageError("unknown command '" + cmd + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted variation spaces for ReLU atoms: experiments and checks", "wvar"};
  app.require_subcommand(1);
  app.fallthrough(false);

  struct Registered {
    CLI::App* sub;
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> opts;
  };
  std::vector<Registered> regs(commands().size());
  for (std::size_t c = 0; c < commands().size(); ++c) {
    const Command& cmd = commands()[c];
    Registered& reg = regs[c];
    reg.sub = app.add_subcommand(cmd.name, cmd.help);
    reg.sub->add_option("--config", reg.config_path, "flat key = value config file");
    std::vector<Key> keys = common_keys();
    keys.insert(keys.end(), cmd.keys.begin(), cmd.keys.end());
    for (const Key& k : keys) {
      std::string help = k.help;
      if (!k.fallback.empty()) help += " [default: " + k.fallback + "]";
      reg.opts[k.name] = reg.sub->add_option("--" + k.name, reg.flags[k.name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::size_t which = 0;
  while (which < regs.size() && !regs[which].sub->parsed()) ++which;
  if (which == regs.size()) {
    std::cerr << app.help();
    return 2;
  }
  const Command& cmd = commands()[which];
  Registered& reg = regs[which];

  Settings s;
  try {
    std::vector<Key> keys = common_keys();
    keys.insert(keys.end(), cmd.keys.begin(), cmd.keys.end());
    for (const Key& k : keys) s.values[k.name] = k.fallback;
    if (!reg.config_path.empty()) {
      for (const auto& [k, v] : wvar::read_config_file(reg.config_path)) {
        if (k == "command") {
          if (v != cmd.name) throw UsageError("config file is for command '" + v + "', not '" + cmd.name + "'");
          continue;
        }
        if (!s.values.count(k)) throw UsageError("config file: unknown key '" + k + "' for " + cmd.name);
        s.values[k] = v;
      }
    }
    if (const char* e = std::getenv("WVAR_SEED"); e && *e) s.values["seed"] = e;
    if (const char* e = std::getenv("WVAR_WORKERS"); e && *e) s.values["workers"] = e;
    for (const auto& [k, opt] : reg.opts)
      if (opt->count() > 0) s.values[k] = reg.flags[k];
    if (s.str("out").empty()) s.values["out"] = "wvar_" + cmd.name;
    resolve_defaults(cmd.name, s);
    const long long workers = s.integer("workers");
    if (workers < 0) throw UsageError("workers must be >= 0");
    wvar::default_workers() = static_cast<std::size_t>(workers);
    (void)s.u64("seed");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n\n" << reg.sub->help();
    return 2;
  }

  Result res;
  try {
    res = dispatch(cmd.name, s);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wvar::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  const bool pass = res.all_pass();
  json summary;
  summary["command"] = cmd.name;
  summary["generated_at"] = wvar::utc_timestamp();
  summary["pass"] = pass;
  summary["skipped"] = res.skipped;
  json checks = json::array();
  for (const auto& c : res.checks) {
    json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["relation"] = c.relation;
    j["threshold"] = c.threshold;
    j["pass"] = c.pass;
    checks.push_back(j);
  }
  summary["checks"] = checks;
  summary["results"] = res.details;
  json config = json::object();
  for (const auto& [k, v] : s.values) config[k] = v;
  summary["config"] = config;

  const std::string out = s.str("out");
  try {
    res.csv.write(out + ".csv");
    wvar::write_json(out + ".json", summary);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  for (const auto& c : res.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << wvar::format_double(c.value) << ' ' << c.relation
              << ' ' << wvar::format_double(c.threshold) << '\n';
  if (res.skipped > 0) std::cout << "SKIP " << res.skipped << " cell(s) below resolution\n";
  std::cout << "wrote " << out << ".csv and " << out << ".json\n";
  return pass ? 0 : 1;
}
