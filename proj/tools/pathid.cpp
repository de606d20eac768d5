// Command-line front end: simulate, sweep, analyze, graph, feasibility.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pathid/analysis.hpp"
#include "pathid/engine.hpp"
#include "pathid/errors.hpp"
#include "pathid/graphs.hpp"
#include "pathid/setup_document.hpp"

using namespace pathid;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

std::string num(double v) {
  if (v == 0.0 || std::abs(v) < 1e-300) v = 0.0;
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

std::string fixed(double v, int digits) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string complex_fixed(Complex c, int digits) {
  std::string im = fixed(c.imag(), digits);
  if (im.front() != '-') im = "+" + im;
  return fixed(c.real(), digits) + im + "i";
}

struct Common {
  std::string file;
  std::vector<std::string> sets;
  int order = -1;
  std::string pattern;
};

void add_common(CLI::App* cmd, Common& c, bool file_required = true) {
  auto* opt = cmd->add_option("file", c.file, "setup file");
  if (file_required) opt->required();
  cmd->add_option("--set", c.sets, "bind a parameter, name=value (repeatable)");
  cmd->add_option("--order", c.order, "override the truncation order")->check(CLI::NonNegativeNumber);
  cmd->add_option("--pattern", c.pattern, "detection pattern, e.g. a,b or {d1|d1p}=1,{d2|d2p}=1");
}

struct Loaded {
  SetupDocument doc;
  ExperimentSetup setup;
  Bindings overrides;
};

Loaded load(const Common& c) {
  Loaded l;
  l.doc = SetupDocument::load(c.file);
  l.setup = l.doc.build();
  if (c.order >= 0) l.setup = l.setup.with_truncation(c.order);
  Bindings known = l.setup.defaults();
  for (const auto& s : c.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects name=value, got '" + s + "'");
    double v = Expr::parse(s.substr(eq + 1)).eval(known);
    l.overrides[s.substr(0, eq)] = v;
    known[s.substr(0, eq)] = v;
  }
  return l;
}

std::optional<DetectionPattern> pattern_for(const Common& c, const Loaded& l) {
  if (!c.pattern.empty()) return DetectionPattern::parse(c.pattern);
  return l.doc.detection_pattern();
}

void header(std::ostream& os, const std::string& command, const Loaded& l) {
  os << "# pathid " << command << "\n";
  os << "# setup " << l.doc.hash() << "\n";
  os << "# truncation " << l.setup.truncation() << "\n";
  Bindings b = l.setup.defaults();
  for (const auto& [k, v] : l.overrides) b[k] = v;
  if (!b.empty()) {
    os << "# bindings";
    for (const auto& [k, v] : b) os << " " << k << "=" << num(v);
    os << "\n";
  }
}

// "re im" with components below 1e-12 of the modulus printed as 0.
// Values below the rounding floor of their scale print as zero.
std::string scaled(double v, double scale) { return num(std::abs(v) <= 1e-13 * std::abs(scale) ? 0.0 : v); }

std::string amplitude(Complex a) {
  const double scale = std::abs(a) * 1e-12;
  double re = std::abs(a.real()) < scale ? 0.0 : a.real();
  double im = std::abs(a.imag()) < scale ? 0.0 : a.imag();
  return num(re) + " " + num(im);
}

void print_amplitudes(std::ostream& os, const std::string& label, const FockAmplitudes& amps) {
  for (const auto& [s, a] : amps) {
    if (std::abs(a) <= 1e-14) continue;
    os << label << " " << to_string(s) << " " << amplitude(a) << "\n";
  }
}

int cmd_simulate(const Common& c) {
  Loaded l = load(c);
  PureState state = simulate(l.setup, l.overrides);
  std::ostringstream os;
  header(os, "simulate", l);
  os << "# state: degree ket re im\n";
  for (const auto& [key, coef] : state.poly.terms()) {
    if (std::abs(coef) <= 1e-14) continue;
    // Fock amplitude of this single term: coefficient times sqrt(prod n!).
    const FockState fock = key.monomial.fock();
    double factor = 1.0;
    for (const auto& [m, n] : fock.occupations())
      for (int k = 2; k <= n; ++k) factor *= k;
    const Complex a = coef * std::sqrt(factor);
    os << "state " << key.degree << " " << to_string(fock) << " " << amplitude(a) << "\n";
  }
  if (auto pattern = pattern_for(c, l)) {
    PostselectResult ps = postselect(state, *pattern);
    os << "# postselect " << pattern->str() << "\n";
    os << "order " << ps.order << "\n";
    os << "probability " << num(ps.probability) << "\n";
    if (ps.zero) {
      os << "# zero-probability projection\n";
    } else {
      print_amplitudes(os, "postselected", to_fock_amplitudes(ps.state));
      if (auto target = l.doc.target_state(state.truncation())) {
        double tn = norm_squared(*target);
        if (tn <= 0.0) throw NumericalError("target state has zero norm");
        double f = std::norm(inner_product(*target, PureState(ps.state.poly))) / tn;
        os << "fidelity " << fixed(f, 9) << "\n";
      }
    }
  }
  std::cout << os.str();
  return 0;
}

struct SweepArgs {
  std::string param;
  double start = 0.0, stop = 2.0 * std::numbers::pi;
  int steps = 9;
};

int cmd_sweep(const Common& c, const SweepArgs& a) {
  Loaded l = load(c);
  auto pattern = pattern_for(c, l);
  if (!pattern) throw ValidationError("no detectors declared and no --pattern given");
  auto grid = linspace(a.start, a.stop, a.steps);
  SweepResult r = sweep(l.setup, a.param, grid, *pattern, l.overrides);
  std::ostringstream os;
  header(os, "sweep", l);
  os << "# pattern " << r.pattern << "\n";
  os << "# order " << r.order << " (rates scale as |g|^" << 2 * std::max(r.order, 0) << ")\n";
  os << "# " << a.param << " rate\n";
  double peak = 0.0;
  for (double v : r.rates) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < r.values.size(); ++i) os << num(r.values[i]) << " " << scaled(r.rates[i], peak) << "\n";
  std::cout << os.str();
  return 0;
}

struct VisibilityArgs {
  std::string param;
  int steps = 16;
  std::vector<double> rates;
};

int cmd_visibility(const Common& c, const VisibilityArgs& a) {
  std::ostringstream os;
  if (c.file.empty()) {
    if (a.rates.empty()) throw ValidationError("visibility needs a setup file or --rates");
    FringeSeries s{std::vector<double>(a.rates.size(), 0.0), a.rates};
    os << "visibility " << num(visibility(s)) << "\n";
    std::cout << os.str();
    return 0;
  }
  if (a.param.empty()) throw ValidationError("visibility of a setup needs --param");
  Loaded l = load(c);
  auto pattern = pattern_for(c, l);
  if (!pattern) throw ValidationError("no detectors declared and no --pattern given");
  auto grid = periodic_grid(a.steps);
  SweepResult r = sweep(l.setup, a.param, grid, *pattern, l.overrides);
  FringeFit fit = fitted_visibility({grid, r.rates});
  header(os, "analyze visibility", l);
  os << "# pattern " << r.pattern << "\n";
  os << "fitted_visibility " << num(fit.visibility) << "\n";
  os << "minmax_visibility " << num(fringe_visibility(r.rates)) << "\n";
  os << "fit_residual " << scaled(fit.residual, fit.offset) << "\n";
  std::cout << os.str();
  return 0;
}

struct DopArgs {
  double t = 1.0, gamma = 0.0;
  std::string path;
};

int cmd_dop(const Common& c, const DopArgs& a) {
  std::ostringstream os;
  if (c.file.empty()) {
    os << "degree_of_polarization " << num(degree_of_polarization(a.t, a.gamma)) << "\n";
  } else {
    if (a.path.empty()) throw ValidationError("degree of polarization of a setup needs --path");
    Loaded l = load(c);
    PureState state = simulate(l.setup, l.overrides);
    header(os, "analyze dop", l);
    os << "degree_of_polarization " << num(degree_of_polarization(polarization_coherency(state, a.path))) << "\n";
  }
  std::cout << os.str();
  return 0;
}

int cmd_concurrence(const Common& c, const std::vector<std::string>& rails_text) {
  if (rails_text.size() != 2) throw ValidationError("concurrence needs exactly two --rails p,q");
  Rails rails;
  PathSet keep;
  std::vector<Requirement> reqs;
  for (const auto& r : rails_text) {
    auto comma = r.find(',');
    if (comma == std::string::npos) throw ValidationError("--rails expects p,q");
    rails.emplace_back(r.substr(0, comma), r.substr(comma + 1));
    keep.insert(rails.back().first);
    keep.insert(rails.back().second);
    reqs.push_back({{rails.back().first, rails.back().second}, 1, std::nullopt});
  }
  Loaded l = load(c);
  DetectionPattern pattern = c.pattern.empty() ? DetectionPattern(reqs) : DetectionPattern::parse(c.pattern);
  PostselectResult ps = postselect(simulate(l.setup, l.overrides), pattern);
  if (ps.zero) throw NumericalError("post-selection has zero probability");
  DensityOperator rho = dual_rail(partial_trace(ps.state, keep), rails);
  std::ostringstream os;
  header(os, "analyze concurrence", l);
  os << "# pattern " << pattern.str() << "\n";
  os << "concurrence " << num(concurrence(rho)) << "\n";
  std::cout << os.str();
  return 0;
}

struct SpectroArgs {
  SpectroscopyConfig cfg;
  double ls_min = 800e-9, ls_max = 820e-9, th_min = 0.0, th_max = 0.0;
  int ls_steps = 5, th_steps = 1;
};

int cmd_spectrogram(const SpectroArgs& a) {
  SpectroscopyConfig cfg = a.cfg;
  cfg.lambda_s = a.ls_min;
  cfg.theta_s = a.th_min;
  auto lambdas = linspace(a.ls_min, a.ls_max, a.ls_steps);
  auto thetas = linspace(a.th_min, a.th_max, a.th_steps);
  Eigen::MatrixXd map = spectrogram(cfg, lambdas, thetas);
  std::ostringstream os;
  os << "# pathid analyze spectrogram\n";
  os << "# tau " << num(cfg.medium_transmissivity()) << "\n";
  os << "# fringe_visibility " << num(spectral_fringe_visibility(cfg)) << "\n";
  os << "# lambda_s theta_s intensity\n";
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    for (std::size_t j = 0; j < thetas.size(); ++j)
      os << num(lambdas[i]) << " " << num(thetas[j]) << " "
         << num(map(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << "\n";
  std::cout << os.str();
  return 0;
}

struct CavityArgs {
  double r1 = 1.0, r2 = 0.0, t2 = 1.0;
  int rounds = 50;
};

int cmd_cavity(const CavityArgs& a) {
  CavityResult r = cavity_transmission(a.r1, a.r2, a.t2, a.rounds);
  std::ostringstream os;
  os << "# pathid analyze cavity\n# round re im\n";
  for (std::size_t k = 0; k < r.amplitudes.size(); ++k)
    os << k << " " << amplitude(r.amplitudes[k]) << "\n";
  os << "total " << num(r.total) << "\n";
  if (r.divergent) {
    os << "closed_form divergent\n";
    std::cout << os.str();
    return kExitNumerical;
  }
  os << "closed_form " << num(*r.closed_form) << "\n";
  std::cout << os.str();
  return 0;
}

struct GraphArgs {
  std::string action;
  int random_n = 0;
  double p = 0.1;
  double keep = 1.0;
  std::uint64_t seed = 0;
};

int cmd_graph(const Common& c, const GraphArgs& a) {
  ColoredWeightedGraph g;
  std::ostringstream os;
  if (a.random_n > 0) {
    g = random_network(static_cast<std::size_t>(a.random_n), a.p, a.seed, a.keep);
    os << "# pathid graph " << a.action << "\n# random N=" << a.random_n << " p=" << num(a.p) << " seed=" << a.seed
       << "\n";
  } else {
    if (c.file.empty()) throw ValidationError("graph needs a setup file or --random N");
    Loaded l = load(c);
    Bindings b = l.overrides;
    g = from_experiment(l.setup, b);
    header(os, "graph " + a.action, l);
  }
  if (a.action == "export") {
    os << to_dot(g);
  } else if (a.action == "matchings") {
    auto pms = perfect_matchings(g);
    bool disjoint = true;
    for (std::size_t i = 0; i < pms.size(); ++i)
      for (std::size_t j = i + 1; j < pms.size(); ++j)
        for (std::size_t e : pms[i])
          if (std::find(pms[j].begin(), pms[j].end(), e) != pms[j].end()) disjoint = false;
    os << "matchings " << pms.size() << "\n";
    os << "pairwise_disjoint " << (disjoint ? "yes" : "no") << "\n";
    for (std::size_t i = 0; i < pms.size(); ++i) {
      os << "matching " << i;
      for (std::size_t e : pms[i]) {
        const auto& edge = g.edges()[e];
        os << " " << g.vertices()[edge.u] << "-" << g.vertices()[edge.v];
      }
      os << "\n";
    }
  } else if (a.action == "hafnian") {
    os << "hafnian " << complex_fixed(weighted_matching_sum(g), 12) << "\n";
  } else if (a.action == "state") {
    os << "# ket re im\n";
    print_amplitudes(os, "amplitude", to_fock_amplitudes(state_from_graph(g)));
  } else {
    throw CLI::ValidationError("graph", "unknown action '" + a.action + "'");
  }
  std::cout << os.str();
  return 0;
}

struct FeasArgs {
  int n = 4, d = 3;
  bool dedup = false;
  std::optional<std::uint64_t> seed;
  int max_vertices = 8;
};

int cmd_feasibility(const FeasArgs& a) {
  FeasibilityOptions opt;
  opt.dedup_isomorphic = a.dedup;
  opt.permutation_seed = a.seed;
  opt.max_vertices = a.max_vertices;
  FeasibilityResult r = ghz_feasibility_search(a.n, a.d, opt);
  std::ostringstream os;
  os << "# pathid feasibility n=" << a.n << " d=" << a.d << "\n";
  if (r.feasible) {
    os << "FEASIBLE\n";
    for (const auto& e : r.witness->edges())
      os << "edge " << r.witness->vertices()[e.u] << " " << r.witness->vertices()[e.v] << " color "
         << e.color_u.oam << "\n";
  } else {
    os << "INFEASIBLE after " << r.subsets_examined << " graphs\n";
  }
  std::cout << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-identity photonic experiment simulator"};
  app.require_subcommand(1);

  Common sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "apply a setup to the vacuum and post-select");
  add_common(simulate_cmd, sim);

  Common sw;
  SweepArgs swa;
  auto* sweep_cmd = app.add_subcommand("sweep", "count rate over a parameter grid");
  add_common(sweep_cmd, sw);
  sweep_cmd->add_option("--param", swa.param, "parameter to sweep")->required();
  sweep_cmd->add_option("--start", swa.start, "first value");
  sweep_cmd->add_option("--stop", swa.stop, "last value (inclusive)");
  sweep_cmd->add_option("--steps", swa.steps, "number of points")->check(CLI::Range(2, 1000000));

  auto* analyze = app.add_subcommand("analyze", "derived quantities");
  analyze->require_subcommand(1);

  Common vis;
  VisibilityArgs visa;
  auto* vis_cmd = analyze->add_subcommand("visibility", "fringe visibility of a sweep or a rate list");
  add_common(vis_cmd, vis, false);
  vis_cmd->add_option("--param", visa.param, "phase parameter swept over [0, 2 pi)");
  vis_cmd->add_option("--steps", visa.steps, "grid points")->check(CLI::Range(3, 1000000));
  vis_cmd->add_option("--rates", visa.rates, "explicit intensities")->delimiter(',');

  Common dop;
  DopArgs dopa;
  auto* dop_cmd = analyze->add_subcommand("dop", "degree of polarization");
  add_common(dop_cmd, dop, false);
  dop_cmd->add_option("--T", dopa.t, "object transmission")->check(CLI::Range(0.0, 1.0));
  dop_cmd->add_option("--gamma", dopa.gamma, "polarization angle, radians");
  dop_cmd->add_option("--path", dopa.path, "output path of the setup to analyze");

  Common conc;
  std::vector<std::string> rails;
  auto* conc_cmd = analyze->add_subcommand("concurrence", "two-qubit concurrence of a dual-rail post-selected state");
  add_common(conc_cmd, conc);
  conc_cmd->add_option("--rails", rails, "rail pair p,q for one qubit (give twice)")->required();

  SpectroArgs spa;
  auto* spec_cmd = analyze->add_subcommand("spectrogram", "signal intensity over wavelength and angle");
  spec_cmd->add_option("--lp", spa.cfg.lambda_p, "pump wavelength, m");
  spec_cmd->add_option("--ls-min", spa.ls_min, "first signal wavelength, m");
  spec_cmd->add_option("--ls-max", spa.ls_max, "last signal wavelength, m");
  spec_cmd->add_option("--ls-steps", spa.ls_steps, "wavelength points")->check(CLI::PositiveNumber);
  spec_cmd->add_option("--theta-min", spa.th_min, "first emission angle, rad");
  spec_cmd->add_option("--theta-max", spa.th_max, "last emission angle, rad");
  spec_cmd->add_option("--theta-steps", spa.th_steps, "angle points")->check(CLI::PositiveNumber);
  spec_cmd->add_option("--np", spa.cfg.n_p, "pump index");
  spec_cmd->add_option("--ns", spa.cfg.n_s, "signal index");
  spec_cmd->add_option("--ni", spa.cfg.n_i, "idler index");
  spec_cmd->add_option("--L", spa.cfg.length, "crystal length, m");
  spec_cmd->add_option("--Lm", spa.cfg.medium_length, "medium length, m");
  spec_cmd->add_option("--alpha", spa.cfg.alpha_m, "medium absorption, 1/m");

  double ls = 810.0, li = 1550.0;
  auto* eq_cmd = analyze->add_subcommand("eqwl", "equivalent wavelength lambda_S^2 / lambda_I");
  eq_cmd->add_option("--ls", ls, "signal wavelength");
  eq_cmd->add_option("--li", li, "idler wavelength");

  CavityArgs cava;
  auto* cav_cmd = analyze->add_subcommand("cavity", "transmission through a two-mirror idler cavity");
  cav_cmd->add_option("--r1", cava.r1, "back mirror reflectivity amplitude");
  cav_cmd->add_option("--r2", cava.r2, "output coupler reflection amplitude");
  cav_cmd->add_option("--t2", cava.t2, "output coupler transmission amplitude");
  cav_cmd->add_option("--rounds", cava.rounds, "round trips")->check(CLI::PositiveNumber);

  Common gr;
  GraphArgs gra;
  auto* graph_cmd = app.add_subcommand("graph", "graph view of a crystal network");
  graph_cmd->add_option("action", gra.action, "export | matchings | hafnian | state")
      ->required()
      ->check(CLI::IsMember({"export", "matchings", "hafnian", "state"}));
  add_common(graph_cmd, gr, false);
  graph_cmd->add_option("--random", gra.random_n, "use a random complete network on N vertices")
      ->check(CLI::PositiveNumber);
  graph_cmd->add_option("--p", gra.p, "edge amplitude of the random network")->check(CLI::Range(0.0, 1.0));
  graph_cmd->add_option("--keep", gra.keep, "fraction of edges kept")->check(CLI::Range(0.0, 1.0));
  graph_cmd->add_option("--seed", gra.seed, "seed for edge subsampling");

  FeasArgs fa;
  auto* feas_cmd = app.add_subcommand("feasibility", "search graphs with d disjoint perfect matchings");
  feas_cmd->add_option("n", fa.n, "vertices")->required();
  feas_cmd->add_option("d", fa.d, "dimension")->required();
  feas_cmd->add_flag("--dedup", fa.dedup, "skip isomorphic edge subsets");
  feas_cmd->add_option("--seed", fa.seed, "enumerate edges in a seeded permuted order");
  feas_cmd->add_option("--max-vertices", fa.max_vertices, "search bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(sim);
    if (*sweep_cmd) return cmd_sweep(sw, swa);
    if (*vis_cmd) return cmd_visibility(vis, visa);
    if (*dop_cmd) return cmd_dop(dop, dopa);
    if (*conc_cmd) return cmd_concurrence(conc, rails);
    if (*spec_cmd) return cmd_spectrogram(spa);
    if (*eq_cmd) {
      std::cout << "equivalent_wavelength " << num(equivalent_wavelength(ls, li)) << "\n";
      return 0;
    }
    if (*cav_cmd) return cmd_cavity(cava);
    if (*graph_cmd) return cmd_graph(gr, gra);
    if (*feas_cmd) return cmd_feasibility(fa);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
