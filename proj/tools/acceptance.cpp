#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathid/analysis.hpp"
#include "pathid/engine.hpp"
#include "pathid/errors.hpp"
#include "pathid/graphs.hpp"
#include "pathid/setup_document.hpp"

using namespace pathid;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string g_setups;

SetupDocument load_setup(const std::string& name) { return SetupDocument::load(g_setups + "/" + name + ".setup"); }

double max_abs_diff(const FockAmplitudes& a, const FockAmplitudes& b) {
  double worst = 0.0;
  for (const auto& [s, v] : a) {
    auto it = b.find(s);
    worst = std::max(worst, std::abs(v - (it == b.end() ? Complex{} : it->second)));
  }
  for (const auto& [s, v] : b)
    if (!a.count(s)) worst = std::max(worst, std::abs(v));
  return worst;
}

Outcome zwm_linear_law() {
  Outcome o;
  const auto doc = load_setup("zwm");
  const auto setup = doc.build();
  const auto pattern = DetectionPattern::coincidence({"Sd"});
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    Bindings b = doc.bindings();
    b["T"] = t;
    const auto grid = periodic_grid(16);
    const auto r = sweep(setup, "theta", grid, pattern, b);
    worst = std::max(worst, std::abs(fit_fringe(r.values, r.rates).visibility - t));
  }
  o.detail << "max |V - |T|| = " << worst;
  o.check(worst <= 1e-9, "visibility");
  return o;
}

Outcome frustrated() {
  Outcome o;
  const auto doc = load_setup("frustrated");
  const auto setup = doc.build();
  const auto pattern = DetectionPattern::coincidence({"a", "b"});
  auto grid = periodic_grid(16);
  const auto r = sweep(setup, "phi", grid, pattern, doc.bindings());
  const double scale = r.rates[0] / 2.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(r.rates[i] - scale * (1.0 + std::cos(grid[i]))));
  Bindings at_pi = doc.bindings();
  at_pi["phi"] = kPi;
  const double zero = count_rate(setup, pattern, at_pi).rate;
  o.detail << "max shape deviation = " << worst << ", rate(pi) = " << zero;
  o.check(worst <= 1e-12, "shape");
  o.check(zero <= 1e-12, "zero at pi");
  return o;
}

Outcome degree_of_polarization_grid() {
  Outcome o;
  const auto doc = load_setup("dop");
  const auto setup = doc.build();
  double worst = 0.0;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (double gamma : {0.0, 0.4, 0.8, 1.2, 1.6}) {
      Bindings b = doc.bindings();
      b["T"] = t;
      b["gamma"] = gamma;
      const double engine = degree_of_polarization(polarization_coherency(simulate(setup, b), "Sd"));
      const double closed = std::abs((t + std::cos(gamma)) / (1.0 + t * std::cos(gamma)));
      worst = std::max(worst, std::abs(engine - closed));
    }
  }
  o.detail << "max |P - closed form| = " << worst;
  o.check(worst <= 1e-9, "closed form");
  return o;
}

Outcome three_crystal() {
  Outcome o;
  ThreeCrystalConfig cfg;
  cfg.idler_bs_phase = balanced_idler_bs_phase();
  const auto r = three_crystal_visibility(cfg);
  double worst_bound = -1.0;
  for (double g3 : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5}) {
    for (double idler_phase : {0.0, 1.0, kPi}) {
      ThreeCrystalConfig c = cfg;
      c.g3 = g3;
      c.idler_phase = idler_phase;
      const auto s = three_crystal_visibility(c);
      const double k2 = s.distinguishability * s.distinguishability;
      worst_bound = std::max({worst_bound, k2 + s.coherence_visibility * s.coherence_visibility,
                              k2 + s.singles_visibility * s.singles_visibility});
    }
  }
  o.detail << "singles V = " << r.singles_visibility << ", heralded V = " << r.heralded_visibility
           << ", max K^2+V^2 = " << worst_bound;
  o.check(std::abs(r.singles_visibility - 2.0 / 3.0) <= 1e-9, "singles 2/3");
  o.check(std::abs(r.heralded_visibility - 1.0) <= 1e-9, "heralded 1");
  o.check(worst_bound <= 1.0 + 1e-9, "complementarity");
  return o;
}

Outcome bell_concurrence() {
  Outcome o;
  const auto doc = load_setup("nm-scheme");
  const auto setup = doc.build();
  const auto pattern = *doc.detection_pattern();
  const Rails rails{{"d1", "d1p"}, {"d2", "d2p"}};
  const PathSet keep{"d1", "d1p", "d2", "d2p"};
  auto reduced = [&](const Bindings& b) {
    auto ps = postselect(simulate(setup, b), pattern);
    return dual_rail(partial_trace(ps.state, keep), rails);
  };
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd psi_plus(4), phi_minus(4);
  psi_plus << 0.0, s, s, 0.0;
  phi_minus << s, 0.0, 0.0, -s;
  Bindings b0 = doc.bindings();
  b0["xi"] = 0.0;
  Bindings bpi = doc.bindings();
  bpi["xi"] = kPi;
  const double f0 = fidelity(reduced(b0), psi_plus);
  const double fpi = fidelity(reduced(bpi), phi_minus);
  o.check(std::abs(f0 - 1.0) <= 1e-9, "fidelity to Psi+");
  o.check(std::abs(fpi - 1.0) <= 1e-9, "fidelity to Phi-");

  double worst = 0.0;
  const auto two_fold = DetectionPattern::coincidence({"d1", "d2"});
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    Bindings b = doc.bindings();
    b["T"] = t;
    const double c = concurrence(reduced(b));
    const auto r = sweep(setup, "xi", periodic_grid(16), two_fold, b);
    const double v = fit_fringe(r.values, r.rates).visibility;
    worst = std::max({worst, std::abs(c - t), std::abs(v - t)});
  }
  o.detail << "F(Psi+) = " << f0 << ", F(Phi-) = " << fpi << ", max |C - T|, |V - T| = " << worst;
  o.check(worst <= 1e-9, "concurrence and visibility");
  return o;
}

Outcome ghz() {
  Outcome o;
  const PathSet keep{"A", "B", "C", "D"};
  const auto d2 = load_setup("ghz2d");
  const auto s2 = d2.build();
  const auto st2 = simulate(s2, d2.bindings());
  const auto ps2 = postselect(st2, *d2.detection_pattern());
  const double f2 = fidelity(partial_trace(ps2.state, keep), *d2.target_state(s2.truncation()));
  const auto pair_each = postselect(st2, DetectionPattern::coincidence({"A", "D"}));
  const double fraction = ps2.probability / pair_each.probability;
  o.check(std::abs(f2 - 1.0) <= 1e-9, "2D GHZ fidelity");
  o.check(pair_each.order == ps2.order && std::abs(fraction - 0.5) <= 1e-12, "success fraction 1/2");

  const auto d3 = load_setup("ghz3d");
  const auto s3 = d3.build();
  const auto ps3 = postselect(simulate(s3, d3.bindings()), *d3.detection_pattern());
  const double f3 = fidelity(partial_trace(ps3.state, keep), *d3.target_state(s3.truncation()));
  o.check(std::abs(f3 - 1.0) <= 1e-9, "3D GHZ fidelity");

  const auto g = from_experiment(s3, d3.bindings());
  const auto pms = perfect_matchings(g);
  bool disjoint = true;
  for (std::size_t i = 0; i < pms.size(); ++i)
    for (std::size_t j = i + 1; j < pms.size(); ++j)
      for (auto e : pms[i])
        if (std::find(pms[j].begin(), pms[j].end(), e) != pms[j].end()) disjoint = false;
  o.check(pms.size() == 3 && disjoint, "3 disjoint perfect matchings");
  o.detail << "F(2D) = " << f2 << ", success fraction = " << fraction << ", F(3D) = " << f3
           << ", perfect matchings = " << pms.size() << (disjoint ? " (disjoint)" : " (overlapping)");
  return o;
}

Outcome four_photon() {
  Outcome o;
  const auto doc = load_setup("fourphoton");
  const auto setup = doc.build();
  const auto grid = periodic_grid(16);
  const auto four = sweep(setup, "phi", grid, DetectionPattern::coincidence({"a", "b", "c", "d"}), doc.bindings());
  const double scale = four.rates[0] / 4.0;
  double worst4 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst4 = std::max(worst4, std::abs(four.rates[i] - scale * std::norm(1.0 + std::polar(1.0, grid[i]))));
  double worst2 = 0.0;
  const std::vector<std::vector<std::string>> pairs{{"a", "c"}, {"b", "d"}, {"a", "b"}, {"c", "d"}};
  for (const auto& p : pairs) {
    const auto two = sweep(setup, "phi", grid, DetectionPattern::coincidence(p), doc.bindings());
    const auto [lo, hi] = std::minmax_element(two.rates.begin(), two.rates.end());
    worst2 = std::max(worst2, *hi - *lo);
  }
  o.detail << "4-fold max deviation = " << worst4 << ", 2-fold max spread = " << worst2;
  o.check(scale > 0.0, "nonzero 4-fold rate");
  o.check(worst4 <= 1e-12, "4-fold shape");
  o.check(worst2 <= 1e-12, "2-fold flat");
  return o;
}

// Sum over every set of n/2 edges that covers all vertices.
Complex edge_subset_matching_sum(const ColoredWeightedGraph& g) {
  const auto& edges = g.edges();
  const std::size_t n = g.vertex_count(), k = n / 2;
  std::vector<std::size_t> pick(k);
  Complex total = 0.0;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t slot, std::size_t from) {
    if (slot == k) {
      std::vector<int> seen(n, 0);
      Complex product = 1.0;
      for (auto e : pick) {
        ++seen[edges[e].u];
        ++seen[edges[e].v];
        product *= edges[e].weight;
      }
      if (std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; })) total += product;
      return;
    }
    for (std::size_t e = from; e < edges.size(); ++e) {
      pick[slot] = e;
      rec(slot + 1, e + 1);
    }
  };
  rec(0, 0);
  return total;
}

Outcome graph_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> half(1, 5);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 * static_cast<std::size_t>(half(rng));
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    ColoredWeightedGraph g(names);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (coin(rng) < 0.7) g.add_edge(names[i], names[j], Complex(gauss(rng), gauss(rng)));
    const Complex brute = edge_subset_matching_sum(g);
    worst = std::max({worst, std::abs(weighted_matching_sum(g) - brute), std::abs(hafnian(g.adjacency()) - brute)});
  }
  bool counts = true;
  std::uint64_t double_factorial = 1;
  for (std::size_t n = 1; n <= 5; ++n) {
    double_factorial *= 2 * n - 1;
    counts = counts && count_perfect_matchings(complete_graph(2 * n)) == double_factorial &&
             perfect_matchings(complete_graph(2 * n)).size() == double_factorial;
  }
  o.detail << "max deviation over 100 graphs = " << worst << ", K_2n counts " << (counts ? "match" : "differ");
  o.check(worst < 1e-12, "matching sum");
  o.check(counts, "(2n-1)!!");
  return o;
}

Outcome feasibility() {
  Outcome o;
  const auto a = ghz_feasibility_search(4, 3);
  const auto b = ghz_feasibility_search(6, 3);
  const auto c = ghz_feasibility_search(6, 2);
  o.detail << "(4,3) " << (a.feasible ? "FEASIBLE" : "INFEASIBLE") << ", (6,3) "
           << (b.feasible ? "FEASIBLE" : "INFEASIBLE") << " over " << b.subsets_examined << " subsets, (6,2) "
           << (c.feasible ? "FEASIBLE" : "INFEASIBLE");
  o.check(a.feasible && a.witness.has_value(), "(4,3)");
  o.check(!b.feasible && b.subsets_examined == 32768 && b.subsets_total == 32768, "(6,3)");
  o.check(c.feasible && c.witness.has_value(), "(6,2)");
  return o;
}

Outcome engine_graph() {
  Outcome o;
  int compared = 0;
  std::string names;
  double worst = 0.0;
  for (const char* name : {"zwm", "frustrated", "hardy-pol", "dop", "menzel3", "ghz2d", "ghz3d", "fourphoton",
                           "nm-scheme", "random-net"}) {
    const auto doc = load_setup(name);
    const auto setup = doc.build();
    ColoredWeightedGraph graph;
    try {
      graph = from_experiment(setup, doc.bindings());
    } catch (const ValidationError&) {
      continue;  // not representable as a graph
    }
    const auto ps = postselect(simulate(setup, doc.bindings()), DetectionPattern::coincidence(setup.detectors()));
    const auto graph_state = state_from_graph(graph);
    worst = std::max(worst, max_abs_diff(to_fock_amplitudes(ps.projected), to_fock_amplitudes(graph_state)));
    names += (compared++ ? " " : "") + std::string(name);
  }
  o.detail << compared << " setups (" << names << "), max amplitude deviation = " << worst;
  o.check(compared > 0, "at least one setup");
  o.check(worst <= 1e-12, "amplitudes");
  return o;
}

Outcome dual_wavelength() {
  Outcome o;
  const double lambda_eq = equivalent_wavelength(810.0, 1550.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    SpectroscopyConfig cfg;
    cfg.alpha_m = 250.0 * k;
    worst = std::max(worst, std::abs(spectral_fringe_visibility(cfg) - cfg.medium_transmissivity()));
  }
  o.detail << "equivalent wavelength = " << lambda_eq << " nm, max |V - |tau|| = " << worst;
  o.check(std::abs(lambda_eq - 423.3) <= 0.05, "423.3 nm");
  o.check(std::abs(lambda_eq - 420.0) <= 7.0, "inside 420 +- 7 nm");
  o.check(worst <= 1e-9, "spectral visibility");
  return o;
}

Outcome momentum() {
  Outcome o;
  const auto grid = linspace(-3.0, 3.0, 61);
  auto phase = [](double q) { return 1.5 * q; };
  double worst_point = 0.0;
  for (const auto& cell : momentum_visibility(anticorrelated_distribution(grid), phase))
    if (cell.marginal > 0.0) worst_point = std::max(worst_point, std::abs(cell.visibility - 1.0));
  std::vector<double> v, variance;
  for (int k = 0; k < 10; ++k) {
    const auto cells = momentum_visibility(gaussian_joint_distribution(grid, 1.0, 0.05 + 0.1 * k), phase);
    const auto& centre = cells[cells.size() / 2];
    v.push_back(centre.visibility);
    variance.push_back(centre.variance);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < v.size(); ++i)
    decreasing = decreasing && v[i] < v[i - 1] && variance[i] > variance[i - 1];
  o.detail << "point-mass max |V - 1| = " << worst_point << ", V from " << v.front() << " to " << v.back();
  o.check(worst_point <= 1e-12, "point mass");
  o.check(decreasing, "monotone");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  g_setups = PATHID_SETUP_DIR;
  app.add_option("--setups", g_setups, "directory of bundled setups");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"ZWM linear law", 1.0, zwm_linear_law},
      {"frustrated down-conversion", 1.0, frustrated},
      {"degree of polarization", 5.0, degree_of_polarization_grid},
      {"three-crystal complementarity", 5.0, three_crystal},
      {"Bell states and concurrence", 10.0, bell_concurrence},
      {"GHZ constructions", 10.0, ghz},
      {"four-photon frustration", 10.0, four_photon},
      {"graph oracle equivalence", 60.0, graph_oracle},
      {"GHZ feasibility", 120.0, feasibility},
      {"engine and graph consistency", 60.0, engine_graph},
      {"dual-wavelength numbers", 10.0, dual_wavelength},
      {"momentum correlations", 10.0, momentum},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget) o.check(false, "runtime");
    if (!o.pass) ++failures;
    std::printf("%-4zu %s  %s: %s (%.3f s)\n", i + 1, o.pass ? "PASS" : "FAIL", c.name, o.detail.str().c_str(),
                seconds);
  }
  return failures == 0 ? 0 : 1;
}
