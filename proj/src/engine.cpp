#include "pathid/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "pathid/errors.hpp"
#include "pathid/fringe.hpp"

namespace pathid {

namespace {

// Rates below this are treated as vanishing when deciding whether a sweep
// is degenerate at its leading order.
constexpr double kZeroRate = 1e-24;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<Element> fold_polarization_sets(std::vector<Element> elements) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto* ms = std::get_if<ModeShifter>(&elements[i]);
    if (!ms || ms->action != ModeShifter::Action::PolSet) continue;
    const std::string path = ms->path;
    const Polarization pol = ms->set_to == Polarization::Kind::V ? Polarization::vertical() : Polarization::horizontal();
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      if (const auto* next = std::get_if<ModeShifter>(&elements[j]);
          next && next->action == ModeShifter::Action::PolSet && next->path == path)
        break;
      auto* c = std::get_if<Crystal>(&elements[j]);
      if (!c) continue;
      for (std::size_t p = 0; p < c->paths.size(); ++p) {
        if (c->paths[p] != path) continue;
        if (c->modes.empty()) c->modes.resize(c->paths.size());
        c->modes[p].pol = pol;
      }
    }
  }
  return elements;
}

void assign_loss_tags(std::vector<Element>& elements) {
  std::set<std::string> used;
  for (const auto& e : elements)
    if (const auto* a = std::get_if<Attenuator>(&e); a && a->loss_tag != kLossPrefix) {
      if (!is_loss_path(a->loss_tag)) throw ValidationError("attenuator loss tag must start with " + std::string(kLossPrefix));
      if (!used.insert(a->loss_tag).second) throw ValidationError("duplicate attenuator loss tag '" + a->loss_tag + "'");
    }
  int next = 0;
  for (auto& e : elements) {
    auto* a = std::get_if<Attenuator>(&e);
    if (!a || a->loss_tag != kLossPrefix) continue;
    std::string tag;
    do tag = std::string(kLossPrefix) + std::to_string(next++);
    while (used.count(tag));
    used.insert(tag);
    a->loss_tag = tag;
  }
}

void check_sequencing(const std::vector<Element>& elements) {
  std::set<std::string> consumed;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const Element& e = elements[i];
    if (const auto* pi = std::get_if<PathIdentify>(&e)) {
      for (const auto* p : {&pi->from, &pi->to})
        if (consumed.count(*p))
          throw ValidationError("invalid element sequencing: identify at element " + std::to_string(i + 1) +
                                " uses path '" + *p + "' already consumed by a beam splitter");
    }
    if (std::holds_alternative<BeamSplitter>(e) || std::holds_alternative<PolarizingBeamSplitter>(e)) {
      for (const auto& p : input_paths(e)) consumed.insert(p);
      for (const auto& p : output_paths(e)) consumed.erase(p);
    } else if (!std::holds_alternative<PathIdentify>(e)) {
      for (const auto& p : output_paths(e)) consumed.erase(p);
    }
  }
}

int requirement_count(const Requirement& r, bool mode_resolved, const FockState& s) {
  int n = 0;
  for (const auto& [m, k] : s.occupations()) {
    if (std::find(r.paths.begin(), r.paths.end(), m.path) == r.paths.end()) continue;
    if (mode_resolved && r.mode && !(m.internal == *r.mode)) continue;
    n += k;
  }
  return n;
}

Bindings merged(const Bindings& base, const Bindings& extra) {
  Bindings out = base;
  for (const auto& [k, v] : extra) out[k] = v;
  return out;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ExperimentSetup::ExperimentSetup(std::vector<Element> elements, std::vector<std::string> detectors,
                                 std::optional<int> truncation, Bindings defaults, ElementOptions options)
    : detectors_(std::move(detectors)), defaults_(std::move(defaults)), options_(options) {
  for (const auto& d : detectors_)
    if (is_loss_path(d)) throw ValidationError("detector path '" + d + "' is a loss mode");
  if (truncation && *truncation < 0) throw ValidationError("truncation must be non-negative");
  truncation_ = truncation ? *truncation : static_cast<int>(detectors_.size()) / 2 + 1;
  check_sequencing(elements);
  elements_ = fold_polarization_sets(std::move(elements));
  assign_loss_tags(elements_);
}

std::set<std::string> ExperimentSetup::parameters() const {
  std::set<std::string> out;
  for (const auto& e : elements_) {
    auto p = pathid::parameters(e);
    out.insert(p.begin(), p.end());
  }
  return out;
}

ExperimentSetup ExperimentSetup::with_truncation(int k) const {
  if (k < 0) throw ValidationError("truncation must be non-negative");
  ExperimentSetup out = *this;
  out.truncation_ = k;
  return out;
}

ExperimentSetup ExperimentSetup::with_bindings(const Bindings& extra) const {
  ExperimentSetup out = *this;
  out.defaults_ = merged(defaults_, extra);
  return out;
}

ExperimentSetup ExperimentSetup::prefix(std::size_t count) const {
  ExperimentSetup out = *this;
  out.elements_.resize(std::min(count, elements_.size()));
  return out;
}

DetectionPattern::DetectionPattern(std::vector<Requirement> requirements, bool mode_resolved)
    : requirements_(std::move(requirements)), mode_resolved_(mode_resolved) {
  bool any_path = false;
  for (const auto& r : requirements_) {
    if (r.count < 0) throw ValidationError("detection requirement with negative count");
    if (r.paths.empty()) throw ValidationError("detection requirement without paths");
    if (mode_resolved_ && !r.mode) throw ValidationError("mode-resolved pattern needs a mode on every requirement");
    any_path = true;
  }
  if (!any_path) throw ValidationError("detection pattern lists no paths");
}

DetectionPattern DetectionPattern::coincidence(const std::vector<std::string>& paths) {
  std::vector<Requirement> reqs;
  for (const auto& p : paths) reqs.push_back({{p}, 1, std::nullopt});
  return DetectionPattern(std::move(reqs));
}

DetectionPattern DetectionPattern::parse(const std::string& text) {
  std::vector<Requirement> reqs;
  bool resolved = false;
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> void {
    throw ValidationError("bad detection pattern '" + text + "': " + why);
  };
  while (pos < text.size()) {
    std::size_t end = pos;
    int depth = 0;
    while (end < text.size() && (depth > 0 || text[end] != ',')) {
      if (text[end] == '{') ++depth;
      if (text[end] == '}') --depth;
      ++end;
    }
    std::string tok = text.substr(pos, end - pos);
    pos = end + 1;
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
    if (tok.empty()) fail("empty requirement");
    Requirement r;
    if (auto eq = tok.rfind('='); eq != std::string::npos && tok.find('}', eq) == std::string::npos) {
      try {
        std::size_t used = 0;
        r.count = std::stoi(tok.substr(eq + 1), &used);
        if (used != tok.size() - eq - 1) fail("bad count");
      } catch (const std::logic_error&) {
        fail("bad count");
      }
      tok = tok.substr(0, eq);
    }
    if (auto at = tok.find('@', tok.rfind('}') == std::string::npos ? 0 : tok.rfind('}')); at != std::string::npos) {
      try {
        r.mode = parse_internal_mode(tok.substr(at + 1));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      resolved = true;
      tok = tok.substr(0, at);
    }
    if (!tok.empty() && tok.front() == '{') {
      if (tok.back() != '}') fail("unbalanced braces");
      std::string inner = tok.substr(1, tok.size() - 2);
      std::size_t s = 0;
      while (s <= inner.size()) {
        std::size_t e = inner.find('|', s);
        if (e == std::string::npos) e = inner.size();
        if (e == s) fail("empty path in group");
        r.paths.push_back(inner.substr(s, e - s));
        s = e + 1;
      }
    } else {
      if (tok.empty() || tok.find_first_of("{}|@=") != std::string::npos) fail("bad path '" + tok + "'");
      r.paths.push_back(tok);
    }
    reqs.push_back(std::move(r));
  }
  if (reqs.empty()) fail("no requirements");
  if (resolved)
    for (const auto& r : reqs)
      if (!r.mode) fail("mix of mode-resolved and mode-blind requirements");
  return DetectionPattern(std::move(reqs), resolved);
}

bool DetectionPattern::matches(const FockState& s) const {
  for (const auto& r : requirements_)
    if (requirement_count(r, mode_resolved_, s) != r.count) return false;
  return true;
}

std::string DetectionPattern::str() const {
  std::string out;
  for (const auto& r : requirements_) {
    if (!out.empty()) out += ",";
    if (r.paths.size() == 1) {
      out += r.paths.front();
    } else {
      out += "{";
      for (std::size_t i = 0; i < r.paths.size(); ++i) out += (i ? "|" : "") + r.paths[i];
      out += "}";
    }
    if (mode_resolved_ && r.mode) out += "@" + to_string(*r.mode);
    out += "=" + std::to_string(r.count);
  }
  return out;
}

PureState simulate(const ExperimentSetup& setup, const Bindings& bindings) {
  Bindings b = merged(setup.defaults(), bindings);
  PureState state = PureState::vacuum(setup.truncation());
  state.bindings = b;
  for (const auto& e : setup.elements()) state = apply(state, e, b, setup.options());
  return state;
}

std::optional<int> leading_order(const PureState& state, const DetectionPattern& pattern) {
  // Terms are ordered by degree first, so the first match is the lowest.
  for (const auto& [key, c] : state.poly.terms())
    if (pattern.matches(key.monomial.fock())) return key.degree;
  return std::nullopt;
}

namespace {

OperatorPolynomial matching_sector(const PureState& state, const DetectionPattern& pattern, int order) {
  OperatorPolynomial out(state.truncation());
  for (const auto& [key, c] : state.poly.terms())
    if (key.degree == order && pattern.matches(key.monomial.fock())) out.add(key.degree, key.monomial, c);
  return out;
}

}  // namespace

double probability_at_order(const PureState& state, const DetectionPattern& pattern, int order) {
  return norm_squared(PureState(matching_sector(state, pattern, order)));
}

PostselectResult postselect(const PureState& state, const DetectionPattern& pattern) {
  PostselectResult r;
  r.projected = PureState(OperatorPolynomial(state.truncation()), state.bindings);
  r.state = r.projected;
  auto order = leading_order(state, pattern);
  if (!order) return r;
  r.order = *order;
  r.projected.poly = matching_sector(state, pattern, *order);
  r.probability = norm_squared(r.projected);
  r.zero = r.probability <= kZeroRate;
  r.state = r.projected;
  if (!r.zero) r.state.poly = r.projected.poly.scaled(1.0 / std::sqrt(r.probability));
  return r;
}

RateResult count_rate(const ExperimentSetup& setup, const DetectionPattern& pattern, const Bindings& bindings) {
  PureState state = simulate(setup, bindings);
  RateResult r;
  auto order = leading_order(state, pattern);
  if (!order) return r;
  r.order = *order;
  r.rate = probability_at_order(state, pattern, *order);
  return r;
}

SweepResult sweep(const ExperimentSetup& setup, const std::string& parameter, const std::vector<double>& grid,
                  const DetectionPattern& pattern, const Bindings& bindings) {
  if (!setup.parameters().count(parameter)) throw ValidationError("unknown sweep parameter '" + parameter + "'");
  if (grid.empty()) throw ValidationError("sweep grid is empty");
  std::vector<PureState> states(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    Bindings b = bindings;
    b[parameter] = grid[i];
    states[i] = simulate(setup, b);
  });

  SweepResult out;
  out.parameter = parameter;
  out.values = grid;
  out.pattern = pattern.str();
  out.truncation = setup.truncation();
  out.rates.assign(grid.size(), 0.0);
  std::optional<int> order;
  for (const auto& s : states)
    if (auto o = leading_order(s, pattern); o && (!order || *o < *order)) order = o;
  if (!order) return out;
  for (int k = *order; k <= setup.truncation(); ++k) {
    parallel_for(grid.size(), [&](std::size_t i) { out.rates[i] = probability_at_order(states[i], pattern, k); });
    out.order = k;
    if (std::any_of(out.rates.begin(), out.rates.end(), [](double r) { return r > kZeroRate; })) break;
  }
  return out;
}

std::vector<double> linspace(double start, double stop, int steps) {
  if (steps < 1) throw ValidationError("linspace needs at least one step");
  if (steps == 1) return {start};
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (steps - 1);
  return out;
}

WhichWay which_way(const PureState& state, const std::string& path_a, const std::string& path_b) {
  if (path_a == path_b) throw ValidationError("which-way needs two distinct paths");
  DetectionPattern one({{{path_a, path_b}, 1, std::nullopt}});
  auto order = leading_order(state, one);
  if (!order) throw NumericalError("no single photon on the two paths");

  // Marker state: the rest of the configuration plus the photon's internal labels.
  std::map<FockState, std::size_t> index;
  std::vector<std::pair<std::size_t, Complex>> on_a, on_b;
  const FockAmplitudes amps = to_fock_amplitudes(PureState(matching_sector(state, one, *order)));
  for (const auto& [f, amp] : amps) {
    for (const auto& [m, n] : f.occupations()) {
      if (m.path != path_a && m.path != path_b) continue;
      FockState marker = f;
      marker.add(m, -1);
      marker.add(ModeLabel("", m.internal));
      auto [it, fresh] = index.emplace(marker, index.size());
      (m.path == path_a ? on_a : on_b).emplace_back(it->second, amp);
    }
  }
  const auto dim = static_cast<Eigen::Index>(index.size());
  Eigen::VectorXcd ea = Eigen::VectorXcd::Zero(dim), eb = Eigen::VectorXcd::Zero(dim);
  for (const auto& [i, a] : on_a) ea(static_cast<Eigen::Index>(i)) += a;
  for (const auto& [i, a] : on_b) eb(static_cast<Eigen::Index>(i)) += a;

  WhichWay w;
  const double total = ea.squaredNorm() + eb.squaredNorm();
  if (total <= kZeroRate) throw NumericalError("which-way analysis of a vanishing amplitude");
  w.p_a = ea.squaredNorm() / total;
  w.p_b = eb.squaredNorm() / total;
  w.visibility = 2.0 * std::abs(ea.dot(eb)) / total;
  Eigen::MatrixXcd diff = (ea * ea.adjoint() - eb * eb.adjoint()) / total;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  w.distinguishability = solver.eigenvalues().cwiseAbs().sum();
  return w;
}

ExperimentSetup three_crystal_setup(const ThreeCrystalConfig& cfg, bool with_beam_splitters) {
  const Expr phi = Expr::parameter("phi_s");
  std::vector<Element> e;
  e.push_back(Crystal{{"s1", "i1"}, {}, cfg.g1, 0.0});
  e.push_back(PhaseShifter{"i1", cfg.idler_phase});
  e.push_back(PathIdentify{"i1", "i2"});
  e.push_back(Crystal{{"s2", "i2"}, {}, cfg.g2, 0.0});
  e.push_back(PhaseShifter{"s1", phi});
  e.push_back(PathIdentify{"s1", "s3"});
  e.push_back(Crystal{{"s3", "i3"}, {}, cfg.g3, phi});
  if (with_beam_splitters) {
    e.push_back(BeamSplitter{"s2", "s3", "A", "A2", 0.0});
    e.push_back(BeamSplitter{"i2", "i3", "D", "D2", cfg.idler_bs_phase});
  }
  return ExperimentSetup(std::move(e), {"A", "D"}, 1, {{"phi_s", 0.0}});
}

ThreeCrystalResult three_crystal_visibility(const ThreeCrystalConfig& cfg) {
  ThreeCrystalResult r;
  const auto grid = periodic_grid(cfg.grid_points);
  const ExperimentSetup full = three_crystal_setup(cfg, true);
  auto singles = sweep(full, "phi_s", grid, DetectionPattern::coincidence({"A"}));
  auto heralded = sweep(full, "phi_s", grid, DetectionPattern::coincidence({"A", "D"}));
  r.singles_visibility = fit_fringe(grid, singles.rates).visibility;
  r.heralded_visibility = fit_fringe(grid, heralded.rates).visibility;
  WhichWay w = which_way(simulate(three_crystal_setup(cfg, false)), "s2", "s3");
  r.distinguishability = w.distinguishability;
  r.coherence_visibility = w.visibility;
  return r;
}

double balanced_idler_bs_phase() { return std::numbers::pi / 6.0; }

}  // namespace pathid
