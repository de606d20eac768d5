#include "pathid/graphs.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "pathid/errors.hpp"

namespace pathid {

ColoredWeightedGraph::ColoredWeightedGraph(std::vector<std::string> vertices) : vertices_(std::move(vertices)) {
  std::set<std::string> seen(vertices_.begin(), vertices_.end());
  if (seen.size() != vertices_.size()) throw ValidationError("duplicate vertex name");
}

std::size_t ColoredWeightedGraph::vertex(const std::string& name) {
  auto it = std::find(vertices_.begin(), vertices_.end(), name);
  if (it != vertices_.end()) return static_cast<std::size_t>(it - vertices_.begin());
  vertices_.push_back(name);
  return vertices_.size() - 1;
}

void ColoredWeightedGraph::add_edge(GraphEdge e) {
  if (e.u >= vertices_.size() || e.v >= vertices_.size()) throw ValidationError("edge endpoint out of range");
  if (e.u == e.v) throw ValidationError("self-loop on vertex '" + vertices_[e.u] + "'");
  edges_.push_back(std::move(e));
}

void ColoredWeightedGraph::add_edge(const std::string& a, const std::string& b, Complex weight, InternalMode ca,
                                    InternalMode cb) {
  std::size_t u = vertex(a);
  std::size_t v = vertex(b);
  add_edge(GraphEdge{u, v, std::move(ca), std::move(cb), weight});
}

Eigen::MatrixXcd ColoredWeightedGraph::adjacency() const {
  const auto n = static_cast<Eigen::Index>(vertices_.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& e : edges_) {
    a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) += e.weight;
    a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) += e.weight;
  }
  return a;
}

int ColoredWeightedGraph::degree(std::size_t v) const {
  int d = 0;
  for (const auto& e : edges_) d += (e.u == v) + (e.v == v);
  return d;
}

int ColoredWeightedGraph::max_degree() const {
  int best = 0;
  for (std::size_t v = 0; v < vertices_.size(); ++v) best = std::max(best, degree(v));
  return best;
}

namespace {

struct Endpoint {
  std::string path;
  InternalMode color;
};

struct PendingEdge {
  Endpoint a, b;
  Complex weight;
};

// Recursive matcher shared by enumeration, counting and weighted sums.
class Matcher {
 public:
  explicit Matcher(const ColoredWeightedGraph& g) : g_(g), incident_(g.vertex_count()), used_(g.vertex_count(), false) {
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      incident_[g.edges()[i].u].push_back(i);
      incident_[g.edges()[i].v].push_back(i);
    }
  }

  template <class Visit>
  void run(Visit&& visit) {
    if (g_.vertex_count() % 2 != 0) return;
    current_.clear();
    recurse(0, visit);
  }

 private:
  template <class Visit>
  void recurse(std::size_t from, Visit& visit) {
    std::size_t v = from;
    while (v < used_.size() && used_[v]) ++v;
    if (v == used_.size()) {
      visit(current_);
      return;
    }
    used_[v] = true;
    for (std::size_t ei : incident_[v]) {
      const auto& e = g_.edges()[ei];
      std::size_t w = e.u == v ? e.v : e.u;
      if (used_[w]) continue;
      used_[w] = true;
      current_.push_back(ei);
      recurse(v + 1, visit);
      current_.pop_back();
      used_[w] = false;
    }
    used_[v] = false;
  }

  const ColoredWeightedGraph& g_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<bool> used_;
  std::vector<std::size_t> current_;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(9);
  os << (v == 0.0 ? 0.0 : v);
  return os.str();
}

std::string format_complex(Complex c) {
  std::string re = format_number(c.real());
  std::string im = format_number(c.imag());
  if (im.front() != '-') im = "+" + im;
  return re + im + "i";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ColoredWeightedGraph from_experiment(const ExperimentSetup& setup, const Bindings& bindings) {
  Bindings b = setup.defaults();
  for (const auto& [k, v] : bindings) b[k] = v;
  std::vector<PendingEdge> pending;
  auto each_endpoint = [&](auto&& f) {
    for (auto& e : pending) {
      f(e, e.a);
      f(e, e.b);
    }
  };
  for (const auto& element : setup.elements()) {
    std::visit(Overloaded{
                   [&](const Crystal& c) {
                     if (c.paths.size() != 2)
                       throw ValidationError("graph translation supports two-photon sources only");
                     pending.push_back(PendingEdge{{c.paths[0], emission_mode(c, 0).internal},
                                                   {c.paths[1], emission_mode(c, 1).internal},
                                                   crystal_weight(c, b)});
                   },
                   [&](const PhaseShifter& p) {
                     const Complex f = std::polar(1.0, p.phase.eval(b));
                     each_endpoint([&](PendingEdge& e, Endpoint& end) {
                       if (end.path == p.path) e.weight *= f;
                     });
                   },
                   [&](const ModeShifter& m) {
                     if (m.action == ModeShifter::Action::PolRotate)
                       throw ValidationError("polarization rotation has no graph representation; use the engine");
                     if (m.action != ModeShifter::Action::OamAdd) return;  // set: already in the emission labels
                     each_endpoint([&](PendingEdge&, Endpoint& end) {
                       if (end.path == m.path) end.color.oam += m.oam_delta;
                     });
                   },
                   [&](const PathIdentify& p) {
                     each_endpoint([&](PendingEdge&, Endpoint& end) {
                       if (end.path == p.from) end.path = p.to;
                     });
                   },
                   [&](const auto&) {
                     throw ValidationError("element '" + keyword(element) +
                                           "' has no graph representation; use the engine");
                   },
               },
               element);
  }
  std::vector<std::string> vertices = setup.detectors();
  std::set<std::string> extra;
  for (const auto& e : pending)
    for (const auto* p : {&e.a.path, &e.b.path})
      if (std::find(vertices.begin(), vertices.end(), *p) == vertices.end()) extra.insert(*p);
  vertices.insert(vertices.end(), extra.begin(), extra.end());
  ColoredWeightedGraph g(std::move(vertices));
  for (const auto& e : pending) {
    if (e.a.path == e.b.path) continue;
    g.add_edge(GraphEdge{g.vertex(e.a.path), g.vertex(e.b.path), e.a.color, e.b.color, e.weight});
  }
  return g;
}

std::vector<Matching> perfect_matchings(const ColoredWeightedGraph& g) {
  std::vector<Matching> out;
  Matcher(g).run([&](const std::vector<std::size_t>& m) {
    Matching sorted = m;
    std::sort(sorted.begin(), sorted.end());
    out.push_back(std::move(sorted));
  });
  return out;
}

std::uint64_t count_perfect_matchings(const ColoredWeightedGraph& g) {
  std::uint64_t n = 0;
  Matcher(g).run([&](const std::vector<std::size_t>&) { ++n; });
  return n;
}

Complex weighted_matching_sum(const ColoredWeightedGraph& g) {
  Complex sum{};
  Matcher(g).run([&](const std::vector<std::size_t>& m) {
    Complex p = 1.0;
    for (std::size_t ei : m) p *= g.edges()[ei].weight;
    sum += p;
  });
  return sum;
}

Complex hafnian(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw ValidationError("hafnian of a non-square matrix");
  const auto n = static_cast<int>(a.rows());
  if (n % 2) return 0.0;
  if (n == 0) return 1.0;
  if (n > 24) throw ValidationError("hafnian limited to 24 vertices");
  // f[S] = hafnian of the submatrix on vertex set S; S loses its lowest
  // vertex and one partner at each step.
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<Complex> f(std::size_t{1} << n, Complex{});
  f[0] = 1.0;
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (std::popcount(s) % 2) continue;
    const int i = std::countr_zero(s);
    std::uint32_t rest = s & ~(1u << i);
    Complex acc{};
    for (std::uint32_t r = rest; r; r &= r - 1) {
      const int j = std::countr_zero(r);
      acc += a(i, j) * f[rest & ~(1u << j)];
    }
    f[s] = acc;
  }
  return f[full];
}

Complex permanent(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw ValidationError("permanent of a non-square matrix");
  const auto n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  if (n > 30) throw ValidationError("permanent limited to 30 columns");
  Eigen::VectorXcd rows = Eigen::VectorXcd::Zero(n);
  Complex total{};
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < (std::uint64_t{1} << n); ++k) {
    std::uint64_t next = k ^ (k >> 1);
    std::uint64_t changed = next ^ gray;
    const int j = std::countr_zero(changed);
    if (next & changed) rows += a.col(j);
    else rows -= a.col(j);
    gray = next;
    Complex prod = rows.prod();
    total += (std::popcount(gray) % 2 ? -1.0 : 1.0) * prod;
  }
  return (n % 2 ? -1.0 : 1.0) * total;
}

ColoredWeightedGraph bipartite_graph(const Eigen::MatrixXcd& b) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < b.rows(); ++i) names.push_back("r" + std::to_string(i));
  for (Eigen::Index j = 0; j < b.cols(); ++j) names.push_back("c" + std::to_string(j));
  ColoredWeightedGraph g(names);
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      if (b(i, j) != Complex{})
        g.add_edge(GraphEdge{static_cast<std::size_t>(i), static_cast<std::size_t>(b.rows() + j), {}, {}, b(i, j)});
  return g;
}

ColoredWeightedGraph complete_graph(std::size_t n, Complex w) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  ColoredWeightedGraph g(names);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_edge(GraphEdge{i, j, {}, {}, w});
  return g;
}

PureState state_from_graph(const ColoredWeightedGraph& g) {
  const int half = static_cast<int>(g.vertex_count() / 2);
  OperatorPolynomial poly(half);
  Matcher(g).run([&](const std::vector<std::size_t>& m) {
    Complex w = 1.0;
    std::vector<ModeLabel> modes;
    for (std::size_t ei : m) {
      const auto& e = g.edges()[ei];
      w *= e.weight;
      modes.emplace_back(g.vertices()[e.u], e.color_u);
      modes.emplace_back(g.vertices()[e.v], e.color_v);
    }
    poly.add(half, Monomial(std::move(modes)), w);
  });
  return PureState(std::move(poly));
}

namespace {

struct BlockResult {
  std::uint64_t examined = 0;  // up to and including the witness when found
  std::optional<std::uint64_t> witness;  // enumeration index
};

class FeasibilityScanner {
 public:
  FeasibilityScanner(int n, int d, const FeasibilityOptions& opt) : n_(n), d_(d), dedup_(opt.dedup_isomorphic) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) edges_.emplace_back(i, j);
    index_.assign(static_cast<std::size_t>(n * n), 0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      auto [i, j] = edges_[e];
      index_[static_cast<std::size_t>(i * n + j)] = index_[static_cast<std::size_t>(j * n + i)] = static_cast<int>(e);
    }
    order_.resize(edges_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (opt.permutation_seed) std::shuffle(order_.begin(), order_.end(), std::mt19937_64(*opt.permutation_seed));
    if (dedup_) {
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      while (std::next_permutation(perm.begin(), perm.end())) {
        std::vector<int> map(edges_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e) {
          auto [i, j] = edges_[e];
          map[e] = index_[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)] * n + perm[static_cast<std::size_t>(j)])];
        }
        relabel_.push_back(std::move(map));
      }
    }
  }

  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Natural edge mask for enumeration index k.
  std::uint64_t natural_mask(std::uint64_t k) const {
    std::uint64_t mask = 0;
    for (std::size_t b = 0; b < order_.size(); ++b)
      if (k >> b & 1u) mask |= std::uint64_t{1} << order_[b];
    return mask;
  }

  bool canonical(std::uint64_t mask) const {
    for (const auto& map : relabel_) {
      std::uint64_t image = 0;
      for (std::uint64_t r = mask; r; r &= r - 1) image |= std::uint64_t{1} << map[static_cast<std::size_t>(std::countr_zero(r))];
      if (image < mask) return false;
    }
    return true;
  }

  /// Perfect matchings as edge masks, or nullopt when there are more than d.
  std::optional<std::vector<std::uint64_t>> matchings(std::uint64_t mask) const {
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(n_), 0);
    for (std::uint64_t r = mask; r; r &= r - 1) {
      auto [i, j] = edges_[static_cast<std::size_t>(std::countr_zero(r))];
      adj[static_cast<std::size_t>(i)] |= 1u << j;
      adj[static_cast<std::size_t>(j)] |= 1u << i;
    }
    for (auto a : adj)
      if (!a) return std::vector<std::uint64_t>{};
    std::vector<std::uint64_t> found;
    bool overflow = false;
    recurse(adj, (1u << n_) - 1u, 0, found, overflow);
    if (overflow) return std::nullopt;
    return found;
  }

  bool satisfies(std::uint64_t mask) const {
    auto pms = matchings(mask);
    if (!pms || static_cast<int>(pms->size()) != d_) return false;
    for (std::size_t a = 0; a < pms->size(); ++a)
      for (std::size_t b = a + 1; b < pms->size(); ++b)
        if ((*pms)[a] & (*pms)[b]) return false;
    return true;
  }

  BlockResult scan(std::uint64_t begin, std::uint64_t end) const {
    BlockResult r;
    for (std::uint64_t k = begin; k < end; ++k) {
      std::uint64_t mask = natural_mask(k);
      if (dedup_ && !canonical(mask)) continue;
      ++r.examined;
      if (satisfies(mask)) {
        r.witness = k;
        return r;
      }
    }
    return r;
  }

 private:
  void recurse(const std::vector<std::uint32_t>& adj, std::uint32_t remaining, std::uint64_t edges,
               std::vector<std::uint64_t>& found, bool& overflow) const {
    if (overflow) return;
    if (!remaining) {
      found.push_back(edges);
      if (static_cast<int>(found.size()) > d_) overflow = true;
      return;
    }
    const int i = std::countr_zero(remaining);
    for (std::uint32_t nb = adj[static_cast<std::size_t>(i)] & remaining & ~(1u << i); nb; nb &= nb - 1) {
      const int j = std::countr_zero(nb);
      const auto e = static_cast<std::uint64_t>(index_[static_cast<std::size_t>(i * n_ + j)]);
      recurse(adj, remaining & ~((1u << i) | (1u << j)), edges | (std::uint64_t{1} << e), found, overflow);
    }
  }

  int n_, d_;
  bool dedup_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> index_;
  std::vector<int> order_;
  std::vector<std::vector<int>> relabel_;
};

}  // namespace

FeasibilityResult ghz_feasibility_search(int n, int d, const FeasibilityOptions& options) {
  if (n < 2 || n % 2) throw ValidationError("feasibility search needs an even vertex count");
  if (n > options.max_vertices) throw ValidationError("vertex count " + std::to_string(n) + " exceeds the search bound " +
                                                      std::to_string(options.max_vertices));
  if (n > 10) throw ValidationError("feasibility search supports at most 10 vertices");
  if (d < 2) throw ValidationError("GHZ dimension must be at least 2");

  FeasibilityScanner scanner(n, d, options);
  FeasibilityResult result;
  result.n = n;
  result.d = d;
  const std::uint64_t total = std::uint64_t{1} << scanner.edge_count();
  result.subsets_total = total;

  const std::uint64_t block = std::min<std::uint64_t>(total, 1u << 14);
  const std::uint64_t blocks = (total + block - 1) / block;
  const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> witness;
  for (std::uint64_t first = 0; first < blocks && !witness; first += threads) {
    const std::uint64_t last = std::min<std::uint64_t>(blocks, first + threads);
    std::vector<BlockResult> batch(static_cast<std::size_t>(last - first));
    auto run = [&](std::uint64_t b) {
      batch[static_cast<std::size_t>(b - first)] = scanner.scan(b * block, std::min(total, (b + 1) * block));
    };
    if (batch.size() == 1) {
      run(first);
    } else {
      std::vector<std::thread> pool;
      for (std::uint64_t b = first; b < last; ++b) pool.emplace_back(run, b);
      for (auto& t : pool) t.join();
    }
    for (const auto& r : batch) {
      result.subsets_examined += r.examined;
      if (r.witness) {
        witness = r.witness;
        break;
      }
    }
  }
  if (!witness) return result;

  result.feasible = true;
  const std::uint64_t mask = scanner.natural_mask(*witness);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  ColoredWeightedGraph g(names);
  auto pms = *scanner.matchings(mask);
  for (std::size_t c = 0; c < pms.size(); ++c)
    for (std::uint64_t r = pms[c]; r; r &= r - 1) {
      auto [i, j] = scanner.edges()[static_cast<std::size_t>(std::countr_zero(r))];
      InternalMode color;
      color.oam = static_cast<int>(c);
      g.add_edge(GraphEdge{static_cast<std::size_t>(i), static_cast<std::size_t>(j), color, color, 1.0});
    }
  result.witness = std::move(g);
  return result;
}

ColoredWeightedGraph random_network(std::size_t n, double p, std::uint64_t seed, double keep_fraction) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("edge amplitude p must lie in [0, 1]");
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) throw ValidationError("keep fraction must lie in [0, 1]");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  ColoredWeightedGraph g(names);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (keep_fraction < 1.0 && uniform(rng) >= keep_fraction) continue;
      g.add_edge(GraphEdge{i, j, {}, {}, p});
    }
  g.edge_amplitude = p;
  g.absent_amplitude = std::sqrt(1.0 - p * p);
  return g;
}

std::string to_dot(const ColoredWeightedGraph& g) {
  std::ostringstream os;
  os << "graph G {\n";
  if (g.edge_amplitude) os << "  p=" << quoted(format_number(*g.edge_amplitude)) << ";\n";
  if (g.absent_amplitude) os << "  absent=" << quoted(format_number(*g.absent_amplitude)) << ";\n";
  for (const auto& v : g.vertices()) os << "  " << quoted(v) << ";\n";
  for (const auto& e : g.edges()) {
    os << "  " << quoted(g.vertices()[e.u]) << " -- " << quoted(g.vertices()[e.v]) << " [weight="
       << quoted(format_complex(e.weight)) << ", colors=" << quoted(to_string(e.color_u) + "," + to_string(e.color_v))
       << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace pathid
