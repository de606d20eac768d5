#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/graphs.hpp"

using namespace pathid;
using testing_support::load_setup;
using testing_support::max_abs_diff;

namespace {

// Hafnian straight from the definition: sum over permutations / (2^n n!).
Complex hafnian_by_permutations(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  Complex total = 0.0;
  do {
    Complex t = 1.0;
    for (int i = 0; i < n; i += 2) t *= a(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i + 1)]);
    total += t;
  } while (std::next_permutation(p.begin(), p.end()));
  double norm = 1.0;
  for (int k = 1; k <= n / 2; ++k) norm *= 2.0 * k;
  return total / norm;
}

Complex permanent_by_permutations(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  Complex total = 0.0;
  do {
    Complex t = 1.0;
    for (int i = 0; i < n; ++i) t *= a(i, p[static_cast<std::size_t>(i)]);
    total += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST(Graph, Construction) {
  ColoredWeightedGraph g({"a", "b"});
  g.add_edge("a", "b", 0.5);
  g.add_edge("a", "c", Complex(0.0, 1.0));
  g.add_edge("a", "b", 0.25);
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.degree(0), 3);
  EXPECT_EQ(g.max_degree(), 3);
  EXPECT_EQ(g.adjacency()(0, 1), Complex(0.75));
  EXPECT_EQ(g.adjacency()(1, 0), Complex(0.75));
  EXPECT_THROW(g.add_edge("a", "a"), ValidationError);
}

TEST(Matchings, CompleteGraphCounts) {
  std::uint64_t expected = 1;
  for (std::size_t n = 1; n <= 5; ++n) {
    expected *= 2 * n - 1;
    const auto g = complete_graph(2 * n);
    EXPECT_EQ(count_perfect_matchings(g), expected);
    EXPECT_EQ(perfect_matchings(g).size(), expected);
    EXPECT_NEAR(std::abs(hafnian(g.adjacency()) - static_cast<double>(expected)), 0.0, 1e-9);
  }
  EXPECT_EQ(count_perfect_matchings(complete_graph(3)), 0u);
}

TEST(Matchings, DeterministicOrderAndValidity) {
  const auto g = complete_graph(6);
  const auto a = perfect_matchings(g);
  EXPECT_EQ(a, perfect_matchings(g));
  for (const auto& m : a) {
    EXPECT_TRUE(std::is_sorted(m.begin(), m.end()));
    std::vector<int> cover(6, 0);
    for (auto e : m) {
      ++cover[g.edges()[e].u];
      ++cover[g.edges()[e].v];
    }
    EXPECT_TRUE(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
  }
}

TEST(Hafnian, AgreesWithPermutationDefinition) {
  std::mt19937_64 rng(11);
  for (int n : {0, 2, 4, 6, 8}) {
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::MatrixXcd a = random_matrix(rng, n, n);
      a = (a + a.transpose()).eval();
      const Complex expected = n == 0 ? Complex(1.0) : hafnian_by_permutations(a);
      EXPECT_LT(std::abs(hafnian(a) - expected), 1e-11) << n;
      ColoredWeightedGraph g;
      for (int i = 0; i < n; ++i) g.vertex("v" + std::to_string(i));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge("v" + std::to_string(i), "v" + std::to_string(j), a(i, j));
      if (n > 0) EXPECT_LT(std::abs(weighted_matching_sum(g) - expected), 1e-11) << n;
    }
  }
  EXPECT_EQ(hafnian(Eigen::MatrixXcd::Ones(3, 3)), Complex(0.0));
  EXPECT_THROW(hafnian(Eigen::MatrixXcd::Ones(2, 3)), ValidationError);
}

TEST(Permanent, RyserMatchesDefinitionAndBipartiteHafnian) {
  std::mt19937_64 rng(5);
  for (int n : {1, 2, 3, 5, 6}) {
    const Eigen::MatrixXcd b = random_matrix(rng, n, n);
    const Complex expected = permanent_by_permutations(b);
    EXPECT_LT(std::abs(permanent(b) - expected), 1e-11);
    const auto g = bipartite_graph(b);
    EXPECT_LT(std::abs(weighted_matching_sum(g) - expected), 1e-11);
    EXPECT_LT(std::abs(hafnian(g.adjacency()) - expected), 1e-11);
  }
}

TEST(FromExperiment, Ghz3dHasThreeDisjointMatchings) {
  const auto doc = load_setup("ghz3d");
  const auto g = from_experiment(doc.build(), doc.bindings());
  EXPECT_EQ(g.vertices(), (std::vector<std::string>{"A", "B", "C", "D"}));
  EXPECT_EQ(g.edges().size(), 6u);
  const auto pms = perfect_matchings(g);
  ASSERT_EQ(pms.size(), 3u);
  std::vector<std::size_t> all;
  for (const auto& m : pms) all.insert(all.end(), m.begin(), m.end());
  std::sort(all.begin(), all.end());
  EXPECT_TRUE(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST(FromExperiment, EngineAgreement) {
  for (const char* name : {"frustrated", "hardy-pol", "ghz3d", "fourphoton", "random-net"}) {
    const auto doc = load_setup(name);
    const auto setup = doc.build();
    const auto ps = postselect(simulate(setup, doc.bindings()), DetectionPattern::coincidence(setup.detectors()));
    const auto gs = state_from_graph(from_experiment(setup, doc.bindings()));
    EXPECT_LT(max_abs_diff(to_fock_amplitudes(ps.projected), to_fock_amplitudes(gs)), 1e-12) << name;
  }
}

TEST(FromExperiment, RejectsOpticalElements) {
  for (const char* name : {"zwm", "ghz2d", "nm-scheme", "menzel3"}) {
    const auto doc = load_setup(name);
    EXPECT_THROW(from_experiment(doc.build(), doc.bindings()), ValidationError) << name;
  }
}

TEST(GraphState, SingleEdgeAndRandomNetwork) {
  ColoredWeightedGraph g({"a", "b"});
  g.add_edge("a", "b", Complex(0.3, 0.4));
  EXPECT_EQ(weighted_matching_sum(g), Complex(0.3, 0.4));
  const auto amps = to_fock_amplitudes(state_from_graph(g));
  ASSERT_EQ(amps.size(), 1u);
  EXPECT_EQ(amps.begin()->second, Complex(0.3, 0.4));

  const auto net = random_network(4, 0.1, 1);
  EXPECT_EQ(net.edges().size(), 6u);
  EXPECT_NEAR(std::abs(weighted_matching_sum(net) - 0.03), 0.0, 1e-15);
  const auto sparse_a = random_network(8, 0.2, 42, 0.5);
  const auto sparse_b = random_network(8, 0.2, 42, 0.5);
  EXPECT_EQ(to_dot(sparse_a), to_dot(sparse_b));
  EXPECT_LT(sparse_a.edges().size(), 28u);
  EXPECT_THROW(random_network(4, 1.5, 1), ValidationError);
}

TEST(Dot, StableText) {
  ColoredWeightedGraph g({"a", "b"});
  g.add_edge("a", "b", Complex(0.5, -0.25), InternalMode{{}, 1}, InternalMode{{}, 2});
  const std::string dot = to_dot(g);
  EXPECT_EQ(dot, to_dot(g));
  EXPECT_NE(dot.find("graph"), std::string::npos);
  EXPECT_NE(dot.find("0.5-0.25i"), std::string::npos);
}

TEST(Feasibility, KnownVerdicts) {
  const auto a = ghz_feasibility_search(4, 3);
  EXPECT_TRUE(a.feasible);
  ASSERT_TRUE(a.witness.has_value());
  EXPECT_EQ(count_perfect_matchings(*a.witness), 3u);
  EXPECT_EQ(a.witness->edges().size(), 6u);

  const auto b = ghz_feasibility_search(6, 3);
  EXPECT_FALSE(b.feasible);
  EXPECT_EQ(b.subsets_total, 32768u);
  EXPECT_EQ(b.subsets_examined, 32768u);

  const auto c = ghz_feasibility_search(6, 2);
  EXPECT_TRUE(c.feasible);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_EQ(count_perfect_matchings(*c.witness), 2u);

  FeasibilityOptions dedup;
  dedup.dedup_isomorphic = true;
  const auto d = ghz_feasibility_search(6, 3, dedup);
  EXPECT_FALSE(d.feasible);
  EXPECT_LT(d.subsets_examined, 32768u);
  FeasibilityOptions seeded;
  seeded.permutation_seed = 3;
  EXPECT_TRUE(ghz_feasibility_search(4, 3, seeded).feasible);

  EXPECT_THROW(ghz_feasibility_search(5, 2), ValidationError);
  EXPECT_THROW(ghz_feasibility_search(10, 2), ValidationError);
  EXPECT_THROW(ghz_feasibility_search(4, 1), ValidationError);
}
