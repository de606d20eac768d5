#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pathid/mode.hpp"

namespace pathid {

using Complex = std::complex<double>;

/// Absolute tolerance used for complex equality checks.
inline constexpr double kTolerance = 1e-12;

/// Product of creation operators, stored as a sorted multiset of modes.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<ModeLabel> modes);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  bool empty() const { return modes_.empty(); }

  Monomial times(const ModeLabel& mode) const;
  int count(const ModeLabel& mode) const;
  /// Removes one copy of `mode`; precondition count(mode) > 0.
  Monomial without_one(const ModeLabel& mode) const;

  FockState fock() const;
  static Monomial from_fock(const FockState& s);

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.modes_ < b.modes_; }

 private:
  std::vector<ModeLabel> modes_;
};

/// Key of a polynomial term: formal perturbation degree plus monomial.
struct TermKey {
  int degree = 0;
  Monomial monomial;

  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend bool operator<(const TermKey& a, const TermKey& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    return a.monomial < b.monomial;
  }
};

/// Truncated polynomial in creation operators acting on the vacuum.
///
/// Every term carries its formal degree (the number of source factors that
/// produced it). Terms above the truncation degree are discarded on insertion.
/// Terms whose coefficients cancel are kept with a zero coefficient: the term
/// set records which photon configurations are reachable at each order,
/// independently of interference. `pruned()` drops them explicitly.
class OperatorPolynomial {
 public:
  using Terms = std::map<TermKey, Complex>;

  explicit OperatorPolynomial(int truncation = 1);

  static OperatorPolynomial vacuum(int truncation);

  int truncation() const { return truncation_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Accumulates `c` onto the term; ignored when degree > truncation.
  void add(int degree, const Monomial& m, Complex c);
  void add(const OperatorPolynomial& other, Complex scale = 1.0);

  Complex coefficient(int degree, const Monomial& m) const;

  /// Lowest / highest degree present (structurally); nullopt when empty.
  std::optional<int> min_degree() const;
  std::optional<int> max_degree() const;

  /// Terms of a single degree.
  OperatorPolynomial sector(int degree) const;
  /// Drops terms with |c| <= tol.
  OperatorPolynomial pruned(double tol = 1e-14) const;
  OperatorPolynomial scaled(Complex s) const;

  /// Replaces every creation operator by a linear combination of creation
  /// operators. `image` returns the combination for a mode.
  using Image = std::vector<std::pair<ModeLabel, Complex>>;
  OperatorPolynomial substituted(const std::function<Image(const ModeLabel&)>& image) const;

  /// Multiplies every term by the product of `modes` (creation) and bumps the
  /// degree by `degree_increment`.
  OperatorPolynomial created(const std::vector<ModeLabel>& modes, int degree_increment) const;
  /// Applies the product of annihilation operators for `modes` (as a
  /// derivative on the vacuum-applied polynomial) and bumps the degree.
  OperatorPolynomial annihilated(const std::vector<ModeLabel>& modes, int degree_increment) const;

  /// Set of paths occupied by any term.
  std::vector<std::string> paths() const;

  /// Equality with absent terms treated as zero.
  bool approx_equal(const OperatorPolynomial& other, double tol = kTolerance) const;

 private:
  int truncation_;
  Terms terms_;
};

using Bindings = std::map<std::string, double>;

/// A state |psi> = P(a^dagger)|0> together with the parameter bindings that
/// were used to produce it.
struct PureState {
  OperatorPolynomial poly;
  Bindings bindings;

  PureState() = default;
  explicit PureState(OperatorPolynomial p, Bindings b = {}) : poly(std::move(p)), bindings(std::move(b)) {}

  static PureState vacuum(int truncation) { return PureState(OperatorPolynomial::vacuum(truncation)); }

  int truncation() const { return poly.truncation(); }
};

}  // namespace pathid
