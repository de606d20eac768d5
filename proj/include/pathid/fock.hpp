#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathid/polynomial.hpp"

namespace pathid {

using FockAmplitudes = std::map<FockState, Complex>;
using PathSet = std::set<std::string>;

/// Fock-basis amplitudes of a state. Coefficients of equal monomials from
/// different formal degrees are summed; each amplitude carries the bosonic
/// factor prod sqrt(n_j!).
FockAmplitudes to_fock_amplitudes(const PureState& state);

/// Inverse of to_fock_amplitudes. Every term is placed at `degree`.
PureState from_fock_amplitudes(const FockAmplitudes& amps, int truncation, int degree = 0);

/// <s1|s2>. Throws ValidationError when the truncations differ.
Complex inner_product(const PureState& s1, const PureState& s2);

double norm_squared(const PureState& s);

/// Hermitian operator on a finite list of Fock basis states.
class DensityOperator {
 public:
  DensityOperator() = default;
  DensityOperator(std::vector<FockState> basis, Eigen::MatrixXcd matrix);

  static DensityOperator pure(const FockAmplitudes& amps);

  const std::vector<FockState>& basis() const { return basis_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t dimension() const { return basis_.size(); }

  /// Index of `s` in the basis, or -1.
  int index_of(const FockState& s) const;
  Complex element(const FockState& row, const FockState& col) const;

  Complex trace() const { return matrix_.trace(); }
  DensityOperator normalized() const;

  /// Checks Hermiticity (1e-12), unit trace (1e-9) and positivity (-1e-9).
  bool is_physical() const;

  /// Keeps the listed basis states in the given order and renormalizes;
  /// states missing from this operator's basis get zero rows/columns.
  DensityOperator restricted(const std::vector<FockState>& states) const;

 private:
  std::vector<FockState> basis_;
  Eigen::MatrixXcd matrix_;
};

/// Reduced density operator over the modes of the paths in `keep`, traced over
/// everything else (undetected paths, loss modes) and normalized to unit trace.
/// Throws ValidationError for an empty keep set or a zero state.
DensityOperator partial_trace(const PureState& state, const PathSet& keep);

/// <target|rho|target> with `target` normalized. Target components outside
/// rho's basis contribute zero; target photons on paths not covered by rho
/// raise ValidationError.
double fidelity(const DensityOperator& rho, const PureState& target);

/// Fidelity against an explicit amplitude vector in rho's basis order.
/// Throws ValidationError on dimension mismatch.
double fidelity(const DensityOperator& rho, const Eigen::VectorXcd& target);

/// Dual-rail encoding of a register of qubits. Qubit j is a single photon on
/// rails[j].first (logical 0) or rails[j].second (logical 1). Internal labels
/// of the photons are ignored (mode-blind).
using Rails = std::vector<std::pair<std::string, std::string>>;

/// Projects rho onto the dual-rail computational basis (|0..0>, |0..1>, ...)
/// and renormalizes. Internal modes are summed over. Throws NumericalError when
/// the projection has zero weight.
DensityOperator dual_rail(const DensityOperator& rho, const Rails& rails);

}  // namespace pathid
