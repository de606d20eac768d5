#include "pathid/fock.hpp"

#include <cmath>

#include "pathid/errors.hpp"

namespace pathid {

namespace {

double bosonic_factor(const FockState& s) {
  double f = 1.0;
  for (const auto& [m, n] : s.occupations())
    for (int k = 2; k <= n; ++k) f *= k;
  return std::sqrt(f);
}

}  // namespace

FockAmplitudes to_fock_amplitudes(const PureState& state) {
  FockAmplitudes out;
  for (const auto& [key, c] : state.poly.terms()) {
    FockState s = key.monomial.fock();
    out[s] += c * bosonic_factor(s);
  }
  return out;
}

PureState from_fock_amplitudes(const FockAmplitudes& amps, int truncation, int degree) {
  OperatorPolynomial poly(truncation);
  for (const auto& [s, a] : amps) poly.add(degree, Monomial::from_fock(s), a / bosonic_factor(s));
  return PureState(std::move(poly));
}

Complex inner_product(const PureState& s1, const PureState& s2) {
  if (s1.truncation() != s2.truncation())
    throw ValidationError("inner product of states with different truncation");
  FockAmplitudes a = to_fock_amplitudes(s1);
  FockAmplitudes b = to_fock_amplitudes(s2);
  Complex sum{};
  for (const auto& [s, amp] : a) {
    auto it = b.find(s);
    if (it != b.end()) sum += std::conj(amp) * it->second;
  }
  return sum;
}

double norm_squared(const PureState& s) {
  double n = 0.0;
  for (const auto& [f, a] : to_fock_amplitudes(s)) n += std::norm(a);
  return n;
}

DensityOperator::DensityOperator(std::vector<FockState> basis, Eigen::MatrixXcd matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw ValidationError("density matrix dimension does not match basis size");
}

DensityOperator DensityOperator::pure(const FockAmplitudes& amps) {
  std::vector<FockState> basis;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index i = 0;
  for (const auto& [s, a] : amps) {
    basis.push_back(s);
    v(i++) = a;
  }
  return DensityOperator(std::move(basis), v * v.adjoint());
}

int DensityOperator::index_of(const FockState& s) const {
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i] == s) return static_cast<int>(i);
  return -1;
}

Complex DensityOperator::element(const FockState& row, const FockState& col) const {
  int i = index_of(row);
  int j = index_of(col);
  if (i < 0 || j < 0) return {};
  return matrix_(i, j);
}

DensityOperator DensityOperator::normalized() const {
  Complex tr = trace();
  if (std::abs(tr) < 1e-300) throw NumericalError("cannot normalize a zero-trace operator");
  return DensityOperator(basis_, matrix_ / tr.real());
}

bool DensityOperator::is_physical() const {
  if (basis_.empty()) return false;
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return false;
  if (std::abs(trace() - Complex(1.0)) > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_);
  return es.eigenvalues().minCoeff() >= -1e-9;
}

DensityOperator DensityOperator::restricted(const std::vector<FockState>& states) const {
  const auto n = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  std::vector<int> idx;
  idx.reserve(states.size());
  for (const auto& s : states) idx.push_back(index_of(s));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      if (idx[r] >= 0 && idx[c] >= 0) m(r, c) = matrix_(idx[r], idx[c]);
  return DensityOperator(states, m).normalized();
}

DensityOperator partial_trace(const PureState& state, const PathSet& keep) {
  if (keep.empty()) throw ValidationError("partial trace needs at least one kept path");
  auto kept = [&](const std::string& p) { return keep.count(p) > 0; };
  auto traced = [&](const std::string& p) { return keep.count(p) == 0; };

  // Group amplitudes by environment configuration.
  std::map<FockState, std::vector<std::pair<FockState, Complex>>> by_env;
  std::map<FockState, int> system_index;
  for (const auto& [s, a] : to_fock_amplitudes(state)) {
    if (a == Complex{}) continue;
    FockState sys = s.restricted(kept);
    by_env[s.restricted(traced)].emplace_back(sys, a);
    system_index.emplace(sys, 0);
  }
  std::vector<FockState> basis;
  for (auto& [s, i] : system_index) {
    i = static_cast<int>(basis.size());
    basis.push_back(s);
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [env, comps] : by_env)
    for (const auto& [si, ai] : comps)
      for (const auto& [sj, aj] : comps) rho(system_index[si], system_index[sj]) += ai * std::conj(aj);
  if (n == 0 || std::abs(rho.trace()) < 1e-300) throw NumericalError("partial trace of a zero state");
  return DensityOperator(std::move(basis), rho).normalized();
}

double fidelity(const DensityOperator& rho, const Eigen::VectorXcd& target) {
  if (target.size() != static_cast<Eigen::Index>(rho.dimension()))
    throw ValidationError("fidelity: target dimension does not match density operator");
  double nrm = target.squaredNorm();
  if (nrm == 0.0) throw NumericalError("fidelity: zero target state");
  Complex f = target.dot(rho.matrix() * target) / nrm;
  return std::clamp(f.real(), 0.0, 1.0);
}

double fidelity(const DensityOperator& rho, const PureState& target) {
  PathSet covered;
  for (const auto& s : rho.basis())
    for (const auto& [m, n] : s.occupations()) covered.insert(m.path);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rho.dimension()));
  double total = 0.0;
  for (const auto& [s, a] : to_fock_amplitudes(target)) {
    if (a == Complex{}) continue;
    for (const auto& [m, n] : s.occupations())
      if (!covered.count(m.path)) throw ValidationError("fidelity: target occupies path '" + m.path + "' outside rho");
    total += std::norm(a);
    int i = rho.index_of(s);
    if (i >= 0) v(i) = a;
  }
  if (total == 0.0) throw NumericalError("fidelity: zero target state");
  Complex f = v.dot(rho.matrix() * v) / total;
  return std::clamp(f.real(), 0.0, 1.0);
}

DensityOperator dual_rail(const DensityOperator& rho, const Rails& rails) {
  const std::size_t q = rails.size();
  const std::size_t dim = std::size_t{1} << q;

  // Decode a basis state into (logical index, internal labels per qubit).
  struct Decoded {
    std::size_t logical;
    std::vector<InternalMode> internal;
  };
  auto decode = [&](const FockState& s) -> std::optional<Decoded> {
    if (static_cast<std::size_t>(s.total()) != q) return std::nullopt;
    Decoded d{0, std::vector<InternalMode>(q)};
    std::size_t seen = 0;
    for (std::size_t j = 0; j < q; ++j) {
      int n0 = s.path_occupation(rails[j].first);
      int n1 = s.path_occupation(rails[j].second);
      if (n0 + n1 != 1) return std::nullopt;
      const std::string& path = n0 == 1 ? rails[j].first : rails[j].second;
      for (const auto& [m, n] : s.occupations())
        if (m.path == path) d.internal[j] = m.internal;
      if (n1 == 1) d.logical |= std::size_t{1} << (q - 1 - j);
      seen += 1;
    }
    return seen == q ? std::optional<Decoded>(d) : std::nullopt;
  };

  std::vector<std::optional<Decoded>> decoded;
  decoded.reserve(rho.dimension());
  for (const auto& s : rho.basis()) decoded.push_back(decode(s));

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    if (!decoded[i]) continue;
    for (std::size_t j = 0; j < decoded.size(); ++j) {
      if (!decoded[j] || decoded[i]->internal != decoded[j]->internal) continue;
      m(static_cast<Eigen::Index>(decoded[i]->logical), static_cast<Eigen::Index>(decoded[j]->logical)) +=
          rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  if (std::abs(m.trace()) < 1e-300) throw NumericalError("dual-rail projection has zero weight");

  std::vector<FockState> basis;
  for (std::size_t k = 0; k < dim; ++k) {
    FockState s;
    for (std::size_t j = 0; j < q; ++j) {
      bool one = (k >> (q - 1 - j)) & 1U;
      s.add(ModeLabel(one ? rails[j].second : rails[j].first));
    }
    basis.push_back(std::move(s));
  }
  return DensityOperator(std::move(basis), m).normalized();
}

}  // namespace pathid
