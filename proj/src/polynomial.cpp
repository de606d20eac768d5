#include "pathid/polynomial.hpp"

#include <algorithm>
#include <set>

namespace pathid {

Monomial::Monomial(std::vector<ModeLabel> modes) : modes_(std::move(modes)) {
  std::sort(modes_.begin(), modes_.end());
}

Monomial Monomial::times(const ModeLabel& mode) const {
  Monomial out = *this;
  out.modes_.insert(std::upper_bound(out.modes_.begin(), out.modes_.end(), mode), mode);
  return out;
}

int Monomial::count(const ModeLabel& mode) const {
  auto [lo, hi] = std::equal_range(modes_.begin(), modes_.end(), mode);
  return static_cast<int>(hi - lo);
}

Monomial Monomial::without_one(const ModeLabel& mode) const {
  Monomial out = *this;
  auto it = std::lower_bound(out.modes_.begin(), out.modes_.end(), mode);
  out.modes_.erase(it);
  return out;
}

FockState Monomial::fock() const {
  FockState s;
  for (const auto& m : modes_) s.add(m);
  return s;
}

Monomial Monomial::from_fock(const FockState& s) {
  Monomial out;
  for (const auto& [m, n] : s.occupations()) out.modes_.insert(out.modes_.end(), n, m);
  return out;
}

OperatorPolynomial::OperatorPolynomial(int truncation) : truncation_(truncation) {}

OperatorPolynomial OperatorPolynomial::vacuum(int truncation) {
  OperatorPolynomial p(truncation);
  p.add(0, Monomial{}, 1.0);
  return p;
}

void OperatorPolynomial::add(int degree, const Monomial& m, Complex c) {
  if (degree > truncation_) return;
  terms_[TermKey{degree, m}] += c;
}

void OperatorPolynomial::add(const OperatorPolynomial& other, Complex scale) {
  for (const auto& [k, c] : other.terms_) add(k.degree, k.monomial, c * scale);
}

Complex OperatorPolynomial::coefficient(int degree, const Monomial& m) const {
  auto it = terms_.find(TermKey{degree, m});
  return it == terms_.end() ? Complex{} : it->second;
}

std::optional<int> OperatorPolynomial::min_degree() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first.degree;
}

std::optional<int> OperatorPolynomial::max_degree() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.rbegin()->first.degree;
}

OperatorPolynomial OperatorPolynomial::sector(int degree) const {
  OperatorPolynomial out(truncation_);
  for (const auto& [k, c] : terms_)
    if (k.degree == degree) out.terms_.emplace(k, c);
  return out;
}

OperatorPolynomial OperatorPolynomial::pruned(double tol) const {
  OperatorPolynomial out(truncation_);
  for (const auto& [k, c] : terms_)
    if (std::abs(c) > tol) out.terms_.emplace(k, c);
  return out;
}

OperatorPolynomial OperatorPolynomial::scaled(Complex s) const {
  OperatorPolynomial out = *this;
  for (auto& [k, c] : out.terms_) c *= s;
  return out;
}

OperatorPolynomial OperatorPolynomial::substituted(const std::function<Image(const ModeLabel&)>& image) const {
  OperatorPolynomial out(truncation_);
  std::map<ModeLabel, Image> cache;
  auto lookup = [&](const ModeLabel& m) -> const Image& {
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, image(m)).first;
    return it->second;
  };
  for (const auto& [key, coeff] : terms_) {
    // Expand the product of images one factor at a time.
    std::map<Monomial, Complex> partial{{Monomial{}, coeff}};
    for (const auto& mode : key.monomial.modes()) {
      std::map<Monomial, Complex> next;
      for (const auto& [mono, c] : partial)
        for (const auto& [target, amp] : lookup(mode)) next[mono.times(target)] += c * amp;
      partial = std::move(next);
    }
    for (const auto& [mono, c] : partial) out.add(key.degree, mono, c);
  }
  return out;
}

OperatorPolynomial OperatorPolynomial::created(const std::vector<ModeLabel>& modes, int degree_increment) const {
  OperatorPolynomial out(truncation_);
  for (const auto& [key, coeff] : terms_) {
    Monomial m = key.monomial;
    for (const auto& mode : modes) m = m.times(mode);
    out.add(key.degree + degree_increment, m, coeff);
  }
  return out;
}

OperatorPolynomial OperatorPolynomial::annihilated(const std::vector<ModeLabel>& modes, int degree_increment) const {
  OperatorPolynomial out(truncation_);
  for (const auto& [key, coeff] : terms_) {
    Monomial m = key.monomial;
    Complex c = coeff;
    bool vanished = false;
    for (const auto& mode : modes) {
      int n = m.count(mode);
      if (n == 0) {
        vanished = true;
        break;
      }
      c *= static_cast<double>(n);
      m = m.without_one(mode);
    }
    if (!vanished) out.add(key.degree + degree_increment, m, c);
  }
  return out;
}

std::vector<std::string> OperatorPolynomial::paths() const {
  std::set<std::string> out;
  for (const auto& [key, c] : terms_)
    for (const auto& m : key.monomial.modes()) out.insert(m.path);
  return {out.begin(), out.end()};
}

bool OperatorPolynomial::approx_equal(const OperatorPolynomial& other, double tol) const {
  for (const auto& [k, c] : terms_)
    if (std::abs(c - other.coefficient(k.degree, k.monomial)) > tol) return false;
  for (const auto& [k, c] : other.terms_)
    if (std::abs(c - coefficient(k.degree, k.monomial)) > tol) return false;
  return true;
}

}  // namespace pathid
