#include "pathid/fringe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "pathid/errors.hpp"

namespace pathid {

FringeFit fit_fringe(const std::vector<double>& phases, const std::vector<double>& rates) {
  if (phases.size() != rates.size()) throw ValidationError("fringe fit: phases and rates differ in length");
  if (phases.size() < 3) throw ValidationError("fringe fit needs at least three points");
  const auto n = static_cast<Eigen::Index>(phases.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(phases[static_cast<std::size_t>(i)]);
    design(i, 2) = std::sin(phases[static_cast<std::size_t>(i)]);
    y(i) = rates[static_cast<std::size_t>(i)];
  }
  Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);
  FringeFit fit;
  fit.offset = coef(0);
  fit.amplitude = std::hypot(coef(1), coef(2));
  fit.phase = std::atan2(coef(2), coef(1));
  fit.visibility = fit.offset > 0.0 ? fit.amplitude / fit.offset : 0.0;
  fit.residual = std::sqrt((design * coef - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

double fringe_visibility(const std::vector<double>& rates) {
  if (rates.empty()) throw ValidationError("visibility of an empty series");
  auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  double sum = *hi + *lo;
  return sum > 0.0 ? (*hi - *lo) / sum : 0.0;
}

std::vector<double> periodic_grid(int n) {
  if (n < 1) throw ValidationError("grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / n;
  return out;
}

}  // namespace pathid
