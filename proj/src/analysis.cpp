#include "pathid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pathid/engine.hpp"
#include "pathid/errors.hpp"

namespace pathid {

namespace {

void check_series(const FringeSeries& s) {
  if (s.intensities.empty()) throw ValidationError("empty fringe series");
  if (s.phases.size() != s.intensities.size()) throw ValidationError("fringe series phases and intensities differ in length");
  for (double v : s.intensities)
    if (!(v >= 0.0)) throw ValidationError("negative intensity in fringe series");
}

}  // namespace

double visibility(const FringeSeries& series) {
  check_series(series);
  return fringe_visibility(series.intensities);
}

FringeFit fitted_visibility(const FringeSeries& series) {
  check_series(series);
  return fit_fringe(series.phases, series.intensities);
}

double degree_of_polarization(double transmission, double gamma) {
  const double c = std::cos(gamma);
  return (transmission + c) / (1.0 + transmission * c);
}

double degree_of_polarization(const Eigen::Matrix2cd& coherency) {
  const double tr = coherency.trace().real();
  if (tr <= 0.0) throw NumericalError("degree of polarization of a vanishing field");
  const double det = coherency.determinant().real();
  return std::sqrt(std::clamp(1.0 - 4.0 * det / (tr * tr), 0.0, 1.0));
}

Eigen::Matrix2cd polarization_coherency(const PureState& state, const std::string& path) {
  DetectionPattern one({{{path}, 1, std::nullopt}});
  PostselectResult ps = postselect(state, one);
  if (ps.order < 0) throw NumericalError("no single photon on path '" + path + "'");
  // Environment index -> (H amplitude, V amplitude).
  std::map<FockState, Eigen::Vector2cd> env;
  for (const auto& [f, amp] : to_fock_amplitudes(ps.projected)) {
    for (const auto& [m, n] : f.occupations()) {
      if (m.path != path) continue;
      if (!m.internal.pol.is_hv()) throw ValidationError("photon on '" + path + "' is not in the H/V basis");
      FockState rest = f;
      rest.add(m, -1);
      ModeLabel stripped = m;
      stripped.internal.pol = Polarization::none();
      rest.add(stripped);  // keep non-polarization labels as part of the environment
      auto [it, fresh] = env.emplace(rest, Eigen::Vector2cd::Zero());
      it->second(m.internal.pol.kind == Polarization::Kind::H ? 0 : 1) += amp;
    }
  }
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  for (const auto& [k, v] : env) rho += v * v.adjoint();
  return rho;
}

double concurrence(const DensityOperator& rho) {
  if (rho.dimension() != 4) throw ValidationError("concurrence needs a two-qubit (4x4) density operator");
  if (!rho.is_physical()) throw ValidationError("concurrence of a non-physical density operator");
  return concurrence(Eigen::Matrix4cd(rho.matrix()));
}

double concurrence(const Eigen::Matrix4cd& rho) {
  if (!rho.isApprox(rho.adjoint(), 1e-12)) throw ValidationError("density matrix is not Hermitian");
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  // sigma_y (x) sigma_y in the |00>,|01>,|10>,|11> basis.
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  // Wootters' lambdas are the singular values of V^T (Y (x) Y) V, where the
  // columns of V are the eigenvectors of rho scaled by the root of their
  // eigenvalues. Dropping null directions avoids square roots of rounding noise.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-9) throw ValidationError("density matrix is not positive");
  const double cutoff = 1e-14 * std::max(1.0, es.eigenvalues().maxCoeff());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < 4; ++i)
    if (es.eigenvalues()(i) > cutoff) kept.push_back(i);
  Eigen::MatrixXcd v(4, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k)
    v.col(static_cast<Eigen::Index>(k)) = std::sqrt(es.eigenvalues()(kept[k])) * es.eigenvectors().col(kept[k]);
  std::vector<double> lambda(4, 0.0);
  if (!kept.empty()) {
    const Eigen::MatrixXcd tau = v.transpose() * yy * v;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tau);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      lambda[static_cast<std::size_t>(i)] = svd.singularValues()(i);
  }
  std::sort(lambda.rbegin(), lambda.rend());
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double pure_state_concurrence(const Eigen::Vector4cd& psi) {
  const double norm = psi.squaredNorm();
  if (norm <= 0.0) throw ValidationError("concurrence of a zero vector");
  return 2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2)) / norm;
}

void JointMomentumDistribution::validate() const {
  if (qs.empty() || qi.empty()) throw ValidationError("empty momentum grid");
  if (amplitude.rows() != static_cast<Eigen::Index>(qs.size()) || amplitude.cols() != static_cast<Eigen::Index>(qi.size()))
    throw ValidationError("momentum amplitude shape does not match the grid");
  if (std::abs(amplitude.squaredNorm() - 1.0) > 1e-9) throw ValidationError("momentum distribution is not normalized");
}

std::vector<MomentumCell> momentum_visibility(const JointMomentumDistribution& dist,
                                              const std::function<double(double)>& idler_phase) {
  dist.validate();
  std::vector<Complex> phase(dist.qi.size());
  for (std::size_t j = 0; j < dist.qi.size(); ++j) phase[j] = std::polar(1.0, idler_phase(dist.qi[j]));
  std::vector<MomentumCell> out;
  for (std::size_t i = 0; i < dist.qs.size(); ++i) {
    const auto row = dist.amplitude.row(static_cast<Eigen::Index>(i));
    const double marginal = row.squaredNorm();
    if (marginal <= 0.0) continue;
    Complex avg{};
    double mean = 0.0, second = 0.0;
    for (std::size_t j = 0; j < dist.qi.size(); ++j) {
      const double p = std::norm(row(static_cast<Eigen::Index>(j))) / marginal;
      avg += p * phase[j];
      mean += p * dist.qi[j];
      second += p * dist.qi[j] * dist.qi[j];
    }
    MomentumCell c;
    c.qs = dist.qs[i];
    c.marginal = marginal;
    c.visibility = std::min(1.0, std::abs(avg));
    c.variance = std::max(0.0, second - mean * mean);
    out.push_back(c);
  }
  return out;
}

JointMomentumDistribution gaussian_joint_distribution(const std::vector<double>& grid, double sigma_c,
                                                      double sigma_d) {
  if (grid.empty()) throw ValidationError("empty momentum grid");
  if (sigma_c <= 0.0 || sigma_d <= 0.0) throw ValidationError("Gaussian widths must be positive");
  const auto n = static_cast<Eigen::Index>(grid.size());
  JointMomentumDistribution d{grid, grid, Eigen::MatrixXcd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double s = grid[static_cast<std::size_t>(i)] + grid[static_cast<std::size_t>(j)];
      const double t = grid[static_cast<std::size_t>(i)] - grid[static_cast<std::size_t>(j)];
      d.amplitude(i, j) = std::exp(-s * s / (4 * sigma_c * sigma_c) - t * t / (4 * sigma_d * sigma_d));
    }
  const double norm = d.amplitude.norm();
  if (norm <= 0.0) throw NumericalError("Gaussian distribution vanishes on the grid");
  d.amplitude /= norm;
  return d;
}

JointMomentumDistribution anticorrelated_distribution(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("empty momentum grid");
  const auto n = static_cast<Eigen::Index>(grid.size());
  JointMomentumDistribution d{grid, grid, Eigen::MatrixXcd::Zero(n, n)};
  // Pair each q_S with the grid point closest to -q_S.
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < n; ++j)
      if (std::abs(grid[static_cast<std::size_t>(j)] + grid[static_cast<std::size_t>(i)]) <
          std::abs(grid[static_cast<std::size_t>(best)] + grid[static_cast<std::size_t>(i)]))
        best = j;
    d.amplitude(i, best) = 1.0 / std::sqrt(static_cast<double>(n));
  }
  return d;
}

double SpectroscopyConfig::idler_wavelength() const {
  if (lambda_i > 0.0) return lambda_i;
  const double inv = 1.0 / lambda_p - 1.0 / lambda_s;
  if (inv <= 0.0) throw ValidationError("signal wavelength must exceed the pump wavelength");
  return 1.0 / inv;
}

double SpectroscopyConfig::medium_transmissivity() const { return std::exp(-alpha_m * medium_length); }

void SpectroscopyConfig::validate() const {
  if (lambda_p <= 0.0 || lambda_s <= 0.0 || lambda_i < 0.0) throw ValidationError("wavelengths must be positive");
  if (length < 0.0 || medium_length < 0.0 || alpha_m < 0.0) throw ValidationError("lengths and absorption must be non-negative");
  const double li = idler_wavelength();
  const double lhs = 1.0 / lambda_p, rhs = 1.0 / lambda_s + 1.0 / li;
  if (std::abs(lhs - rhs) > 1e-9 * lhs) throw ValidationError("wavelengths violate energy conservation");
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

double spectral_intensity(const SpectroscopyConfig& cfg, double lambda_s, double theta_s, double extra_phase) {
  const double c = std::cos(theta_s);
  if (std::abs(c) < 1e-12) throw ValidationError("emission angle with vanishing cosine");
  SpectroscopyConfig local = cfg;
  local.lambda_s = lambda_s;
  local.lambda_i = 0.0;
  const double li = local.idler_wavelength();
  const double two_pi = 2.0 * std::numbers::pi;
  const double dk = two_pi * (cfg.n_p / cfg.lambda_p - cfg.n_i / li - cfg.n_s / lambda_s);
  const double delta = cfg.length * dk / c;
  const double delta_m = cfg.medium_length * dk / c;
  const double s = sinc(delta / 2.0);
  return 0.5 * s * s * (1.0 + cfg.medium_transmissivity() * std::cos(delta + delta_m + extra_phase));
}

Eigen::MatrixXd spectrogram(const SpectroscopyConfig& cfg, const std::vector<double>& lambdas,
                            const std::vector<double>& thetas) {
  cfg.validate();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(lambdas.size()), static_cast<Eigen::Index>(thetas.size()));
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    for (std::size_t j = 0; j < thetas.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spectral_intensity(cfg, lambdas[i], thetas[j]);
  return out;
}

double spectral_fringe_visibility(const SpectroscopyConfig& cfg, int points) {
  cfg.validate();
  const auto phases = periodic_grid(points);
  std::vector<double> rates;
  for (double p : phases) rates.push_back(spectral_intensity(cfg, cfg.lambda_s, cfg.theta_s, p));
  return fit_fringe(phases, rates).visibility;
}

double equivalent_wavelength(double lambda_s, double lambda_i) {
  if (lambda_s <= 0.0 || lambda_i <= 0.0) throw ValidationError("wavelengths must be positive");
  return lambda_s * lambda_s / lambda_i;
}

std::optional<double> fringe_radius(int n, double d, double focal_length, double phi0, double lambda) {
  if (d <= 0.0) throw ValidationError("fringe radius needs a positive displacement");
  const double path = n * lambda - phi0;
  if (path < 0.0) return std::nullopt;
  return std::sqrt(2.0 * focal_length * focal_length * path / d);
}

double magnification(double f0, double f_i, double lambda_s, double lambda_i) {
  if (f0 <= 0.0 || f_i <= 0.0 || lambda_s <= 0.0 || lambda_i <= 0.0)
    throw ValidationError("magnification needs positive inputs");
  return f0 * lambda_s / (f_i * lambda_i);
}

CavityResult cavity_transmission(Complex r1, Complex r2, Complex t2, int max_rounds) {
  if (std::abs(r1) > 1.0 + 1e-12 || std::abs(r2) > 1.0 + 1e-12 || std::abs(t2) > 1.0 + 1e-12)
    throw ValidationError("cavity amplitudes must not exceed unit modulus");
  if (std::norm(r2) + std::norm(t2) > 1.0 + 1e-12) throw ValidationError("output coupler gains energy");
  if (max_rounds < 1) throw ValidationError("cavity needs at least one round");
  CavityResult r;
  const Complex loop = r1 * r2;
  Complex amp = t2;
  for (int k = 0; k < max_rounds; ++k) {
    r.amplitudes.push_back(amp);
    r.total += std::norm(amp);
    amp *= loop;
  }
  const double q = std::norm(loop);
  if (q < 1.0 - 1e-15) {
    r.closed_form = std::norm(t2) / (1.0 - q);
  } else if (std::norm(t2) == 0.0) {
    r.divergent = true;
  } else {
    r.closed_form = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace pathid
