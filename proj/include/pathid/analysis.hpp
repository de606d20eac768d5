#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathid/fock.hpp"
#include "pathid/fringe.hpp"

namespace pathid {

// ---- fringes ---------------------------------------------------------------

struct FringeSeries {
  std::vector<double> phases;
  std::vector<double> intensities;
};

/// (I_max - I_min) / (I_max + I_min); 0 for an all-zero series.
double visibility(const FringeSeries& series);
/// Sinusoidal least-squares fit of the series.
FringeFit fitted_visibility(const FringeSeries& series);

// ---- polarization ----------------------------------------------------------

/// (T + cos g) / (1 + T cos g) for an induced-coherence interferometer whose
/// idler passes an object of amplitude transmission T and whose signal
/// polarizations differ by the angle g. Interferometric phase at 0 mod 2 pi.
double degree_of_polarization(double transmission, double gamma);

/// sqrt(1 - 4 det(rho) / tr(rho)^2) for a 2x2 polarization coherency matrix.
double degree_of_polarization(const Eigen::Matrix2cd& coherency);

/// Polarization coherency matrix (H, V basis, unnormalized) of a single photon
/// on `path`, traced over everything else. Uses the leading-order components
/// with exactly one photon on the path; all such photons must be H or V.
Eigen::Matrix2cd polarization_coherency(const PureState& state, const std::string& path);

// ---- entanglement ----------------------------------------------------------

/// Wootters concurrence of a two-qubit density matrix. Throws ValidationError
/// unless rho is 4x4 and physical.
double concurrence(const DensityOperator& rho);
double concurrence(const Eigen::Matrix4cd& rho);
/// |<psi*| sy (x) sy |psi>| / <psi|psi> for a pure two-qubit state.
double pure_state_concurrence(const Eigen::Vector4cd& psi);

// ---- momentum correlations -------------------------------------------------

/// Complex amplitudes on a uniform (q_S, q_I) grid; rows index q_S.
struct JointMomentumDistribution {
  std::vector<double> qs;
  std::vector<double> qi;
  Eigen::MatrixXcd amplitude;

  /// Throws ValidationError on shape mismatch or if sum |a|^2 differs from 1
  /// by more than 1e-9.
  void validate() const;
};

struct MomentumCell {
  double qs = 0.0;
  double marginal = 0.0;    // P(q_S)
  double visibility = 0.0;  // |sum_qI P(q_I|q_S) exp(i phi(q_I))|
  double variance = 0.0;    // variance of q_I given q_S
};

/// One entry per q_S row with non-zero marginal.
std::vector<MomentumCell> momentum_visibility(const JointMomentumDistribution& dist,
                                              const std::function<double(double)>& idler_phase);

/// Normalized two-photon amplitude exp(-(qs+qi)^2/(4 s_c^2) - (qs-qi)^2/(4 s_d^2))
/// sampled on `grid` x `grid`. s_c sets how tightly q_I follows -q_S.
JointMomentumDistribution gaussian_joint_distribution(const std::vector<double>& grid, double sigma_c,
                                                      double sigma_d);

/// Normalized amplitude concentrated on q_I = -q_S (same grid for both).
JointMomentumDistribution anticorrelated_distribution(const std::vector<double>& grid);

// ---- spectroscopy ----------------------------------------------------------

struct SpectroscopyConfig {
  double lambda_p = 532e-9, lambda_s = 810e-9, lambda_i = 0.0;  // meters; lambda_i 0 = from energy conservation
  double n_p = 1.0, n_s = 1.0, n_i = 1.0;
  double length = 1e-3;         // crystal length L
  double medium_length = 1e-3;  // L_m
  double theta_s = 0.0;         // emission angle
  double alpha_m = 0.0;         // idler absorption coefficient in the medium, 1/m

  /// Idler wavelength, taken from energy conservation when not set.
  double idler_wavelength() const;
  /// |tau| = exp(-alpha_m L_m).
  double medium_transmissivity() const;
  /// Positive wavelengths, 1/lp = 1/ls + 1/li within 1e-9 relative.
  void validate() const;
};

/// sin(x)/x with the value 1 at 0.
double sinc(double x);

/// 1/2 sinc^2(d/2) [1 + |tau| cos(d + d_m + extra_phase)] with
/// d = L (k_p - k_i - k_s)/cos(theta) and d_m the same with L_m. The signal
/// wavelength and angle override the config's; the idler follows from energy
/// conservation. Throws ValidationError when cos(theta) vanishes.
double spectral_intensity(const SpectroscopyConfig& cfg, double lambda_s, double theta_s, double extra_phase = 0.0);

/// Intensity map, rows over `lambdas`, columns over `thetas`.
Eigen::MatrixXd spectrogram(const SpectroscopyConfig& cfg, const std::vector<double>& lambdas,
                            const std::vector<double>& thetas);

/// Fitted visibility of the intensity at the config's (lambda_s, theta_s)
/// as an extra phase is swept over `points` values.
double spectral_fringe_visibility(const SpectroscopyConfig& cfg, int points = 16);

// ---- imaging helpers -------------------------------------------------------

/// lambda_S^2 / lambda_I.
double equivalent_wavelength(double lambda_s, double lambda_i);

/// Radius of the n-th extremum, sqrt(2 f^2 (n lambda - phi0) / d); nullopt
/// when n lambda < phi0. Throws ValidationError for d <= 0.
std::optional<double> fringe_radius(int n, double d, double focal_length, double phi0, double lambda);

/// f0 lambda_S / (f_I lambda_I).
double magnification(double f0, double f_i, double lambda_s, double lambda_i);

// ---- cavity ----------------------------------------------------------------

struct CavityResult {
  std::vector<Complex> amplitudes;  // t2 (r1 r2)^k, k = 0..rounds-1
  double total = 0.0;               // truncated sum of |amplitude|^2
  std::optional<double> closed_form;  // |t2|^2 / (1 - |r1 r2|^2)
  bool divergent = false;           // |r1 r2| = 1 with t2 = 0
};

CavityResult cavity_transmission(Complex r1, Complex r2, Complex t2, int max_rounds);

}  // namespace pathid
