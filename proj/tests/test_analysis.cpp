#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "pathid/analysis.hpp"
#include "pathid/errors.hpp"

using namespace pathid;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix4cd projector(const Eigen::Vector4cd& v) { return v * v.adjoint() / v.squaredNorm(); }

Eigen::Vector4cd bell(int which) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (which) {
    case 0: v << s, 0, 0, s; break;   // Phi+
    case 1: v << s, 0, 0, -s; break;  // Phi-
    case 2: v << 0, s, s, 0; break;   // Psi+
    default: v << 0, s, -s, 0; break; // Psi-
  }
  return v;
}

}  // namespace

TEST(Fringe, FitRecoversParameters) {
  const auto grid = periodic_grid(12);
  std::vector<double> rates;
  for (double p : grid) rates.push_back(2.0 + 0.8 * std::cos(p - 0.6));
  const auto fit = fit_fringe(grid, rates);
  EXPECT_NEAR(fit.offset, 2.0, 1e-12);
  EXPECT_NEAR(fit.amplitude, 0.8, 1e-12);
  EXPECT_NEAR(fit.phase, 0.6, 1e-12);
  EXPECT_NEAR(fit.visibility, 0.4, 1e-12);
  EXPECT_NEAR(fit.residual, 0.0, 1e-12);
  std::vector<double> aligned;  // extremes on grid points
  for (double p : grid) aligned.push_back(2.0 + 0.8 * std::cos(p));
  EXPECT_NEAR(fringe_visibility(aligned), 0.4, 1e-12);
  EXPECT_NEAR(visibility({grid, aligned}), 0.4, 1e-12);
  EXPECT_NEAR(fitted_visibility({grid, rates}).visibility, 0.4, 1e-12);
  EXPECT_THROW(fit_fringe({0.0, 1.0}, {1.0, 2.0}), ValidationError);
  EXPECT_THROW(fit_fringe({0.0, 1.0, 2.0}, {1.0, 2.0}), ValidationError);
  EXPECT_EQ(fringe_visibility({0.0, 0.0}), 0.0);
  EXPECT_EQ(fit_fringe(grid, std::vector<double>(grid.size(), 0.0)).visibility, 0.0);
}

TEST(Polarization, ClosedFormAndCoherency) {
  EXPECT_NEAR(degree_of_polarization(1.0, 0.7), 1.0, 1e-15);
  EXPECT_NEAR(degree_of_polarization(0.0, 0.7), std::cos(0.7), 1e-15);
  EXPECT_NEAR(degree_of_polarization(0.5, kPi / 2), 0.5, 1e-15);

  Eigen::Vector2cd v(Complex(0.6, 0.1), Complex(0.3, -0.7));
  EXPECT_NEAR(degree_of_polarization(Eigen::Matrix2cd(v * v.adjoint())), 1.0, 1e-7);
  EXPECT_NEAR(degree_of_polarization(Eigen::Matrix2cd(Eigen::Matrix2cd::Identity())), 0.0, 1e-15);
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  EXPECT_NEAR(degree_of_polarization(d), 0.5, 1e-15);
  EXPECT_THROW(degree_of_polarization(Eigen::Matrix2cd(Eigen::Matrix2cd::Zero())), NumericalError);
}

TEST(Polarization, EngineMatchesClosedForm) {
  const auto doc = testing_support::load_setup("dop");
  const auto setup = doc.build();
  for (double t : {0.0, 0.4, 0.9}) {
    for (double g : {0.0, 0.5, 1.4, 2.5}) {
      auto b = doc.bindings();
      b["T"] = t;
      b["gamma"] = g;
      const double p = degree_of_polarization(polarization_coherency(simulate(setup, b), "Sd"));
      EXPECT_NEAR(p, std::abs(degree_of_polarization(t, g)), 1e-9) << t << " " << g;
    }
  }
}

TEST(Concurrence, BellAndProduct) {
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(concurrence(projector(bell(k))), 1.0, 1e-12);
  Eigen::Vector4cd product;
  product << 0.6, 0.0, 0.8, 0.0;
  EXPECT_NEAR(concurrence(projector(product)), 0.0, 1e-12);
  Eigen::Vector4cd separable;
  separable << 0.3, 0.4, Complex(0.0, 0.45), Complex(0.0, 0.6);  // (0.3|0> + 0.45i|1>)(|0> + 4/3|1>)
  EXPECT_NEAR(concurrence(projector(separable)), 0.0, 1e-12);
  EXPECT_NEAR(pure_state_concurrence(separable), 0.0, 1e-15);
}

TEST(Concurrence, WernerStates) {
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    const Eigen::Matrix4cd rho = p * projector(bell(3)) + (1.0 - p) * Eigen::Matrix4cd::Identity() / 4.0;
    EXPECT_NEAR(concurrence(rho), std::max(0.0, (3.0 * p - 1.0) / 2.0), 1e-12) << p;
  }
}

TEST(Concurrence, BellMixtures) {
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Eigen::Matrix4cd rho = a * projector(bell(2)) + (1.0 - a) * projector(bell(1));
    EXPECT_NEAR(concurrence(rho), std::abs(2.0 * a - 1.0), 1e-12) << a;
  }
}

TEST(Concurrence, PureStatesTwoWays) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector4cd v;
    for (int j = 0; j < 4; ++j) v(j) = Complex(g(rng), g(rng));
    EXPECT_NEAR(concurrence(projector(v)), pure_state_concurrence(v), 1e-9);
  }
  Eigen::Matrix4cd bad = Eigen::Matrix4cd::Zero();
  bad(0, 1) = 1.0;
  EXPECT_THROW(concurrence(bad), ValidationError);
  EXPECT_THROW(pure_state_concurrence(Eigen::Vector4cd::Zero()), ValidationError);
}

TEST(Momentum, PointMassAndGaussianTrend) {
  const auto grid = linspace(-2.0, 2.0, 41);
  auto phase = [](double q) { return 2.0 * q; };
  for (const auto& c : momentum_visibility(anticorrelated_distribution(grid), phase)) {
    EXPECT_NEAR(c.visibility, 1.0, 1e-12);
    EXPECT_NEAR(c.variance, 0.0, 1e-12);
  }
  double last_v = 2.0, last_var = -1.0;
  for (double sd : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    const auto cells = momentum_visibility(gaussian_joint_distribution(grid, 1.0, sd), phase);
    const auto& c = cells[cells.size() / 2];
    EXPECT_LT(c.visibility, last_v);
    EXPECT_GT(c.variance, last_var);
    last_v = c.visibility;
    last_var = c.variance;
  }
  JointMomentumDistribution bad{grid, grid, Eigen::MatrixXcd::Zero(41, 41)};
  EXPECT_THROW(momentum_visibility(bad, phase), ValidationError);
  EXPECT_THROW(gaussian_joint_distribution(grid, 0.0, 1.0), ValidationError);
}

TEST(Spectroscopy, EnergyConservationAndVisibility) {
  SpectroscopyConfig cfg;
  const double li = cfg.idler_wavelength();
  EXPECT_NEAR((1.0 / cfg.lambda_s + 1.0 / li) * cfg.lambda_p, 1.0, 1e-9);
  cfg.alpha_m = std::log(2.0) / cfg.medium_length;
  EXPECT_NEAR(cfg.medium_transmissivity(), 0.5, 1e-15);
  EXPECT_NEAR(spectral_fringe_visibility(cfg), 0.5, 1e-9);
  cfg.alpha_m = 0.0;
  EXPECT_NEAR(spectral_fringe_visibility(cfg), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(kPi), 0.0, 1e-16);

  const std::vector<double> lambdas{805e-9, 810e-9, 815e-9};
  const std::vector<double> thetas{0.0, 0.01};
  const auto m = spectrogram(cfg, lambdas, thetas);
  ASSERT_EQ(m.rows(), 3);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_DOUBLE_EQ(m(1, 0), spectral_intensity(cfg, 810e-9, 0.0));
  for (Eigen::Index i = 0; i < m.size(); ++i) EXPECT_GE(m.data()[i], 0.0);
  cfg.alpha_m = -1.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Imaging, EquivalentWavelengthAndHelpers) {
  const double eq = equivalent_wavelength(810.0, 1550.0);
  EXPECT_NEAR(eq, 810.0 * 810.0 / 1550.0, 1e-12);
  EXPECT_NEAR(eq, 423.3, 0.05);
  EXPECT_THROW(equivalent_wavelength(0.0, 1.0), ValidationError);
  EXPECT_FALSE(fringe_radius(0, 1e-3, 0.1, 1e-6, 800e-9).has_value());
  EXPECT_NEAR(*fringe_radius(2, 1e-3, 0.1, 0.0, 800e-9), std::sqrt(2 * 0.01 * 1.6e-6 / 1e-3), 1e-15);
  EXPECT_NEAR(magnification(0.2, 0.1, 810e-9, 1550e-9), 2.0 * 810.0 / 1550.0, 1e-12);
}

TEST(Cavity, GeometricSeries) {
  const auto r = cavity_transmission(0.9, std::sqrt(0.5), std::sqrt(0.5), 2000);
  ASSERT_TRUE(r.closed_form.has_value());
  EXPECT_NEAR(r.total, *r.closed_form, 1e-12);
  EXPECT_NEAR(*r.closed_form, 0.5 / (1.0 - 0.81 * 0.5), 1e-15);
  EXPECT_EQ(r.amplitudes.size(), 2000u);
  EXPECT_NEAR(std::abs(r.amplitudes[1]), std::sqrt(0.5) * 0.9 * std::sqrt(0.5), 1e-15);
  const auto lossless = cavity_transmission(1.0, 1.0, 0.0, 10);
  EXPECT_TRUE(lossless.divergent);
  EXPECT_THROW(cavity_transmission(1.0, 0.9, 0.9, 10), ValidationError);
  EXPECT_THROW(cavity_transmission(0.5, 0.5, 0.5, 0), ValidationError);
}
