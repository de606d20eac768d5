#pragma once

#include <vector>

namespace pathid {

/// Least-squares fit of rate(phi) = A + B cos(phi) + C sin(phi).
struct FringeFit {
  double offset = 0.0;     // A
  double amplitude = 0.0;  // sqrt(B^2 + C^2)
  double phase = 0.0;      // phi0 with rate = A + amplitude * cos(phi - phi0)
  double visibility = 0.0; // amplitude / A
  double residual = 0.0;   // root-mean-square deviation of the fit
};

/// Throws ValidationError with fewer than three points or mismatched lengths.
/// A vanishing offset gives visibility 0.
FringeFit fit_fringe(const std::vector<double>& phases, const std::vector<double>& rates);

/// (max - min) / (max + min); 0 when both vanish.
double fringe_visibility(const std::vector<double>& rates);

/// n equally spaced phases on [0, 2 pi).
std::vector<double> periodic_grid(int n);

}  // namespace pathid
