#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pathid/elements.hpp"
#include "pathid/fock.hpp"

namespace pathid {

/// An ordered list of elements applied to the vacuum, the declared detector
/// paths, the perturbative truncation and default parameter bindings.
///
/// Construction validates the sequence and normalizes it:
///  - detector paths may not be loss paths;
///  - a path consumed by a (polarizing) beam splitter can no longer take part
///    in a path identification;
///  - polarization-set shifters are folded into the emission labels of the
///    sources that follow them on the same path;
///  - every attenuator gets its own loss mode.
class ExperimentSetup {
 public:
  ExperimentSetup() = default;
  ExperimentSetup(std::vector<Element> elements, std::vector<std::string> detectors,
                  std::optional<int> truncation = std::nullopt, Bindings defaults = {},
                  ElementOptions options = {});

  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<std::string>& detectors() const { return detectors_; }
  /// Explicit truncation, or detectors/2 + 1.
  int truncation() const { return truncation_; }
  const Bindings& defaults() const { return defaults_; }
  const ElementOptions& options() const { return options_; }

  /// Parameters referenced by any element.
  std::set<std::string> parameters() const;

  ExperimentSetup with_truncation(int k) const;
  /// Overrides/extends the default bindings.
  ExperimentSetup with_bindings(const Bindings& extra) const;
  /// The first `count` elements only (detectors and bindings kept).
  ExperimentSetup prefix(std::size_t count) const;

 private:
  std::vector<Element> elements_;
  std::vector<std::string> detectors_;
  int truncation_ = 1;
  Bindings defaults_;
  ElementOptions options_;
};

/// Occupation requirement on a group of paths: the photons found on `paths`
/// (summed) must number exactly `count`. With a mode, only photons in that
/// internal mode are counted.
struct Requirement {
  std::vector<std::string> paths;
  int count = 1;
  std::optional<InternalMode> mode;
};

/// Detection event used for post-selection. Paths not mentioned are
/// unconstrained (traced over).
class DetectionPattern {
 public:
  DetectionPattern() = default;
  explicit DetectionPattern(std::vector<Requirement> requirements, bool mode_resolved = false);

  /// Exactly one photon in each listed path, internal modes ignored.
  static DetectionPattern coincidence(const std::vector<std::string>& paths);
  /// Comma-separated requirements `group[@mode][=count]` where a group is a
  /// path or `{p|q|...}`; count defaults to 1. Any `@mode` makes the pattern
  /// mode-resolved. Inverse of str().
  static DetectionPattern parse(const std::string& text);

  const std::vector<Requirement>& requirements() const { return requirements_; }
  bool mode_resolved() const { return mode_resolved_; }
  bool matches(const FockState& s) const;
  /// Canonical text, e.g. "a=1,b=1" or "{d1|d1p}=1".
  std::string str() const;

 private:
  std::vector<Requirement> requirements_;
  bool mode_resolved_ = false;
};

struct PostselectResult {
  PureState state;        // renormalized projection (unnormalized if zero)
  PureState projected;    // leading-order projection before renormalization
  double probability = 0.0;
  int order = -1;         // formal degree used; -1 when the pattern is unreachable
  bool zero = true;
};

struct RateResult {
  double rate = 0.0;
  int order = -1;  // rates scale as |g|^(2*order)
};

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<double> rates;
  int order = -1;
  std::string pattern;
  int truncation = 0;
};

/// Applies the elements in order to the vacuum. `bindings` override the
/// setup's defaults.
PureState simulate(const ExperimentSetup& setup, const Bindings& bindings = {});

/// Smallest formal degree at which some term (counting terms whose
/// coefficients cancelled) satisfies the pattern; nullopt if none.
std::optional<int> leading_order(const PureState& state, const DetectionPattern& pattern);

/// Squared norm of the pattern-satisfying Fock components at one degree.
double probability_at_order(const PureState& state, const DetectionPattern& pattern, int order);

PostselectResult postselect(const PureState& state, const DetectionPattern& pattern);

/// Unnormalized detection rate at the pattern's leading order.
RateResult count_rate(const ExperimentSetup& setup, const DetectionPattern& pattern, const Bindings& bindings = {});

/// count_rate over a grid of one parameter. All points use one common order;
/// when every point vanishes there, the next order is reported instead.
/// Points are evaluated concurrently; results do not depend on scheduling.
SweepResult sweep(const ExperimentSetup& setup, const std::string& parameter, const std::vector<double>& grid,
                  const DetectionPattern& pattern, const Bindings& bindings = {});

/// `steps` evenly spaced values from start to stop inclusive.
std::vector<double> linspace(double start, double stop, int steps);

/// Which-way information and path coherence for a single photon that may be
/// on `path_a` or `path_b`. Computed from the leading-order components with
/// exactly one photon on the two paths; everything else (other paths, the
/// photon's internal labels) acts as the marker system.
struct WhichWay {
  double distinguishability = 0.0;  // K = || p_a rho_a - p_b rho_b ||_1
  double visibility = 0.0;          // 2 |rho_ab| / (rho_aa + rho_bb)
  double p_a = 0.0;
  double p_b = 0.0;
};
WhichWay which_way(const PureState& state, const std::string& path_a, const std::string& path_b);

/// Three-source complementarity arrangement: sources (s1,i1), (s2,i2), (s3,i3)
/// with s1 identified onto s3 and i1 onto i2. The signals s2, s3 meet at a
/// beam splitter with output A; the idlers i2, i3 meet at a second beam
/// splitter with output D.
struct ThreeCrystalConfig {
  double g1 = 1.0, g2 = 1.0, g3 = 1.0;
  double idler_phase = 0.0;      // phase on i1 between the first and second source
  double idler_bs_phase = 0.0;   // extra phase of the idler beam splitter
  int grid_points = 16;
};

struct ThreeCrystalResult {
  double singles_visibility = 0.0;    // fitted fringe at A
  double heralded_visibility = 0.0;   // fitted fringe of A-D coincidences
  double distinguishability = 0.0;    // K of the signal photon before its beam splitter
  double coherence_visibility = 0.0;  // V from the reduced signal state
};

/// Builds the arrangement with the signal phase as parameter `phi_s`.
ExperimentSetup three_crystal_setup(const ThreeCrystalConfig& cfg, bool with_beam_splitters = true);
ThreeCrystalResult three_crystal_visibility(const ThreeCrystalConfig& cfg);

/// Idler beam-splitter phase at which the heralded fringe of the equal-weight
/// arrangement has unit visibility.
double balanced_idler_bs_phase();

}  // namespace pathid
