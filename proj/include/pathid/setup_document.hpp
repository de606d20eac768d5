#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathid/engine.hpp"

namespace pathid {

/// One term of a target state: amplitude times one photon per listed mode.
struct TargetTerm {
  double amplitude = 1.0;
  std::vector<ModeLabel> modes;

  friend bool operator==(const TargetTerm&, const TargetTerm&) = default;
};

/// Plain-text experiment description.
///
///   # comment
///   order 2
///   detectors a b c d
///   pattern {a|b}=1,c=1                 (default: one photon per detector)
///   param phi = pi/2
///   annihilation off
///   crystal a b weight=0.5 phase=phi modes=H,V
///   crystal b1 b2 b3 weight=1           (three-photon emitter)
///   identify b d
///   bs p q -> r s phase=phiS
///   pbs p q -> r s
///   phase p phi=theta
///   shift p oam=+1 | shift p rotate=gamma | shift p set=H
///   attenuator p T=0.5 Tphase=0 tag=~loss7
///   target 1 a:H b:H
///
/// Expressions may not contain spaces except after `param name =`.
struct SetupDocument {
  std::optional<int> truncation;
  std::vector<std::string> detectors;
  std::string pattern;  // canonical DetectionPattern text, empty for the default
  std::vector<std::pair<std::string, double>> params;
  bool annihilation = true;
  std::vector<Element> elements;
  std::vector<TargetTerm> target;

  /// Throws ParseError carrying the 1-based line number.
  static SetupDocument parse(const std::string& text);
  static SetupDocument load(const std::string& path);
  /// Canonical text; parse(serialize()) == *this.
  std::string serialize() const;

  Bindings bindings() const;
  ExperimentSetup build() const;
  /// The declared pattern, else a coincidence over the detectors; nullopt
  /// when neither exists.
  std::optional<DetectionPattern> detection_pattern() const;
  /// Target as an unnormalized state at the given truncation (degree 0);
  /// nullopt when no target lines were given.
  std::optional<PureState> target_state(int truncation) const;

  /// 16 hex digits of a 64-bit FNV-1a hash of the canonical text.
  std::string hash() const;

  friend bool operator==(const SetupDocument&, const SetupDocument&) = default;
};

/// "path" or "path:mode" with the mode syntax of parse_internal_mode.
ModeLabel parse_mode_label(const std::string& token);

}  // namespace pathid
