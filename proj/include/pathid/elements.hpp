#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pathid/expr.hpp"
#include "pathid/polynomial.hpp"

namespace pathid {

/// Photon source. With two paths this is an SPDC crystal emitting a pair;
/// with more paths it is an n-photon emitter. The complex weight is
/// weight * exp(i*phase), the pump phase living in `phase`.
struct Crystal {
  std::vector<std::string> paths;
  std::vector<InternalMode> modes;  // one per path; empty means default labels
  Expr weight = 1.0;
  Expr phase = 0.0;

  friend bool operator==(const Crystal&, const Crystal&) = default;
};

/// 50:50 beam splitter. in1 -> (out1 + i out2)/sqrt2,
/// in2 -> exp(i phase) (out2 + i out1)/sqrt2.
struct BeamSplitter {
  std::string in1, in2, out1, out2;
  Expr phase = 0.0;

  friend bool operator==(const BeamSplitter&, const BeamSplitter&) = default;
};

/// Transmits H and reflects V. H on in1 -> out1, V on in1 -> out2,
/// H on in2 -> out2, V on in2 -> out1.
struct PolarizingBeamSplitter {
  std::string in1, in2, out1, out2;

  friend bool operator==(const PolarizingBeamSplitter&, const PolarizingBeamSplitter&) = default;
};

/// Phase per photon on a path: a^dagger -> exp(i phase) a^dagger.
struct PhaseShifter {
  std::string path;
  Expr phase = 0.0;

  friend bool operator==(const PhaseShifter&, const PhaseShifter&) = default;
};

struct ModeShifter {
  enum class Action { OamAdd, PolRotate, PolSet };
  std::string path;
  Action action = Action::OamAdd;
  int oam_delta = 0;                     // OamAdd
  Expr angle = 0.0;                      // PolRotate
  Polarization::Kind set_to = Polarization::Kind::H;  // PolSet

  friend bool operator==(const ModeShifter&, const ModeShifter&) = default;
};

/// Partially transmitting object: a^dagger -> T a^dagger + R l^dagger with
/// T = transmission * exp(i transmission_phase), R = sqrt(1 - |T|^2) and l a
/// loss mode identified by `loss_tag`.
struct Attenuator {
  std::string path;
  Expr transmission = 1.0;
  Expr transmission_phase = 0.0;
  std::string loss_tag = kLossPrefix;

  friend bool operator==(const Attenuator&, const Attenuator&) = default;
};

/// Path identity: every photon on `from` is relabeled onto `to`.
struct PathIdentify {
  std::string from, to;

  friend bool operator==(const PathIdentify&, const PathIdentify&) = default;
};

using Element = std::variant<Crystal, BeamSplitter, PolarizingBeamSplitter, PhaseShifter, ModeShifter, Attenuator,
                             PathIdentify>;

struct ElementOptions {
  /// Include the -w a b annihilation part of the source operator. Disabling it
  /// reproduces the pure ket-relabeling picture.
  bool annihilation = true;
};

PureState apply_beam_splitter(const PureState& state, const BeamSplitter& bs, const Bindings& bindings = {});
PureState apply_pbs(const PureState& state, const PolarizingBeamSplitter& pbs);
PureState apply_phase(const PureState& state, const PhaseShifter& ps, const Bindings& bindings = {});
PureState apply_mode_shifter(const PureState& state, const ModeShifter& ms, const Bindings& bindings = {});
PureState apply_attenuator(const PureState& state, const Attenuator& at, const Bindings& bindings = {});
PureState apply_identify(const PureState& state, const PathIdentify& pi);
/// Multiplies by the truncated series sum_m (w X)^m / m! with
/// X = prod a_j^dagger - prod a_j; truncation is the state's.
PureState apply_crystal(const PureState& state, const Crystal& c, const Bindings& bindings = {},
                        const ElementOptions& options = {});

PureState apply(const PureState& state, const Element& e, const Bindings& bindings = {},
                const ElementOptions& options = {});

/// Complex weight of a source under the given bindings.
Complex crystal_weight(const Crystal& c, const Bindings& bindings);
/// Emission mode of the j-th photon of a source.
ModeLabel emission_mode(const Crystal& c, std::size_t j);

/// Paths an element reads from / writes to.
std::vector<std::string> input_paths(const Element& e);
std::vector<std::string> output_paths(const Element& e);
/// Parameters referenced by an element.
std::set<std::string> parameters(const Element& e);

/// Short keyword for diagnostics ("crystal", "bs", ...).
std::string keyword(const Element& e);

}  // namespace pathid
