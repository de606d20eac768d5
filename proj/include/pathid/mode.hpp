#pragma once

#include <compare>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace pathid {

/// Polarization label of a photon. `None` is used for photons whose
/// polarization is irrelevant (e.g. OAM-only experiments); `Angle` denotes a
/// linear polarization at `angle` radians from H that has not been resolved
/// into the H/V basis.
struct Polarization {
  enum class Kind { None, H, V, Angle };

  Kind kind = Kind::None;
  double angle = 0.0;

  static Polarization none() { return {}; }
  static Polarization horizontal() { return {Kind::H, 0.0}; }
  static Polarization vertical() { return {Kind::V, 0.0}; }
  static Polarization at(double radians) { return {Kind::Angle, radians}; }

  bool is_hv() const { return kind == Kind::H || kind == Kind::V; }

  friend bool operator==(const Polarization& a, const Polarization& b) {
    return a.kind == b.kind && (a.kind != Kind::Angle || a.angle == b.angle);
  }
  friend bool operator<(const Polarization& a, const Polarization& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.kind == Kind::Angle && a.angle < b.angle;
  }
};

/// Internal degrees of freedom of a photon: polarization, OAM index and an
/// optional opaque tag (used for loss modes and explicit distinguishability).
struct InternalMode {
  Polarization pol;
  int oam = 0;
  std::string tag;

  friend bool operator==(const InternalMode&, const InternalMode&) = default;
  friend bool operator<(const InternalMode& a, const InternalMode& b) {
    if (!(a.pol == b.pol)) return a.pol < b.pol;
    if (a.oam != b.oam) return a.oam < b.oam;
    return a.tag < b.tag;
  }
};

/// One bosonic mode: a path plus internal labels. Ordered lexicographically on
/// (path, polarization, oam, tag); this ordering is the canonical monomial order.
struct ModeLabel {
  std::string path;
  InternalMode internal;

  ModeLabel() = default;
  ModeLabel(std::string p, InternalMode m = {}) : path(std::move(p)), internal(std::move(m)) {}

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
  friend bool operator<(const ModeLabel& a, const ModeLabel& b) {
    if (a.path != b.path) return a.path < b.path;
    return a.internal < b.internal;
  }
};

/// Prefix reserved for loss-mode paths and tags. Detector paths may not use it.
inline constexpr const char* kLossPrefix = "~loss";

inline bool is_loss_path(const std::string& path) {
  return path.rfind(kLossPrefix, 0) == 0;
}

/// Occupation numbers over modes. Canonical: zero occupations never stored.
class FockState {
 public:
  using Map = std::map<ModeLabel, int>;

  FockState() = default;
  explicit FockState(Map occupations);

  /// Adds `n` photons (n may be negative as long as the result stays >= 0).
  void add(const ModeLabel& mode, int n = 1);

  int occupation(const ModeLabel& mode) const;
  /// Photons on `path` summed over all internal modes.
  int path_occupation(const std::string& path) const;
  int total() const;
  bool empty() const { return occ_.empty(); }

  const Map& occupations() const { return occ_; }

  /// Keeps only modes whose path satisfies the predicate.
  template <class Pred>
  FockState restricted(Pred keep) const {
    FockState out;
    for (const auto& [m, n] : occ_)
      if (keep(m.path)) out.occ_.emplace(m, n);
    return out;
  }

  friend bool operator==(const FockState&, const FockState&) = default;
  friend bool operator<(const FockState& a, const FockState& b) { return a.occ_ < b.occ_; }

 private:
  Map occ_;
};

std::string to_string(const Polarization& p);
std::string to_string(const InternalMode& m);
std::string to_string(const ModeLabel& m);
/// Inverse of to_string(InternalMode): tokens "H", "V", "P<angle>", "l<int>",
/// "t:<tag>" joined by '/', or "-" for the default mode. Throws
/// std::invalid_argument on malformed input.
InternalMode parse_internal_mode(const std::string& text);
/// Ket notation, e.g. `|a:H, b:H>`; occupations above one are written `2*a:H`.
std::string to_string(const FockState& s);

std::ostream& operator<<(std::ostream& os, const ModeLabel& m);
std::ostream& operator<<(std::ostream& os, const FockState& s);

}  // namespace pathid
