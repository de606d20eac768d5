#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "pathid/fock.hpp"
#include "pathid/setup_document.hpp"

namespace testing_support {

inline const std::vector<std::string>& bundled_setups() {
  static const std::vector<std::string> names{"zwm",   "frustrated", "hardy-pol",  "dop",       "menzel3",
                                              "ghz2d", "ghz3d",      "fourphoton", "nm-scheme", "random-net"};
  return names;
}

inline std::string setup_path(const std::string& name) {
  return std::string(PATHID_SETUP_DIR) + "/" + name + ".setup";
}

inline pathid::SetupDocument load_setup(const std::string& name) {
  return pathid::SetupDocument::load(setup_path(name));
}

inline double max_abs_diff(const pathid::FockAmplitudes& a, const pathid::FockAmplitudes& b) {
  double worst = 0.0;
  for (const auto& [s, v] : a) {
    auto it = b.find(s);
    worst = std::max(worst, std::abs(v - (it == b.end() ? pathid::Complex{} : it->second)));
  }
  for (const auto& [s, v] : b)
    if (!a.count(s)) worst = std::max(worst, std::abs(v));
  return worst;
}

inline pathid::FockState ket(const std::vector<pathid::ModeLabel>& modes) {
  pathid::FockState s;
  for (const auto& m : modes) s.add(m);
  return s;
}

}  // namespace testing_support
