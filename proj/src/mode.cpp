#include "pathid/mode.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pathid {

FockState::FockState(Map occupations) {
  for (auto& [m, n] : occupations) {
    if (n < 0) throw std::invalid_argument("negative occupation");
    if (n > 0) occ_.emplace(m, n);
  }
}

void FockState::add(const ModeLabel& mode, int n) {
  auto it = occ_.find(mode);
  int current = it == occ_.end() ? 0 : it->second;
  int next = current + n;
  if (next < 0) throw std::invalid_argument("negative occupation");
  if (next == 0) {
    if (it != occ_.end()) occ_.erase(it);
  } else if (it == occ_.end()) {
    occ_.emplace(mode, next);
  } else {
    it->second = next;
  }
}

int FockState::occupation(const ModeLabel& mode) const {
  auto it = occ_.find(mode);
  return it == occ_.end() ? 0 : it->second;
}

int FockState::path_occupation(const std::string& path) const {
  int n = 0;
  for (const auto& [m, count] : occ_)
    if (m.path == path) n += count;
  return n;
}

int FockState::total() const {
  return std::accumulate(occ_.begin(), occ_.end(), 0, [](int acc, const auto& kv) { return acc + kv.second; });
}

std::string to_string(const Polarization& p) {
  switch (p.kind) {
    case Polarization::Kind::None: return "";
    case Polarization::Kind::H: return "H";
    case Polarization::Kind::V: return "V";
    case Polarization::Kind::Angle: {
      std::ostringstream os;
      os.precision(17);
      os << "P" << p.angle;
      return os.str();
    }
  }
  return "";
}

std::string to_string(const InternalMode& m) {
  std::string out = to_string(m.pol);
  auto append = [&](const std::string& part) {
    if (!out.empty()) out += "/";
    out += part;
  };
  if (m.oam != 0) append("l" + std::to_string(m.oam));
  if (!m.tag.empty()) append("t:" + m.tag);
  return out.empty() ? "-" : out;
}

InternalMode parse_internal_mode(const std::string& text) {
  InternalMode m;
  if (text == "-" || text.empty()) return m;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('/', start);
    if (end == std::string::npos) end = text.size();
    std::string tok = text.substr(start, end - start);
    start = end + 1;
    if (tok == "H") {
      m.pol = Polarization::horizontal();
    } else if (tok == "V") {
      m.pol = Polarization::vertical();
    } else if (tok.size() > 1 && tok[0] == 'P') {
      std::size_t used = 0;
      double a = std::stod(tok.substr(1), &used);
      if (used != tok.size() - 1) throw std::invalid_argument("bad polarization angle '" + tok + "'");
      m.pol = Polarization::at(a);
    } else if (tok.size() > 1 && tok[0] == 'l') {
      std::size_t used = 0;
      m.oam = std::stoi(tok.substr(1), &used);
      if (used != tok.size() - 1) throw std::invalid_argument("bad OAM token '" + tok + "'");
    } else if (tok.rfind("t:", 0) == 0 && tok.size() > 2) {
      m.tag = tok.substr(2);
    } else {
      throw std::invalid_argument("bad mode token '" + tok + "'");
    }
    if (end == text.size()) break;
  }
  return m;
}

std::string to_string(const ModeLabel& m) {
  std::string internal = to_string(m.internal);
  return internal == "-" ? m.path : m.path + ":" + internal;
}

std::string to_string(const FockState& s) {
  std::string out = "|";
  bool first = true;
  for (const auto& [m, n] : s.occupations()) {
    if (!first) out += ", ";
    first = false;
    if (n > 1) out += std::to_string(n) + "*";
    out += to_string(m);
  }
  return out + ">";
}

std::ostream& operator<<(std::ostream& os, const ModeLabel& m) { return os << to_string(m); }
std::ostream& operator<<(std::ostream& os, const FockState& s) { return os << to_string(s); }

}  // namespace pathid
