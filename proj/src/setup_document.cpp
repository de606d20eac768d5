#include "pathid/setup_document.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "pathid/errors.hpp"

namespace pathid {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool valid_path(const std::string& p) {
  if (p.empty() || p == "->") return false;
  for (char c : p)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '=' || c == ',' || c == ':' || c == '{' || c == '}' ||
        c == '|' || c == '@')
      return false;
  return true;
}

class LineParser {
 public:
  LineParser(int line, std::vector<std::string> tokens) : line_(line), tokens_(std::move(tokens)) {}

  [[noreturn]] void fail(const std::string& why) const { throw ParseError(line_, why); }

  const std::string& keyword() const { return tokens_.front(); }

  /// Positional tokens before the first key=value, split around "->".
  void split_positional(std::vector<std::string>& before, std::vector<std::string>& after) {
    bool arrow = false;
    std::size_t i = 1;
    for (; i < tokens_.size() && tokens_[i].find('=') == std::string::npos; ++i) {
      if (tokens_[i] == "->") {
        if (arrow) fail("repeated '->'");
        arrow = true;
        continue;
      }
      if (!valid_path(tokens_[i])) fail("bad path name '" + tokens_[i] + "'");
      (arrow ? after : before).push_back(tokens_[i]);
    }
    for (; i < tokens_.size(); ++i) {
      auto eq = tokens_[i].find('=');
      if (eq == std::string::npos || eq == 0) fail("expected key=value, got '" + tokens_[i] + "'");
      std::string key = tokens_[i].substr(0, eq);
      if (!kv_.emplace(key, tokens_[i].substr(eq + 1)).second) fail("duplicate argument '" + key + "'");
    }
    arrow_ = arrow;
  }

  bool arrow() const { return arrow_; }

  std::optional<std::string> take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }

  Expr expr(const std::string& key, Expr fallback) {
    auto v = take(key);
    if (!v) return fallback;
    try {
      return Expr::parse(*v);
    } catch (const ValidationError& e) {
      fail(e.what());
    }
  }

  void finish() const {
    if (!kv_.empty()) fail("unknown argument '" + kv_.begin()->first + "' for '" + keyword() + "'");
  }

 private:
  int line_;
  std::vector<std::string> tokens_;
  std::map<std::string, std::string> kv_;
  bool arrow_ = false;
};

InternalMode mode_or_fail(LineParser& lp, const std::string& token) {
  try {
    return parse_internal_mode(token);
  } catch (const std::exception& e) {
    lp.fail(e.what());
  }
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

ModeLabel parse_mode_label(const std::string& token) {
  auto colon = token.find(':');
  std::string path = token.substr(0, colon);
  if (!valid_path(path)) throw std::invalid_argument("bad path name '" + path + "'");
  if (colon == std::string::npos) return ModeLabel(path);
  return ModeLabel(path, parse_internal_mode(token.substr(colon + 1)));
}

SetupDocument SetupDocument::parse(const std::string& text) {
  SetupDocument doc;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool have_detectors = false;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto tokens = split_ws(raw);
    if (tokens.empty()) continue;
    LineParser lp(line, tokens);
    const std::string& kw = tokens.front();

    if (kw == "order") {
      if (tokens.size() != 2) lp.fail("usage: order <k>");
      if (doc.truncation) lp.fail("repeated 'order'");
      try {
        std::size_t used = 0;
        int k = std::stoi(tokens[1], &used);
        if (used != tokens[1].size() || k < 0) throw std::invalid_argument("");
        doc.truncation = k;
      } catch (const std::exception&) {
        lp.fail("order must be a non-negative integer");
      }
    } else if (kw == "detectors") {
      if (have_detectors) lp.fail("repeated 'detectors'");
      have_detectors = true;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (!valid_path(tokens[i])) lp.fail("bad detector name '" + tokens[i] + "'");
        if (is_loss_path(tokens[i])) lp.fail("detector '" + tokens[i] + "' uses the reserved loss prefix");
        doc.detectors.push_back(tokens[i]);
      }
    } else if (kw == "pattern") {
      if (tokens.size() != 2) lp.fail("usage: pattern <requirements> (no spaces)");
      if (!doc.pattern.empty()) lp.fail("repeated 'pattern'");
      try {
        doc.pattern = DetectionPattern::parse(tokens[1]).str();
      } catch (const ValidationError& e) {
        lp.fail(e.what());
      }
    } else if (kw == "param") {
      std::string rest = raw.substr(raw.find("param") + 5);
      auto eq = rest.find('=');
      if (eq == std::string::npos) lp.fail("usage: param <name> = <value>");
      auto name_tokens = split_ws(rest.substr(0, eq));
      if (name_tokens.size() != 1) lp.fail("usage: param <name> = <value>");
      const std::string& name = name_tokens.front();
      if (name == "pi" || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
        lp.fail("bad parameter name '" + name + "'");
      for (const auto& [n, v] : doc.params)
        if (n == name) lp.fail("repeated parameter '" + name + "'");
      try {
        Bindings known;
        for (const auto& [n, v] : doc.params) known[n] = v;
        doc.params.emplace_back(name, Expr::parse(rest.substr(eq + 1)).eval(known));
      } catch (const Error& e) {
        lp.fail(e.what());
      }
    } else if (kw == "annihilation") {
      if (tokens.size() != 2 || (tokens[1] != "on" && tokens[1] != "off")) lp.fail("usage: annihilation on|off");
      doc.annihilation = tokens[1] == "on";
    } else if (kw == "target") {
      if (tokens.size() < 2) lp.fail("usage: target <amplitude> <mode>...");
      TargetTerm t;
      try {
        t.amplitude = Expr::parse(tokens[1]).eval({});
        for (std::size_t i = 2; i < tokens.size(); ++i) t.modes.push_back(parse_mode_label(tokens[i]));
      } catch (const std::exception& e) {
        lp.fail(e.what());
      }
      doc.target.push_back(std::move(t));
    } else {
      std::vector<std::string> in_paths, out_paths;
      lp.split_positional(in_paths, out_paths);
      auto need = [&](std::size_t n_in, std::size_t n_out, const char* usage) {
        if (in_paths.size() != n_in || out_paths.size() != n_out || lp.arrow() != (n_out > 0))
          lp.fail(std::string("usage: ") + usage);
      };
      if (kw == "crystal") {
        if (lp.arrow() || in_paths.size() < 2) lp.fail("usage: crystal <path> <path>... [weight=] [phase=] [modes=]");
        Crystal c;
        c.paths = in_paths;
        c.weight = lp.expr("weight", 1.0);
        c.phase = lp.expr("phase", 0.0);
        if (auto m = lp.take("modes")) {
          auto parts = split(*m, ',');
          if (parts.size() != c.paths.size()) lp.fail("modes= needs one mode per path");
          for (const auto& p : parts) c.modes.push_back(mode_or_fail(lp, p));
        }
        doc.elements.emplace_back(std::move(c));
      } else if (kw == "bs") {
        need(2, 2, "bs <in1> <in2> -> <out1> <out2> [phase=]");
        doc.elements.emplace_back(
            BeamSplitter{in_paths[0], in_paths[1], out_paths[0], out_paths[1], lp.expr("phase", 0.0)});
      } else if (kw == "pbs") {
        need(2, 2, "pbs <in1> <in2> -> <out1> <out2>");
        doc.elements.emplace_back(PolarizingBeamSplitter{in_paths[0], in_paths[1], out_paths[0], out_paths[1]});
      } else if (kw == "phase") {
        need(1, 0, "phase <path> phi=<expr>");
        auto v = lp.take("phi");
        if (!v) lp.fail("phase needs phi=<expr>");
        try {
          doc.elements.emplace_back(PhaseShifter{in_paths[0], Expr::parse(*v)});
        } catch (const ValidationError& e) {
          lp.fail(e.what());
        }
      } else if (kw == "shift") {
        need(1, 0, "shift <path> oam=<int> | rotate=<expr> | set=H|V");
        ModeShifter m;
        m.path = in_paths[0];
        auto oam = lp.take("oam");
        auto rot = lp.take("rotate");
        auto set = lp.take("set");
        if ((oam.has_value() + rot.has_value() + set.has_value()) != 1) lp.fail("shift needs exactly one of oam=, rotate=, set=");
        if (oam) {
          m.action = ModeShifter::Action::OamAdd;
          try {
            std::size_t used = 0;
            m.oam_delta = std::stoi(*oam, &used);
            if (used != oam->size()) throw std::invalid_argument("");
          } catch (const std::exception&) {
            lp.fail("oam= needs an integer");
          }
        } else if (rot) {
          m.action = ModeShifter::Action::PolRotate;
          try {
            m.angle = Expr::parse(*rot);
          } catch (const ValidationError& e) {
            lp.fail(e.what());
          }
        } else {
          m.action = ModeShifter::Action::PolSet;
          if (*set == "H") m.set_to = Polarization::Kind::H;
          else if (*set == "V") m.set_to = Polarization::Kind::V;
          else lp.fail("set= needs H or V");
        }
        doc.elements.emplace_back(std::move(m));
      } else if (kw == "attenuator") {
        need(1, 0, "attenuator <path> T=<expr> [Tphase=<expr>] [tag=~loss...]");
        Attenuator a;
        a.path = in_paths[0];
        a.transmission = lp.expr("T", 1.0);
        a.transmission_phase = lp.expr("Tphase", 0.0);
        if (auto tag = lp.take("tag")) {
          if (!is_loss_path(*tag)) lp.fail("attenuator tag must start with " + std::string(kLossPrefix));
          a.loss_tag = *tag;
        }
        doc.elements.emplace_back(std::move(a));
      } else if (kw == "identify") {
        if (lp.arrow()) {
          need(1, 1, "identify <from> <to>");
          doc.elements.emplace_back(PathIdentify{in_paths[0], out_paths[0]});
        } else {
          need(2, 0, "identify <from> <to>");
          doc.elements.emplace_back(PathIdentify{in_paths[0], in_paths[1]});
        }
      } else {
        lp.fail("unknown keyword '" + kw + "'");
      }
      lp.finish();
    }
  }
  return doc;
}

SetupDocument SetupDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open setup file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

std::string SetupDocument::serialize() const {
  std::ostringstream os;
  if (truncation) os << "order " << *truncation << "\n";
  if (!detectors.empty()) os << "detectors " << join(detectors, " ") << "\n";
  if (!pattern.empty()) os << "pattern " << pattern << "\n";
  for (const auto& [name, value] : params) os << "param " << name << " = " << format_double(value) << "\n";
  if (!annihilation) os << "annihilation off\n";
  auto opt = [&](const char* key, const Expr& e, const Expr& fallback) {
    if (!(e == fallback)) os << " " << key << "=" << e.str();
  };
  for (const auto& element : elements) {
    std::visit(Overloaded{
                   [&](const Crystal& c) {
                     os << "crystal " << join(c.paths, " ");
                     opt("weight", c.weight, 1.0);
                     opt("phase", c.phase, 0.0);
                     if (!c.modes.empty()) {
                       std::vector<std::string> m;
                       for (const auto& x : c.modes) m.push_back(to_string(x));
                       os << " modes=" << join(m, ",");
                     }
                   },
                   [&](const BeamSplitter& b) {
                     os << "bs " << b.in1 << " " << b.in2 << " -> " << b.out1 << " " << b.out2;
                     opt("phase", b.phase, 0.0);
                   },
                   [&](const PolarizingBeamSplitter& p) {
                     os << "pbs " << p.in1 << " " << p.in2 << " -> " << p.out1 << " " << p.out2;
                   },
                   [&](const PhaseShifter& p) { os << "phase " << p.path << " phi=" << p.phase.str(); },
                   [&](const ModeShifter& m) {
                     os << "shift " << m.path;
                     switch (m.action) {
                       case ModeShifter::Action::OamAdd: os << " oam=" << (m.oam_delta >= 0 ? "+" : "") << m.oam_delta; break;
                       case ModeShifter::Action::PolRotate: os << " rotate=" << m.angle.str(); break;
                       case ModeShifter::Action::PolSet: os << " set=" << (m.set_to == Polarization::Kind::V ? "V" : "H"); break;
                     }
                   },
                   [&](const Attenuator& a) {
                     os << "attenuator " << a.path << " T=" << a.transmission.str();
                     opt("Tphase", a.transmission_phase, 0.0);
                     if (a.loss_tag != kLossPrefix) os << " tag=" << a.loss_tag;
                   },
                   [&](const PathIdentify& p) { os << "identify " << p.from << " " << p.to; },
               },
               element);
    os << "\n";
  }
  for (const auto& t : target) {
    os << "target " << format_double(t.amplitude);
    for (const auto& m : t.modes) os << " " << to_string(m);
    os << "\n";
  }
  return os.str();
}

Bindings SetupDocument::bindings() const {
  Bindings b;
  for (const auto& [name, value] : params) b[name] = value;
  return b;
}

ExperimentSetup SetupDocument::build() const {
  ElementOptions options;
  options.annihilation = annihilation;
  return ExperimentSetup(elements, detectors, truncation, bindings(), options);
}

std::optional<DetectionPattern> SetupDocument::detection_pattern() const {
  if (!pattern.empty()) return DetectionPattern::parse(pattern);
  if (detectors.empty()) return std::nullopt;
  return DetectionPattern::coincidence(detectors);
}

std::optional<PureState> SetupDocument::target_state(int truncation) const {
  if (target.empty()) return std::nullopt;
  FockAmplitudes amps;
  for (const auto& t : target) {
    FockState s;
    for (const auto& m : t.modes) s.add(m);
    amps[s] += t.amplitude;
  }
  return from_fock_amplitudes(amps, truncation);
}

std::string SetupDocument::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace pathid
