#include "pathid/elements.hpp"

#include <cmath>
#include <numbers>

#include "pathid/errors.hpp"

namespace pathid {

namespace {

using Image = OperatorPolynomial::Image;

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const Complex kI{0.0, 1.0};

Complex expi(double phi) { return std::polar(1.0, phi); }

PureState with_poly(const PureState& s, OperatorPolynomial p) { return PureState(std::move(p), s.bindings); }

ModeLabel on_path(const ModeLabel& m, const std::string& path) { return ModeLabel(path, m.internal); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

PureState apply_beam_splitter(const PureState& state, const BeamSplitter& bs, const Bindings& bindings) {
  if (bs.in1 == bs.in2 || bs.out1 == bs.out2)
    throw ValidationError("beam splitter needs two distinct inputs and two distinct outputs");
  for (const auto* in : {&bs.in1, &bs.in2})
    if (*in == bs.out1 || *in == bs.out2)
      throw ValidationError("beam splitter input path '" + *in + "' collides with an output path");
  const Complex ext = expi(bs.phase.eval(bindings));
  return with_poly(state, state.poly.substituted([&](const ModeLabel& m) -> Image {
    if (m.path == bs.in1) return {{on_path(m, bs.out1), kInvSqrt2}, {on_path(m, bs.out2), kI * kInvSqrt2}};
    if (m.path == bs.in2) return {{on_path(m, bs.out2), ext * kInvSqrt2}, {on_path(m, bs.out1), ext * kI * kInvSqrt2}};
    return {{m, 1.0}};
  }));
}

PureState apply_pbs(const PureState& state, const PolarizingBeamSplitter& pbs) {
  if (pbs.in1 == pbs.in2 || pbs.out1 == pbs.out2)
    throw ValidationError("polarizing beam splitter needs distinct inputs and outputs");
  return with_poly(state, state.poly.substituted([&](const ModeLabel& m) -> Image {
    if (m.path != pbs.in1 && m.path != pbs.in2) return {{m, 1.0}};
    if (!m.internal.pol.is_hv())
      throw ValidationError("photon on PBS path '" + m.path + "' is not in the H/V basis");
    bool horizontal = m.internal.pol.kind == Polarization::Kind::H;
    bool first = m.path == pbs.in1;
    return {{on_path(m, (horizontal == first) ? pbs.out1 : pbs.out2), 1.0}};
  }));
}

PureState apply_phase(const PureState& state, const PhaseShifter& ps, const Bindings& bindings) {
  const Complex f = expi(ps.phase.eval(bindings));
  return with_poly(state, state.poly.substituted([&](const ModeLabel& m) -> Image {
    return {{m, m.path == ps.path ? f : Complex(1.0)}};
  }));
}

PureState apply_mode_shifter(const PureState& state, const ModeShifter& ms, const Bindings& bindings) {
  switch (ms.action) {
    case ModeShifter::Action::OamAdd:
      return with_poly(state, state.poly.substituted([&](const ModeLabel& m) -> Image {
        if (m.path != ms.path) return {{m, 1.0}};
        ModeLabel out = m;
        out.internal.oam += ms.oam_delta;
        return {{out, 1.0}};
      }));
    case ModeShifter::Action::PolRotate: {
      const double g = ms.angle.eval(bindings);
      const double c = std::cos(g), s = std::sin(g);
      return with_poly(state, state.poly.substituted([&](const ModeLabel& m) -> Image {
        if (m.path != ms.path) return {{m, 1.0}};
        ModeLabel h = m, v = m;
        h.internal.pol = Polarization::horizontal();
        v.internal.pol = Polarization::vertical();
        switch (m.internal.pol.kind) {
          case Polarization::Kind::H: return {{h, c}, {v, s}};
          case Polarization::Kind::V: return {{h, -s}, {v, c}};
          case Polarization::Kind::Angle: {
            ModeLabel out = m;
            out.internal.pol.angle += g;
            return {{out, 1.0}};
          }
          case Polarization::Kind::None: break;
        }
        throw ValidationError("polarization rotation on path '" + m.path + "' with unpolarized photon");
      }));
    }
    case ModeShifter::Action::PolSet:
      // Resolved when a setup is constructed; at run time it must see an empty path.
      for (const auto& [key, c] : state.poly.terms())
        for (const auto& m : key.monomial.modes())
          if (m.path == ms.path && c != Complex{})
            throw ValidationError("polarization set on occupied path '" + ms.path + "'");
      return state;
  }
  return state;
}

PureState apply_attenuator(const PureState& state, const Attenuator& at, const Bindings& bindings) {
  const double t = at.transmission.eval(bindings);
  if (std::abs(t) > 1.0 + 1e-15) throw ValidationError("attenuator with |T| > 1");
  if (!is_loss_path(at.loss_tag)) throw ValidationError("attenuator loss tag must start with " + std::string(kLossPrefix));
  const Complex T = std::polar(t, at.transmission_phase.eval(bindings));
  const double R = std::sqrt(std::max(0.0, 1.0 - std::norm(T)));
  return with_poly(state, state.poly.substituted([&](const ModeLabel& m) -> Image {
    if (m.path != at.path) return {{m, 1.0}};
    ModeLabel loss = m;
    loss.path = at.loss_tag;
    loss.internal.tag = at.loss_tag;
    return {{m, T}, {loss, R}};
  }));
}

PureState apply_identify(const PureState& state, const PathIdentify& pi) {
  if (is_loss_path(pi.from) || is_loss_path(pi.to)) throw ValidationError("loss modes cannot be identified");
  if (pi.from == pi.to) return state;
  return with_poly(state, state.poly.substituted([&](const ModeLabel& m) -> Image {
    return {{m.path == pi.from ? on_path(m, pi.to) : m, 1.0}};
  }));
}

Complex crystal_weight(const Crystal& c, const Bindings& bindings) {
  return std::polar(c.weight.eval(bindings), c.phase.eval(bindings));
}

ModeLabel emission_mode(const Crystal& c, std::size_t j) {
  return ModeLabel(c.paths.at(j), j < c.modes.size() ? c.modes[j] : InternalMode{});
}

PureState apply_crystal(const PureState& state, const Crystal& c, const Bindings& bindings,
                        const ElementOptions& options) {
  if (c.paths.size() < 2) throw ValidationError("a source needs at least two output paths");
  if (!c.modes.empty() && c.modes.size() != c.paths.size())
    throw ValidationError("source mode list must match its path list");
  const Complex w = crystal_weight(c, bindings);
  std::vector<ModeLabel> modes;
  for (std::size_t j = 0; j < c.paths.size(); ++j) modes.push_back(emission_mode(c, j));

  OperatorPolynomial result = state.poly;
  OperatorPolynomial current = state.poly;
  for (int m = 1; m <= state.truncation(); ++m) {
    OperatorPolynomial next = current.created(modes, 1);
    if (options.annihilation) next.add(current.annihilated(modes, 1), -1.0);
    current = next.scaled(w / static_cast<double>(m));
    if (current.size() == 0) break;
    result.add(current);
  }
  return with_poly(state, std::move(result));
}

PureState apply(const PureState& state, const Element& e, const Bindings& bindings, const ElementOptions& options) {
  return std::visit(Overloaded{
                        [&](const Crystal& c) { return apply_crystal(state, c, bindings, options); },
                        [&](const BeamSplitter& b) { return apply_beam_splitter(state, b, bindings); },
                        [&](const PolarizingBeamSplitter& p) { return apply_pbs(state, p); },
                        [&](const PhaseShifter& p) { return apply_phase(state, p, bindings); },
                        [&](const ModeShifter& m) { return apply_mode_shifter(state, m, bindings); },
                        [&](const Attenuator& a) { return apply_attenuator(state, a, bindings); },
                        [&](const PathIdentify& p) { return apply_identify(state, p); },
                    },
                    e);
}

std::vector<std::string> input_paths(const Element& e) {
  return std::visit(Overloaded{
                        [](const Crystal&) { return std::vector<std::string>{}; },
                        [](const BeamSplitter& b) { return std::vector<std::string>{b.in1, b.in2}; },
                        [](const PolarizingBeamSplitter& p) { return std::vector<std::string>{p.in1, p.in2}; },
                        [](const PhaseShifter& p) { return std::vector<std::string>{p.path}; },
                        [](const ModeShifter& m) { return std::vector<std::string>{m.path}; },
                        [](const Attenuator& a) { return std::vector<std::string>{a.path}; },
                        [](const PathIdentify& p) { return std::vector<std::string>{p.from}; },
                    },
                    e);
}

std::vector<std::string> output_paths(const Element& e) {
  return std::visit(Overloaded{
                        [](const Crystal& c) { return c.paths; },
                        [](const BeamSplitter& b) { return std::vector<std::string>{b.out1, b.out2}; },
                        [](const PolarizingBeamSplitter& p) { return std::vector<std::string>{p.out1, p.out2}; },
                        [](const PhaseShifter& p) { return std::vector<std::string>{p.path}; },
                        [](const ModeShifter& m) { return std::vector<std::string>{m.path}; },
                        [](const Attenuator& a) { return std::vector<std::string>{a.path, a.loss_tag}; },
                        [](const PathIdentify& p) { return std::vector<std::string>{p.to}; },
                    },
                    e);
}

std::set<std::string> parameters(const Element& e) {
  std::set<std::string> out;
  auto merge = [&](const Expr& x) {
    auto p = x.parameters();
    out.insert(p.begin(), p.end());
  };
  std::visit(Overloaded{
                 [&](const Crystal& c) { merge(c.weight), merge(c.phase); },
                 [&](const BeamSplitter& b) { merge(b.phase); },
                 [](const PolarizingBeamSplitter&) {},
                 [&](const PhaseShifter& p) { merge(p.phase); },
                 [&](const ModeShifter& m) {
                   if (m.action == ModeShifter::Action::PolRotate) merge(m.angle);
                 },
                 [&](const Attenuator& a) { merge(a.transmission), merge(a.transmission_phase); },
                 [](const PathIdentify&) {},
             },
             e);
  return out;
}

std::string keyword(const Element& e) {
  static const char* names[] = {"crystal", "bs", "pbs", "phase", "shift", "attenuator", "identify"};
  return names[e.index()];
}

}  // namespace pathid
