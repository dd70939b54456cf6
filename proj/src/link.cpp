#include "qbc/link.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qbc/errors.hpp"

namespace qbc {

std::vector<std::string> LinkParams::validate() const {
  if (!(f_rep > 0.0)) throw ValidationError("f_rep must be positive");
  if (!(mu_photon >= 0.0 && mu_photon <= 1.0)) throw ValidationError("mu_photon must lie in [0, 1]");
  if (!(alpha_abs >= 0.0)) throw ValidationError("alpha_abs must be non-negative");
  if (!(length_km >= 0.0)) throw ValidationError("length_km must be non-negative");
  if (!(eta_det >= 0.0 && eta_det <= 1.0)) throw ValidationError("eta_det must lie in [0, 1]");
  if (!(p_dark >= 0.0 && p_dark <= 1.0)) throw ValidationError("p_dark must lie in [0, 1]");
  std::vector<std::string> warnings;
  if (mu_photon > 0.2)
    warnings.emplace_back("mu_photon above 0.2: multi-photon pulses are no longer negligible");
  return warnings;
}

double LinkParams::photon_yield() const { return mu_photon * t_link(alpha_abs, length_km) * eta_det; }

double t_link(double alpha_abs, double length_km) {
  return std::clamp(std::pow(10.0, -alpha_abs * length_km), 0.0, 1.0);
}

double raw_rate(const LinkParams& p) { return p.f_rep * p.photon_yield(); }

double dark_count_correction(const LinkParams& p) {
  const double denom = 2.0 * p.photon_yield();
  if (!(denom > 0.0)) throw ValidationError("dark-count correction undefined: mu * t_link * eta is zero");
  return p.p_dark / denom;
}

ConditionalProbs apply_dark_count_correction(const ConditionalProbs& cp, double delta_p) {
  ConditionalProbs out = cp;
  for (Bit b : {0, 1}) {
    const Bit right = b;
    const Bit wrong = 1 - b;
    out.at(b, wrong, b) += delta_p;
    out.at(b, right, b) -= delta_p;
  }
  return out;
}

std::vector<DetectionEvent> transmit(std::span<const Pulse> schedule, const LinkParams& p, Rng& rng) {
  p.validate();
  const double survive = t_link(p.alpha_abs, p.length_km);
  const double fire = 0.5 * p.p_dark;
  std::vector<DetectionEvent> events;
  for (const auto& pulse : schedule) {
    const bool emitted = rng.bernoulli(p.mu_photon);
    const bool arrived = emitted && rng.bernoulli(survive);
    if (arrived && rng.bernoulli(p.eta_det)) {
      events.push_back({pulse.index, pulse.emission_tick, EventKind::photon, std::nullopt});
      continue;
    }
    const bool d0 = rng.bernoulli(fire);
    const bool d1 = rng.bernoulli(fire);
    if (d0 != d1) events.push_back({pulse.index, pulse.emission_tick, EventKind::dark, d0 ? Bit{0} : Bit{1}});
  }
  return events;
}

void write_events(std::ostream& out, std::span<const DetectionEvent> events) {
  for (const auto& e : events) {
    out << e.pulse_index << ' ';
    if (e.outcome)
      out << static_cast<int>(*e.outcome);
    else
      out << '-';
    out << ' ' << (e.kind == EventKind::photon ? "photon" : "dark") << '\n';
  }
}

std::vector<DetectionEvent> read_events(std::istream& in, std::int64_t tick_offset) {
  std::vector<DetectionEvent> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    DetectionEvent e;
    std::string outcome;
    std::string kind;
    if (!(ls >> e.pulse_index >> outcome >> kind)) throw ParseError("expected '<index> <outcome> <kind>'", lineno);
    std::string extra;
    if (ls >> extra) throw ParseError("trailing token '" + extra + "'", lineno);
    if (outcome == "0" || outcome == "1")
      e.outcome = static_cast<Bit>(outcome[0] - '0');
    else if (outcome != "-")
      throw ParseError("outcome must be 0, 1 or -", lineno);
    if (kind == "photon")
      e.kind = EventKind::photon;
    else if (kind == "dark")
      e.kind = EventKind::dark;
    else
      throw ParseError("unknown event kind '" + kind + "'", lineno);
    e.arrival_tick = tick_offset + static_cast<std::int64_t>(e.pulse_index);
    events.push_back(e);
  }
  return events;
}

}  // namespace qbc
