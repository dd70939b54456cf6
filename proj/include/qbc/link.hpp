#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbc/channel_models.hpp"
#include "qbc/rng.hpp"

namespace qbc {

struct LinkParams {
  double f_rep = 1e6;       // pulses per second
  double mu_photon = 0.1;   // mean photons per pulse
  double alpha_abs = 0.05;  // t_link = 10^(-alpha_abs * length_km)
  double length_km = 10.0;
  double eta_det = 0.316;
  double p_dark = 0.0;  // per gate, shared by the two detectors

  // Throws on hard violations; returns soft warnings (e.g. mu_photon > 0.2).
  std::vector<std::string> validate() const;
  // Probability that an emitted pulse yields a photon detection.
  double photon_yield() const;
};

double t_link(double alpha_abs, double length_km);
double raw_rate(const LinkParams& p);

// delta_p = p_dark / (2 mu t_link eta).
double dark_count_correction(const LinkParams& p);
// Adds +delta_p to the wrong outcome and -delta_p to the right one on the
// matched rows (c = b); crossed rows are left unchanged.
ConditionalProbs apply_dark_count_correction(const ConditionalProbs& cp, double delta_p);

struct Pulse {
  std::uint64_t index = 0;
  std::int64_t emission_tick = 0;
  Bit bit = 0;
};

enum class EventKind { photon, dark };

struct DetectionEvent {
  std::uint64_t pulse_index = 0;
  std::int64_t arrival_tick = 0;
  EventKind kind = EventKind::photon;
  // Dark events carry the firing detector's outcome. Photon outcomes are set
  // later by whoever measures the qubit.
  std::optional<Bit> outcome;

  double time_seconds(const LinkParams& p) const { return static_cast<double>(arrival_tick) / p.f_rep; }
};

// Bernoulli(mu) emission, survival t_link, detection eta_det; without a
// photon detection each detector fires with probability p_dark / 2 and a
// lone firing is a dark event. Double firings are discarded.
std::vector<DetectionEvent> transmit(std::span<const Pulse> schedule, const LinkParams& p, Rng& rng);

// One record per line: "<pulse_index> <outcome|-> <photon|dark>". Ticks are
// not stored; read_events restores them as tick_offset + pulse_index.
void write_events(std::ostream& out, std::span<const DetectionEvent> events);
std::vector<DetectionEvent> read_events(std::istream& in, std::int64_t tick_offset = 0);

}  // namespace qbc
