#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qbc/adversary.hpp"
#include "qbc/link.hpp"
#include "qbc/rng.hpp"

namespace qbc {

// Abstract ticks. Bob emits pulse k at t1 + k; the commitment phase closes at
// t2, which must leave room for all N pulses.
struct Timing {
  std::int64_t t0 = 0;
  std::int64_t t1 = 1;
  std::int64_t t2 = -1;  // negative: t1 + n_pulses
};

struct ProtocolConfig {
  StateGeometry geometry;
  std::uint64_t n_pulses = 10000;
  NoiseParams noise;
  LinkParams link;
  Timing timing;

  // Throws ValidationError; returns link warnings.
  std::vector<std::string> validate() const;
  std::int64_t close_tick() const;
};

struct BobSecret {
  std::vector<Bit> bits;
  std::vector<Pulse> schedule;
};

BobSecret bob_initialize(const ProtocolConfig& cfg, Rng& rng);

namespace strategy {
struct Honest {
  Bit c = 0;
};
// The attacker opens as `open_as`, chosen after the commitment phase.
struct Cheat {
  AttackModel model;
  Bit open_as = 0;
};
}  // namespace strategy

using Strategy = std::variant<strategy::Honest, strategy::Cheat>;
std::string strategy_tag(const Strategy& s);

// Alice's private state after the commitment phase.
struct AliceRecord {
  Strategy strategy;
  std::vector<std::uint64_t> indices;  // k(i), pulse indices of detections
  std::vector<std::int64_t> arrivals;  // tau_i, announced to Bob
  // Outcomes fixed during commitment; for stored qubits the entry is unused
  // until opening.
  std::vector<Bit> outcomes;
  std::vector<bool> stored;
  std::vector<DensityMatrix> memory;  // stored qubits, in detection order
};

// Bob's view of the qubit Alice receives for each bit value: preparation and
// transmission stages applied to |b>.
struct Arrivals {
  DensityMatrix state0;
  DensityMatrix state1;
  const DensityMatrix& operator[](Bit b) const { return b == 0 ? state0 : state1; }
};
Arrivals arriving_states(const ProtocolConfig& cfg);

// `photons[i]` is the arriving state for detections[i] (ignored for dark
// events, whose outcome the detector already fixed).
AliceRecord alice_commit(const Strategy& strategy, const std::vector<DetectionEvent>& detections,
                         const std::vector<DensityMatrix>& photons, const ProtocolConfig& cfg, Rng& rng);

struct Opening {
  Bit c = 0;
  std::vector<std::uint64_t> indices;
  std::vector<Bit> outcomes;
};

// Measures any stored qubits in C_c and reveals (c, outcomes). Throws
// ProtocolError when `announced` differs from the record's index set.
Opening alice_open(AliceRecord& record, Bit claimed_c, const std::vector<std::uint64_t>& announced,
                   const ProtocolConfig& cfg, Rng& rng);

struct SessionTranscript {
  static constexpr int kVersion = 1;

  std::vector<Bit> bob_bits;
  std::vector<std::int64_t> emission_times;
  std::vector<std::int64_t> announced_arrivals;
  std::vector<std::uint64_t> index_map;
  std::vector<Bit> outcomes;
  Bit claimed_commitment = 0;
  std::string strategy_tag;

  // n <= N, ascending arrivals, injective index map into [0, N).
  void validate() const;
  std::string to_json() const;
  static SessionTranscript from_json(const std::string& text);
};

// bob_initialize -> transmit -> alice_commit -> alice_open on independent
// sub-streams derived from `seed`.
SessionTranscript run_session(const ProtocolConfig& cfg, const Strategy& strategy, std::uint64_t seed);

}  // namespace qbc
