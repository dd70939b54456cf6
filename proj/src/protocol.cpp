#include "qbc/protocol.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include <json.hpp>

#include "qbc/errors.hpp"

namespace qbc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Depolarizing strength that, applied after the channel's own white noise
// p_d, brings the total to p_d + extra.
double top_up(double p_d, double extra) {
  if (extra <= 0.0 || p_d >= 1.0) return 0.0;
  return std::min(1.0, extra / (1.0 - p_d));
}

struct ImmediateMeasurement {
  KrausChannel added;
  MeasurementBasis basis;
};

ImmediateMeasurement immediate_for(const attack::Immediate& im, const ProtocolConfig& cfg) {
  const double extra = std::holds_alternative<attack::AddedNoise>(im) ? std::get<attack::AddedNoise>(im).delta_p_d : 0.0;
  return {depolarizing(top_up(cfg.noise.p_d(), extra)), discrimination_basis(cfg.geometry)};
}

// Per-detection plan for a cheating Alice: with probability `store` the qubit
// goes to memory, otherwise it is measured immediately.
struct CheatPlan {
  double store = 0.0;
  ImmediateMeasurement immediate;
};

CheatPlan plan_for(const AttackModel& model, const ProtocolConfig& cfg) {
  return std::visit(
      overloaded{[&](const attack::Breidbart& b) { return CheatPlan{0.0, immediate_for(b, cfg)}; },
                 [&](const attack::AddedNoise& a) { return CheatPlan{0.0, immediate_for(a, cfg)}; },
                 [&](const attack::Memory&) { return CheatPlan{1.0, immediate_for(attack::Breidbart{}, cfg)}; },
                 [&](const attack::BoundedMemory& b) { return CheatPlan{b.nu, immediate_for(b.immediate, cfg)}; },
                 [&](const attack::NonDemolition& n) { return CheatPlan{n.p_nd, immediate_for(n.fallback, cfg)}; }},
      model.kind());
}

double memory_noise(const AttackModel& model) {
  return std::visit(overloaded{[](const attack::Memory& m) { return m.p_d_dt; },
                               [](const attack::BoundedMemory& b) { return b.stored.p_d_dt; },
                               [](const attack::NonDemolition& n) { return n.memory.p_d_dt; },
                               [](const auto&) { return 0.0; }},
                    model.kind());
}

}  // namespace

std::vector<std::string> ProtocolConfig::validate() const {
  geometry.validate();
  noise.validate();
  if (n_pulses < 1) throw ValidationError("n_pulses must be at least 1");
  if (!(timing.t0 < timing.t1)) throw ValidationError("timing requires t0 < t1");
  if (timing.t2 >= 0 && timing.t2 < timing.t1 + static_cast<std::int64_t>(n_pulses))
    throw ValidationError("timing requires t2 >= t1 + n_pulses");
  return link.validate();
}

std::int64_t ProtocolConfig::close_tick() const {
  return timing.t2 >= 0 ? timing.t2 : timing.t1 + static_cast<std::int64_t>(n_pulses);
}

BobSecret bob_initialize(const ProtocolConfig& cfg, Rng& rng) {
  cfg.validate();
  BobSecret s;
  s.bits.resize(cfg.n_pulses);
  s.schedule.resize(cfg.n_pulses);
  for (std::uint64_t k = 0; k < cfg.n_pulses; ++k) {
    s.bits[k] = rng.bernoulli(0.5) ? Bit{1} : Bit{0};
    s.schedule[k] = {k, cfg.timing.t1 + static_cast<std::int64_t>(k), s.bits[k]};
  }
  return s;
}

std::string strategy_tag(const Strategy& s) {
  return std::visit(overloaded{[](const strategy::Honest& h) { return "honest(" + std::to_string(h.c) + ")"; },
                               [](const strategy::Cheat& c) {
                                 return c.model.tag() + " open_as " + std::to_string(c.open_as);
                               }},
                    s);
}

Arrivals arriving_states(const ProtocolConfig& cfg) {
  auto state = [&](Bit b) {
    const auto ch = compose(transmission_stage(cfg.noise), preparation_stage(b, cfg.noise, cfg.geometry));
    return apply_channel(ch, density_from_pure(PureState::prepared(b, cfg.geometry)));
  };
  return {state(0), state(1)};
}

AliceRecord alice_commit(const Strategy& strategy, const std::vector<DetectionEvent>& detections,
                         const std::vector<DensityMatrix>& photons, const ProtocolConfig& cfg, Rng& rng) {
  if (photons.size() != detections.size()) throw ValidationError("one arriving state per detection is required");
  AliceRecord rec{strategy, {}, {}, {}, {}, {}};
  rec.indices.reserve(detections.size());

  std::optional<Bit> honest_c;
  std::optional<CheatPlan> plan;
  std::optional<KrausChannel> honest_meas;
  if (const auto* h = std::get_if<strategy::Honest>(&strategy)) {
    require_bit(h->c, "commitment");
    honest_c = h->c;
    honest_meas = measurement_stage(h->c, cfg.noise, cfg.geometry);
  } else {
    const auto& cheat = std::get<strategy::Cheat>(strategy);
    cheat.model.validate(cfg.noise.p_d());
    plan = plan_for(cheat.model, cfg);
  }
  const auto honest_basis = honest_c ? std::optional(commitment_observable(*honest_c, cfg.geometry)) : std::nullopt;

  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& ev = detections[i];
    rec.indices.push_back(ev.pulse_index);
    rec.arrivals.push_back(ev.arrival_tick);
    bool stored = false;
    Bit r = 0;
    if (ev.kind == EventKind::dark) {
      // The click itself is the result; there is no qubit to measure or store.
      r = ev.outcome.value_or(0);
    } else if (honest_c) {
      r = born_sample(apply_channel(*honest_meas, photons[i]), *honest_basis, rng);
    } else if (rng.bernoulli(plan->store)) {
      stored = true;
      rec.memory.push_back(photons[i]);
    } else {
      r = born_sample(apply_channel(plan->immediate.added, photons[i]), plan->immediate.basis, rng);
    }
    rec.outcomes.push_back(r);
    rec.stored.push_back(stored);
  }
  return rec;
}

Opening alice_open(AliceRecord& record, Bit claimed_c, const std::vector<std::uint64_t>& announced,
                   const ProtocolConfig& cfg, Rng& rng) {
  require_bit(claimed_c, "claimed commitment");
  if (announced != record.indices)
    throw ProtocolError("opening index set does not match the announced arrivals");
  if (!record.memory.empty()) {
    const double dt = memory_noise(std::get<strategy::Cheat>(record.strategy).model);
    const auto ch = compose(measurement_stage(claimed_c, cfg.noise, cfg.geometry), depolarizing(top_up(cfg.noise.p_d(), dt)));
    const auto basis = commitment_observable(claimed_c, cfg.geometry);
    std::size_t m = 0;
    for (std::size_t i = 0; i < record.outcomes.size(); ++i) {
      if (!record.stored[i]) continue;
      record.outcomes[i] = born_sample(apply_channel(ch, record.memory[m++]), basis, rng);
      record.stored[i] = false;
    }
    record.memory.clear();
  }
  return {claimed_c, record.indices, record.outcomes};
}

void SessionTranscript::validate() const {
  const std::size_t n_total = bob_bits.size();
  if (emission_times.size() != n_total) throw ValidationError("transcript: one emission time per pulse required");
  const std::size_t n = outcomes.size();
  if (n > n_total) throw ValidationError("transcript: more outcomes than pulses");
  if (announced_arrivals.size() != n || index_map.size() != n)
    throw ValidationError("transcript: arrivals, index map and outcomes differ in length");
  if (!std::is_sorted(announced_arrivals.begin(), announced_arrivals.end()))
    throw ValidationError("transcript: arrivals are not ascending");
  std::set<std::uint64_t> seen;
  for (auto k : index_map) {
    if (k >= n_total) throw ValidationError("transcript: index map points past the last pulse");
    if (!seen.insert(k).second) throw ValidationError("transcript: index map is not injective");
  }
  for (Bit b : bob_bits) require_bit(b, "bob bit");
  for (Bit r : outcomes) require_bit(r, "outcome");
  require_bit(claimed_commitment, "claimed commitment");
}

std::string SessionTranscript::to_json() const {
  nlohmann::json j;
  j["format"] = "qbc-transcript";
  j["version"] = kVersion;
  j["bob_bits"] = bob_bits;
  j["emission_times"] = emission_times;
  j["announced_arrivals"] = announced_arrivals;
  j["index_map"] = index_map;
  j["outcomes"] = outcomes;
  j["claimed_commitment"] = claimed_commitment;
  j["strategy"] = strategy_tag;
  return j.dump();
}

SessionTranscript SessionTranscript::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 1);
  }
  if (j.value("format", "") != "qbc-transcript") throw ValidationError("not a transcript document");
  if (j.value("version", 0) != kVersion) throw ValidationError("unsupported transcript version");
  SessionTranscript t;
  try {
    j.at("bob_bits").get_to(t.bob_bits);
    j.at("emission_times").get_to(t.emission_times);
    j.at("announced_arrivals").get_to(t.announced_arrivals);
    j.at("index_map").get_to(t.index_map);
    j.at("outcomes").get_to(t.outcomes);
    j.at("claimed_commitment").get_to(t.claimed_commitment);
    j.at("strategy").get_to(t.strategy_tag);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("transcript field error: ") + e.what());
  }
  t.validate();
  return t;
}

SessionTranscript run_session(const ProtocolConfig& cfg, const Strategy& strategy, std::uint64_t seed) {
  const SeedStream seeds(seed);
  Rng bob_rng = seeds.derive("bob");
  Rng link_rng = seeds.derive("link");
  Rng alice_rng = seeds.derive("alice");

  const auto secret = bob_initialize(cfg, bob_rng);
  const auto detections = transmit(secret.schedule, cfg.link, link_rng);

  const auto arriving = arriving_states(cfg);
  std::vector<DensityMatrix> photons;
  photons.reserve(detections.size());
  for (const auto& ev : detections) photons.push_back(arriving[secret.bits[ev.pulse_index]]);

  auto record = alice_commit(strategy, detections, photons, cfg, alice_rng);
  const Bit c = std::visit(overloaded{[](const strategy::Honest& h) { return h.c; },
                                      [](const strategy::Cheat& ch) { return ch.open_as; }},
                           strategy);
  // Bob's copy of the announcement is exactly what Alice sent.
  const auto opening = alice_open(record, c, record.indices, cfg, alice_rng);

  SessionTranscript t;
  t.bob_bits = secret.bits;
  t.emission_times.reserve(secret.schedule.size());
  for (const auto& p : secret.schedule) t.emission_times.push_back(p.emission_tick);
  t.announced_arrivals = record.arrivals;
  t.index_map = opening.indices;
  t.outcomes = opening.outcomes;
  t.claimed_commitment = opening.c;
  t.strategy_tag = strategy_tag(strategy);
  t.validate();
  return t;
}

}  // namespace qbc
