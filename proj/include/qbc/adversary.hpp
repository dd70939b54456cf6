#pragma once

#include <string>
#include <variant>

#include "qbc/channel_models.hpp"

namespace qbc {

// Cheating Alice restricted to single-qubit measurements.
namespace attack {

// Immediate minimum-error measurement in the discrimination basis.
struct Breidbart {};
// Breidbart measurement after deliberately adding white noise delta_p_d.
struct AddedNoise {
  double delta_p_d = 0.0;
};
// Ideal non-demolition detection plus a noisy memory; the photon is measured
// in C_c once c is chosen, with extra white noise p_d_dt.
struct Memory {
  double p_d_dt = 0.0;
};
using Immediate = std::variant<Breidbart, AddedNoise>;
// Fraction nu of the results come from stored photons, the rest from an
// immediate cheating measurement.
struct BoundedMemory {
  double nu = 0.0;
  Memory stored;
  Immediate immediate = Breidbart{};
};
// Non-demolition detection with efficiency p_nd; photons it cannot store are
// measured immediately with the fallback.
struct NonDemolition {
  double p_nd = 1.0;
  Memory memory;
  Immediate fallback = Breidbart{};
};

}  // namespace attack

class AttackModel {
 public:
  using Kind = std::variant<attack::Breidbart, attack::AddedNoise, attack::Memory, attack::BoundedMemory,
                            attack::NonDemolition>;

  AttackModel() = default;
  AttackModel(Kind kind) : kind_(std::move(kind)) {}  // NOLINT(google-explicit-constructor)

  const Kind& kind() const { return kind_; }
  // Checks parameter ranges against the channel white noise p_d.
  void validate(double p_d) const;
  std::string tag() const;

 private:
  Kind kind_ = attack::Breidbart{};
};

// Minimum error for equal-prior pure states with overlap cos(theta).
double helstrom_error(double theta);

// Orthonormal pair sharing the bisector of |0> and |1>; outcome 0 is the
// vector on the |0> side.
MeasurementBasis discrimination_basis(const StateGeometry& g);

// Attacker-side state channel: preparation and transmission stages only, plus
// any white noise the attacker adds.
KrausChannel cheating_state_channel(Bit b, const NoiseParams& params, const StateGeometry& g,
                                    double extra_p_d = 0.0);

// p_ch(r|b) for the discrimination measurement. A single cheating observable
// is used, so the C0 and C1 halves of the table coincide.
ConditionalProbs cheating_cond_probs(const NoiseParams& params, const StateGeometry& g, double extra_p_d = 0.0);

// Added white noise that minimizes <S(honest || cheat)>.
double optimal_added_noise(double p_d);

// Honest-observable table with total white noise p_d + p_d_dt.
ConditionalProbs memory_attack_probs(const NoiseParams& params, double p_d_dt, const StateGeometry& g);

ConditionalProbs bounded_memory_probs(double nu, const ConditionalProbs& honest, const ConditionalProbs& cheat);

// Non-demolition detection with finite efficiency p_nd is equivalent to a
// bounded memory with nu = p_nd. Endpoints collapse to the pure attacks.
AttackModel nondemolition_reduction(double p_nd, const attack::Memory& memory,
                                    attack::Immediate fallback = attack::Breidbart{});

// Expected table of an attacker following `model`; row c is what the attacker
// presents when opening as c.
ConditionalProbs attack_cond_probs(const AttackModel& model, const NoiseParams& params, const StateGeometry& g);

}  // namespace qbc
