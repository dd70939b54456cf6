#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "qbc/channel_models.hpp"

namespace qbc {

class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);
  Distribution(std::initializer_list<double> probs) : Distribution(std::vector<double>(probs)) {}

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

Distribution row_distribution(const ConditionalProbs& cp, Bit c, Bit b);

// Bhattacharyya coefficient sum_i sqrt(p_i q_i).
double fidelity(const Distribution& p, const Distribution& q);

// Relative entropy in nats. Support mismatch (q_i = 0 < p_i) is reported
// through `infinite`, never as a large finite number.
struct Divergence {
  double value = 0.0;
  bool infinite = false;

  static Divergence infinity() { return {0.0, true}; }
  bool operator==(const Divergence&) const = default;
};

Divergence relative_entropy(const Distribution& p, const Distribution& q);
Divergence mean(std::span<const Divergence> values);

// Mean of the four row fidelities F(ideal_c(*|b), noisy_c(*|b)).
double avg_fidelity_noise(const ConditionalProbs& ideal, const ConditionalProbs& noisy);
// Mean of F(p_0(*|0), p_0(*|1)) and F(p_1(*|0), p_1(*|1)).
double avg_fidelity_states(const ConditionalProbs& cp);
// Mean of F(p_0(*|0), p_1(*|0)) and F(p_0(*|1), p_1(*|1)).
double avg_fidelity_observables(const ConditionalProbs& cp);

// Both argument orders of an averaged divergence. `forward` keeps the order
// used by the fidelity analogue (e.g. S(p(*|0) || p(*|1))).
struct DivergencePair {
  Divergence forward;
  Divergence reverse;
};

struct AverageEntropies {
  Divergence noise;  // <S(E)>: S(reference || candidate) averaged over rows
  DivergencePair states;
  DivergencePair observables;
};

Divergence avg_relative_entropy_noise(const ConditionalProbs& reference, const ConditionalProbs& candidate);
DivergencePair avg_relative_entropy_states(const ConditionalProbs& cp);
DivergencePair avg_relative_entropy_observables(const ConditionalProbs& cp);
// States/observables pairs are evaluated on `candidate`.
AverageEntropies avg_relative_entropies(const ConditionalProbs& reference, const ConditionalProbs& candidate);

struct SurfacePoint {
  double theta;
  double value;
};

struct BalanceScan {
  double theta_star = 0.0;
  double min_value = 0.0;
  // True when the surface is flat (all values equal within 1e-12): every
  // theta is equally good and theta_star carries no information.
  bool degenerate = false;
  std::vector<SurfacePoint> surface;
};

// Uniform interior grid on (0, pi/2).
std::vector<double> default_theta_grid(std::size_t points = 1000);

// Minimizes |<F(|0>,|1>)> - <F(C0,C1)>| over the grid. Grid cells are
// evaluated on up to `workers` threads; the result does not depend on it.
BalanceScan theta_balance_scan(const NoiseParams& params, std::span<const double> grid, double phi = 0.0,
                               unsigned workers = 1);

}  // namespace qbc
