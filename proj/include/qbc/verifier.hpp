#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbc/channel_models.hpp"
#include "qbc/protocol.hpp"

namespace qbc {

struct Tally {
  // n[r][b] = n(r|b)
  std::array<std::array<std::uint64_t, 2>, 2> n{};
  std::uint64_t n_pulses = 0;  // N, for the optional yield check

  std::uint64_t n_b(Bit b) const { return n[0][b] + n[1][b]; }
  std::uint64_t total() const { return n_b(0) + n_b(1); }
  // q(r|b); empty when n(b) = 0.
  std::optional<double> q(Bit r, Bit b) const;
};

Tally tally(const SessionTranscript& t, std::span<const Bit> bob_secret);
// Uses the transcript's own record of Bob's bits.
Tally tally(const SessionTranscript& t);

double log_binomial_likelihood(std::uint64_t n, std::uint64_t k, double p);
double binomial_likelihood(std::uint64_t n, std::uint64_t k, double p);
// P(K <= k) for K ~ B(n, p).
double binomial_cdf(std::uint64_t n, std::uint64_t k, double p);
double normal_cdf(double x, double mean = 0.0, double sigma = 1.0);

struct NormalParams {
  double mean;
  double sigma;
};
// Fraction-of-counts convention: mean p, sigma sqrt(p (1 - p) / n).
NormalParams normal_params(double p, std::uint64_t n);

struct Thresholds {
  double alpha_sigmas = 2.0;
  double beta_sigmas = 2.0;
  // Reject when n / N falls below this fraction; 0 disables the check.
  double min_yield_fraction = 0.0;
  // Widen the acceptance band by half a count (1 / (2 n)) on the honest side.
  bool continuity_correction = true;

  void validate() const;
};

enum class Decision { accept0, accept1, reject };
std::string to_string(Decision d);

struct RowDiagnostic {
  Bit b = 0;
  std::uint64_t n = 0;
  std::optional<double> q0;  // observed q(0|b)
  double honest_mean = 0.0;
  double honest_sigma = 0.0;
  double cheat_mean = 0.0;
  double cheat_sigma = 0.0;
  double z_honest = 0.0;  // (q0 - honest_mean) / honest_sigma, 0 when sigma = 0
  double z_cheat = 0.0;
  double log_lik_honest = 0.0;
  double log_lik_cheat = 0.0;
  bool decisive = false;  // beta test applied
  bool alpha_pass = false;
  bool beta_pass = true;
};

struct Verdict {
  Decision decision = Decision::reject;
  std::array<RowDiagnostic, 2> rows;
  std::vector<std::string> notes;

  bool accepted() const { return decision != Decision::reject; }
};

// Accepts claimed_c when each row b passes the alpha test against
// expected_honest(c, *, b). Rows where b != c also need the observation to sit
// beta_sigmas clear of the cheat mean, on the honest side.
Verdict accept_test(const Tally& t, Bit claimed_c, const ConditionalProbs& expected_honest,
                    const ConditionalProbs& expected_cheat, const Thresholds& th);

struct ThresholdSolution {
  std::optional<double> value;  // empty when nothing on the grid is feasible
  double slack = 0.0;           // constraint margin at `value`
};

// Largest white-noise p_d on a 1e-3 grid for which the cross row keeps
// honest and Breidbart outcome fractions apart:
// mu_h + k_alpha sigma_h <= mu_ch - k_beta sigma_ch.
ThresholdSolution solve_pd_star(double alpha_sigmas, double beta_sigmas, std::uint64_t n_per_state = 50,
                                double theta = std::numbers::pi / 4);

// Smallest memory noise p_d(dt) on a 1e-3 grid of [0, 1 - p_d] that Bob
// separates from honest noise p_d on the matched row:
// mu_dt + k_beta sigma_dt <= mu_h - k_alpha sigma_h.
ThresholdSolution solve_pd_delta_star(double p_d, double alpha_sigmas, double beta_sigmas,
                                      std::uint64_t n_per_state = 50, double theta = std::numbers::pi / 4);

}  // namespace qbc
