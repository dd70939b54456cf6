#include "qbc/verifier.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qbc/adversary.hpp"
#include "qbc/errors.hpp"

namespace qbc {
namespace {

constexpr double kMeanTie = 1e-12;
constexpr std::size_t kGridSteps = 1000;

double grid_point(std::size_t i) { return static_cast<double>(i) / static_cast<double>(kGridSteps); }

}  // namespace

std::optional<double> Tally::q(Bit r, Bit b) const {
  require_bit(r, "r");
  require_bit(b, "b");
  const auto nb = n_b(b);
  if (nb == 0) return std::nullopt;
  return static_cast<double>(n[r][b]) / static_cast<double>(nb);
}

Tally tally(const SessionTranscript& t, std::span<const Bit> bob_secret) {
  if (t.index_map.size() != t.outcomes.size()) throw ValidationError("tally: index map and outcomes differ in length");
  Tally out;
  out.n_pulses = bob_secret.size();
  for (std::size_t i = 0; i < t.outcomes.size(); ++i) {
    const auto k = t.index_map[i];
    if (k >= bob_secret.size()) throw ValidationError("tally: index map points past Bob's secret");
    const Bit b = bob_secret[k];
    const Bit r = t.outcomes[i];
    require_bit(b, "secret bit");
    require_bit(r, "outcome");
    ++out.n[r][b];
  }
  return out;
}

Tally tally(const SessionTranscript& t) { return tally(t, t.bob_bits); }

double log_binomial_likelihood(std::uint64_t n, std::uint64_t k, double p) {
  if (k > n) throw ValidationError("binomial likelihood: k exceeds n");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binomial likelihood: p outside [0, 1]");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return k == n ? 0.0 : kNegInf;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) + kd * std::log(p) +
         (nd - kd) * std::log1p(-p);
}

double binomial_likelihood(std::uint64_t n, std::uint64_t k, double p) {
  return std::exp(log_binomial_likelihood(n, k, p));
}

double binomial_cdf(std::uint64_t n, std::uint64_t k, double p) {
  if (k >= n) return 1.0;
  double sum = 0.0;
  for (std::uint64_t j = 0; j <= k; ++j) sum += binomial_likelihood(n, j, p);
  return std::min(sum, 1.0);
}

double normal_cdf(double x, double mean, double sigma) {
  if (sigma == 0.0) return x < mean ? 0.0 : 1.0;
  return 0.5 * std::erfc(-(x - mean) / (sigma * std::numbers::sqrt2));
}

NormalParams normal_params(double p, std::uint64_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("normal_params: p outside [0, 1]");
  if (n == 0) throw ValidationError("normal_params: n must be positive");
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

void Thresholds::validate() const {
  if (!(alpha_sigmas > 0.0)) throw ValidationError("alpha_sigmas must be positive");
  if (!(beta_sigmas > 0.0)) throw ValidationError("beta_sigmas must be positive");
  if (!(min_yield_fraction >= 0.0 && min_yield_fraction <= 1.0))
    throw ValidationError("min_yield_fraction must lie in [0, 1]");
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::accept0:
      return "accept-0";
    case Decision::accept1:
      return "accept-1";
    case Decision::reject:
      return "reject";
  }
  return "reject";
}

Verdict accept_test(const Tally& t, Bit claimed_c, const ConditionalProbs& expected_honest,
                    const ConditionalProbs& expected_cheat, const Thresholds& th) {
  require_bit(claimed_c, "claimed commitment");
  th.validate();
  Verdict v;
  bool ok = true;

  if (th.min_yield_fraction > 0.0) {
    if (t.n_pulses == 0) throw ValidationError("yield check needs the pulse count N");
    const double yield = static_cast<double>(t.total()) / static_cast<double>(t.n_pulses);
    if (yield < th.min_yield_fraction) {
      ok = false;
      v.notes.push_back("yield " + std::to_string(yield) + " below minimum");
    }
  }

  for (Bit b : {0, 1}) {
    auto& d = v.rows[b];
    d.b = b;
    d.n = t.n_b(b);
    d.q0 = t.q(0, b);
    d.honest_mean = expected_honest(claimed_c, 0, b);
    d.cheat_mean = expected_cheat(claimed_c, 0, b);
    d.decisive = (b != claimed_c);
    if (d.n == 0) {
      ok = false;
      d.alpha_pass = false;
      v.notes.push_back("inconclusive: no outcomes for b=" + std::to_string(b));
      continue;
    }
    d.honest_sigma = normal_params(d.honest_mean, d.n).sigma;
    d.cheat_sigma = normal_params(d.cheat_mean, d.n).sigma;
    const double q = *d.q0;
    d.z_honest = d.honest_sigma > 0.0 ? (q - d.honest_mean) / d.honest_sigma : 0.0;
    d.z_cheat = d.cheat_sigma > 0.0 ? (q - d.cheat_mean) / d.cheat_sigma : 0.0;
    d.log_lik_honest = log_binomial_likelihood(d.n, t.n[0][b], d.honest_mean);
    d.log_lik_cheat = log_binomial_likelihood(d.n, t.n[0][b], d.cheat_mean);

    const double cc = th.continuity_correction ? 0.5 / static_cast<double>(d.n) : 0.0;
    const double band = th.alpha_sigmas * d.honest_sigma + cc;
    const double gap = d.cheat_mean - d.honest_mean;
    if (gap > kMeanTie) {
      d.alpha_pass = q <= d.honest_mean + band;
      if (d.decisive) d.beta_pass = q <= d.cheat_mean - th.beta_sigmas * d.cheat_sigma;
    } else if (gap < -kMeanTie) {
      d.alpha_pass = q >= d.honest_mean - band;
      if (d.decisive) d.beta_pass = q >= d.cheat_mean + th.beta_sigmas * d.cheat_sigma;
    } else {
      // Honest and cheat rows coincide: the row cannot separate them.
      d.alpha_pass = std::abs(q - d.honest_mean) <= band;
    }
    ok = ok && d.alpha_pass && d.beta_pass;
  }

  v.decision = ok ? (claimed_c == 0 ? Decision::accept0 : Decision::accept1) : Decision::reject;
  return v;
}

ThresholdSolution solve_pd_star(double alpha_sigmas, double beta_sigmas, std::uint64_t n_per_state, double theta) {
  Thresholds{alpha_sigmas, beta_sigmas}.validate();
  const StateGeometry g{theta, 0.0};
  g.validate();
  ThresholdSolution best;
  for (std::size_t i = 0; i <= kGridSteps; ++i) {
    const double p = grid_point(i);
    const auto params = NoiseParams::white_noise(p);
    const auto h = normal_params(closed_form_cond_probs(params, g)(0, 1, 1), n_per_state);
    const auto ch = normal_params(cheating_cond_probs(params, g)(0, 1, 1), n_per_state);
    const double slack = (ch.mean - beta_sigmas * ch.sigma) - (h.mean + alpha_sigmas * h.sigma);
    if (slack >= 0.0) best = {p, slack};
  }
  return best;
}

ThresholdSolution solve_pd_delta_star(double p_d, double alpha_sigmas, double beta_sigmas,
                                      std::uint64_t n_per_state, double theta) {
  Thresholds{alpha_sigmas, beta_sigmas}.validate();
  if (!(p_d >= 0.0 && p_d <= 1.0)) throw ValidationError("p_d must lie in [0, 1]");
  const StateGeometry g{theta, 0.0};
  g.validate();
  const auto params = NoiseParams::white_noise(p_d);
  const auto h = normal_params(closed_form_cond_probs(params, g)(0, 0, 0), n_per_state);
  for (std::size_t i = 0; i <= kGridSteps; ++i) {
    const double x = grid_point(i);
    if (x > 1.0 - p_d + 1e-12) break;
    const auto m = normal_params(memory_attack_probs(params, std::min(x, 1.0 - p_d), g)(0, 0, 0), n_per_state);
    const double slack = (h.mean - alpha_sigmas * h.sigma) - (m.mean + beta_sigmas * m.sigma);
    if (slack >= 0.0) return {x, slack};
  }
  return {};
}

}  // namespace qbc
