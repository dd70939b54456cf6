#include "qbc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace qbc {

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("distribution is empty");
  double sum = 0.0;
  for (double& p : probs_) {
    // Round-off from closed-form tables can leave -1e-17.
    if (p < 0.0 && p > -1e-12) p = 0.0;
    if (!(p >= 0.0)) throw ValidationError("distribution has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("distribution does not sum to 1");
}

Distribution row_distribution(const ConditionalProbs& cp, Bit c, Bit b) {
  const auto r = cp.row(c, b);
  return Distribution({r[0], r[1]});
}

double fidelity(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ValidationError("fidelity: distributions differ in length");
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) f += std::sqrt(p[i] * q[i]);
  return std::clamp(f, 0.0, 1.0);
}

Divergence relative_entropy(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw ValidationError("relative entropy: distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return Divergence::infinity();
    s += p[i] * std::log(p[i] / q[i]);
  }
  return {std::max(s, 0.0), false};
}

Divergence mean(std::span<const Divergence> values) {
  if (values.empty()) throw ValidationError("mean of no divergences");
  double sum = 0.0;
  for (const auto& d : values) {
    if (d.infinite) return Divergence::infinity();
    sum += d.value;
  }
  return {sum / static_cast<double>(values.size()), false};
}

double avg_fidelity_noise(const ConditionalProbs& ideal, const ConditionalProbs& noisy) {
  double sum = 0.0;
  for (Bit c : {0, 1})
    for (Bit b : {0, 1}) sum += fidelity(row_distribution(ideal, c, b), row_distribution(noisy, c, b));
  return sum / 4.0;
}

double avg_fidelity_states(const ConditionalProbs& cp) {
  return 0.5 * (fidelity(row_distribution(cp, 0, 0), row_distribution(cp, 0, 1)) +
                fidelity(row_distribution(cp, 1, 0), row_distribution(cp, 1, 1)));
}

double avg_fidelity_observables(const ConditionalProbs& cp) {
  return 0.5 * (fidelity(row_distribution(cp, 0, 0), row_distribution(cp, 1, 0)) +
                fidelity(row_distribution(cp, 0, 1), row_distribution(cp, 1, 1)));
}

Divergence avg_relative_entropy_noise(const ConditionalProbs& reference, const ConditionalProbs& candidate) {
  std::array<Divergence, 4> rows;
  std::size_t i = 0;
  for (Bit c : {0, 1})
    for (Bit b : {0, 1})
      rows[i++] = relative_entropy(row_distribution(reference, c, b), row_distribution(candidate, c, b));
  return mean(rows);
}

namespace {

DivergencePair averaged_pair(const ConditionalProbs& cp, std::array<std::array<Bit, 4>, 2> pairs) {
  // Each entry: {c_left, b_left, c_right, b_right}.
  std::array<Divergence, 2> fwd;
  std::array<Divergence, 2> rev;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& k = pairs[i];
    const auto left = row_distribution(cp, k[0], k[1]);
    const auto right = row_distribution(cp, k[2], k[3]);
    fwd[i] = relative_entropy(left, right);
    rev[i] = relative_entropy(right, left);
  }
  return {mean(fwd), mean(rev)};
}

}  // namespace

DivergencePair avg_relative_entropy_states(const ConditionalProbs& cp) {
  return averaged_pair(cp, {{{0, 0, 0, 1}, {1, 0, 1, 1}}});
}

DivergencePair avg_relative_entropy_observables(const ConditionalProbs& cp) {
  return averaged_pair(cp, {{{0, 0, 1, 0}, {0, 1, 1, 1}}});
}

AverageEntropies avg_relative_entropies(const ConditionalProbs& reference, const ConditionalProbs& candidate) {
  return {avg_relative_entropy_noise(reference, candidate), avg_relative_entropy_states(candidate),
          avg_relative_entropy_observables(candidate)};
}

std::vector<double> default_theta_grid(std::size_t points) {
  std::vector<double> grid(points);
  const double step = (std::numbers::pi / 2) / static_cast<double>(points + 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = step * static_cast<double>(i + 1);
  return grid;
}

BalanceScan theta_balance_scan(const NoiseParams& params, std::span<const double> grid, double phi,
                               unsigned workers) {
  if (grid.empty()) throw ValidationError("theta grid is empty");
  params.validate();

  BalanceScan scan;
  scan.surface.resize(grid.size());
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const StateGeometry g{grid[i], phi};
      g.validate();
      const auto cp = closed_form_cond_probs(params, g);
      scan.surface[i] = {grid[i], std::abs(avg_fidelity_states(cp) - avg_fidelity_observables(cp))};
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(grid.size())));
  const std::size_t chunk = (grid.size() + workers - 1) / workers;
  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < grid.size(); begin += chunk)
    jobs.push_back(std::async(std::launch::async, fill, begin, std::min(grid.size(), begin + chunk)));
  for (auto& j : jobs) j.get();

  auto best = std::min_element(scan.surface.begin(), scan.surface.end(),
                               [](const SurfacePoint& a, const SurfacePoint& b) { return a.value < b.value; });
  auto worst = std::max_element(scan.surface.begin(), scan.surface.end(),
                                [](const SurfacePoint& a, const SurfacePoint& b) { return a.value < b.value; });
  scan.theta_star = best->theta;
  scan.min_value = best->value;
  scan.degenerate = (worst->value - best->value) <= 1e-12;
  return scan;
}

}  // namespace qbc
