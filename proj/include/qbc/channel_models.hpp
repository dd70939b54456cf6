#pragma once

#include <array>

#include "qbc/quantum_core.hpp"

namespace qbc {

// Physical flips live in [0, 1/2]; the extended domain [0, 1] is only used to
// draw symmetric surfaces around 1/2.
enum class FlipDomain { physical, extended };

// How the three stage depolarizing probabilities merge into one channel.
// `additive` sums them (first order, the default); `exact` composes them,
// 1 - prod(1 - p_i).
enum class DepolarizingComposition { additive, exact };

struct NoiseParams {
  double p_d_prep = 0.0;
  double p_d_trans = 0.0;
  double p_d_meas = 0.0;
  double p_b_prep = 0.0;
  double p_b_meas = 0.0;
  double p_p_prep = 0.0;
  double p_p_meas = 0.0;
  double u_alpha = 0.0;   // [0, pi/2]
  double u_lambda = 0.0;  // [0, 2pi)
  double u_mu = 0.0;      // [0, 2pi)
  FlipDomain flip_domain = FlipDomain::physical;
  DepolarizingComposition composition = DepolarizingComposition::additive;

  static NoiseParams white_noise(double p_d);

  void validate() const;
  // Merged white-noise probability of the whole apparatus.
  double p_d() const;
  // Joint depolarizing/bit-flip coefficient b = 1 - (1 - 2 p_b^m)(1 - 2 p_b^p).
  double joint_b() const;
  // (1 - p_d)(1 - 2 p_b^m)(1 - 2 p_b^p): the common visibility factor.
  double visibility() const;
  bool uses_first_order_merge() const {
    return composition == DepolarizingComposition::additive &&
           ((p_d_prep > 0) + (p_d_trans > 0) + (p_d_meas > 0)) > 1;
  }
};

// p_c(r|b): probability of outcome r when measuring C_c on |b>.
class ConditionalProbs {
 public:
  ConditionalProbs() { table_.fill(0.0); }

  double operator()(Bit c, Bit r, Bit b) const { return table_[index(c, r, b)]; }
  double& at(Bit c, Bit r, Bit b) { return table_[index(c, r, b)]; }
  // (p_c(0|b), p_c(1|b))
  std::array<double, 2> row(Bit c, Bit b) const { return {(*this)(c, 0, b), (*this)(c, 1, b)}; }
  void set_row(Bit c, Bit b, double p0) {
    at(c, 0, b) = p0;
    at(c, 1, b) = 1.0 - p0;
  }

  void validate(double tol = 1e-12) const;
  double max_abs_difference(const ConditionalProbs& other) const;
  const std::array<double, 8>& raw() const { return table_; }

 private:
  static std::size_t index(Bit c, Bit r, Bit b);
  std::array<double, 8> table_;
};

KrausChannel depolarizing(double p);
// (1 - p) rho + p X rho X with X the bit flip of basis B_{basis_index}.
KrausChannel bit_flip(Bit basis_index, double p, const StateGeometry& g,
                      FlipDomain domain = FlipDomain::physical);
// (1 - p) rho + p Z rho Z with Z the phase flip of basis B_{basis_index}.
KrausChannel phase_flip(Bit basis_index, double p, const StateGeometry& g,
                        FlipDomain domain = FlipDomain::physical);
Matrix2 transmission_unitary(double u_alpha, double u_lambda, double u_mu);
KrausChannel unitary_channel(double u_alpha, double u_lambda, double u_mu);

// Stage channels. The merged depolarizing channel sits in the transmission
// stage; it commutes with the unitary. `extra_p_d` adds white noise to the
// merged budget (e.g. a noisy memory).
KrausChannel preparation_stage(Bit b, const NoiseParams& params, const StateGeometry& g);
KrausChannel transmission_stage(const NoiseParams& params, double extra_p_d = 0.0);
KrausChannel measurement_stage(Bit c, const NoiseParams& params, const StateGeometry& g);

// E_cb = measurement(c) o transmission o preparation(b).
KrausChannel pipeline(Bit c, Bit b, const NoiseParams& params, const StateGeometry& g);

ConditionalProbs ideal_cond_probs(const StateGeometry& g);
ConditionalProbs closed_form_cond_probs(const NoiseParams& params, const StateGeometry& g);
// Independent route: Kraus pipeline applied to |b><b| and the Born rule.
ConditionalProbs numeric_cond_probs(const NoiseParams& params, const StateGeometry& g);

// Unitary parameters (alpha, lambda, mu) of the transmission unitary written
// in basis B1 = {|1>, |1perp>}.
struct UnitaryAngles {
  double alpha;
  double lambda;
  double mu;
};
UnitaryAngles unitary_in_b1(const NoiseParams& params, const StateGeometry& g);

}  // namespace qbc
