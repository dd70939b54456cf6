#include "qbc/channel_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qbc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_probability(double p, double hi, const char* what) {
  if (!(p >= 0.0 && p <= hi))
    throw ValidationError(std::string(what) + " out of range [0, " + std::to_string(hi) + "]: " +
                          std::to_string(p));
}

double flip_limit(FlipDomain d) { return d == FlipDomain::physical ? 0.5 : 1.0; }

Matrix2 outer(const PureState& a, const PureState& b) { return a.vector() * b.vector().adjoint(); }

Matrix2 flip_operator(Bit basis, const StateGeometry& g) {
  if (basis == 0) return pauli_x();
  const auto one = PureState::one(g.theta, g.phi);
  const auto one_perp = PureState::one_perp(g.theta, g.phi);
  return outer(one, one_perp) + outer(one_perp, one);
}

Matrix2 phase_operator(Bit basis, const StateGeometry& g) {
  if (basis == 0) return pauli_z();
  const auto one = PureState::one(g.theta, g.phi);
  const auto one_perp = PureState::one_perp(g.theta, g.phi);
  return outer(one, one) - outer(one_perp, one_perp);
}

KrausChannel pauli_mixture(const Matrix2& op, double p) {
  return KrausChannel({std::sqrt(1.0 - p) * Matrix2::Identity(), std::sqrt(p) * op});
}

// Closed-form C0 probabilities p_0(0|0) and p_0(0|1) for visibility factor k
// and transmission unitary (alpha, lambda, mu).
std::array<double, 2> c0_outcome_zero(double k, double alpha, double lambda, double mu, double theta,
                                      double phi) {
  const double c2a = std::cos(2.0 * alpha);
  const double s2a = std::sin(2.0 * alpha);
  const double c2t = std::cos(2.0 * theta);
  const double s2t = std::sin(2.0 * theta);
  const double p00 = 0.5 * (1.0 + k * c2a);
  const double p01 = 0.5 * (1.0 + k * c2a * c2t - k * s2a * s2t * std::cos(phi - lambda - mu));
  return {p00, p01};
}

}  // namespace

NoiseParams NoiseParams::white_noise(double p_d) {
  NoiseParams n;
  n.p_d_trans = p_d;
  return n;
}

void NoiseParams::validate() const {
  require_probability(p_d_prep, 1.0, "p_d_prep");
  require_probability(p_d_trans, 1.0, "p_d_trans");
  require_probability(p_d_meas, 1.0, "p_d_meas");
  const double lim = flip_limit(flip_domain);
  require_probability(p_b_prep, lim, "p_b_prep");
  require_probability(p_b_meas, lim, "p_b_meas");
  require_probability(p_p_prep, lim, "p_p_prep");
  require_probability(p_p_meas, lim, "p_p_meas");
  if (!(u_alpha >= 0.0 && u_alpha <= std::numbers::pi / 2))
    throw ValidationError("u_alpha out of range [0, pi/2]");
  if (!(u_lambda >= 0.0 && u_lambda < kTwoPi)) throw ValidationError("u_lambda out of range [0, 2pi)");
  if (!(u_mu >= 0.0 && u_mu < kTwoPi)) throw ValidationError("u_mu out of range [0, 2pi)");
  if (p_d() > 1.0 + 1e-15)
    throw ValidationError("merged p_d = p_d_prep + p_d_trans + p_d_meas exceeds 1: " + std::to_string(p_d()));
}

double NoiseParams::p_d() const {
  if (composition == DepolarizingComposition::exact)
    return 1.0 - (1.0 - p_d_prep) * (1.0 - p_d_trans) * (1.0 - p_d_meas);
  return p_d_prep + p_d_trans + p_d_meas;
}

double NoiseParams::joint_b() const { return 1.0 - (1.0 - 2.0 * p_b_meas) * (1.0 - 2.0 * p_b_prep); }

double NoiseParams::visibility() const { return (1.0 - std::min(p_d(), 1.0)) * (1.0 - joint_b()); }

std::size_t ConditionalProbs::index(Bit c, Bit r, Bit b) {
  require_bit(c, "c");
  require_bit(r, "r");
  require_bit(b, "b");
  return (static_cast<std::size_t>(c) << 2) | (static_cast<std::size_t>(r) << 1) | b;
}

void ConditionalProbs::validate(double tol) const {
  for (double v : table_)
    if (!(v >= -tol && v <= 1.0 + tol)) throw ValidationError("conditional probability outside [0, 1]");
  for (Bit c : {0, 1})
    for (Bit b : {0, 1})
      if (std::abs((*this)(c, 0, b) + (*this)(c, 1, b) - 1.0) > tol)
        throw ValidationError("conditional probability row does not sum to 1");
}

double ConditionalProbs::max_abs_difference(const ConditionalProbs& other) const {
  double m = 0.0;
  for (std::size_t i = 0; i < table_.size(); ++i) m = std::max(m, std::abs(table_[i] - other.table_[i]));
  return m;
}

KrausChannel depolarizing(double p) {
  require_probability(p, 1.0, "depolarizing p");
  const double w = std::sqrt(p / 4.0);
  return KrausChannel({std::sqrt(1.0 - 3.0 * p / 4.0) * Matrix2::Identity(), w * pauli_x(), w * pauli_y(),
                       w * pauli_z()});
}

KrausChannel bit_flip(Bit basis_index, double p, const StateGeometry& g, FlipDomain domain) {
  require_bit(basis_index, "basis index");
  require_probability(p, flip_limit(domain), "bit-flip p");
  return pauli_mixture(flip_operator(basis_index, g), p);
}

KrausChannel phase_flip(Bit basis_index, double p, const StateGeometry& g, FlipDomain domain) {
  require_bit(basis_index, "basis index");
  require_probability(p, flip_limit(domain), "phase-flip p");
  return pauli_mixture(phase_operator(basis_index, g), p);
}

Matrix2 transmission_unitary(double u_alpha, double u_lambda, double u_mu) {
  const double ca = std::cos(u_alpha);
  const double sa = std::sin(u_alpha);
  Matrix2 u;
  u << std::polar(ca, u_lambda), -std::polar(sa, -u_mu), std::polar(sa, u_mu), std::polar(ca, -u_lambda);
  return u;
}

KrausChannel unitary_channel(double u_alpha, double u_lambda, double u_mu) {
  return KrausChannel::unitary(transmission_unitary(u_alpha, u_lambda, u_mu));
}

KrausChannel preparation_stage(Bit b, const NoiseParams& params, const StateGeometry& g) {
  return compose(bit_flip(b, params.p_b_prep, g, params.flip_domain),
                 phase_flip(b, params.p_p_prep, g, params.flip_domain));
}

KrausChannel transmission_stage(const NoiseParams& params, double extra_p_d) {
  const double total = params.p_d() + extra_p_d;
  if (total > 1.0 + 1e-15)
    throw ValidationError("total white noise exceeds 1: " + std::to_string(total));
  return compose(depolarizing(std::min(total, 1.0)),
                 unitary_channel(params.u_alpha, params.u_lambda, params.u_mu));
}

KrausChannel measurement_stage(Bit c, const NoiseParams& params, const StateGeometry& g) {
  return compose(bit_flip(c, params.p_b_meas, g, params.flip_domain),
                 phase_flip(c, params.p_p_meas, g, params.flip_domain));
}

KrausChannel pipeline(Bit c, Bit b, const NoiseParams& params, const StateGeometry& g) {
  params.validate();
  return compose({measurement_stage(c, params, g), transmission_stage(params), preparation_stage(b, params, g)});
}

ConditionalProbs ideal_cond_probs(const StateGeometry& g) {
  const double c2 = std::cos(g.theta) * std::cos(g.theta);
  ConditionalProbs cp;
  cp.set_row(0, 0, 1.0);
  cp.set_row(0, 1, c2);
  cp.set_row(1, 0, 1.0 - c2);
  cp.set_row(1, 1, 0.0);
  return cp;
}

UnitaryAngles unitary_in_b1(const NoiseParams& params, const StateGeometry& g) {
  Matrix2 w;
  w.col(0) = PureState::one(g.theta, g.phi).vector();
  w.col(1) = PureState::one_perp(g.theta, g.phi).vector();
  const Matrix2 u = w.adjoint() * transmission_unitary(params.u_alpha, params.u_lambda, params.u_mu) * w;
  const double alpha = std::atan2(std::abs(u(1, 0)), std::abs(u(0, 0)));
  const double lambda = std::abs(u(0, 0)) > 0.0 ? std::arg(u(0, 0)) : 0.0;
  const double mu = std::abs(u(1, 0)) > 0.0 ? std::arg(u(1, 0)) : 0.0;
  return {alpha, lambda, mu};
}

ConditionalProbs closed_form_cond_probs(const NoiseParams& params, const StateGeometry& g) {
  params.validate();
  const double k = params.visibility();
  ConditionalProbs cp;

  const auto c0 = c0_outcome_zero(k, params.u_alpha, params.u_lambda, params.u_mu, g.theta, g.phi);
  cp.set_row(0, 0, c0[0]);
  cp.set_row(0, 1, c0[1]);

  // Exchanging the labels 0 <-> 1 maps the C0 expressions onto C1, with the
  // unitary re-expressed in B1 where |0> = cos(theta)|1> + sin(theta)|1perp>.
  const auto b1 = unitary_in_b1(params, g);
  const auto c1 = c0_outcome_zero(k, b1.alpha, b1.lambda, b1.mu, g.theta, 0.0);
  cp.set_row(1, 1, 1.0 - c1[0]);  // p_1(1|1) = P(0|0) in the exchanged frame
  cp.set_row(1, 0, 1.0 - c1[1]);  // p_1(1|0) = P(0|1) in the exchanged frame
  return cp;
}

ConditionalProbs numeric_cond_probs(const NoiseParams& params, const StateGeometry& g) {
  ConditionalProbs cp;
  for (Bit c : {0, 1}) {
    const auto basis = commitment_observable(c, g);
    for (Bit b : {0, 1}) {
      const auto rho = apply_channel(pipeline(c, b, params, g), density_from_pure(PureState::prepared(b, g)));
      cp.at(c, 0, b) = measure_probability(rho, basis, 0);
      cp.at(c, 1, b) = measure_probability(rho, basis, 1);
    }
  }
  return cp;
}

}  // namespace qbc
