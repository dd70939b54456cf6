#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qbc/channel_models.hpp"
#include "qbc/errors.hpp"

using namespace qbc;

namespace {

bool close(const Matrix2& a, const Matrix2& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

const StateGeometry kPi4{std::numbers::pi / 4, 0.0};

NoiseParams random_params(std::mt19937_64& gen, bool with_unitary) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NoiseParams p;
  p.p_d_prep = 0.3 * u(gen);
  p.p_d_trans = 0.3 * u(gen);
  p.p_d_meas = 0.3 * u(gen);
  p.p_b_prep = 0.5 * u(gen);
  p.p_b_meas = 0.5 * u(gen);
  p.p_p_prep = 0.5 * u(gen);
  p.p_p_meas = 0.5 * u(gen);
  if (with_unitary) {
    p.u_alpha = std::numbers::pi / 2 * u(gen);
    p.u_lambda = 2 * std::numbers::pi * u(gen) * 0.999;
    p.u_mu = 2 * std::numbers::pi * u(gen) * 0.999;
  }
  return p;
}

}  // namespace

TEST_CASE("depolarizing") {
  const auto zero = density_from_pure(PureState::zero());
  const auto one = density_from_pure(PureState::one(0.4, 1.1));
  CHECK(close(apply_channel(depolarizing(0.0), one).entries(), one.entries(), 1e-15));
  CHECK(close(apply_channel(depolarizing(1.0), one).entries(), 0.5 * Matrix2::Identity(), 1e-15));
  const auto out = apply_channel(depolarizing(0.2), zero);
  CHECK(out(0, 0).real() == doctest::Approx(0.9));
  CHECK(out(1, 1).real() == doctest::Approx(0.1));
  CHECK_THROWS_AS(depolarizing(1.1), ValidationError);
  CHECK_THROWS_AS(depolarizing(-0.1), ValidationError);
}

TEST_CASE("bit_flip") {
  const auto zero = density_from_pure(PureState::zero());
  CHECK(close(apply_channel(bit_flip(0, 0.0, kPi4), zero).entries(), zero.entries(), 1e-15));
  CHECK(close(apply_channel(bit_flip(0, 0.5, kPi4), zero).entries(), 0.5 * Matrix2::Identity(), 1e-15));
  const auto one = PureState::one(kPi4.theta, kPi4.phi);
  const auto out = apply_channel(bit_flip(1, 0.3, kPi4), density_from_pure(one));
  const Complex stay = one.vector().adjoint() * out.entries() * one.vector();
  CHECK(stay.real() == doctest::Approx(0.7));
  CHECK_THROWS_AS(bit_flip(0, 0.6, kPi4), ValidationError);
  CHECK_NOTHROW(bit_flip(0, 0.9, kPi4, FlipDomain::extended));
}

TEST_CASE("phase_flip") {
  const auto rho = DensityMatrix::diagonal(0.3);
  CHECK(close(apply_channel(phase_flip(0, 0.0, kPi4), rho).entries(), rho.entries(), 1e-15));
  CHECK(close(apply_channel(phase_flip(0, 0.4, kPi4), rho).entries(), rho.entries(), 1e-15));
  const auto out = apply_channel(phase_flip(0, 0.5, kPi4), density_from_pure(PureState::one(kPi4.theta, 0.0)));
  CHECK(std::abs(out(0, 1)) < 1e-15);
  CHECK(std::abs(out(1, 0)) < 1e-15);
}

TEST_CASE("unitary_channel") {
  const auto zero = density_from_pure(PureState::zero());
  CHECK(close(apply_channel(unitary_channel(0, 0, 0), zero).entries(), zero.entries(), 1e-15));
  const auto flipped = apply_channel(unitary_channel(std::numbers::pi / 2, 0, 0), zero);
  CHECK(flipped(1, 1).real() == doctest::Approx(1.0));
  const double alpha = std::asin(std::sqrt(0.1));
  const auto out = apply_channel(unitary_channel(alpha, 0.7, 2.1), zero);
  CHECK(measure_probability(out, commitment_observable(0, kPi4), 1) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("pipeline") {
  const NoiseParams none;
  std::mt19937_64 gen0(1);
  for (Bit c : {0, 1})
    for (Bit b : {0, 1}) {
      const auto ch = pipeline(c, b, none, kPi4);
      const DensityMatrix rho(oracle::random_density(gen0));
      CHECK(close(apply_channel(ch, rho).entries(), rho.entries(), 1e-14));
    }
  const auto only = NoiseParams::white_noise(0.35);
  std::mt19937_64 gen(3);
  const DensityMatrix rho(oracle::random_density(gen));
  CHECK(close(apply_channel(pipeline(0, 1, only, kPi4), rho).entries(),
              apply_channel(depolarizing(0.35), rho).entries(), 1e-14));
  NoiseParams over;
  over.p_d_prep = 0.6;
  over.p_d_trans = 0.6;
  CHECK_THROWS_AS(pipeline(0, 0, over, kPi4), ValidationError);
}

TEST_CASE("closed_form_cond_probs examples") {
  const auto ideal = closed_form_cond_probs(NoiseParams{}, kPi4);
  CHECK(ideal(0, 0, 0) == doctest::Approx(1.0));
  CHECK(ideal(0, 0, 1) == doctest::Approx(0.5));
  CHECK(ideal(1, 1, 1) == doctest::Approx(1.0));
  CHECK(ideal.max_abs_difference(ideal_cond_probs(kPi4)) < 1e-15);

  CHECK(closed_form_cond_probs(NoiseParams::white_noise(0.15), kPi4)(0, 0, 0) == doctest::Approx(0.925));

  NoiseParams flips;
  flips.p_b_prep = 0.25;
  flips.p_b_meas = 0.25;
  const auto via_flips = closed_form_cond_probs(flips, kPi4);
  const auto via_white = closed_form_cond_probs(NoiseParams::white_noise(0.75), kPi4);
  CHECK(via_flips.max_abs_difference(via_white) < 1e-12);
  CHECK(flips.joint_b() == doctest::Approx(0.75));
}

TEST_CASE("numeric_cond_probs examples") {
  const StateGeometry g{0.5, 0.3};
  CHECK(numeric_cond_probs(NoiseParams{}, g).max_abs_difference(ideal_cond_probs(g)) < 1e-12);
  NoiseParams phase;
  phase.p_p_prep = 0.3;
  phase.p_p_meas = 0.2;
  const auto t = numeric_cond_probs(phase, g);
  CHECK(t(0, 0, 0) == doctest::Approx(1.0));
  CHECK(t(0, 0, 1) == doctest::Approx(std::pow(std::cos(0.5), 2)));
}

TEST_CASE("property: closed form matches the Kraus pipeline") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_params(gen, true);
    const StateGeometry g{0.02 + (std::numbers::pi / 2 - 0.04) * u(gen), 2 * std::numbers::pi * u(gen)};
    const auto closed = closed_form_cond_probs(p, g);
    closed.validate();
    worst = std::max(worst, closed.max_abs_difference(numeric_cond_probs(p, g)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("property: label exchange maps the C0 table onto C1") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.05, std::numbers::pi / 2 - 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_params(gen, false);
    const StateGeometry g{u(gen), 0.0};
    const auto t = closed_form_cond_probs(p, g);
    for (Bit r : {0, 1})
      for (Bit b : {0, 1}) REQUIRE(std::abs(t(0, r, b) - t(1, 1 - r, 1 - b)) < 1e-12);
  }
}

TEST_CASE("property: channels within one stage commute") {
  std::mt19937_64 gen(8);
  const StateGeometry g{0.7, 0.4};
  for (Bit basis : {0, 1}) {
    const auto d = depolarizing(0.2);
    const auto bf = bit_flip(basis, 0.3, g);
    const auto pf = phase_flip(basis, 0.15, g);
    const DensityMatrix rho(oracle::random_density(gen));
    const auto ref = apply_channel(compose({d, bf, pf}), rho).entries();
    CHECK(close(apply_channel(compose({bf, d, pf}), rho).entries(), ref, 1e-12));
    CHECK(close(apply_channel(compose({pf, bf, d}), rho).entries(), ref, 1e-12));
    CHECK(close(apply_channel(compose({bf, pf, d}), rho).entries(), ref, 1e-12));
  }
}

TEST_CASE("property: flips need not commute with the unitary") {
  const auto u = unitary_channel(0.4, 0.3, 1.2);
  const auto bf = bit_flip(0, 0.3, kPi4);
  const auto rho = density_from_pure(PureState::one(0.3, 0.2));
  const auto a = apply_channel(compose(u, bf), rho).entries();
  const auto b = apply_channel(compose(bf, u), rho).entries();
  CHECK((a - b).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("property: matched-row probability falls with white noise") {
  double prev = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    const double v = closed_form_cond_probs(NoiseParams::white_noise(p), kPi4)(0, 0, 0);
    REQUIRE(v == doctest::Approx(1.0 - p / 2));
    REQUIRE(v < prev);
    prev = v;
  }
}

TEST_CASE("stage white noise merges additively by default") {
  NoiseParams p;
  p.p_d_prep = 0.1;
  p.p_d_trans = 0.2;
  p.p_d_meas = 0.05;
  CHECK(p.p_d() == doctest::Approx(0.35));
  CHECK(p.uses_first_order_merge());
  p.composition = DepolarizingComposition::exact;
  CHECK(p.p_d() == doctest::Approx(1 - 0.9 * 0.8 * 0.95));
  CHECK_FALSE(p.uses_first_order_merge());
  // Exact composition is what sequential depolarizing channels produce.
  const auto rho = density_from_pure(PureState::zero());
  const auto seq = apply_channel(compose({depolarizing(0.05), depolarizing(0.2), depolarizing(0.1)}), rho);
  CHECK(close(seq.entries(), apply_channel(depolarizing(p.p_d()), rho).entries(), 1e-14));
}

TEST_CASE("noise parameter validation") {
  NoiseParams p;
  p.p_b_prep = 0.6;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.flip_domain = FlipDomain::extended;
  CHECK_NOTHROW(p.validate());
  NoiseParams q;
  q.u_lambda = 2 * std::numbers::pi;
  CHECK_THROWS_AS(q.validate(), ValidationError);
  NoiseParams r;
  r.u_alpha = 2.0;
  CHECK_THROWS_AS(r.validate(), ValidationError);
}
