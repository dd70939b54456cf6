#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qbc/channel_models.hpp"
#include "qbc/errors.hpp"
#include "qbc/quantum_core.hpp"

using namespace qbc;

namespace {

bool close(const Matrix2& a, const Matrix2& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

Matrix2 diag(double a, double b) {
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("density_from_pure") {
  CHECK(close(density_from_pure(PureState::zero()).entries(), diag(1, 0), 1e-15));
  const auto d = density_from_pure(PureState::one(std::numbers::pi / 4, 0.0));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(std::abs(d(r, c) - 0.5) < 1e-15);
  CHECK(close(density_from_pure(PureState::one(std::numbers::pi / 2, 0.0)).entries(), diag(0, 1), 1e-15));
  CHECK_THROWS_AS(PureState(1.0, 0.1), ValidationError);
}

TEST_CASE("density matrix invariants are enforced") {
  Matrix2 m = diag(0.5, 0.5);
  m(0, 1) = 0.2;  // not Hermitian
  CHECK_THROWS_AS(DensityMatrix{m}, ValidationError);
  CHECK_THROWS_AS(DensityMatrix{diag(0.6, 0.6)}, ValidationError);
  CHECK_THROWS_AS(DensityMatrix{diag(1.2, -0.2)}, ValidationError);
  Matrix2 off = diag(0.5, 0.5);
  off(0, 1) = off(1, 0) = 0.6;  // eigenvalue -0.1
  CHECK_THROWS_AS(DensityMatrix{off}, ValidationError);
}

TEST_CASE("apply_channel") {
  const auto rho = DensityMatrix(diag(0.3, 0.7));
  CHECK(close(apply_channel(KrausChannel::identity(), rho).entries(), rho.entries(), 1e-15));
  const auto zero = density_from_pure(PureState::zero());
  CHECK(close(apply_channel(depolarizing(1.0), zero).entries(), diag(0.5, 0.5), 1e-15));
  CHECK(close(apply_channel(depolarizing(0.3), zero).entries(), diag(0.85, 0.15), 1e-15));
  CHECK_THROWS_AS(KrausChannel({0.5 * Matrix2::Identity()}), ValidationError);
}

TEST_CASE("measure_probability") {
  const StateGeometry g;
  const auto c0 = commitment_observable(0, g);
  CHECK(measure_probability(density_from_pure(PureState::zero()), c0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(measure_probability(density_from_pure(PureState::one(g.theta, g.phi)), c0, 0) ==
        doctest::Approx(0.5).epsilon(1e-15));
  for (Bit c : {0, 1})
    for (Bit r : {0, 1})
      CHECK(measure_probability(DensityMatrix::maximally_mixed(), commitment_observable(c, g), r) ==
            doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("commitment observables label outcomes as expected") {
  const StateGeometry g{0.6, 0.9};
  const auto c1 = commitment_observable(1, g);
  CHECK(measure_probability(density_from_pure(PureState::one(g.theta, g.phi)), c1, 1) == doctest::Approx(1.0));
  CHECK(measure_probability(density_from_pure(PureState::one_perp(g.theta, g.phi)), c1, 0) ==
        doctest::Approx(1.0));
  CHECK(std::abs(PureState::one(g.theta, g.phi).vector().dot(PureState::one_perp(g.theta, g.phi).vector())) < 1e-15);
}

TEST_CASE("born_sample") {
  const StateGeometry g;
  const auto c0 = commitment_observable(0, g);
  Rng rng(5);
  const auto zero = density_from_pure(PureState::zero());
  for (int i = 0; i < 1000; ++i) REQUIRE(born_sample(zero, c0, rng) == 0);

  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += born_sample(DensityMatrix::maximally_mixed(), c0, rng) == 0;
  CHECK(std::abs(zeros / double(n) - 0.5) < 0.01);

  Rng a(77), b(77);
  for (int i = 0; i < 200; ++i)
    REQUIRE(born_sample(DensityMatrix::maximally_mixed(), c0, a) ==
            born_sample(DensityMatrix::maximally_mixed(), c0, b));
}

TEST_CASE("property: channels preserve trace and Hermiticity") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const KrausChannel ch(oracle::random_kraus(gen, 1 + trial % 4));
    const DensityMatrix rho(oracle::random_density(gen));
    const auto out = apply_channel(ch, rho).entries();
    REQUIRE(std::abs(out.trace() - 1.0) < 1e-12);
    REQUIRE((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("property: sequential application equals the composed channel") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 300; ++trial) {
    const KrausChannel first(oracle::random_kraus(gen, 2));
    const KrausChannel second(oracle::random_kraus(gen, 3));
    const DensityMatrix rho(oracle::random_density(gen));
    const auto seq = apply_channel(second, apply_channel(first, rho));
    const auto comp = apply_channel(compose(second, first), rho);
    REQUIRE(close(seq.entries(), comp.entries(), 1e-10));
  }
}

TEST_CASE("property: outcome probabilities sum to one") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> angle(0.01, std::numbers::pi / 2 - 0.01);
  for (int trial = 0; trial < 300; ++trial) {
    const StateGeometry g{angle(gen), 4 * angle(gen)};
    const DensityMatrix rho(oracle::random_density(gen));
    for (Bit c : {0, 1}) {
      const auto basis = commitment_observable(c, g);
      REQUIRE(std::abs(measure_probability(rho, basis, 0) + measure_probability(rho, basis, 1) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(StateGeometry({0.0, 0.0}).validate(), ValidationError);
  CHECK_THROWS_AS(StateGeometry({std::numbers::pi / 2, 0.0}).validate(), ValidationError);
  CHECK_NOTHROW(StateGeometry({0.3, 5.0}).validate());
  CHECK_THROWS_AS(require_bit(2, "bit"), ValidationError);
}
