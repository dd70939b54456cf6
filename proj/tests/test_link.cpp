#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qbc/errors.hpp"
#include "qbc/link.hpp"

using namespace qbc;

namespace {

LinkParams textbook() {
  LinkParams p;
  p.f_rep = 1e6;
  p.mu_photon = 0.1;
  p.alpha_abs = 0.05;
  p.length_km = 20;  // t_link = 0.1
  p.eta_det = 0.1;
  p.p_dark = 0.0;
  return p;
}

std::vector<Pulse> schedule(std::size_t n) {
  std::vector<Pulse> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = {k, static_cast<std::int64_t>(k) + 1, static_cast<Bit>(k % 2)};
  return s;
}

}  // namespace

TEST_CASE("t_link") {
  CHECK(t_link(0.05, 0.0) == 1.0);
  CHECK(t_link(0.05, 20.0) == doctest::Approx(0.1));
  CHECK(t_link(0.05, 40.0) == doctest::Approx(0.01));
}

TEST_CASE("raw_rate") {
  auto p = textbook();
  CHECK(raw_rate(p) == doctest::Approx(1e3));
  const double base = raw_rate(p);
  p.f_rep *= 2;
  CHECK(raw_rate(p) == doctest::Approx(2 * base));
  p.eta_det = 0.0;
  CHECK(raw_rate(p) == 0.0);
}

TEST_CASE("dark_count_correction") {
  auto p = textbook();
  CHECK(dark_count_correction(p) == 0.0);
  p.p_dark = 1e-5;
  CHECK(dark_count_correction(p) == doctest::Approx(0.005));
  p.mu_photon = 0.0;
  CHECK_THROWS_AS(dark_count_correction(p), ValidationError);

  ConditionalProbs cp;
  cp.set_row(0, 0, 0.95);
  cp.set_row(0, 1, 0.5);
  cp.set_row(1, 0, 0.5);
  cp.set_row(1, 1, 0.05);
  const auto out = apply_dark_count_correction(cp, 0.005);
  CHECK(out(0, 1, 0) == doctest::Approx(0.055));
  CHECK(out(1, 0, 1) == doctest::Approx(0.055));
  CHECK(out(0, 0, 1) == 0.5);
  CHECK(out(1, 0, 0) == 0.5);
  out.validate();
}

TEST_CASE("link parameter validation") {
  auto p = textbook();
  CHECK(p.validate().empty());
  p.mu_photon = 0.3;
  CHECK(p.validate().size() == 1);
  p.eta_det = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("transmit without photons yields only dark events") {
  auto p = textbook();
  p.mu_photon = 0.0;
  p.p_dark = 0.01;
  Rng rng(1);
  const auto events = transmit(schedule(20000), p, rng);
  CHECK_FALSE(events.empty());
  for (const auto& e : events) {
    REQUIRE(e.kind == EventKind::dark);
    REQUIRE(e.outcome.has_value());
  }
}

TEST_CASE("transmit detection rate follows the raw rate") {
  const auto p = textbook();
  Rng rng(2);
  const std::size_t n = 1000000;
  const auto events = transmit(schedule(n), p, rng);
  const double y = p.photon_yield();
  const double expected = n * y;
  const double sigma = std::sqrt(n * y * (1 - y));
  CHECK(std::abs(events.size() - expected) < 3 * sigma);
  // Arrival time of pulse k is its emission tick.
  for (const auto& e : events) REQUIRE(e.arrival_tick == static_cast<std::int64_t>(e.pulse_index) + 1);
}

TEST_CASE("transmit is deterministic under a seed") {
  auto p = textbook();
  p.p_dark = 1e-3;
  Rng a(9), b(9);
  const auto s = schedule(50000);
  const auto x = transmit(s, p, a);
  const auto y = transmit(s, p, b);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    REQUIRE(x[i].pulse_index == y[i].pulse_index);
    REQUIRE(x[i].outcome == y[i].outcome);
  }
}

TEST_CASE("event records round-trip") {
  auto p = textbook();
  p.p_dark = 1e-2;
  Rng rng(4);
  const auto events = transmit(schedule(5000), p, rng);
  std::stringstream ss;
  write_events(ss, events);
  const auto back = read_events(ss, 1);
  REQUIRE(back.size() == events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    REQUIRE(back[i].pulse_index == events[i].pulse_index);
    REQUIRE(back[i].arrival_tick == events[i].arrival_tick);
    REQUIRE(back[i].kind == events[i].kind);
    REQUIRE(back[i].outcome == events[i].outcome);
  }
  std::istringstream bad("1 0 photon\n2 x dark\n");
  try {
    read_events(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
