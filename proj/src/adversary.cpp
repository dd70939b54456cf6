#include "qbc/adversary.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qbc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

void require_white_noise_room(double extra, double p_d, const char* what) {
  if (!(extra >= 0.0 && extra <= 1.0 - p_d + 1e-15))
    throw ValidationError(std::string(what) + " must lie in [0, 1 - p_d]");
}

double immediate_extra(const attack::Immediate& im) {
  return std::visit(overloaded{[](const attack::Breidbart&) { return 0.0; },
                               [](const attack::AddedNoise& a) { return a.delta_p_d; }},
                    im);
}

std::string immediate_tag(const attack::Immediate& im) {
  return std::visit(overloaded{[](const attack::Breidbart&) { return std::string("breidbart"); },
                               [](const attack::AddedNoise& a) {
                                 std::ostringstream os;
                                 os << "added_noise(" << a.delta_p_d << ")";
                                 return os.str();
                               }},
                    im);
}

}  // namespace

void AttackModel::validate(double p_d) const {
  std::visit(overloaded{[](const attack::Breidbart&) {},
                        [&](const attack::AddedNoise& a) { require_white_noise_room(a.delta_p_d, p_d, "delta_p_d"); },
                        [&](const attack::Memory& m) { require_white_noise_room(m.p_d_dt, p_d, "p_d_dt"); },
                        [&](const attack::BoundedMemory& b) {
                          require_unit(b.nu, "nu");
                          require_white_noise_room(b.stored.p_d_dt, p_d, "p_d_dt");
                          require_white_noise_room(immediate_extra(b.immediate), p_d, "delta_p_d");
                        },
                        [&](const attack::NonDemolition& n) {
                          require_unit(n.p_nd, "p_nd");
                          require_white_noise_room(n.memory.p_d_dt, p_d, "p_d_dt");
                          require_white_noise_room(immediate_extra(n.fallback), p_d, "delta_p_d");
                        }},
             kind_);
}

std::string AttackModel::tag() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const attack::Breidbart&) { os << "breidbart"; },
                        [&](const attack::AddedNoise& a) { os << "added_noise(" << a.delta_p_d << ")"; },
                        [&](const attack::Memory& m) { os << "memory(" << m.p_d_dt << ")"; },
                        [&](const attack::BoundedMemory& b) {
                          os << "bounded_memory(" << b.nu << ", memory(" << b.stored.p_d_dt << "), "
                             << immediate_tag(b.immediate) << ")";
                        },
                        [&](const attack::NonDemolition& n) {
                          os << "nondemolition(" << n.p_nd << ", memory(" << n.memory.p_d_dt << "), "
                             << immediate_tag(n.fallback) << ")";
                        }},
             kind_);
  return os.str();
}

double helstrom_error(double theta) { return 0.5 * (1.0 - std::sin(theta)); }

MeasurementBasis discrimination_basis(const StateGeometry& g) {
  // |+> and |-> along the bisector and anti-bisector of |0>, |1>; they are
  // orthogonal because the overlap <0|1> is real.
  const Vector2 zero = PureState::zero().vector();
  const Vector2 one = PureState::one(g.theta, g.phi).vector();
  const Vector2 plus = (zero + one).normalized();
  const Vector2 minus = (zero - one).normalized();
  const Vector2 t0 = (plus + minus) / std::numbers::sqrt2;
  const Vector2 t1 = (plus - minus) / std::numbers::sqrt2;
  return MeasurementBasis::from_states(PureState(t0(0), t0(1)), PureState(t1(0), t1(1)));
}

KrausChannel cheating_state_channel(Bit b, const NoiseParams& params, const StateGeometry& g, double extra_p_d) {
  return compose(transmission_stage(params, extra_p_d), preparation_stage(b, params, g));
}

ConditionalProbs cheating_cond_probs(const NoiseParams& params, const StateGeometry& g, double extra_p_d) {
  params.validate();
  const auto basis = discrimination_basis(g);
  ConditionalProbs cp;
  for (Bit b : {0, 1}) {
    const auto rho =
        apply_channel(cheating_state_channel(b, params, g, extra_p_d), density_from_pure(PureState::prepared(b, g)));
    const double p0 = measure_probability(rho, basis, 0);
    cp.set_row(0, b, p0);
    cp.set_row(1, b, p0);
  }
  return cp;
}

double optimal_added_noise(double p_d) {
  require_unit(p_d, "p_d");
  return (1.0 - 1.0 / std::numbers::sqrt2) * (1.0 - p_d);
}

ConditionalProbs memory_attack_probs(const NoiseParams& params, double p_d_dt, const StateGeometry& g) {
  params.validate();
  require_white_noise_room(p_d_dt, params.p_d(), "p_d_dt");
  ConditionalProbs cp;
  for (Bit c : {0, 1}) {
    const auto basis = commitment_observable(c, g);
    for (Bit b : {0, 1}) {
      const auto ch = compose({measurement_stage(c, params, g), transmission_stage(params, p_d_dt),
                               preparation_stage(b, params, g)});
      const auto rho = apply_channel(ch, density_from_pure(PureState::prepared(b, g)));
      cp.set_row(c, b, measure_probability(rho, basis, 0));
    }
  }
  return cp;
}

ConditionalProbs bounded_memory_probs(double nu, const ConditionalProbs& honest, const ConditionalProbs& cheat) {
  require_unit(nu, "nu");
  ConditionalProbs mix;
  for (Bit c : {0, 1})
    for (Bit r : {0, 1})
      for (Bit b : {0, 1}) mix.at(c, r, b) = nu * honest(c, r, b) + (1.0 - nu) * cheat(c, r, b);
  return mix;
}

AttackModel nondemolition_reduction(double p_nd, const attack::Memory& memory, attack::Immediate fallback) {
  require_unit(p_nd, "p_nd");
  if (p_nd == 1.0) return AttackModel(memory);
  if (p_nd == 0.0) {
    if (std::holds_alternative<attack::AddedNoise>(fallback)) return AttackModel(std::get<attack::AddedNoise>(fallback));
    return AttackModel(attack::Breidbart{});
  }
  return AttackModel(attack::BoundedMemory{p_nd, memory, fallback});
}

ConditionalProbs attack_cond_probs(const AttackModel& model, const NoiseParams& params, const StateGeometry& g) {
  return std::visit(
      overloaded{[&](const attack::Breidbart&) { return cheating_cond_probs(params, g); },
                 [&](const attack::AddedNoise& a) { return cheating_cond_probs(params, g, a.delta_p_d); },
                 [&](const attack::Memory& m) { return memory_attack_probs(params, m.p_d_dt, g); },
                 [&](const attack::BoundedMemory& b) {
                   return bounded_memory_probs(b.nu, memory_attack_probs(params, b.stored.p_d_dt, g),
                                               cheating_cond_probs(params, g, immediate_extra(b.immediate)));
                 },
                 [&](const attack::NonDemolition& n) {
                   return attack_cond_probs(nondemolition_reduction(n.p_nd, n.memory, n.fallback), params, g);
                 }},
      model.kind());
}

}  // namespace qbc
