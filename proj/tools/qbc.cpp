#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbc/adversary.hpp"
#include "qbc/errors.hpp"
#include "qbc/metrics.hpp"
#include "qbc/parallel.hpp"
#include "qbc/protocol.hpp"
#include "qbc/report.hpp"
#include "qbc/verifier.hpp"
#include "qbc/zk_demo.hpp"

namespace {

using namespace qbc;
using report::Cell;
using report::Table;

// Bad invocation that CLI11 cannot see (e.g. an empty grid): exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  unsigned workers = default_workers();

  double theta = std::numbers::pi / 4;
  double phi = 0.0;

  std::optional<double> pd;
  double pd_prep = 0.0, pd_meas = 0.0;
  double pb_prep = 0.0, pb_meas = 0.0, pp_prep = 0.0, pp_meas = 0.0;
  double u_alpha = 0.0, u_lambda = 0.0, u_mu = 0.0;
  bool extended_flips = false;
  bool exact_composition = false;

  bool check_oracle = false;

  std::string kind = "balance-pd";
  std::size_t points = 100;
  std::size_t p_points = 21;
  double step = 1e-3;

  std::size_t n = 50;
  double alpha_sigmas = 2.0;
  double beta_sigmas = 2.0;
  double min_yield = 0.0;
  bool no_continuity = false;

  std::string attack = "honest";
  int c = 0;
  std::optional<double> delta_pd;
  double pd_dt = 0.0;
  double nu = 0.5;
  double p_nd = 1.0;
  std::uint64_t n_pulses = 10000;
  std::size_t sessions = 1;
  std::string transcript;
  LinkParams link;

  std::string graph;
  std::size_t rounds = 20;
  bool cheat = false;
  bool rechoose = false;
  unsigned palette = 2;
  std::string backend = "ideal";
};

NoiseParams noise_from(const Options& o, double default_pd) {
  NoiseParams p;
  p.p_d_prep = o.pd_prep;
  p.p_d_trans = o.pd.value_or(default_pd);
  p.p_d_meas = o.pd_meas;
  p.p_b_prep = o.pb_prep;
  p.p_b_meas = o.pb_meas;
  p.p_p_prep = o.pp_prep;
  p.p_p_meas = o.pp_meas;
  p.u_alpha = o.u_alpha;
  p.u_lambda = o.u_lambda;
  p.u_mu = o.u_mu;
  p.flip_domain = o.extended_flips ? FlipDomain::extended : FlipDomain::physical;
  p.composition = o.exact_composition ? DepolarizingComposition::exact : DepolarizingComposition::additive;
  p.validate();
  if (p.uses_first_order_merge())
    std::cerr << "note: stage white-noise probabilities are merged additively (first order)\n";
  return p;
}

StateGeometry geometry_from(const Options& o) {
  StateGeometry g{o.theta, o.phi};
  g.validate();
  return g;
}

Thresholds thresholds_from(const Options& o) {
  Thresholds th{o.alpha_sigmas, o.beta_sigmas, o.min_yield, !o.no_continuity};
  th.validate();
  return th;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) throw UsageError("grid is empty");
  if (count == 1) return {lo};
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

Table cmd_probs(const Options& o) {
  const auto g = geometry_from(o);
  const auto noise = noise_from(o, 0.0);
  const auto closed = closed_form_cond_probs(noise, g);
  std::vector<std::string> cols{"c", "r", "b", "p"};
  std::optional<ConditionalProbs> numeric;
  if (o.check_oracle) {
    numeric = numeric_cond_probs(noise, g);
    cols.insert(cols.end(), {"p_numeric", "abs_diff"});
  }
  Table t(cols);
  for (Bit c : {0, 1})
    for (Bit b : {0, 1})
      for (Bit r : {0, 1}) {
        std::vector<Cell> row{std::int64_t{c}, std::int64_t{r}, std::int64_t{b}, closed(c, r, b)};
        if (numeric) {
          row.emplace_back((*numeric)(c, r, b));
          row.emplace_back(std::abs(closed(c, r, b) - (*numeric)(c, r, b)));
        }
        t.add_row(std::move(row));
      }
  if (numeric) std::cerr << "max |closed - numeric| = " << closed.max_abs_difference(*numeric) << '\n';
  return t;
}

Table cmd_sweep(const Options& o) {
  const auto base = noise_from(o, 0.0);
  if (o.points == 0 || o.p_points == 0) throw UsageError("grid is empty");

  if (o.kind == "balance-pd" || o.kind == "balance-pb") {
    const bool by_pd = o.kind == "balance-pd";
    const auto thetas = default_theta_grid(o.points);
    const auto ps = by_pd ? linspace(0.0, base.p_d_prep + base.p_d_meas > 0 ? 1.0 - base.p_d_prep - base.p_d_meas : 1.0,
                                      o.p_points)
                          : linspace(0.0, 1.0, o.p_points);
    const std::size_t cells = thetas.size() * ps.size();
    const auto values = parallel_map<double>(cells, o.workers, [&](std::size_t i) {
      NoiseParams p = base;
      const double x = ps[i / thetas.size()];
      if (by_pd) {
        p.p_d_trans = x;
      } else {
        p.p_b_meas = x;
        p.flip_domain = FlipDomain::extended;
      }
      const auto cp = closed_form_cond_probs(p, {thetas[i % thetas.size()], o.phi});
      return std::abs(avg_fidelity_states(cp) - avg_fidelity_observables(cp));
    });
    Table t({"theta", by_pd ? "p_d" : "p_b", "value"});
    for (std::size_t i = 0; i < cells; ++i) t.add_row({thetas[i % thetas.size()], ps[i / thetas.size()], values[i]});
    return t;
  }

  if (o.kind == "fidelity-noise") {
    const auto g = geometry_from(o);
    const auto pds = linspace(0.0, 1.0, o.p_points);
    const auto bs = linspace(0.0, 1.0, o.p_points);
    const auto ideal = ideal_cond_probs(g);
    const std::size_t cells = pds.size() * bs.size();
    const auto values = parallel_map<std::array<double, 3>>(cells, o.workers, [&](std::size_t i) {
      NoiseParams p;
      p.p_d_trans = pds[i / bs.size()];
      p.p_b_meas = bs[i % bs.size()] / 2.0;  // b = 2 p_b with a single flip stage
      p.flip_domain = FlipDomain::extended;
      const auto cp = closed_form_cond_probs(p, g);
      return std::array<double, 3>{avg_fidelity_noise(ideal, cp), avg_fidelity_states(cp),
                                   avg_fidelity_observables(cp)};
    });
    Table t({"p_d", "b", "fidelity_noise", "fidelity_states", "fidelity_observables"});
    for (std::size_t i = 0; i < cells; ++i)
      t.add_row({pds[i / bs.size()], bs[i % bs.size()], values[i][0], values[i][1], values[i][2]});
    return t;
  }

  if (o.kind == "entropy-added-noise") {
    const auto g = geometry_from(o);
    if (!(o.step > 0.0)) throw UsageError("step must be positive");
    const double room = 1.0 - base.p_d();
    const auto count = static_cast<std::size_t>(std::floor(room / o.step + 1e-9)) + 1;
    const auto honest = closed_form_cond_probs(base, g);
    const auto values = parallel_map<std::array<double, 3>>(count, o.workers, [&](std::size_t i) {
      const double delta = std::min(room, static_cast<double>(i) * o.step);
      const auto cheat = cheating_cond_probs(base, g, delta);
      const auto s = avg_relative_entropy_noise(honest, cheat);
      return std::array<double, 3>{delta, s.infinite ? INFINITY : s.value, avg_fidelity_noise(honest, cheat)};
    });
    Table t({"delta_p_d", "entropy_noise", "fidelity_noise"});
    std::size_t best = 0;
    for (std::size_t i = 0; i < count; ++i) {
      t.add_row({values[i][0], values[i][1], values[i][2]});
      if (values[i][1] < values[best][1]) best = i;
    }
    std::cerr << "minimum at delta_p_d = " << values[best][0] << " (closed form " << optimal_added_noise(base.p_d())
              << ")\n";
    return t;
  }
  throw UsageError("unknown sweep kind '" + o.kind + "'");
}

void add_threshold_row(Table& t, const std::string& table, double a, double b, const Options& o, double pd,
                       const ThresholdSolution& s, bool& infeasible) {
  if (!s.value) infeasible = true;
  t.add_row({table, a, b, static_cast<std::int64_t>(o.n), pd,
             s.value ? Cell{*s.value} : Cell{std::string("none")}, s.value ? Cell{s.slack} : Cell{std::string("none")}});
}

Table cmd_thresholds(const Options& o, bool custom, bool& infeasible) {
  if (o.n == 0) throw UsageError("--n must be positive");
  const double pd = o.pd.value_or(0.15);
  std::vector<std::pair<double, double>> rows{{2, 2}, {3, 1}, {3, 2}, {2, 1}};
  if (custom) rows = {{o.alpha_sigmas, o.beta_sigmas}};
  Table t({"table", "alpha_sigmas", "beta_sigmas", "n", "p_d", "value", "slack"});
  for (const auto& [a, b] : rows)
    add_threshold_row(t, "pd_star", a, b, o, 0.0, solve_pd_star(a, b, o.n, o.theta), infeasible);
  for (const auto& [a, b] : rows)
    add_threshold_row(t, "pd_delta_star", a, b, o, pd, solve_pd_delta_star(pd, a, b, o.n, o.theta), infeasible);
  return t;
}

AttackModel attack_from(const Options& o, double p_d) {
  const double delta = o.delta_pd.value_or(optimal_added_noise(p_d));
  AttackModel m;
  if (o.attack == "breidbart")
    m = AttackModel::Kind{attack::Breidbart{}};
  else if (o.attack == "added-noise")
    m = AttackModel::Kind{attack::AddedNoise{delta}};
  else if (o.attack == "memory")
    m = AttackModel::Kind{attack::Memory{o.pd_dt}};
  else if (o.attack == "bounded-memory")
    m = AttackModel::Kind{attack::BoundedMemory{o.nu, attack::Memory{o.pd_dt}, attack::Breidbart{}}};
  else if (o.attack == "nondemolition")
    m = AttackModel::Kind{attack::NonDemolition{o.p_nd, attack::Memory{o.pd_dt}, attack::Breidbart{}}};
  else
    throw UsageError("unknown attack '" + o.attack + "'");
  m.validate(p_d);
  return m;
}

Table cmd_session(const Options& o) {
  if (o.sessions == 0) throw UsageError("--sessions must be positive");
  ProtocolConfig cfg;
  cfg.geometry = geometry_from(o);
  cfg.noise = noise_from(o, 0.0);
  cfg.link = o.link;
  cfg.n_pulses = o.n_pulses;
  for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << '\n';
  const auto th = thresholds_from(o);
  const Bit c = static_cast<Bit>(o.c);
  require_bit(c, "--c");

  Strategy strategy = strategy::Honest{c};
  if (o.attack != "honest") strategy = strategy::Cheat{attack_from(o, cfg.noise.p_d()), c};

  const auto honest = closed_form_cond_probs(cfg.noise, cfg.geometry);
  const auto cheat = cheating_cond_probs(cfg.noise, cfg.geometry);
  const SeedStream seeds(o.seed);

  struct Result {
    SessionTranscript transcript;
    Tally tally;
    Verdict verdict;
  };
  const auto results = parallel_map<Result>(o.sessions, o.workers, [&](std::size_t i) {
    auto t = run_session(cfg, strategy, seeds.seed_for("session", i));
    auto ta = tally(t);
    auto v = accept_test(ta, t.claimed_commitment, honest, cheat, th);
    return Result{std::move(t), ta, std::move(v)};
  });

  if (!o.transcript.empty()) {
    std::ofstream f(o.transcript);
    if (!f) throw ValidationError("cannot write transcript to " + o.transcript);
    f << results.front().transcript.to_json() << '\n';
  }

  Table t({"session", "strategy", "claimed_c", "n_pulses", "n", "n_b0", "n_b1", "q0_b0", "q0_b1", "decision"});
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    accepted += r.verdict.accepted();
    auto q = [&](Bit b) { return r.tally.q(0, b) ? Cell{*r.tally.q(0, b)} : Cell{std::string("none")}; };
    t.add_row({static_cast<std::int64_t>(i), r.transcript.strategy_tag, std::int64_t{r.transcript.claimed_commitment},
               static_cast<std::int64_t>(cfg.n_pulses), static_cast<std::int64_t>(r.tally.total()),
               static_cast<std::int64_t>(r.tally.n_b(0)), static_cast<std::int64_t>(r.tally.n_b(1)), q(0), q(1),
               to_string(r.verdict.decision)});
  }
  std::cerr << "accepted " << accepted << " of " << results.size() << " sessions\n";
  return t;
}

Table cmd_zk(const Options& o) {
  if (o.graph.empty()) throw UsageError("--graph is required");
  if (o.sessions == 0) throw UsageError("--sessions must be positive");
  const auto g = zk::Graph::load(o.graph);

  zk::Coloring coloring;
  if (o.cheat) {
    coloring = zk::greedy_partial_coloring(g, o.palette);
  } else {
    auto found = zk::find_proper_coloring(g);
    if (!found) throw ValidationError("graph has no proper 3-coloring; run with --cheat");
    coloring = *found;
  }
  const double p = zk::proper_edge_fraction(g, coloring);
  const auto prover = o.rechoose ? zk::Prover::rechoose : zk::Prover::honest;

  std::optional<ProtocolConfig> qcfg;
  if (o.backend == "quantum") {
    qcfg.emplace();
    qcfg->geometry = geometry_from(o);
    qcfg->noise = noise_from(o, 0.0);
    qcfg->link = o.link;
    qcfg->n_pulses = o.n_pulses;
    qcfg->validate();
  } else if (o.backend != "ideal") {
    throw UsageError("unknown backend '" + o.backend + "'");
  }
  const auto th = thresholds_from(o);
  const SeedStream seeds(o.seed);

  const auto sessions = parallel_map<zk::SessionResult>(o.sessions, o.workers, [&](std::size_t i) {
    Rng rng = seeds.derive("zk", i);
    std::unique_ptr<zk::CommitmentBackend> backend;
    if (qcfg)
      backend = std::make_unique<zk::SimulatedQuantumBackend>(*qcfg, th);
    else
      backend = std::make_unique<zk::IdealLocker>();
    return zk::zk_session(g, coloring, o.rounds, *backend, rng, prover);
  });

  Table t({"session", "round", "u", "v", "color_u", "color_v", "accepted", "reason"});
  std::size_t passed = 0;
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    for (const auto& w : sessions[s].warnings) std::cerr << "warning: " << w << '\n';
    passed += sessions[s].accepted;
    for (std::size_t r = 0; r < sessions[s].rounds.size(); ++r) {
      const auto& rec = sessions[s].rounds[r];
      auto vertex = [&](bool first) -> Cell {
        if (!rec.challenge) return std::string("-");
        return static_cast<std::int64_t>(first ? rec.challenge->first : rec.challenge->second);
      };
      auto color = [&](bool first) -> Cell {
        if (!rec.opened) return std::string("-");
        return std::string(1, zk::color_letter(first ? rec.opened->first : rec.opened->second));
      };
      t.add_row({static_cast<std::int64_t>(s), static_cast<std::int64_t>(r), vertex(true), vertex(false), color(true),
                 color(false), std::int64_t{rec.accepted}, rec.reason});
    }
  }
  std::cerr << "proper edge fraction p = " << p << ", p^n = " << std::pow(p, static_cast<double>(o.rounds))
            << "; passed " << passed << " of " << sessions.size() << " sessions\n";
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Simulation and analysis of a two-state quantum bit commitment"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

  app.add_option("--seed", o.seed, "Master seed for all random streams");
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* geo = app.add_option_group("Geometry");
  geo->add_option("--theta", o.theta, "Angle between the two states");
  geo->add_option("--phi", o.phi, "Relative phase of |1>");

  auto* noise = app.add_option_group("Noise");
  noise->add_option("--pd,--pd-trans", o.pd, "White noise (transmission stage)");
  noise->add_option("--pd-prep", o.pd_prep);
  noise->add_option("--pd-meas", o.pd_meas);
  noise->add_option("--pb-prep", o.pb_prep);
  noise->add_option("--pb-meas", o.pb_meas);
  noise->add_option("--pp-prep", o.pp_prep);
  noise->add_option("--pp-meas", o.pp_meas);
  noise->add_option("--u-alpha", o.u_alpha);
  noise->add_option("--u-lambda", o.u_lambda);
  noise->add_option("--u-mu", o.u_mu);
  noise->add_flag("--extended-flips", o.extended_flips, "Allow flip probabilities up to 1");
  noise->add_flag("--exact-composition", o.exact_composition, "Compose stage white noise exactly");

  auto* link = app.add_option_group("Link");
  link->add_option("--f-rep", o.link.f_rep);
  link->add_option("--mu", o.link.mu_photon, "Mean photons per pulse");
  link->add_option("--alpha-abs", o.link.alpha_abs, "Absorption exponent per km");
  link->add_option("--length", o.link.length_km, "Link length in km");
  link->add_option("--eta", o.link.eta_det, "Detector efficiency");
  link->add_option("--p-dark", o.link.p_dark, "Dark-count probability per gate");

  auto* thr = app.add_option_group("Thresholds");
  auto* alpha_opt = thr->add_option("--alpha-sigmas", o.alpha_sigmas);
  auto* beta_opt = thr->add_option("--beta-sigmas", o.beta_sigmas);
  thr->add_option("--n", o.n, "Outcomes per prepared state for threshold solving");
  thr->add_option("--min-yield", o.min_yield, "Reject when n/N is below this fraction");
  thr->add_flag("--no-continuity", o.no_continuity, "Disable the half-count continuity correction");

  auto* probs = app.add_subcommand("probs", "Conditional probability table");
  probs->fallthrough();
  probs->add_flag("--check-oracle", o.check_oracle, "Compare with the Kraus pipeline");

  auto* sweep = app.add_subcommand("sweep", "Metric surfaces over parameter grids");
  sweep->fallthrough();
  sweep->add_option("--kind", o.kind)
      ->check(CLI::IsMember({"balance-pd", "balance-pb", "fidelity-noise", "entropy-added-noise"}));
  sweep->add_option("--points", o.points, "Theta grid points");
  sweep->add_option("--p-points", o.p_points, "Probability grid points");
  sweep->add_option("--step", o.step, "Added-noise grid step");

  auto* thresholds = app.add_subcommand("thresholds", "Largest tolerable channel noise and memory noise bounds");
  thresholds->fallthrough();

  auto* session = app.add_subcommand("session", "Simulated commitment sessions with Bob's verdict");
  session->fallthrough();
  session->add_option("--attack,--strategy", o.attack)
      ->check(CLI::IsMember({"honest", "breidbart", "added-noise", "memory", "bounded-memory", "nondemolition"}));
  session->add_option("--c", o.c, "Committed bit (or bit the attacker opens)")->check(CLI::Range(0, 1));
  session->add_option("--delta-pd", o.delta_pd, "Added white noise (default: optimal)");
  session->add_option("--pd-dt", o.pd_dt, "Memory white noise");
  session->add_option("--nu", o.nu, "Stored fraction for bounded memory");
  session->add_option("--p-nd", o.p_nd, "Non-demolition efficiency");
  session->add_option("--n-pulses", o.n_pulses, "Pulses per session");
  session->add_option("--sessions", o.sessions, "Independent sessions");
  session->add_option("--transcript", o.transcript, "Write the first transcript as JSON");

  auto* zk = app.add_subcommand("zk", "Zero-knowledge 3-coloring sessions");
  zk->fallthrough();
  zk->add_option("--graph", o.graph, "Edge-list file")->required();
  zk->add_option("--rounds", o.rounds);
  zk->add_option("--sessions", o.sessions);
  zk->add_flag("--cheat", o.cheat, "Prover uses a greedy partial coloring");
  zk->add_option("--palette", o.palette, "Colors available to the cheating prover")->check(CLI::Range(1, 3));
  zk->add_flag("--rechoose", o.rechoose, "Prover picks colors after the challenge");
  zk->add_option("--backend", o.backend)->check(CLI::IsMember({"ideal", "quantum"}));
  zk->add_option("--n-pulses", o.n_pulses, "Pulses per simulated commitment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const bool seeded = app.get_option("--seed")->count() > 0;
  if ((session->parsed() || zk->parsed()) && !seeded) {
    std::cerr << "error: --seed is required for stochastic commands\n";
    return 1;
  }

  try {
    const auto fmt = report::parse_format(o.format);
    Table table;
    bool infeasible = false;
    if (probs->parsed())
      table = cmd_probs(o);
    else if (sweep->parsed())
      table = cmd_sweep(o);
    else if (thresholds->parsed())
      table = cmd_thresholds(o, alpha_opt->count() > 0 || beta_opt->count() > 0, infeasible);
    else if (session->parsed())
      table = cmd_session(o);
    else
      table = cmd_zk(o);

    if (o.out.empty()) {
      report::write(std::cout, table, fmt);
    } else {
      std::ofstream f(o.out);
      if (!f) throw ValidationError("cannot open " + o.out);
      report::write(f, table, fmt);
    }
    if (infeasible) {
      std::cerr << "no feasible p_d for at least one threshold setting\n";
      return 2;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
