#include "qbc/zk_demo.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "qbc/adversary.hpp"
#include "qbc/errors.hpp"

namespace qbc::zk {
namespace {

constexpr std::array<Color, 3> kColors{Color::R, Color::Y, Color::B};

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); });
}

std::array<Color, 3> random_permutation(Rng& rng) {
  auto p = kColors;
  for (std::size_t i = p.size() - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
  return p;
}

}  // namespace

void Graph::add_edge(Vertex u, Vertex v) {
  if (u == v) throw ValidationError("self-loop on vertex " + std::to_string(u));
  if (u >= n_ || v >= n_) throw ValidationError("edge endpoint out of range");
  const Edge e{std::min(u, v), std::max(u, v)};
  if (std::find(edges_.begin(), edges_.end(), e) == edges_.end()) edges_.push_back(e);
}

Graph Graph::parse(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<Graph> g;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = strip_comment(line);
    if (blank(body)) continue;
    std::istringstream ls(body);
    std::string extra;
    if (!g) {
      long long n = -1;
      if (!(ls >> n) || n < 0 || (ls >> extra)) throw ParseError("expected a vertex count", lineno);
      g.emplace(static_cast<std::size_t>(n));
      continue;
    }
    long long u = -1;
    long long v = -1;
    if (!(ls >> u >> v) || (ls >> extra)) throw ParseError("expected an edge 'u v'", lineno);
    if (u < 0 || v < 0) throw ParseError("negative vertex id", lineno);
    try {
      g->add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!g) throw ParseError("missing vertex count header", lineno == 0 ? 1 : lineno);
  return *g;
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file " + path);
  return parse(in);
}

std::pair<Bit, Bit> encode(Color c) {
  const auto v = static_cast<std::uint8_t>(c);
  return {static_cast<Bit>(v >> 1), static_cast<Bit>(v & 1)};
}

std::optional<Color> decode(Bit hi, Bit lo) {
  const auto v = static_cast<std::uint8_t>((hi << 1) | lo);
  if (v > 0b10) return std::nullopt;
  return static_cast<Color>(v);
}

char color_letter(Color c) {
  switch (c) {
    case Color::R:
      return 'R';
    case Color::Y:
      return 'Y';
    case Color::B:
      return 'B';
  }
  return '?';
}

bool is_proper(const Graph& g, const Coloring& c) { return proper_edge_fraction(g, c) == 1.0; }

double proper_edge_fraction(const Graph& g, const Coloring& c) {
  if (c.size() != g.vertex_count()) throw ValidationError("coloring does not cover every vertex");
  if (g.edges().empty()) return 1.0;
  std::size_t good = 0;
  for (const auto& [u, v] : g.edges()) good += c[u] != c[v];
  return static_cast<double>(good) / static_cast<double>(g.edges().size());
}

std::optional<Coloring> find_proper_coloring(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<Vertex>> adj(n);
  for (const auto& [u, v] : g.edges()) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> color(n, -1);
  auto fits = [&](Vertex v, int k) {
    return std::none_of(adj[v].begin(), adj[v].end(), [&](Vertex w) { return color[w] == k; });
  };
  auto solve = [&](auto&& self, Vertex v) -> bool {
    if (v == n) return true;
    for (int k = 0; k < 3; ++k) {
      if (!fits(v, k)) continue;
      color[v] = k;
      if (self(self, v + 1)) return true;
    }
    color[v] = -1;
    return false;
  };
  if (!solve(solve, 0)) return std::nullopt;
  Coloring out(n);
  for (std::size_t v = 0; v < n; ++v) out[v] = kColors[static_cast<std::size_t>(color[v])];
  return out;
}

Coloring greedy_partial_coloring(const Graph& g, unsigned palette) {
  if (palette < 1 || palette > 3) throw ValidationError("palette must hold 1 to 3 colors");
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<Vertex>> adj(n);
  for (const auto& [u, v] : g.edges()) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  Coloring c(n, Color::R);
  for (Vertex v = 0; v < n; ++v) {
    std::size_t best_conflicts = SIZE_MAX;
    for (unsigned k = 0; k < palette; ++k) {
      std::size_t conflicts = 0;
      for (Vertex w : adj[v])
        if (w < v && c[w] == kColors[k]) ++conflicts;
      if (conflicts < best_conflicts) {
        best_conflicts = conflicts;
        c[v] = kColors[k];
      }
    }
  }
  return c;
}

std::size_t IdealLocker::commit(std::optional<Bit> bit, Rng&) {
  slots_.push_back(bit);
  return slots_.size() - 1;
}

bool IdealLocker::open(std::size_t handle, Bit claimed, Rng&) {
  if (handle >= slots_.size()) throw ValidationError("unknown commitment handle");
  return slots_[handle] && *slots_[handle] == claimed;
}

SimulatedQuantumBackend::SimulatedQuantumBackend(ProtocolConfig cfg, Thresholds th)
    : cfg_(std::move(cfg)), th_(th) {
  cfg_.validate();
  th_.validate();
  honest_ = closed_form_cond_probs(cfg_.noise, cfg_.geometry);
  cheat_ = cheating_cond_probs(cfg_.noise, cfg_.geometry);
}

std::size_t SimulatedQuantumBackend::commit(std::optional<Bit> bit, Rng& rng) {
  // The session is a pure function of its seed, so it is replayed at opening.
  slots_.push_back({bit, rng()});
  return slots_.size() - 1;
}

bool SimulatedQuantumBackend::open(std::size_t handle, Bit claimed, Rng&) {
  if (handle >= slots_.size()) throw ValidationError("unknown commitment handle");
  const auto& slot = slots_[handle];
  SessionTranscript t;
  if (slot.bit) {
    t = run_session(cfg_, strategy::Honest{*slot.bit}, slot.seed);
    t.claimed_commitment = claimed;
  } else {
    t = run_session(cfg_, strategy::Cheat{AttackModel(attack::Breidbart{}), claimed}, slot.seed);
  }
  return accept_test(tally(t), claimed, honest_, cheat_, th_).accepted();
}

RoundRecord zk_round(const Graph& g, const Coloring& c, CommitmentBackend& backend, Rng& rng, Prover prover) {
  if (c.size() != g.vertex_count()) throw ValidationError("coloring does not cover every vertex");
  RoundRecord rec;
  if (g.edges().empty()) {
    rec.accepted = true;
    rec.reason = "graph has no edges to challenge";
    return rec;
  }
  const auto pi = random_permutation(rng);
  rec.permutation.assign(pi.begin(), pi.end());
  auto permuted = [&](Color col) { return pi[static_cast<std::size_t>(col)]; };

  std::vector<std::array<std::size_t, 2>> handles(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const auto [hi, lo] = encode(permuted(c[v]));
    if (prover == Prover::honest) {
      handles[v] = {backend.commit(hi, rng), backend.commit(lo, rng)};
    } else {
      handles[v] = {backend.commit(std::nullopt, rng), backend.commit(std::nullopt, rng)};
    }
  }

  const Edge e = g.edges()[rng.below(g.edges().size())];
  rec.challenge = e;

  std::pair<Color, Color> claim;
  if (prover == Prover::honest) {
    claim = {permuted(c[e.first]), permuted(c[e.second])};
  } else {
    const auto fresh = random_permutation(rng);
    claim = {fresh[0], fresh[1]};
  }

  bool consistent = true;
  for (const auto& [v, col] : {std::pair{e.first, claim.first}, std::pair{e.second, claim.second}}) {
    const auto [hi, lo] = encode(col);
    consistent = backend.open(handles[v][0], hi, rng) && consistent;
    consistent = backend.open(handles[v][1], lo, rng) && consistent;
  }
  if (!consistent) {
    rec.reason = "opening inconsistent with commitment";
    return rec;
  }
  rec.opened = claim;
  if (claim.first == claim.second) {
    rec.reason = "adjacent vertices share a color";
    return rec;
  }
  rec.accepted = true;
  return rec;
}

SessionResult zk_session(const Graph& g, const Coloring& c, std::size_t rounds, CommitmentBackend& backend, Rng& rng,
                         Prover prover) {
  SessionResult res;
  if (rounds == 0) res.warnings.emplace_back("zero rounds: acceptance is vacuous");
  for (std::size_t i = 0; i < rounds; ++i) {
    res.rounds.push_back(zk_round(g, c, backend, rng, prover));
    if (!res.rounds.back().accepted) {
      res.accepted = false;
      break;
    }
  }
  return res;
}

}  // namespace qbc::zk
