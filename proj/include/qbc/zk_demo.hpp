#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qbc/protocol.hpp"
#include "qbc/rng.hpp"
#include "qbc/verifier.hpp"

namespace qbc::zk {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;  // stored with first < second

class Graph {
 public:
  explicit Graph(std::size_t vertex_count = 0) : n_(vertex_count) {}

  // Ignores an edge that is already present; throws on self-loops and
  // out-of-range endpoints.
  void add_edge(Vertex u, Vertex v);
  std::size_t vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Edge-list text: first data line holds the vertex count, then one "u v"
  // pair per line. '#' starts a comment.
  static Graph parse(std::istream& in);
  static Graph load(const std::string& path);

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

// Two-bit encoding; 0b11 is not a color.
enum class Color : std::uint8_t { R = 0b00, Y = 0b01, B = 0b10 };
using Coloring = std::vector<Color>;

std::pair<Bit, Bit> encode(Color c);
std::optional<Color> decode(Bit hi, Bit lo);
char color_letter(Color c);

bool is_proper(const Graph& g, const Coloring& c);
double proper_edge_fraction(const Graph& g, const Coloring& c);
// Backtracking search for a proper 3-coloring.
std::optional<Coloring> find_proper_coloring(const Graph& g);
// Colors vertices in order, each with the first color (from the first
// `palette` colors) that conflicts with the fewest colored neighbours.
Coloring greedy_partial_coloring(const Graph& g, unsigned palette = 3);

// Bit commitment used for the 2N color bits of a round.
class CommitmentBackend {
 public:
  virtual ~CommitmentBackend() = default;
  virtual std::string name() const = 0;
  // Commits to `bit`; an empty value commits to nothing definite (a cheating
  // prover who intends to choose at opening time).
  virtual std::size_t commit(std::optional<Bit> bit, Rng& rng) = 0;
  // True when the verifier accepts an opening of `handle` as `claimed`.
  virtual bool open(std::size_t handle, Bit claimed, Rng& rng) = 0;
};

// Perfectly binding and concealing box; an uncommitted handle never opens.
class IdealLocker final : public CommitmentBackend {
 public:
  std::string name() const override { return "ideal"; }
  std::size_t commit(std::optional<Bit> bit, Rng& rng) override;
  bool open(std::size_t handle, Bit claimed, Rng& rng) override;

 private:
  std::vector<std::optional<Bit>> slots_;
};

// Each bit is one simulated quantum commitment session checked by Bob's
// accept test. An uncommitted bit is a Breidbart session opened as claimed.
class SimulatedQuantumBackend final : public CommitmentBackend {
 public:
  SimulatedQuantumBackend(ProtocolConfig cfg, Thresholds th);
  std::string name() const override { return "quantum"; }
  std::size_t commit(std::optional<Bit> bit, Rng& rng) override;
  bool open(std::size_t handle, Bit claimed, Rng& rng) override;

 private:
  struct Slot {
    std::optional<Bit> bit;
    std::uint64_t seed;
  };
  ProtocolConfig cfg_;
  Thresholds th_;
  ConditionalProbs honest_;
  ConditionalProbs cheat_;
  std::vector<Slot> slots_;
};

enum class Prover {
  honest,    // commits to the permuted coloring and opens it faithfully
  rechoose,  // commits to nothing and opens whatever colors pass the edge
};

struct RoundRecord {
  std::vector<Color> permutation;  // pi(R), pi(Y), pi(B)
  std::optional<Edge> challenge;
  std::optional<std::pair<Color, Color>> opened;
  bool accepted = false;
  std::string reason;
};

RoundRecord zk_round(const Graph& g, const Coloring& c, CommitmentBackend& backend, Rng& rng,
                     Prover prover = Prover::honest);

struct SessionResult {
  bool accepted = true;
  std::vector<RoundRecord> rounds;
  std::vector<std::string> warnings;
};

// Runs up to `rounds` rounds, stopping at the first rejected one.
SessionResult zk_session(const Graph& g, const Coloring& c, std::size_t rounds, CommitmentBackend& backend, Rng& rng,
                         Prover prover = Prover::honest);

}  // namespace qbc::zk
