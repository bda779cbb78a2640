#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "barbat/rng.hpp"

namespace barbat {

using VertexMask = std::uint64_t;

constexpr VertexMask vertex_bit(std::size_t v) { return VertexMask{1} << v; }

// Directed feedback graph on at most 64 arms. Pulling u reveals the reward of
// every v with (u, v) in E; a self-loop (v, v) means pulling v reveals v.
class FeedbackGraph {
 public:
  static constexpr std::size_t kMaxVertices = 64;

  explicit FeedbackGraph(std::size_t num_vertices);

  static FeedbackGraph complete(std::size_t num_vertices, bool self_loops = true);

  std::size_t num_vertices() const { return out_.size(); }
  VertexMask all() const;

  void add_edge(std::size_t from, std::size_t to);
  void add_undirected_edge(std::size_t a, std::size_t b);
  bool has_edge(std::size_t from, std::size_t to) const { return (out_[from] & vertex_bit(to)) != 0; }
  bool has_self_loop(std::size_t v) const { return has_edge(v, v); }

  // Out-neighbourhood, including v itself iff v has a self-loop.
  VertexMask out_mask(std::size_t v) const { return out_[v]; }
  VertexMask in_mask(std::size_t v) const { return in_[v]; }

  // Every vertex has a self-loop or in-edges from all other vertices.
  bool strongly_observable() const;
  // Throws std::invalid_argument naming the first offending vertex.
  void require_strongly_observable() const;
  bool symmetric() const;

  // Vertices (other than itself) with an edge to or from v.
  VertexMask undirected_neighbours(std::size_t v) const;

  // Adjacency-list text: one line `v: n1 n2 ...` per vertex, a self-loop
  // written as v in its own list. Blank lines and `#` comments are ignored.
  std::string to_text() const;
  static FeedbackGraph parse(std::string_view text);

  friend bool operator==(const FeedbackGraph&, const FeedbackGraph&) = default;

 private:
  std::vector<VertexMask> out_;
  std::vector<VertexMask> in_;
};

// Whether the subgraph induced by `vertices` has a directed cycle of length
// at least 2 (self-loops do not count).
bool has_cycle(const FeedbackGraph& g, VertexMask vertices);

// Out-domination set of the subgraph induced by `residual` (all vertices by
// default). While vertices remain: an acyclic remainder contributes all of
// its no-root vertices (no in-edges except a self-loop); otherwise the
// vertex with the most remaining out-neighbours is taken (ties to the
// smaller index). Chosen vertices and their out-neighbours leave the
// remainder. A remaining vertex without a self-loop that ends up observed
// by nobody (possible only when no other vertex was chosen) gets one
// in-neighbour added, taken from `residual` if possible and from the whole
// graph otherwise. The result observes every vertex of `residual` through
// the edges of g. Returned in increasing index order.
std::vector<std::size_t> oods(const FeedbackGraph& g, VertexMask residual);
std::vector<std::size_t> oods(const FeedbackGraph& g);

// True if every vertex in `targets` has an in-edge from some member of `set`.
bool out_dominates(const FeedbackGraph& g, const std::vector<std::size_t>& set, VertexMask targets);

inline constexpr std::size_t kMaxIndependenceVertices = 32;

// Exact independence number of the undirected symmetrization (self-loops
// ignored). Branch and bound over bitmasks; rejects graphs with more than 32
// vertices.
std::size_t independence_number(const FeedbackGraph& g);

// Each ordered pair (u, v), u != v, gets an edge with probability p_edge and
// each vertex a self-loop with probability p_loop; a vertex left without a
// self-loop then receives in-edges from every other vertex.
FeedbackGraph erdos_renyi_strongly_observable(std::size_t num_vertices, double p_edge,
                                              double p_loop, Pcg64& rng);

}  // namespace barbat
