#include "barbat/graph.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace barbat {

namespace {

std::size_t lowest(VertexMask m) { return static_cast<std::size_t>(std::countr_zero(m)); }

template <class Fn>
void for_each_vertex(VertexMask m, Fn fn) {
  while (m != 0) {
    fn(lowest(m));
    m &= m - 1;
  }
}

}  // namespace

FeedbackGraph::FeedbackGraph(std::size_t num_vertices) : out_(num_vertices, 0), in_(num_vertices, 0) {
  if (num_vertices == 0 || num_vertices > kMaxVertices) {
    throw std::invalid_argument("feedback graphs need 1 to 64 vertices");
  }
}

FeedbackGraph FeedbackGraph::complete(std::size_t num_vertices, bool self_loops) {
  FeedbackGraph g(num_vertices);
  for (std::size_t u = 0; u < num_vertices; ++u) {
    for (std::size_t v = 0; v < num_vertices; ++v) {
      if (u != v || self_loops) g.add_edge(u, v);
    }
  }
  return g;
}

VertexMask FeedbackGraph::all() const {
  return num_vertices() == 64 ? ~VertexMask{0} : vertex_bit(num_vertices()) - 1;
}

void FeedbackGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= num_vertices() || to >= num_vertices()) throw std::out_of_range("edge endpoint out of range");
  out_[from] |= vertex_bit(to);
  in_[to] |= vertex_bit(from);
}

void FeedbackGraph::add_undirected_edge(std::size_t a, std::size_t b) {
  add_edge(a, b);
  add_edge(b, a);
}

bool FeedbackGraph::strongly_observable() const {
  for (std::size_t v = 0; v < num_vertices(); ++v) {
    if (has_self_loop(v)) continue;
    if ((in_[v] | vertex_bit(v)) != all()) return false;
  }
  return true;
}

void FeedbackGraph::require_strongly_observable() const {
  for (std::size_t v = 0; v < num_vertices(); ++v) {
    if (!has_self_loop(v) && (in_[v] | vertex_bit(v)) != all()) {
      throw std::invalid_argument("graph is not strongly observable: vertex " + std::to_string(v) +
                                  " has no self-loop and misses an in-edge");
    }
  }
}

bool FeedbackGraph::symmetric() const {
  for (std::size_t v = 0; v < num_vertices(); ++v) {
    if (out_[v] != in_[v]) return false;
  }
  return true;
}

VertexMask FeedbackGraph::undirected_neighbours(std::size_t v) const {
  return (out_[v] | in_[v]) & ~vertex_bit(v);
}

std::string FeedbackGraph::to_text() const {
  std::string text;
  for (std::size_t v = 0; v < num_vertices(); ++v) {
    text += std::to_string(v) + ":";
    for_each_vertex(out_[v], [&](std::size_t u) { text += " " + std::to_string(u); });
    text += "\n";
  }
  return text;
}

FeedbackGraph FeedbackGraph::parse(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("graph text line " + std::to_string(line_no) + ": " + why);
  };
  auto to_index = [&](std::string_view token) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) fail("bad vertex '" + std::string(token) + "'");
    return value;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail("missing ':'");
    std::string head = line.substr(0, colon);
    head.erase(0, head.find_first_not_of(" \t"));
    head.erase(head.find_last_not_of(" \t\r") + 1);
    std::vector<std::size_t> targets;
    std::istringstream tail(line.substr(colon + 1));
    std::string token;
    while (tail >> token) targets.push_back(to_index(token));
    rows.emplace_back(to_index(head), std::move(targets));
  }
  if (rows.empty()) throw std::invalid_argument("graph text has no vertices");

  FeedbackGraph g(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [v, targets] : rows) {
    if (v >= rows.size() || seen[v]) {
      throw std::invalid_argument("graph text must list vertices 0..K-1 exactly once");
    }
    seen[v] = true;
    for (std::size_t u : targets) {
      if (u >= rows.size()) throw std::invalid_argument("edge target out of range");
      g.add_edge(v, u);
    }
  }
  return g;
}

bool has_cycle(const FeedbackGraph& g, VertexMask vertices) {
  // Peel vertices with no in-edges from the remainder; a cycle is what's left.
  VertexMask left = vertices;
  bool progress = true;
  while (left != 0 && progress) {
    progress = false;
    VertexMask sources = 0;
    for_each_vertex(left, [&](std::size_t v) {
      if ((g.in_mask(v) & left & ~vertex_bit(v)) == 0) sources |= vertex_bit(v);
    });
    if (sources != 0) {
      left &= ~sources;
      progress = true;
    }
  }
  return left != 0;
}

bool out_dominates(const FeedbackGraph& g, const std::vector<std::size_t>& set, VertexMask targets) {
  VertexMask seen = 0;
  for (std::size_t d : set) seen |= g.out_mask(d);
  return (targets & ~seen) == 0;
}

std::vector<std::size_t> oods(const FeedbackGraph& g, VertexMask residual) {
  residual &= g.all();
  VertexMask chosen = 0;
  VertexMask left = residual;
  while (left != 0) {
    if (!has_cycle(g, left)) {
      VertexMask roots = 0;
      for_each_vertex(left, [&](std::size_t v) {
        if ((g.in_mask(v) & left & ~vertex_bit(v)) == 0) roots |= vertex_bit(v);
      });
      VertexMask covered = roots;
      for_each_vertex(roots, [&](std::size_t v) { covered |= g.out_mask(v); });
      chosen |= roots;
      left &= ~covered;
    } else {
      std::size_t best = 0;
      int best_degree = -1;
      for_each_vertex(left, [&](std::size_t v) {
        const int degree = std::popcount(g.out_mask(v) & left);
        if (degree > best_degree) {
          best_degree = degree;
          best = v;
        }
      });
      chosen |= vertex_bit(best);
      left &= ~(vertex_bit(best) | g.out_mask(best));
    }
  }

  // A vertex without a self-loop is seen by any other chosen vertex, so it
  // goes unobserved only when nothing else was chosen.
  VertexMask seen = 0;
  for_each_vertex(chosen, [&](std::size_t d) { seen |= g.out_mask(d); });
  VertexMask hopeless = 0;
  for (VertexMask unseen = residual & ~seen; unseen != 0; unseen = residual & ~seen & ~hopeless) {
    const std::size_t u = lowest(unseen);
    VertexMask pool = g.in_mask(u) & residual & ~vertex_bit(u);
    if (pool == 0) pool = g.in_mask(u) & ~vertex_bit(u);
    if (pool == 0) {  // no in-neighbour at all: nothing can observe u
      hopeless |= vertex_bit(u);
      continue;
    }
    std::size_t pick = lowest(pool);
    int pick_degree = -1;
    for_each_vertex(pool, [&](std::size_t v) {
      const int degree = std::popcount(g.out_mask(v) & residual & ~seen);
      if (degree > pick_degree) {
        pick_degree = degree;
        pick = v;
      }
    });
    chosen |= vertex_bit(pick);
    seen |= g.out_mask(pick);
  }

  std::vector<std::size_t> out;
  for_each_vertex(chosen, [&](std::size_t v) { out.push_back(v); });
  return out;
}

std::vector<std::size_t> oods(const FeedbackGraph& g) {
  g.require_strongly_observable();
  return oods(g, g.all());
}

namespace {

class IndependenceSearch {
 public:
  explicit IndependenceSearch(const FeedbackGraph& g) : adj_(g.num_vertices()) {
    for (std::size_t v = 0; v < g.num_vertices(); ++v) adj_[v] = g.undirected_neighbours(v);
  }

  std::size_t solve(VertexMask all) {
    best_ = 0;
    search(all, 0);
    return best_;
  }

 private:
  void search(VertexMask candidates, std::size_t size) {
    // Vertices of degree <= 1 in the remainder are always safe to take.
    bool reduced = true;
    while (reduced && candidates != 0) {
      reduced = false;
      for (VertexMask m = candidates; m != 0; m &= m - 1) {
        const std::size_t v = lowest(m);
        if (std::popcount(adj_[v] & candidates) <= 1) {
          candidates &= ~(vertex_bit(v) | adj_[v]);
          ++size;
          reduced = true;
          break;
        }
      }
    }
    if (candidates == 0) {
      best_ = std::max(best_, size);
      return;
    }
    if (size + static_cast<std::size_t>(std::popcount(candidates)) <= best_) return;

    std::size_t pivot = lowest(candidates);
    int pivot_degree = -1;
    for (VertexMask m = candidates; m != 0; m &= m - 1) {
      const std::size_t v = lowest(m);
      const int degree = std::popcount(adj_[v] & candidates);
      if (degree > pivot_degree) {
        pivot_degree = degree;
        pivot = v;
      }
    }
    search(candidates & ~(vertex_bit(pivot) | adj_[pivot]), size + 1);
    search(candidates & ~vertex_bit(pivot), size);
  }

  std::vector<VertexMask> adj_;
  std::size_t best_ = 0;
};

}  // namespace

std::size_t independence_number(const FeedbackGraph& g) {
  if (g.num_vertices() > kMaxIndependenceVertices) {
    throw std::invalid_argument("independence_number supports at most 32 vertices");
  }
  return IndependenceSearch(g).solve(g.all());
}

FeedbackGraph erdos_renyi_strongly_observable(std::size_t num_vertices, double p_edge,
                                              double p_loop, Pcg64& rng) {
  if (num_vertices < 2) throw std::invalid_argument("random feedback graphs need K >= 2");
  if (!(p_edge >= 0.0 && p_edge <= 1.0) || !(p_loop >= 0.0 && p_loop <= 1.0)) {
    throw std::invalid_argument("edge and loop probabilities must lie in [0, 1]");
  }
  FeedbackGraph g(num_vertices);
  for (std::size_t u = 0; u < num_vertices; ++u) {
    for (std::size_t v = 0; v < num_vertices; ++v) {
      const double p = u == v ? p_loop : p_edge;
      if (uniform01(rng) < p) g.add_edge(u, v);
    }
  }
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (g.has_self_loop(v)) continue;
    for (std::size_t u = 0; u < num_vertices; ++u) {
      if (u != v) g.add_edge(u, v);
    }
  }
  return g;
}

}  // namespace barbat
