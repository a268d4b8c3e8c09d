#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nbspectra {

struct EdgeSpec {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

// Finite simple graph with paired directed edges: undirected edge k gives
// directed edge 2k = (u->v) and 2k+1 = (v->u).
class Graph {
 public:
  Graph() = default;

  // Validates and indexes. Disconnected input is rejected unless
  // require_connected is false (lifts may legitimately disconnect).
  static Graph from_edges(int n_vertices, std::vector<EdgeSpec> edges,
                          bool require_connected = true);

  int n_vertices() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_directed() const { return 2 * n_edges(); }

  const EdgeSpec& edge(int k) const { return edges_[static_cast<std::size_t>(k)]; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }

  int tail(int e) const { return (e & 1) ? edges_[e >> 1].v : edges_[e >> 1].u; }
  int head(int e) const { return (e & 1) ? edges_[e >> 1].u : edges_[e >> 1].v; }
  static int inverse(int e) { return e ^ 1; }
  double weight(int e) const { return edges_[e >> 1].weight; }
  bool has_weights() const { return weighted_; }

  std::span<const int> out_edges(int v) const {
    return {out_.data() + out_off_[v], out_.data() + out_off_[v + 1]};
  }
  // Directed edges e' with tail(e') = head(e), e' != inverse(e).
  std::span<const int> follow(int e) const {
    return {fol_.data() + fol_off_[e], fol_.data() + fol_off_[e + 1]};
  }
  // Directed edges e' with e' -> e.
  std::span<const int> predecessors(int e) const {
    return {pre_.data() + pre_off_[e], pre_.data() + pre_off_[e + 1]};
  }

  int degree(int v) const { return out_off_[v + 1] - out_off_[v]; }
  const std::vector<int>& degrees() const { return deg_; }
  int d_min() const;
  int d_max() const;

  bool is_connected() const { return connected_; }

  // FNV-1a over the canonical edge list; stable across platforms.
  std::uint64_t fingerprint() const;

  // Round-trips through parse_graph.
  std::string to_text() const;

 private:
  int n_ = 0;
  bool weighted_ = false;
  bool connected_ = true;
  std::vector<EdgeSpec> edges_;
  std::vector<int> deg_;
  std::vector<int> out_off_, out_;
  std::vector<int> fol_off_, fol_;
  std::vector<int> pre_off_, pre_;
};

Graph parse_graph(std::string_view text, bool require_connected = true);
Graph load_graph(const std::filesystem::path& path, bool require_connected = true);

// Throws DegreeTooLow when d_min < 2.
void require_leafless(const Graph& g, std::string_view what);

struct TreeVertex {
  int type = 0;       // base vertex
  int parent = -1;    // tree index, -1 at the root
  int entering = -1;  // base directed edge parent->this, -1 at the root
  int depth = 0;
  int child_begin = 0;
  int child_count = 0;
};

// Breadth-first ball of the universal cover. Children of a vertex occupy a
// contiguous index range, listed in follow() order.
struct TreeBall {
  int radius = 0;
  std::vector<TreeVertex> vertices;
  std::vector<std::size_t> level_sizes;

  int root() const { return 0; }
  std::size_t size() const { return vertices.size(); }
  bool interior(int x) const { return vertices[x].depth < radius; }
};

inline constexpr std::size_t kDefaultBallCap = 4'000'000;

TreeBall tree_ball(const Graph& g, int root_type, int radius,
                   std::size_t cap = kDefaultBallCap);

}  // namespace nbspectra
