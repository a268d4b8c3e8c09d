#include "nbspectra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "nbspectra/error.hpp"
#include "strings.hpp"

namespace nbspectra {

namespace {

void build_csr(int n, const std::vector<std::vector<int>>& lists,
               std::vector<int>& off, std::vector<int>& flat) {
  off.assign(static_cast<std::size_t>(n) + 1, 0);
  flat.clear();
  for (int i = 0; i < n; ++i) {
    off[i + 1] = off[i] + static_cast<int>(lists[i].size());
    flat.insert(flat.end(), lists[i].begin(), lists[i].end());
  }
}

}  // namespace

Graph Graph::from_edges(int n_vertices, std::vector<EdgeSpec> edges,
                        bool require_connected) {
  if (n_vertices <= 0) throw ParseError("graph needs at least one vertex");
  Graph g;
  g.n_ = n_vertices;
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n_vertices || e.v >= n_vertices)
      throw ParseError(detail::format("edge %d-%d references a vertex outside [0,%d)",
                                      e.u, e.v, n_vertices));
    if (e.u == e.v) throw SelfLoop(detail::format("self-loop at vertex %d", e.u));
    if (!std::isfinite(e.weight))
      throw ParseError(detail::format("edge %d-%d has a non-finite weight", e.u, e.v));
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      throw DuplicateEdge(detail::format("duplicate edge %d-%d", key.first, key.second));
    if (e.weight != 1.0) g.weighted_ = true;
  }
  g.edges_ = std::move(edges);

  const int nd = g.n_directed();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_vertices));
  for (int e = 0; e < nd; ++e) out[g.tail(e)].push_back(e);
  build_csr(n_vertices, out, g.out_off_, g.out_);
  g.deg_.resize(static_cast<std::size_t>(n_vertices));
  for (int v = 0; v < n_vertices; ++v) g.deg_[v] = g.degree(v);

  std::vector<std::vector<int>> fol(static_cast<std::size_t>(nd));
  std::vector<std::vector<int>> pre(static_cast<std::size_t>(nd));
  for (int e = 0; e < nd; ++e) {
    for (int f : out[g.head(e)]) {
      if (f == inverse(e)) continue;
      fol[e].push_back(f);
      pre[f].push_back(e);
    }
  }
  build_csr(nd, fol, g.fol_off_, g.fol_);
  build_csr(nd, pre, g.pre_off_, g.pre_);

  std::vector<char> mark(static_cast<std::size_t>(n_vertices), 0);
  std::vector<int> stack{0};
  mark[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : g.out_edges(v)) {
      int w = g.head(e);
      if (!mark[w]) {
        mark[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  g.connected_ = reached == n_vertices;
  if (require_connected && !g.connected_)
    throw DisconnectedGraph(detail::format("graph is disconnected (%d of %d vertices reachable)",
                                           reached, n_vertices));
  return g;
}

int Graph::d_min() const {
  return deg_.empty() ? 0 : *std::min_element(deg_.begin(), deg_.end());
}

int Graph::d_max() const {
  return deg_.empty() ? 0 : *std::max_element(deg_.begin(), deg_.end());
}

std::uint64_t Graph::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::uint64_t>(n_));
  for (const auto& e : edges_) {
    mix(static_cast<std::uint64_t>(e.u));
    mix(static_cast<std::uint64_t>(e.v));
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(e.weight));
    std::memcpy(&bits, &e.weight, sizeof(bits));
    mix(bits);
  }
  return h;
}

std::string Graph::to_text() const {
  std::string out = "nbgraph v1\n";
  out += detail::format("vertices %d\n", n_);
  for (const auto& e : edges_) {
    if (e.weight == 1.0)
      out += detail::format("edge %d %d\n", e.u, e.v);
    else
      out += detail::format("edge %d %d %.17g\n", e.u, e.v, e.weight);
  }
  return out;
}

Graph parse_graph(std::string_view text, bool require_connected) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  int stage = 0;  // 0: header, 1: vertices, 2: edges
  int n = 0;
  std::vector<EdgeSpec> edges;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    auto fail = [&](const char* what) {
      return ParseError(detail::format("line %d: %s", lineno, what));
    };
    if (stage == 0) {
      if (toks.size() != 2 || toks[0] != "nbgraph" || toks[1] != "v1")
        throw fail("expected header 'nbgraph v1'");
      stage = 1;
    } else if (stage == 1) {
      long long v = 0;
      if (toks.size() != 2 || toks[0] != "vertices" || !detail::parse_int(toks[1], v) || v <= 0 ||
          v > 100'000'000)
        throw fail("expected 'vertices N' with N > 0");
      n = static_cast<int>(v);
      stage = 2;
    } else {
      long long a = 0, b = 0;
      EdgeSpec e;
      if ((toks.size() != 3 && toks.size() != 4) || toks[0] != "edge" ||
          !detail::parse_int(toks[1], a) || !detail::parse_int(toks[2], b))
        throw fail("expected 'edge U V [WEIGHT]'");
      if (a < 0 || b < 0 || a >= n || b >= n) throw fail("vertex id out of range");
      e.u = static_cast<int>(a);
      e.v = static_cast<int>(b);
      if (toks.size() == 4 && !detail::parse_double(toks[3], e.weight))
        throw fail("bad edge weight");
      edges.push_back(e);
    }
  }
  if (stage == 0) throw ParseError("empty graph file");
  if (stage == 1) throw ParseError("missing 'vertices N' line");
  return Graph::from_edges(n, std::move(edges), require_connected);
}

Graph load_graph(const std::filesystem::path& path, bool require_connected) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open graph file: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_graph(ss.str(), require_connected);
}

void require_leafless(const Graph& g, std::string_view what) {
  if (g.d_min() < 2)
    throw DegreeTooLow(detail::format("%.*s requires minimum degree >= 2 (found %d)",
                                      static_cast<int>(what.size()), what.data(), g.d_min()));
}

TreeBall tree_ball(const Graph& g, int root_type, int radius, std::size_t cap) {
  if (radius < 0) throw PreconditionFailed("tree_ball radius must be >= 0");
  if (root_type < 0 || root_type >= g.n_vertices())
    throw PreconditionFailed("tree_ball root type out of range");
  TreeBall ball;
  ball.radius = radius;
  ball.vertices.push_back(TreeVertex{root_type, -1, -1, 0, 0, 0});
  ball.level_sizes.push_back(1);
  std::size_t level_begin = 0;
  for (int depth = 0; depth < radius; ++depth) {
    const std::size_t level_end = ball.vertices.size();
    for (std::size_t x = level_begin; x < level_end; ++x) {
      const TreeVertex cur = ball.vertices[x];
      std::span<const int> kids =
          cur.entering < 0 ? g.out_edges(cur.type) : g.follow(cur.entering);
      if (ball.vertices.size() + kids.size() > cap)
        throw BallTooLarge(detail::format("tree ball exceeds cap of %zu vertices", cap));
      ball.vertices[x].child_begin = static_cast<int>(ball.vertices.size());
      ball.vertices[x].child_count = static_cast<int>(kids.size());
      for (int e : kids)
        ball.vertices.push_back(
            TreeVertex{g.head(e), static_cast<int>(x), e, depth + 1, 0, 0});
    }
    ball.level_sizes.push_back(ball.vertices.size() - level_end);
    level_begin = level_end;
  }
  return ball;
}

}  // namespace nbspectra
