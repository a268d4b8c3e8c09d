#include "doctest.h"
#include "support.hpp"

using namespace nbspectra;
using testing::fixture;

TEST_SUITE("graph") {

TEST_CASE("parse triangle") {
  const Graph g = parse_graph("nbgraph v1\nvertices 3\nedge 0 1\nedge 1 2\nedge 2 0\n");
  CHECK(g.n_vertices() == 3);
  CHECK(g.n_edges() == 3);
  CHECK(g.n_directed() == 6);
  for (int v = 0; v < 3; ++v) CHECK(g.degree(v) == 2);
  CHECK_FALSE(g.has_weights());
}

TEST_CASE("parse p122 fixture") {
  const auto g = fixture("p122");
  CHECK(g->n_vertices() == 4);
  CHECK(g->n_edges() == 5);
  CHECK(g->degrees() == std::vector<int>{3, 3, 2, 2});
  CHECK(g->d_min() == 2);
  CHECK(g->d_max() == 3);
}

TEST_CASE("parse comments, blank lines and weights") {
  const Graph g = parse_graph(
      "# header comment\nnbgraph v1\n\nvertices 2\nedge 0 1 0.25  # trailing\n", false);
  CHECK(g.n_edges() == 1);
  CHECK(g.has_weights());
  CHECK(g.weight(0) == doctest::Approx(0.25));
  CHECK(g.weight(1) == doctest::Approx(0.25));
}

TEST_CASE("parse rejects bad input") {
  CHECK_THROWS_AS(parse_graph("nbgraph v1\nvertices 2\nedge 0 0\n"), SelfLoop);
  CHECK_THROWS_AS(parse_graph("nbgraph v1\nvertices 3\nedge 0 1\nedge 1 0\nedge 1 2\n"),
                  DuplicateEdge);
  CHECK_THROWS_AS(parse_graph("nbgraph v1\nvertices 4\nedge 0 1\nedge 2 3\n"), DisconnectedGraph);
  CHECK_THROWS_AS(parse_graph("nbgraph v2\nvertices 2\nedge 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("nbgraph v1\nvertices 2\nedge 0 5\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("nbgraph v1\nvertices 2\nedge 0 x\n"), ParseError);
  CHECK_THROWS_AS(parse_graph("nbgraph v1\nvertices 2\nedge 0 1 abc\n"), ParseError);
  CHECK_THROWS_AS(parse_graph(""), ParseError);
  CHECK_THROWS_AS(load_graph("/nonexistent/graph.nbg"), IOError);
}

TEST_CASE("disconnected graphs allowed on request") {
  const Graph g = parse_graph("nbgraph v1\nvertices 4\nedge 0 1\nedge 2 3\n", false);
  CHECK_FALSE(g.is_connected());
}

TEST_CASE("text round trip and fingerprint") {
  for (const auto& name : {"triangle", "p122", "k4_ftsteger", "petersen"}) {
    const auto g = fixture(name);
    const Graph h = parse_graph(g->to_text());
    CHECK(h.n_vertices() == g->n_vertices());
    REQUIRE(h.n_edges() == g->n_edges());
    for (int k = 0; k < g->n_edges(); ++k) {
      CHECK(h.edge(k).u == g->edge(k).u);
      CHECK(h.edge(k).v == g->edge(k).v);
      CHECK(h.edge(k).weight == g->edge(k).weight);
    }
    CHECK(h.fingerprint() == g->fingerprint());
  }
  CHECK(fixture("k4")->fingerprint() != fixture("k4_ftsteger")->fingerprint());
}

TEST_CASE("follow set sizes") {
  const auto tri = fixture("triangle");
  for (int e = 0; e < tri->n_directed(); ++e) CHECK(tri->follow(e).size() == 1);
  const auto k4 = fixture("k4");
  for (int e = 0; e < k4->n_directed(); ++e) CHECK(k4->follow(e).size() == 2);
}

TEST_CASE("directed edge algebra on all fixtures") {
  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    for (int e = 0; e < g->n_directed(); ++e) {
      const int ie = Graph::inverse(e);
      CHECK(Graph::inverse(ie) == e);
      CHECK(g->head(e) == g->tail(ie));
      CHECK(g->tail(e) == g->head(ie));
      const auto fol = g->follow(e);
      CHECK(static_cast<int>(fol.size()) == g->degree(g->head(e)) - 1);
      for (int f : fol) {
        CHECK(f != ie);
        CHECK(g->tail(f) == g->head(e));
        const auto pre = g->predecessors(f);
        CHECK(std::find(pre.begin(), pre.end(), e) != pre.end());
      }
    }
    for (int v = 0; v < g->n_vertices(); ++v)
      for (int e : g->out_edges(v)) CHECK(g->tail(e) == v);
  }
}

TEST_CASE("require_leafless") {
  const Graph path = parse_graph("nbgraph v1\nvertices 3\nedge 0 1\nedge 1 2\n");
  CHECK_THROWS_AS(require_leafless(path, "test"), DegreeTooLow);
  CHECK_NOTHROW(require_leafless(*fixture("triangle"), "test"));
}

TEST_CASE("tree_ball level sizes") {
  const auto k4 = fixture("k4");
  const TreeBall b = tree_ball(*k4, 0, 2);
  CHECK(b.level_sizes == std::vector<std::size_t>{1, 3, 6});
  CHECK(b.size() == 10);

  for (const auto& name : testing::leafless_fixtures()) {
    const TreeBall b0 = tree_ball(*fixture(name), 0, 0);
    CHECK(b0.size() == 1);
    CHECK(b0.vertices[0].parent == -1);
  }

  const auto p = fixture("p122");
  CHECK(tree_ball(*p, 0, 1).size() == 4);
  CHECK_THROWS_AS(tree_ball(*k4, 0, 12, 100), BallTooLarge);
}

TEST_CASE("tree_ball children enumerate follow sets") {
  const auto g = fixture("p122");
  const TreeBall b = tree_ball(*g, 2, 5);
  for (int x = 0; x < static_cast<int>(b.size()); ++x) {
    const TreeVertex& tv = b.vertices[x];
    if (!b.interior(x)) {
      CHECK(tv.child_count == 0);
      continue;
    }
    if (x == 0) {
      CHECK(tv.child_count == g->degree(tv.type));
    } else {
      const auto fol = g->follow(tv.entering);
      REQUIRE(tv.child_count == static_cast<int>(fol.size()));
      for (int c = 0; c < tv.child_count; ++c) {
        const TreeVertex& ch = b.vertices[tv.child_begin + c];
        CHECK(ch.entering == fol[c]);
        CHECK(ch.parent == x);
        CHECK(ch.depth == tv.depth + 1);
        CHECK(ch.type == g->head(fol[c]));
      }
    }
  }
}

TEST_CASE("tree_ball levels match powers of B") {
  for (const auto& name : testing::leafless_fixtures()) {
    const auto g = fixture(name);
    const RealMatrix B = build_B(*g);
    for (int root = 0; root < g->n_vertices(); ++root) {
      const TreeBall b = tree_ball(*g, root, 6);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(g->n_directed());
      for (int e : g->out_edges(root)) s[e] = 1.0;
      for (int k = 1; k <= 6; ++k) {
        CHECK(static_cast<double>(b.level_sizes[k]) == doctest::Approx(s.sum()));
        s = B.transpose() * s;
      }
    }
  }
}

TEST_CASE("operator families") {
  const auto k4 = fixture("k4");
  const auto q = make_family(k4, OperatorKind::QLambda).evaluate(2.0);
  for (int v = 0; v < 4; ++v) CHECK(q.diag(v) == cplx(6.0));
  for (int e = 0; e < k4->n_directed(); ++e) CHECK(q.off(e) == cplx(-2.0));

  const auto a = make_family(k4, OperatorKind::AdjacencyShift).evaluate(0.0);
  for (int v = 0; v < 4; ++v) CHECK(a.diag(v) == cplx(0.0));
  for (int e = 0; e < k4->n_directed(); ++e) CHECK(a.off(e) == cplx(1.0));

  const auto ft = fixture("k4_ftsteger");
  const auto w = make_family(ft, OperatorKind::WeightedAdjacency).evaluate(0.0);
  for (int v = 0; v < 4; ++v) CHECK(w.diag(v) == cplx(0.0));
  int ones = 0, sixes = 0;
  for (int e = 0; e < ft->n_directed(); ++e) {
    if (w.off(e) == cplx(1.0)) ++ones;
    if (w.off(e) == cplx(0.6)) ++sixes;
  }
  CHECK(ones == 4);
  CHECK(sixes == 8);
}

TEST_CASE("operator symmetry holds exactly") {
  const cplx lams[] = {{0.3, 1.7}, {-2.0, 0.5}, {1.0, 0.0}};
  for (const auto& name : {"p122", "petersen", "k4_ftsteger"}) {
    const auto g = fixture(name);
    for (auto kind : {OperatorKind::QLambda, OperatorKind::AdjacencyShift,
                      OperatorKind::WeightedAdjacency}) {
      const OperatorFamily f(g, kind);
      for (cplx lam : lams) {
        const LocalOperator M = f.evaluate(lam);
        for (int e = 0; e < g->n_directed(); ++e) CHECK(M.off(e) == M.off(Graph::inverse(e)));
      }
    }
  }
}

TEST_CASE("operator errors") {
  const auto k4 = fixture("k4");
  CHECK_THROWS_AS(make_family(k4, OperatorKind::QLambda).evaluate(0.0), ZeroEdgeWeight);
  const auto zw = std::make_shared<const Graph>(
      Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 0.0}, {2, 0, 1.0}}));
  CHECK_THROWS_AS(make_family(zw, OperatorKind::WeightedAdjacency), ZeroEdgeWeight);
  std::vector<cplx> off(6, cplx(1.0));
  off[0] = 2.0;
  CHECK_THROWS_AS(LocalOperator(fixture("triangle"), std::vector<cplx>(3), off),
                  PreconditionFailed);
  CHECK(operator_kind_from_string("qlambda") == OperatorKind::QLambda);
  CHECK(operator_kind_from_string("adjacency") == OperatorKind::AdjacencyShift);
  CHECK(operator_kind_from_string("weighted") == OperatorKind::WeightedAdjacency);
  CHECK_THROWS(operator_kind_from_string("bogus"));
}

TEST_CASE("growth rate cached on the family") {
  const OperatorFamily f(fixture("k4"), OperatorKind::QLambda);
  CHECK(f.growth_rate() == doctest::Approx(2.0).epsilon(1e-12));
  const auto path = std::make_shared<const Graph>(Graph::from_edges(2, {{0, 1}}));
  CHECK(std::isnan(OperatorFamily(path, OperatorKind::AdjacencyShift).growth_rate()));
}

}  // TEST_SUITE
