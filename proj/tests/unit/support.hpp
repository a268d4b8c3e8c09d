#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <nbspectra/nbspectra.hpp>

namespace testing {

using nbspectra::cplx;
using nbspectra::Graph;

inline std::string data_path(const std::string& name) {
  return std::string(NBSPECTRA_DATA_DIR) + "/" + name + ".nbg";
}

inline std::shared_ptr<const Graph> fixture(const std::string& name) {
  return std::make_shared<const Graph>(nbspectra::load_graph(data_path(name)));
}

inline const std::vector<std::string>& leafless_fixtures() {
  static const std::vector<std::string> names{"triangle", "c5", "k4", "p122", "petersen"};
  return names;
}

inline int directed_edge(const Graph& g, int a, int b) {
  for (int e = 0; e < g.n_directed(); ++e)
    if (g.tail(e) == a && g.head(e) == b) return e;
  return -1;
}

// Closed-form NB spectrum of a regular graph from its adjacency spectrum:
// each mu gives the two roots of t^2 - mu t + (d-1), plus +-1 with
// multiplicity m - n. Adjacency eigenvalues come from a symmetric solver.
inline std::vector<cplx> regular_nb_oracle(const Graph& g) {
  const int n = g.n_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double q = g.degree(0) - 1.0;
  std::vector<cplx> out;
  for (int i = 0; i < n; ++i) {
    const cplx mu = es.eigenvalues()[i];
    const cplx disc = std::sqrt(mu * mu - 4.0 * q);
    out.push_back((mu + disc) / 2.0);
    out.push_back((mu - disc) / 2.0);
  }
  for (int k = 0; k < g.n_edges() - n; ++k) {
    out.push_back(1.0);
    out.push_back(-1.0);
  }
  return out;
}

// FT-Steger weighted K4: E1 = {0-1, 2-3} with weight p1, the other two
// matchings with p2 and p3.
inline std::shared_ptr<const Graph> ftsteger(double p1, double p2, double p3) {
  return std::make_shared<const Graph>(Graph::from_edges(
      4, {{0, 1, p1}, {2, 3, p1}, {0, 2, p2}, {1, 3, p2}, {0, 3, p3}, {1, 2, p3}}));
}

// r = Infinite on the weight-p1 matching, Zero elsewhere.
inline nbspectra::RatioAssignment ftsteger_system(const Graph& g, double p1) {
  std::vector<nbspectra::Ratio> r(static_cast<std::size_t>(g.n_directed()));
  for (int e = 0; e < g.n_directed(); ++e)
    r[e] = g.weight(e) == p1 ? nbspectra::Ratio::infinite() : nbspectra::Ratio::zero();
  return nbspectra::RatioAssignment(std::move(r));
}

}  // namespace testing
