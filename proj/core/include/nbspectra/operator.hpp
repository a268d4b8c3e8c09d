#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nbspectra/graph.hpp"

namespace nbspectra {

using cplx = std::complex<double>;

// Symmetric local operator on a base graph: diagonal m_vv and one value per
// directed edge, with off[e] == off[inverse(e)].
class LocalOperator {
 public:
  LocalOperator(std::shared_ptr<const Graph> g, std::vector<cplx> diag, std::vector<cplx> off);

  const Graph& graph() const { return *g_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return g_; }
  cplx diag(int v) const { return diag_[v]; }
  cplx off(int e) const { return off_[e]; }
  const std::vector<cplx>& diag() const { return diag_; }
  const std::vector<cplx>& off() const { return off_; }

 private:
  std::shared_ptr<const Graph> g_;
  std::vector<cplx> diag_;
  std::vector<cplx> off_;
};

enum class OperatorKind { QLambda, AdjacencyShift, WeightedAdjacency };

std::string_view to_string(OperatorKind k);
OperatorKind operator_kind_from_string(std::string_view s);

class OperatorFamily {
 public:
  OperatorFamily(std::shared_ptr<const Graph> g, OperatorKind kind);

  OperatorKind kind() const { return kind_; }
  const Graph& graph() const { return *g_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return g_; }

  // QLambda: m_vv = d_v - 1 + lambda^2, m_e = -lambda (throws at lambda = 0).
  // AdjacencyShift: m_vv = -lambda, m_e = 1.
  // WeightedAdjacency: m_vv = -lambda, m_e = edge weight.
  LocalOperator evaluate(cplx lambda) const;

  // Spectral set invariant under lambda -> -lambda (r -> -r). Holds for all
  // three kinds since the cover is a tree, hence bipartite.
  bool sign_symmetric() const { return true; }

  // Growth rate of the base graph, NaN when d_min < 2.
  double growth_rate() const { return gr_; }

 private:
  std::shared_ptr<const Graph> g_;
  OperatorKind kind_;
  double gr_;
};

OperatorFamily make_family(const Graph& g, OperatorKind kind);
OperatorFamily make_family(std::shared_ptr<const Graph> g, OperatorKind kind);

}  // namespace nbspectra
