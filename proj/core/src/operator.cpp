#include "nbspectra/operator.hpp"

#include <cmath>
#include <limits>

#include "nbspectra/error.hpp"
#include "nbspectra/finite_spectrum.hpp"
#include "strings.hpp"

namespace nbspectra {

LocalOperator::LocalOperator(std::shared_ptr<const Graph> g, std::vector<cplx> diag,
                             std::vector<cplx> off)
    : g_(std::move(g)), diag_(std::move(diag)), off_(std::move(off)) {
  if (!g_) throw PreconditionFailed("LocalOperator needs a graph");
  if (static_cast<int>(diag_.size()) != g_->n_vertices() ||
      static_cast<int>(off_.size()) != g_->n_directed())
    throw PreconditionFailed("LocalOperator size mismatch");
  for (int e = 0; e < g_->n_directed(); ++e) {
    if (off_[e] == cplx(0.0))
      throw ZeroEdgeWeight(detail::format(
          "off-diagonal entry on edge %d-%d is zero; delete the edge first", g_->tail(e),
          g_->head(e)));
    if (off_[e] != off_[Graph::inverse(e)])
      throw PreconditionFailed(detail::format("operator is not symmetric on edge %d", e));
  }
}

std::string_view to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::QLambda: return "qlambda";
    case OperatorKind::AdjacencyShift: return "adjacency";
    case OperatorKind::WeightedAdjacency: return "weighted";
  }
  return "?";
}

OperatorKind operator_kind_from_string(std::string_view s) {
  if (s == "qlambda" || s == "q") return OperatorKind::QLambda;
  if (s == "adjacency" || s == "adj") return OperatorKind::AdjacencyShift;
  if (s == "weighted") return OperatorKind::WeightedAdjacency;
  throw PreconditionFailed("unknown operator kind: " + std::string(s));
}

OperatorFamily::OperatorFamily(std::shared_ptr<const Graph> g, OperatorKind kind)
    : g_(std::move(g)), kind_(kind), gr_(std::numeric_limits<double>::quiet_NaN()) {
  if (!g_) throw PreconditionFailed("OperatorFamily needs a graph");
  if (g_->d_min() >= 2) gr_ = nbspectra::growth_rate(*g_);
  if (kind_ == OperatorKind::WeightedAdjacency) {
    for (const auto& e : g_->edges())
      if (e.weight == 0.0)
        throw ZeroEdgeWeight(detail::format("edge %d-%d has zero weight", e.u, e.v));
  }
}

LocalOperator OperatorFamily::evaluate(cplx lambda) const {
  const Graph& g = *g_;
  std::vector<cplx> diag(static_cast<std::size_t>(g.n_vertices()));
  std::vector<cplx> off(static_cast<std::size_t>(g.n_directed()));
  switch (kind_) {
    case OperatorKind::QLambda:
      if (lambda == cplx(0.0))
        throw ZeroEdgeWeight("Q_lambda at lambda = 0 has no off-diagonal entries");
      for (int v = 0; v < g.n_vertices(); ++v)
        diag[v] = cplx(g.degree(v) - 1) + lambda * lambda;
      for (auto& x : off) x = -lambda;
      break;
    case OperatorKind::AdjacencyShift:
      for (auto& x : diag) x = -lambda;
      for (auto& x : off) x = 1.0;
      break;
    case OperatorKind::WeightedAdjacency:
      for (auto& x : diag) x = -lambda;
      for (int e = 0; e < g.n_directed(); ++e) off[e] = g.weight(e);
      break;
  }
  return LocalOperator(g_, std::move(diag), std::move(off));
}

OperatorFamily make_family(const Graph& g, OperatorKind kind) {
  return OperatorFamily(std::make_shared<const Graph>(g), kind);
}

OperatorFamily make_family(std::shared_ptr<const Graph> g, OperatorKind kind) {
  return OperatorFamily(std::move(g), kind);
}

}  // namespace nbspectra
