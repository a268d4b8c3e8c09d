#include "nbspectra/ratio_system.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "json.hpp"

#include "nbspectra/error.hpp"
#include "strings.hpp"

namespace nbspectra {

std::string_view to_string(RatioClass c) {
  switch (c) {
    case RatioClass::Finite: return "finite";
    case RatioClass::Zero: return "zero";
    case RatioClass::Infinite: return "inf";
  }
  return "?";
}

RatioAssignment RatioAssignment::from_values(const std::vector<cplx>& values, double eta) {
  RatioAssignment out;
  out.r.reserve(values.size());
  for (const auto& v : values) {
    const double a = std::abs(v);
    if (!std::isfinite(a) || a >= 1.0 / eta)
      out.r.push_back(Ratio::infinite());
    else if (a <= eta)
      out.r.push_back(Ratio::zero());
    else
      out.r.push_back(Ratio::finite(v));
  }
  return out;
}

RatioAssignment RatioAssignment::constant(int n_directed, cplx value) {
  return RatioAssignment(std::vector<Ratio>(static_cast<std::size_t>(n_directed),
                                            Ratio::finite(value)));
}

bool RatioAssignment::all_finite() const {
  return std::all_of(r.begin(), r.end(), [](const Ratio& x) { return x.is_finite(); });
}

int RatioAssignment::count(RatioClass c) const {
  return static_cast<int>(
      std::count_if(r.begin(), r.end(), [c](const Ratio& x) { return x.cls == c; }));
}

namespace {

void require_size(const RatioAssignment& r, const Graph& g) {
  if (static_cast<int>(r.size()) != g.n_directed())
    throw PreconditionFailed(detail::format("ratio assignment has %zu entries, graph has %d "
                                            "directed edges",
                                            r.size(), g.n_directed()));
}

// Incremental form of path_ratio, processed front to back.
struct PathState {
  cplx acc{1.0};
  bool inf = false;
  int pending_zero = -1;

  void step(const RatioAssignment& r, const LocalOperator& M, int e) {
    if (inf) return;
    if (pending_zero >= 0) {
      if (r[e].is_infinite()) {
        acc *= -M.off(Graph::inverse(pending_zero)) / M.off(e);
        pending_zero = -1;
        return;
      }
      acc = 0.0;
      pending_zero = -1;
    }
    switch (r[e].cls) {
      case RatioClass::Zero: pending_zero = e; break;
      case RatioClass::Infinite: inf = true; break;
      case RatioClass::Finite: acc *= r[e].value; break;
    }
  }
  cplx value() const { return pending_zero >= 0 ? cplx(0.0) : acc; }
};

cplx apply_at(const TreeBall& ball, const LocalOperator& M, const std::vector<cplx>& f, int x) {
  const TreeVertex& tv = ball.vertices[x];
  cplx s = M.diag(tv.type) * f[x];
  if (tv.parent >= 0) s += M.off(Graph::inverse(tv.entering)) * f[tv.parent];
  for (int c = tv.child_begin; c < tv.child_begin + tv.child_count; ++c)
    s += M.off(ball.vertices[c].entering) * f[c];
  return s;
}

}  // namespace

int infinite_out_edge(const RatioAssignment& r, const Graph& g, int u) {
  for (int e : g.out_edges(u))
    if (r[e].is_infinite()) return e;
  return -1;
}

std::vector<int> v_infinity(const RatioAssignment& r, const Graph& g) {
  std::vector<int> out;
  for (int u = 0; u < g.n_vertices(); ++u)
    if (infinite_out_edge(r, g, u) >= 0) out.push_back(u);
  return out;
}

int u_star(const RatioAssignment& r, const Graph& g, int u) {
  const int e = infinite_out_edge(r, g, u);
  return e >= 0 ? g.head(e) : u;
}

cplx z_value(const RatioAssignment& r, const LocalOperator& M, int u) {
  cplx z = 0.0;
  for (int e : M.graph().out_edges(u))
    if (!r[e].is_infinite()) z += M.off(e) * r[e].finite_value();
  return z;
}

std::vector<int> v_zero(const RatioAssignment& r, const LocalOperator& M, double tol) {
  std::vector<int> out;
  for (int u = 0; u < M.graph().n_vertices(); ++u)
    if (std::abs(M.diag(u) + z_value(r, M, u)) <= tol) out.push_back(u);
  return out;
}

cplx residual_a(const RatioAssignment& r, const LocalOperator& M, int e) {
  const Graph& g = M.graph();
  require_size(r, g);
  if (r[e].is_zero()) throw PreconditionFailed("residual_a: condition (a) does not apply to Zero edges");
  cplx s = M.diag(g.head(e));
  if (r[e].is_finite()) s += M.off(Graph::inverse(e)) / r[e].value;
  for (int f : g.follow(e)) {
    if (r[f].is_infinite())
      throw StructuralViolation(
          detail::format("edge %d is not Zero but is followed by Infinite edge %d", e, f));
    s += M.off(f) * r[f].finite_value();
  }
  return s;
}

ValidityReport validate(const RatioAssignment& r, const LocalOperator& M, double tol) {
  const Graph& g = M.graph();
  require_size(r, g);
  const int nd = g.n_directed();
  ValidityReport rep;
  rep.residuals.assign(static_cast<std::size_t>(nd), cplx(0.0));
  rep.a_applies.assign(static_cast<std::size_t>(nd), 0);
  for (int e = 0; e < nd; ++e) {
    if (r[e].is_finite() && !std::isfinite(std::abs(r[e].value))) {
      rep.cond_a = false;
      rep.failures.push_back(detail::format("(a) edge %d has a non-finite value", e));
    }
  }
  for (int e = 0; e < nd; ++e) {
    if (r[e].is_zero()) {
      bool has_inf = false;
      for (int f : g.follow(e)) has_inf = has_inf || r[f].is_infinite();
      if (!has_inf) {
        rep.cond_b = false;
        rep.failures.push_back(detail::format("(b) Zero edge %d has no Infinite follower", e));
      }
      continue;
    }
    bool inf_follower = false;
    for (int f : g.follow(e)) inf_follower = inf_follower || r[f].is_infinite();
    if (inf_follower) continue;  // reported under (c)
    rep.a_applies[e] = 1;
    rep.residuals[e] = residual_a(r, M, e);
    const double res = std::abs(rep.residuals[e]);
    if (!(res <= tol)) {
      rep.cond_a = false;
      rep.failures.push_back(detail::format("(a) residual %.3e at edge %d", res, e));
    }
    if (std::isfinite(res))
      rep.max_residual = std::max(rep.max_residual, res);
    else
      rep.max_residual = std::numeric_limits<double>::infinity();
  }
  for (int f = 0; f < nd; ++f) {
    if (!r[f].is_infinite()) continue;
    for (int e : g.predecessors(f)) {
      if (!r[e].is_zero()) {
        rep.cond_c = false;
        rep.failures.push_back(
            detail::format("(c) edge %d precedes Infinite edge %d but is not Zero", e, f));
      }
    }
    if (r[Graph::inverse(f)].is_zero()) {
      rep.cond_c = false;
      rep.failures.push_back(
          detail::format("(c) reverse of Infinite edge %d is Zero", f));
    }
  }
  rep.valid = rep.cond_a && rep.cond_b && rep.cond_c;
  return rep;
}

bool structurally_valid(const RatioAssignment& r, const Graph& g) {
  require_size(r, g);
  for (int e = 0; e < g.n_directed(); ++e) {
    if (r[e].is_zero()) {
      bool has_inf = false;
      for (int f : g.follow(e)) has_inf = has_inf || r[f].is_infinite();
      if (!has_inf) return false;
    }
    if (r[e].is_infinite()) {
      for (int p : g.predecessors(e))
        if (!r[p].is_zero()) return false;
      if (r[Graph::inverse(e)].is_zero()) return false;
    }
  }
  return true;
}

int RMatrix::position(int e) const {
  auto it = std::lower_bound(index.begin(), index.end(), e);
  return (it != index.end() && *it == e) ? static_cast<int>(it - index.begin()) : -1;
}

RMatrix build_R(const RatioAssignment& r, const LocalOperator& M) {
  const Graph& g = M.graph();
  require_size(r, g);
  if (!structurally_valid(r, g))
    throw StructuralViolation("build_R: assignment violates condition (b) or (c)");
  RMatrix rm;
  for (int e = 0; e < g.n_directed(); ++e)
    if (!r[e].is_zero()) rm.index.push_back(e);
  const int k = static_cast<int>(rm.index.size());
  rm.R = RealMatrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    const int e = rm.index[i];
    for (int f : g.follow(e)) {
      if (r[f].is_finite()) {
        rm.R(i, rm.position(f)) += std::norm(r[f].value);
      } else if (r[f].is_zero()) {
        for (int h : g.follow(f))
          if (r[h].is_infinite())
            rm.R(i, rm.position(h)) += std::norm(M.off(Graph::inverse(f)) / M.off(h));
      }
    }
  }
  rm.alpha = spectral_radius_nonneg(rm.R);
  return rm;
}

double alpha(const RatioAssignment& r, const LocalOperator& M) { return build_R(r, M).alpha; }

PathValue path_ratio(const RatioAssignment& r, const LocalOperator& M,
                     const std::vector<int>& path) {
  const Graph& g = M.graph();
  require_size(r, g);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] < 0 || path[i] >= g.n_directed())
      throw MalformedPath(detail::format("path entry %zu is not a directed edge", i));
    if (i > 0) {
      auto fol = g.follow(path[i - 1]);
      if (std::find(fol.begin(), fol.end(), path[i]) == fol.end())
        throw MalformedPath(detail::format("edge %d cannot follow edge %d", path[i], path[i - 1]));
    }
  }
  cplx acc = 1.0;
  std::size_t i = 0;
  while (i < path.size()) {
    const Ratio& a = r[path[i]];
    if (a.is_infinite()) return {cplx(0.0), true};
    if (a.is_zero() && i + 1 < path.size() && r[path[i + 1]].is_infinite()) {
      acc *= -M.off(Graph::inverse(path[i])) / M.off(path[i + 1]);
      i += 2;
      continue;
    }
    acc *= a.finite_value();
    ++i;
  }
  return {acc, false};
}

GreenColumn build_fu(const RatioAssignment& r, const LocalOperator& M, const TreeBall& ball,
                     int u, double anchor_tol) {
  const Graph& g = M.graph();
  require_size(r, g);
  if (u < 0 || u >= static_cast<int>(ball.size()))
    throw PreconditionFailed("build_fu: u is not a ball vertex");
  GreenColumn col;
  col.u = u;
  col.f.assign(ball.size(), cplx(0.0));
  const int ut = ball.vertices[u].type;
  const int inf_e = infinite_out_edge(r, g, ut);
  col.in_v_infinity = inf_e >= 0;

  // Tree neighbours of x with the directed edge type x -> neighbour.
  auto for_neighbors = [&](int x, auto&& fn) {
    const TreeVertex& tv = ball.vertices[x];
    if (tv.parent >= 0) fn(tv.parent, Graph::inverse(tv.entering));
    for (int c = tv.child_begin; c < tv.child_begin + tv.child_count; ++c)
      fn(c, ball.vertices[c].entering);
  };

  int start = u;
  if (col.in_v_infinity) {
    start = -1;
    for_neighbors(u, [&](int z, int et) {
      if (et == inf_e) start = z;
    });
    if (start < 0) throw BallTooSmall("build_fu: u* lies outside the ball");
    col.u_star = start;
    col.anchor = M.off(inf_e);
  } else {
    col.anchor = M.diag(ut) + z_value(r, M, ut);
  }
  if (std::abs(col.anchor) <= anchor_tol)
    throw AnchorZero(detail::format("anchor |(M f_u)(u)| = %.3e below tolerance",
                                    std::abs(col.anchor)));

  std::vector<PathState> st(ball.size());
  std::vector<char> seen(ball.size(), 0);
  std::deque<int> q{start};
  seen[start] = 1;
  seen[u] = 1;  // never walk back through u
  col.f[start] = 1.0;
  while (!q.empty()) {
    const int x = q.front();
    q.pop_front();
    for_neighbors(x, [&](int z, int et) {
      if (seen[z]) return;
      seen[z] = 1;
      st[z] = st[x];
      st[z].step(r, M, et);
      if (st[z].inf)
        throw StructuralViolation("build_fu: infinite value inside the Green column");
      col.f[z] = st[z].value();
      q.push_back(z);
    });
  }
  return col;
}

FuReport verify_fu(const RatioAssignment& r, const LocalOperator& M, const TreeBall& ball, int u,
                   double tol) {
  if (!ball.interior(u)) throw BallTooSmall("verify_fu: u must be interior to the ball");
  const GreenColumn col = build_fu(r, M, ball, u);
  FuReport rep;
  for (int x = 0; x < static_cast<int>(ball.size()); ++x) {
    if (!ball.interior(x) || x == u) continue;
    ++rep.interior_checked;
    rep.max_interior_residual =
        std::max(rep.max_interior_residual, std::abs(apply_at(ball, M, col.f, x)));
  }
  rep.anchor_computed = apply_at(ball, M, col.f, u);
  rep.anchor_expected = col.anchor;
  rep.anchor_error = std::abs(rep.anchor_computed - rep.anchor_expected);
  rep.ok = rep.max_interior_residual <= tol &&
           rep.anchor_error <= tol * std::max(1.0, std::abs(rep.anchor_expected));
  return rep;
}

double LevelSums::max_abs_diff() const {
  double d = 0.0;
  for (std::size_t i = 0; i < tree_sums.size() && i < r_power_sums.size(); ++i)
    d = std::max(d, std::abs(tree_sums[i] - r_power_sums[i]));
  return d;
}

double LevelSums::max_rel_diff() const {
  double d = 0.0;
  for (std::size_t i = 0; i < tree_sums.size() && i < r_power_sums.size(); ++i)
    d = std::max(d, std::abs(tree_sums[i] - r_power_sums[i]) /
                        std::max(1.0, std::abs(r_power_sums[i])));
  return d;
}

std::vector<double> r_power_row_sums(const RMatrix& rm, int e, int n_max) {
  const int pos = rm.position(e);
  if (pos < 0) throw PreconditionFailed("r_power_row_sums: edge is not in the R index set");
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rm.index.size()));
  std::vector<double> out{1.0};
  for (int k = 1; k <= n_max; ++k) {
    v = rm.R * v;
    out.push_back(v[pos]);
  }
  return out;
}

LevelSums level_sums(const RatioAssignment& r, const LocalOperator& M, int e, int n_max) {
  const Graph& g = M.graph();
  require_size(r, g);
  if (r[e].is_zero()) throw PreconditionFailed("level_sums: root edge must not be Zero");
  if (n_max < 0) throw PreconditionFailed("level_sums: n_max must be >= 0");
  LevelSums out;
  out.tree_sums.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  out.tree_sums[0] = 1.0;
  std::vector<int> path;
  // Depth-first over walks e -> e1 -> e2 ..., summing |r(e1..ek)|^2 by level.
  auto dfs = [&](auto&& self, int last, int level) -> void {
    for (int f : g.follow(last)) {
      const int lv = level + (r[f].is_infinite() ? 0 : 1);
      if (lv > n_max) continue;
      path.push_back(f);
      const PathValue pv = path_ratio(r, M, path);
      if (pv.infinite) throw StructuralViolation("level_sums: infinite path ratio");
      out.tree_sums[static_cast<std::size_t>(lv)] += std::norm(pv.value);
      // A consumed zero factor can never be revived.
      if (pv.value != cplx(0.0) || r[f].is_zero()) self(self, f, lv);
      path.pop_back();
    }
  };
  dfs(dfs, e, 0);
  out.r_power_sums = r_power_row_sums(build_R(r, M), e, n_max);
  return out;
}

BoundaryWitness boundary_witness_detail(const RatioAssignment& r, const LocalOperator& M,
                                        const TreeBall& ball, int n) {
  const ValidityReport rep = validate(r, M, 1e-8);
  if (!rep.valid) throw PreconditionFailed("boundary_witness: ratio system does not validate");
  const RMatrix rm = build_R(r, M);
  if (std::abs(rm.alpha - 1.0) > 0.05)
    throw PreconditionFailed(
        detail::format("boundary_witness: alpha = %.6f is not within 0.05 of 1", rm.alpha));
  if (n < 1) throw PreconditionFailed("boundary_witness: n must be >= 1");
  if (ball.radius < n + 1)
    throw BallTooSmall(detail::format("boundary_witness: ball radius %d < n + 1 = %d",
                                      ball.radius, n + 1));
  const Eigen::VectorXd pv = perron_vector(rm.R);
  const TreeVertex& root = ball.vertices[0];
  int child = -1;
  double best = -1.0;
  for (int c = root.child_begin; c < root.child_begin + root.child_count; ++c) {
    const int et = ball.vertices[c].entering;
    const int pos = rm.position(et);
    if (pos < 0 || !r[et].is_finite()) continue;
    if (pv[pos] > best + 1e-12) {
      best = pv[pos];
      child = c;
    }
  }
  if (child < 0) throw PreconditionFailed("boundary_witness: no finite root edge available");

  BoundaryWitness out;
  out.root_edge = ball.vertices[child].entering;
  std::vector<cplx> F(ball.size(), cplx(0.0));
  std::vector<PathState> st(ball.size());
  std::vector<char> inside(ball.size(), 0);
  F[0] = 1.0;
  inside[0] = 1;
  for (int x = 1; x < static_cast<int>(ball.size()); ++x) {
    const TreeVertex& tv = ball.vertices[x];
    if (tv.depth > n) break;
    const bool in_branch = tv.parent == 0 ? x == child : inside[tv.parent] != 0;
    if (!in_branch) continue;
    inside[x] = 1;
    st[x] = st[tv.parent];
    st[x].step(r, M, tv.entering);
    F[x] = st[x].value();
  }
  double nf = 0.0, nmf = 0.0;
  for (int x = 0; x < static_cast<int>(ball.size()); ++x) {
    const TreeVertex& tv = ball.vertices[x];
    if (tv.depth > n + 1) break;
    nf += std::norm(F[x]);
    nmf += std::norm(apply_at(ball, M, F, x));
  }
  out.norm_f = std::sqrt(nf);
  out.norm_mf = std::sqrt(nmf);
  out.ratio = out.norm_mf / out.norm_f;
  return out;
}

double boundary_witness(const RatioAssignment& r, const LocalOperator& M, const TreeBall& ball,
                        int n) {
  return boundary_witness_detail(r, M, ball, n).ratio;
}

std::string ratios_to_json(const RatioAssignment& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (int e = 0; e < static_cast<int>(r.size()); ++e) {
    nlohmann::json j;
    j["edge"] = e;
    j["class"] = std::string(to_string(r[e].cls));
    if (r[e].is_infinite()) {
      j["re"] = nullptr;
      j["im"] = nullptr;
    } else {
      j["re"] = r[e].finite_value().real();
      j["im"] = r[e].finite_value().imag();
    }
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

RatioAssignment ratios_from_json(std::string_view text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("ratio JSON: ") + ex.what());
  }
  if (!arr.is_array()) throw ParseError("ratio JSON must be an array");
  RatioAssignment out;
  out.r.resize(arr.size());
  std::vector<char> seen(arr.size(), 0);
  for (const auto& j : arr) {
    if (!j.contains("edge") || !j["edge"].is_number_integer() || !j.contains("class"))
      throw ParseError("ratio JSON entry needs integer 'edge' and 'class'");
    const auto e = j["edge"].get<long long>();
    if (e < 0 || e >= static_cast<long long>(arr.size()) || seen[e])
      throw ParseError("ratio JSON edge ids must be a permutation of 0..n-1");
    seen[e] = 1;
    const std::string c = j["class"].get<std::string>();
    if (c == "finite") {
      if (!j["re"].is_number() || !j["im"].is_number())
        throw ParseError("finite ratio needs numeric 're' and 'im'");
      out.r[e] = Ratio::finite({j["re"].get<double>(), j["im"].get<double>()});
    } else if (c == "zero") {
      out.r[e] = Ratio::zero();
    } else if (c == "inf") {
      out.r[e] = Ratio::infinite();
    } else {
      throw ParseError("unknown ratio class: " + c);
    }
  }
  return out;
}

}  // namespace nbspectra
