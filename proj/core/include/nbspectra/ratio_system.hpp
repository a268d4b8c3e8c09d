#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nbspectra/graph.hpp"
#include "nbspectra/numerics.hpp"
#include "nbspectra/operator.hpp"

namespace nbspectra {

enum class RatioClass { Finite, Zero, Infinite };

std::string_view to_string(RatioClass c);

struct Ratio {
  RatioClass cls = RatioClass::Finite;
  cplx value{};  // meaningful only for Finite

  static Ratio finite(cplx v) { return {RatioClass::Finite, v}; }
  static Ratio zero() { return {RatioClass::Zero, {}}; }
  static Ratio infinite() { return {RatioClass::Infinite, {}}; }

  bool is_zero() const { return cls == RatioClass::Zero; }
  bool is_infinite() const { return cls == RatioClass::Infinite; }
  bool is_finite() const { return cls == RatioClass::Finite; }
  // Zero counts as 0, Finite as its value. Undefined for Infinite.
  cplx finite_value() const { return cls == RatioClass::Zero ? cplx(0.0) : value; }
};

inline constexpr double kDefaultClassEta = 1e-8;
inline constexpr double kDefaultResidualTol = 1e-9;
inline constexpr double kDefaultV0Tol = 1e-9;

// One Ratio per directed edge. No structural invariant is enforced here;
// validate() reports violations.
struct RatioAssignment {
  std::vector<Ratio> r;

  RatioAssignment() = default;
  explicit RatioAssignment(std::vector<Ratio> v) : r(std::move(v)) {}

  // Classify raw values: |v| <= eta -> Zero, |v| >= 1/eta -> Infinite.
  static RatioAssignment from_values(const std::vector<cplx>& values,
                                     double eta = kDefaultClassEta);
  static RatioAssignment constant(int n_directed, cplx value);

  std::size_t size() const { return r.size(); }
  const Ratio& operator[](int e) const { return r[static_cast<std::size_t>(e)]; }
  Ratio& operator[](int e) { return r[static_cast<std::size_t>(e)]; }

  bool all_finite() const;
  int count(RatioClass c) const;
};

// The Infinite out-edge of u, or -1. With several, the lowest index.
int infinite_out_edge(const RatioAssignment& r, const Graph& g, int u);
std::vector<int> v_infinity(const RatioAssignment& r, const Graph& g);
// Neighbour across the Infinite out-edge, or u itself.
int u_star(const RatioAssignment& r, const Graph& g, int u);
// Sum of m_e r_e over non-Infinite edges leaving u.
cplx z_value(const RatioAssignment& r, const LocalOperator& M, int u);
std::vector<int> v_zero(const RatioAssignment& r, const LocalOperator& M,
                        double tol = kDefaultV0Tol);

// m_vv + m_{e^-1}/r_e + sum_{e->e'} m_{e'} r_{e'} with 1/inf = 0.
// Requires class(e) != Zero; throws StructuralViolation when an Infinite
// follower appears.
cplx residual_a(const RatioAssignment& r, const LocalOperator& M, int e);

struct ValidityReport {
  std::vector<cplx> residuals;    // per edge; 0 where (a) does not apply
  std::vector<char> a_applies;    // class != Zero and no Infinite follower
  bool cond_a = true;
  bool cond_b = true;
  bool cond_c = true;
  double max_residual = 0.0;
  bool valid = false;
  std::vector<std::string> failures;
};

ValidityReport validate(const RatioAssignment& r, const LocalOperator& M,
                        double tol = kDefaultResidualTol);

// Structural part of validate only: (b) and (c).
bool structurally_valid(const RatioAssignment& r, const Graph& g);

struct RMatrix {
  std::vector<int> index;  // directed edges with class != Zero, ascending
  RealMatrix R;
  double alpha = 0.0;
  int position(int e) const;  // -1 if e is not indexed
};

RMatrix build_R(const RatioAssignment& r, const LocalOperator& M);
double alpha(const RatioAssignment& r, const LocalOperator& M);

struct PathValue {
  cplx value{};
  bool infinite = false;
};

// Product of ratios along a non-backtracking path, with a Zero edge followed
// by an Infinite edge contributing -m_{e1^-1}/m_{e2}.
PathValue path_ratio(const RatioAssignment& r, const LocalOperator& M,
                     const std::vector<int>& path);

// Green column candidate on a tree ball.
struct GreenColumn {
  std::vector<cplx> f;  // per ball vertex
  cplx anchor{};        // m_{uu*} or m_uu + Z(u)
  bool in_v_infinity = false;
  int u = 0;
  int u_star = -1;  // tree index of u*, -1 when u is not in V_inf
};

GreenColumn build_fu(const RatioAssignment& r, const LocalOperator& M, const TreeBall& ball,
                     int u, double anchor_tol = kDefaultV0Tol);

struct FuReport {
  double max_interior_residual = 0.0;  // over interior x != u
  cplx anchor_computed{};              // (M f_u)(u) on the ball
  cplx anchor_expected{};
  double anchor_error = 0.0;
  int interior_checked = 0;
  bool ok = false;
};

FuReport verify_fu(const RatioAssignment& r, const LocalOperator& M, const TreeBall& ball,
                   int u, double tol = 1e-8);

// Level sums below a non-Zero edge e, levels counted as edges minus
// Infinite edges. tree_sums comes from explicit walk enumeration with
// path_ratio; r_power_sums are row sums of R^n at row e.
struct LevelSums {
  std::vector<double> tree_sums;
  std::vector<double> r_power_sums;
  double max_abs_diff() const;
  double max_rel_diff() const;
};

LevelSums level_sums(const RatioAssignment& r, const LocalOperator& M, int e, int n_max);

std::vector<double> r_power_row_sums(const RMatrix& rm, int e, int n_max);

// ||M F_n|| / ||F_n|| for the truncated column below the root edge with the
// largest Perron weight. Requires |alpha - 1| <= 0.05 and radius >= n + 1.
struct BoundaryWitness {
  double ratio = 0.0;
  double norm_f = 0.0;
  double norm_mf = 0.0;
  int root_edge = -1;
};

BoundaryWitness boundary_witness_detail(const RatioAssignment& r, const LocalOperator& M,
                                        const TreeBall& ball, int n);
double boundary_witness(const RatioAssignment& r, const LocalOperator& M, const TreeBall& ball,
                        int n);

// JSON array of {"edge","class","re","im"}.
std::string ratios_to_json(const RatioAssignment& r);
RatioAssignment ratios_from_json(std::string_view text);

}  // namespace nbspectra
