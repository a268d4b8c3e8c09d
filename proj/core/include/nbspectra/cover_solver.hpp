#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nbspectra/operator.hpp"
#include "nbspectra/ratio_system.hpp"

namespace nbspectra {

enum class Decision { Out, In, Boundary, Unknown };
enum class Method { ForcedPoint, FixedPoint, Continuation, NewtonMultistart, None };

std::string_view to_string(Decision d);
std::string_view to_string(Method m);

struct SolverConfig {
  double eps_alpha = 0.02;
  double damping = 0.5;
  int fp_max_iter = 2000;
  double tol = 1e-10;
  double residual_tol = kDefaultResidualTol;
  double class_eta = kDefaultClassEta;
  double T0 = 0.0;  // <= 0: 4 + 2 sqrt(gr)
  int continuation_steps = 20;
  int newton_starts = 32;
  double newton_radius = 2.0;
  int newton_max_iter = 100;
  double chart_switch = 2.0;
  double dedup_radius = 1e-6;
  std::uint64_t seed = 0;
  bool use_fixed_point = true;
  bool use_continuation = true;
  bool use_newton = true;

  // Same config with every iteration budget scaled.
  SolverConfig scaled(int factor) const;
};

struct FixedPointResult {
  RatioAssignment r;
  int iterations = 0;
  double last_step = 0.0;
};

// r_e <- (1-theta) r_e + theta * (-m_{e^-1} / (m_vv + sum_{e->e'} m_{e'} r_{e'})).
// Throws Divergence (blow-up or iteration cap) and PoleHit (denominator
// below 1e-14).
FixedPointResult fixed_point_solve(const LocalOperator& M,
                                   const std::optional<std::vector<cplx>>& init,
                                   double damping = 0.5, int max_iter = 2000,
                                   double tol = 1e-10);

struct ContinuationResult {
  RatioAssignment r;
  int stages = 0;
  double last_shift = 0.0;
};

// Solve at lambda + i*s*T0 (s = sign of Im lambda, +1 on the real axis),
// then warm-start through shifts T0 * 2^-k, k < steps, and finally 0.
ContinuationResult continuation_solve(const OperatorFamily& f, cplx lambda, double T0,
                                      int steps, const SolverConfig& cfg = {});

struct NewtonSolution {
  RatioAssignment r;
  double residual = 0.0;  // of the cleared system in the final charts
  int iterations = 0;
  int start = 0;
};

// Multistart Newton on the cleared system
//   m_{e^-1} + r_e (m_vv + sum_{e->e'} m_{e'} r_{e'}) = 0
// with per-variable reciprocal charts. Half the starts are constant vectors,
// half are iid complex Gaussian with the given radius. When reflect is set the
// seeded starts are mapped by that symmetry (see membership).
struct NewtonOptions {
  int n_starts = 32;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  double radius = 2.0;
  int max_iter = 100;
  double chart_switch = 2.0;
  double class_eta = kDefaultClassEta;
  double dedup_radius = 1e-6;
  bool conjugate_starts = false;
  bool negate_starts = false;
};

std::vector<NewtonSolution> newton_multistart(const LocalOperator& M, const NewtonOptions& opt);
std::vector<NewtonSolution> newton_multistart(const LocalOperator& M, int n_starts,
                                              std::uint64_t seed, double tol = 1e-10);

// Chordal distance between assignments (max over edges).
double chordal_distance(const RatioAssignment& a, const RatioAssignment& b);

struct Diagnostics {
  int fp_iterations = 0;
  int continuation_stages = 0;
  int newton_starts = 0;
  int newton_converged = 0;
  int candidates = 0;
  int validated = 0;
  int rejected = 0;
  double min_alpha = -1.0;          // over validated systems, -1 when none
  double min_alpha_rejected = -1.0;  // over rejected-but-structured systems
  bool heuristic = false;
  int chart_degeneracies = 0;  // near-boundary Zero/Infinite classifications
  std::string note;
};

struct MembershipVerdict {
  cplx lambda{};
  Decision decision = Decision::Unknown;
  Method method = Method::None;
  std::optional<RatioAssignment> evidence;
  double alpha = -1.0;  // of the evidence, -1 when none
  Diagnostics diag;
};

// Decide whether lambda lies in the spectral set of the family's pullback to
// the universal cover.
MembershipVerdict membership(const OperatorFamily& f, cplx lambda, const SolverConfig& cfg = {});

std::string verdict_to_json(const MembershipVerdict& v);

// Seed derived from the symmetry-reduced point (|Re|, |Im|) and a base seed.
std::uint64_t point_seed(cplx lambda, std::uint64_t base, bool sign_symmetric);

}  // namespace nbspectra
