#pragma once

#include <cstdint>
#include <vector>

#include "nbspectra/graph.hpp"
#include "nbspectra/numerics.hpp"

namespace nbspectra {

// B[e][e'] = 1 iff e -> e'. Requires d_min >= 2.
RealMatrix build_B(const Graph& g);

RealMatrix adjacency_matrix(const Graph& g);

// X = [[A, -Q], [I, 0]] with Q = diag(d_v - 1); det(X - t I) = det(Q_t).
RealMatrix build_companion(const Graph& g);

enum class Provenance { Companion, BassPm1 };

struct NBSpectrumFinite {
  std::vector<cplx> eigenvalues;
  std::vector<Provenance> provenance;
};

// eig(X) plus +1 and -1 each with multiplicity m - n (m undirected edges).
NBSpectrumFinite nb_spectrum_finite(const Graph& g);

// eig(B) directly; used as the independent pipeline.
std::vector<cplx> nb_spectrum_direct(const Graph& g);

// max over seeded samples u, |u| <= 0.5, of
// |det(I - uB) - (1 - u^2)^(m-n) det(I - uA + u^2 Q)|.
struct BassReport {
  double max_residual = 0.0;
  double max_relative = 0.0;  // residual / max(1, |lhs|)
  double max_abs_lhs = 0.0;
};

BassReport verify_bass_report(const Graph& g, int n_samples, std::uint64_t seed);
double verify_bass(const Graph& g, int n_samples, std::uint64_t seed);

// Both sides at a single u.
std::pair<cplx, cplx> bass_sides(const Graph& g, cplx u);

double growth_rate(const Graph& g);

// Finite-graph annulus bounds: non-real eigenvalues lie in
// sqrt(d_min-1) <= |t| <= sqrt(d_max-1); real ones satisfy 1 <= |t| <= d_max-1.
struct AnnulusAudit {
  bool ok = true;
  int checked = 0;
  int violations = 0;
  double worst_excess = 0.0;
};

AnnulusAudit annulus_audit(const Graph& g, const std::vector<cplx>& spectrum,
                           double slack = 1e-6, double imag_tol = 1e-8);

}  // namespace nbspectra
