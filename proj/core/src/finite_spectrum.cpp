#include "nbspectra/finite_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nbspectra/error.hpp"

namespace nbspectra {

RealMatrix build_B(const Graph& g) {
  require_leafless(g, "build_B");
  const int nd = g.n_directed();
  RealMatrix B = RealMatrix::Zero(nd, nd);
  for (int e = 0; e < nd; ++e)
    for (int f : g.follow(e)) B(e, f) = 1.0;
  return B;
}

RealMatrix adjacency_matrix(const Graph& g) {
  const int n = g.n_vertices();
  RealMatrix A = RealMatrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    A(e.u, e.v) = 1.0;
    A(e.v, e.u) = 1.0;
  }
  return A;
}

RealMatrix build_companion(const Graph& g) {
  const int n = g.n_vertices();
  RealMatrix X = RealMatrix::Zero(2 * n, 2 * n);
  X.topLeftCorner(n, n) = adjacency_matrix(g);
  for (int v = 0; v < n; ++v) {
    X(v, n + v) = -(g.degree(v) - 1.0);
    X(n + v, v) = 1.0;
  }
  return X;
}

NBSpectrumFinite nb_spectrum_finite(const Graph& g) {
  require_leafless(g, "nb_spectrum_finite");
  NBSpectrumFinite out;
  out.eigenvalues = eig_dense(build_companion(g));
  out.provenance.assign(out.eigenvalues.size(), Provenance::Companion);
  const int extra = g.n_edges() - g.n_vertices();
  for (int k = 0; k < extra; ++k) {
    out.eigenvalues.emplace_back(1.0);
    out.provenance.push_back(Provenance::BassPm1);
  }
  for (int k = 0; k < extra; ++k) {
    out.eigenvalues.emplace_back(-1.0);
    out.provenance.push_back(Provenance::BassPm1);
  }
  return out;
}

std::vector<cplx> nb_spectrum_direct(const Graph& g) { return eig_dense(build_B(g)); }

std::pair<cplx, cplx> bass_sides(const Graph& g, cplx u) {
  const RealMatrix B = build_B(g);
  const int nd = g.n_directed();
  const int n = g.n_vertices();
  ComplexMatrix L = ComplexMatrix::Identity(nd, nd) - u * B.cast<cplx>();
  ComplexMatrix R = ComplexMatrix::Identity(n, n) - u * adjacency_matrix(g).cast<cplx>();
  for (int v = 0; v < n; ++v) R(v, v) += u * u * (g.degree(v) - 1.0);
  cplx lhs = det_at(L);
  cplx rhs = std::pow(1.0 - u * u, g.n_edges() - n) * det_at(R);
  return {lhs, rhs};
}

BassReport verify_bass_report(const Graph& g, int n_samples, std::uint64_t seed) {
  require_leafless(g, "verify_bass");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  BassReport rep;
  for (int s = 0; s < n_samples; ++s) {
    const double rad = 0.5 * std::sqrt(unif(rng));
    const double th = 2.0 * M_PI * unif(rng);
    const auto [lhs, rhs] = bass_sides(g, std::polar(rad, th));
    const double res = std::abs(lhs - rhs);
    rep.max_residual = std::max(rep.max_residual, res);
    rep.max_relative = std::max(rep.max_relative, res / std::max(1.0, std::abs(lhs)));
    rep.max_abs_lhs = std::max(rep.max_abs_lhs, std::abs(lhs));
  }
  return rep;
}

double verify_bass(const Graph& g, int n_samples, std::uint64_t seed) {
  return verify_bass_report(g, n_samples, seed).max_residual;
}

double growth_rate(const Graph& g) { return spectral_radius_nonneg(build_B(g)); }

AnnulusAudit annulus_audit(const Graph& g, const std::vector<cplx>& spectrum, double slack,
                           double imag_tol) {
  AnnulusAudit a;
  const double lo = std::sqrt(g.d_min() - 1.0);
  const double hi = std::sqrt(g.d_max() - 1.0);
  const double real_hi = g.d_max() - 1.0;
  for (const auto& z : spectrum) {
    ++a.checked;
    const double r = std::abs(z);
    double excess = 0.0;
    if (std::abs(z.imag()) > imag_tol)
      excess = std::max(lo - r, r - hi);
    else
      excess = std::max(1.0 - r, r - real_hi);
    if (excess > slack) {
      ++a.violations;
      a.ok = false;
    }
    a.worst_excess = std::max(a.worst_excess, excess);
  }
  return a;
}

}  // namespace nbspectra
