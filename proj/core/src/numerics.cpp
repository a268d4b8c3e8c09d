#include "nbspectra/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "nbspectra/error.hpp"

namespace nbspectra {

namespace {

void require_square_finite(const auto& m, const char* what) {
  if (m.rows() != m.cols()) throw PreconditionFailed(std::string(what) + ": matrix not square");
  if (!m.allFinite()) throw PreconditionFailed(std::string(what) + ": non-finite entries");
}

}  // namespace

std::vector<cplx> eig_dense(const RealMatrix& m) {
  require_square_finite(m, "eig_dense");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<RealMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NonConvergence("real eigenvalue solver did not converge");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<cplx> eig_dense(const ComplexMatrix& m) {
  require_square_finite(m, "eig_dense");
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NonConvergence("complex eigenvalue solver did not converge");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius_nonneg(const RealMatrix& m) {
  require_square_finite(m, "spectral_radius_nonneg");
  if (m.rows() == 0 || m.isZero(0.0)) return 0.0;
  if ((m.array() < 0.0).any())
    throw PreconditionFailed("spectral_radius_nonneg: negative entry");
  double rho = 0.0;
  for (const auto& z : eig_dense(m)) rho = std::max(rho, std::abs(z));
  return rho;
}

double power_iteration_radius(const RealMatrix& m, int max_iter, double tol) {
  require_square_finite(m, "power_iteration_radius");
  const auto n = m.rows();
  if (n == 0 || m.isZero(0.0)) return 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  x /= x.norm();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = m * x + x;
    double nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    double next = nrm - 1.0;
    y /= nrm;
    x = y;
    if (std::abs(next - est) <= tol * std::max(1.0, std::abs(next))) return next;
    est = next;
  }
  return est;
}

Eigen::VectorXd perron_vector(const RealMatrix& m) {
  require_square_finite(m, "perron_vector");
  const auto n = m.rows();
  if (n == 0) return {};
  Eigen::EigenSolver<RealMatrix> es(m, true);
  if (es.info() != Eigen::Success) throw NonConvergence("perron_vector: solver failed");
  double rho = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
  // The Perron root is real; among eigenvalues at distance ~0 from rho take
  // the one whose eigenvector is closest to a single-signed vector.
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_score = -1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()[i] - cplx(rho)) > 1e-8 * std::max(1.0, rho)) continue;
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    v *= std::conj(v[k]) / std::abs(v[k]);
    Eigen::VectorXd re = v.real();
    double pos = re.cwiseMax(0.0).sum(), tot = v.cwiseAbs().sum();
    double score = tot > 0 ? pos / tot : 0.0;
    if (score > best_score) {
      best_score = score;
      best = re.cwiseMax(0.0);
    }
  }
  double mx = best.maxCoeff();
  if (mx > 0) best /= mx;
  return best;
}

cplx det_at(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw PreconditionFailed("det_at: matrix not square");
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

double det_at(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw PreconditionFailed("det_at: matrix not square");
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<RealMatrix>(m).determinant();
}

MultisetMatch match_multisets(const std::vector<cplx>& a, const std::vector<cplx>& b,
                              double tol) {
  MultisetMatch out;
  out.a_to_b.assign(a.size(), -1);
  out.b_to_a.assign(b.size(), -1);
  // Sort b by real part so that candidate pairs are found by a window scan.
  std::vector<int> order(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::make_tuple(b[i].real(), b[i].imag(), i) <
           std::make_tuple(b[j].real(), b[j].imag(), j);
  });
  std::vector<double> keys(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) keys[i] = b[order[i]].real();

  std::vector<std::tuple<double, int, int>> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto lo = std::lower_bound(keys.begin(), keys.end(), a[i].real() - tol);
    for (auto it = lo; it != keys.end() && *it <= a[i].real() + tol; ++it) {
      int j = order[static_cast<std::size_t>(it - keys.begin())];
      double d = std::abs(a[i] - b[j]);
      if (d <= tol) pairs.emplace_back(d, static_cast<int>(i), j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [d, i, j] : pairs) {
    if (out.a_to_b[i] >= 0 || out.b_to_a[j] >= 0) continue;
    out.a_to_b[i] = j;
    out.b_to_a[j] = i;
    ++out.matched;
    out.max_distance = std::max(out.max_distance, d);
  }
  return out;
}

bool multisets_equal(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
  if (a.size() != b.size()) return false;
  return match_multisets(a, b, tol).matched == static_cast<int>(a.size());
}

}  // namespace nbspectra
