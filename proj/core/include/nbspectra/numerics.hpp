#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nbspectra {

using cplx = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

// All eigenvalues with algebraic multiplicity. Throws NonConvergence.
std::vector<cplx> eig_dense(const RealMatrix& m);
std::vector<cplx> eig_dense(const ComplexMatrix& m);

// rho(m) for an entrywise nonnegative matrix, via the dense eigen solve.
double spectral_radius_nonneg(const RealMatrix& m);

// Power iteration on I + m (aperiodic even when m is periodic). Cross-check
// only; slow when the spectral gap is small.
double power_iteration_radius(const RealMatrix& m, int max_iter = 20000, double tol = 1e-13);

// Nonnegative right Perron vector, normalised to unit max entry.
Eigen::VectorXd perron_vector(const RealMatrix& m);

cplx det_at(const ComplexMatrix& m);
double det_at(const RealMatrix& m);

// Greedy minimum-distance matching between two multisets. Pairs are taken
// in order of increasing distance, and only pairs within tol qualify.
struct MultisetMatch {
  std::vector<int> a_to_b;  // -1 where unmatched
  std::vector<int> b_to_a;
  int matched = 0;
  double max_distance = 0.0;  // over matched pairs
};

MultisetMatch match_multisets(const std::vector<cplx>& a, const std::vector<cplx>& b,
                              double tol = 1e-6);

bool multisets_equal(const std::vector<cplx>& a, const std::vector<cplx>& b,
                     double tol = 1e-6);

}  // namespace nbspectra
