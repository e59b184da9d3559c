#pragma once

#include <vector>

#include "itrain/types.hpp"

namespace itrain {

struct CovarianceMatrix;  // channel_models.hpp

// Compact eigendecomposition of a covariance matrix: eigenvalues kept in
// strictly descending order with the corresponding unit eigenvectors.
struct EigenSystem {
  RealVector eigenvalues;  // descending, all > 0
  Matrix eigenvectors;     // M x rank, orthonormal columns
  int rank() const { return static_cast<int>(eigenvalues.size()); }
};

// Distinct positive eigenvalues with multiplicities, descending. This is the
// input format for the weighted chi-square distribution routines.
struct EigenvalueGroups {
  std::vector<double> values;
  std::vector<int> multiplicities;
  int group_count() const { return static_cast<int>(values.size()); }
  int total_degrees() const;
};

// Eigendecomposition keeping eigenvalues above rank_tol * lambda_max.
// Each kept eigenvector is scaled so its first entry of significant
// magnitude is real and positive, which pins the beam ordering.
EigenSystem compact_eig(const CovarianceMatrix& R, double rank_tol = 1e-10);
EigenSystem compact_eig(const Matrix& R, double rank_tol = 1e-10);

// Merges consecutive near-equal values (descending input); each group keeps
// the arithmetic mean of its members and the summed multiplicity.
EigenvalueGroups group_eigenvalues(const std::vector<double>& descending,
                                   double group_tol = 1e-9);

// Grouped spectrum of the principal submatrix R[indices, indices].
// `indices` are 1-based, strictly increasing; the common case is a prefix
// [1..b] of the training order.
EigenvalueGroups prefix_spectrum(const Matrix& R, const std::vector<int>& indices,
                                 double rank_tol = 1e-10, double group_tol = 1e-9);
EigenvalueGroups prefix_spectrum(const CovarianceMatrix& R, const std::vector<int>& indices,
                                 double rank_tol = 1e-10, double group_tol = 1e-9);

// Closed-form approximate spectrum of the full M x M exponential-correlation
// covariance with |rho| = r, descending. Requires 0 <= r < 1.
std::vector<double> exp_eig_approx_full(int M, double r);

// Closed-form approximate spectrum of the m x m leading principal submatrix
// of the exponential-correlation covariance, descending. Requires 0 < r < 1.
// Throws DegenerateSpectrum when the selected closed form is evaluated at one
// of its known equality conditions (within 1e-9 relative).
std::vector<double> exp_eig_approx_prefix(int m, double r);

}  // namespace itrain
