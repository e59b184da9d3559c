#pragma once

#include <utility>
#include <vector>

#include "itrain/channel_models.hpp"

namespace itrain {

enum class Method { exact, approximation };

// Average training length of an interleaved scheme, together with the
// per-step continuation probabilities Pr(first b steps do not reach the
// threshold) that the average sums over.
struct TrainingLengthResult {
  double value = 1.0;
  Method method = Method::exact;
  std::vector<double> step_cdfs;  // entry b-1 = Pr(continue past step b)
};

// Beam-domain training through an arbitrary codebook W (unit-norm columns,
// B <= M): L = 1 + sum_{b=1}^{B-1} Pr(|W[:,1..b]^H h|^2 < alpha).
TrainingLengthResult lt_beam_general(const CovarianceMatrix& R, const Matrix& codebook,
                                     double alpha);

// Beam-domain training through the eigenbeams of R ordered by descending
// eigenvalue; only the rank(R) beams with positive power are trained.
TrainingLengthResult lt_beam_modified(const CovarianceMatrix& R, double alpha);

// Closed-form approximation of lt_beam_modified for the exponential model,
// using the approximate spectrum of the full covariance. r = 0 reduces to
// the i.i.d. formula exactly.
TrainingLengthResult lt_beam_modified_exp_approx(int M, double r, double alpha);

// Antenna-domain training in index order 1..M.
TrainingLengthResult lt_antenna_basic(const CovarianceMatrix& R, double alpha);

// Closed-form approximation of lt_antenna_basic for the exponential model,
// using per-prefix approximate spectra. Requires 0 < r < 1.
TrainingLengthResult lt_antenna_basic_exp_approx(int M, double r, double alpha);

// i.i.d. channel (R = I): L = 1 + sum_{m=1}^{M-1} P(m, alpha).
TrainingLengthResult lt_iid(int M, double alpha);

// Fully correlated channel (rank one, equal antenna powers):
// L = 1 + sum_{m=1}^{M-1} (1 - exp(-alpha / m)).
TrainingLengthResult lt_fully_correlated(int M, double alpha);

// Large-M sandwich for the fully correlated average training length:
// alpha*ln(M) + 1 + alpha*gamma - pi^2 alpha^2 / 12 <= L <= alpha*ln(M) + 1 + alpha*gamma.
std::pair<double, double> fc_asymptotic_bounds(int M, double alpha);

}  // namespace itrain
