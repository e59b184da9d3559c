#include "itrain/analytic.hpp"

#include <cmath>
#include <numeric>

#include "itrain/errors.hpp"
#include "itrain/special_functions.hpp"
#include "itrain/spectra.hpp"

namespace itrain {

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InvalidParameter("threshold alpha must be nonnegative and finite");
}

TrainingLengthResult sum_steps(std::vector<double> step_cdfs, Method method) {
  TrainingLengthResult out;
  out.method = method;
  out.step_cdfs = std::move(step_cdfs);
  out.value = 1.0 + std::accumulate(out.step_cdfs.begin(), out.step_cdfs.end(), 0.0);
  return out;
}

// Groups from a descending list. The closed-form spectra produce distinct
// values; the tiny tolerance only absorbs ties at double precision.
EigenvalueGroups distinct_groups(const std::vector<double>& descending, int count) {
  return group_eigenvalues({descending.begin(), descending.begin() + count}, 1e-13);
}

}  // namespace

TrainingLengthResult lt_beam_general(const CovarianceMatrix& R, const Matrix& codebook,
                                     double alpha) {
  check_alpha(alpha);
  const Index M = R.size();
  const Index B = codebook.cols();
  if (codebook.rows() != M) throw InvalidParameter("codebook rows must match antenna count");
  if (B < 1 || B > M) throw InvalidParameter("codebook must have between 1 and M columns");
  for (Index c = 0; c < B; ++c) {
    if (std::abs(codebook.col(c).norm() - 1.0) > 1e-9)
      throw InvalidParameter("codebook columns must be unit norm");
  }

  Matrix Rb = codebook.adjoint() * R.entries * codebook;
  Rb = 0.5 * (Rb + Rb.adjoint().eval());

  std::vector<double> steps;
  steps.reserve(B - 1);
  std::vector<int> prefix;
  for (int b = 1; b <= B - 1; ++b) {
    prefix.push_back(b);
    steps.push_back(wcs_cdf(prefix_spectrum(Rb, prefix), alpha));
  }
  return sum_steps(std::move(steps), Method::exact);
}

TrainingLengthResult lt_beam_modified(const CovarianceMatrix& R, double alpha) {
  check_alpha(alpha);
  const EigenSystem eig = compact_eig(R);
  const int B = eig.rank();
  std::vector<double> lambda(eig.eigenvalues.data(), eig.eigenvalues.data() + B);

  std::vector<double> steps;
  steps.reserve(B - 1);
  for (int b = 1; b <= B - 1; ++b)
    steps.push_back(wcs_cdf(group_eigenvalues({lambda.begin(), lambda.begin() + b}), alpha));
  return sum_steps(std::move(steps), Method::exact);
}

TrainingLengthResult lt_beam_modified_exp_approx(int M, double r, double alpha) {
  if (M < 1) throw InvalidParameter("M must be >= 1");
  if (!(r >= 0.0 && r < 1.0)) throw InvalidParameter("need 0 <= r < 1");
  check_alpha(alpha);
  if (r == 0.0) {
    TrainingLengthResult out = lt_iid(M, alpha);
    out.method = Method::approximation;
    return out;
  }
  const std::vector<double> delta = exp_eig_approx_full(M, r);
  for (int j = 1; j < M; ++j) {
    if (delta[j - 1] - delta[j] <= 1e-12 * delta[j - 1])
      throw DegenerateSpectrum("approximate full spectrum has coincident values");
  }

  std::vector<double> steps;
  steps.reserve(M - 1);
  for (int b = 1; b <= M - 1; ++b)
    steps.push_back(wcs_cdf(distinct_groups(delta, b), alpha));
  return sum_steps(std::move(steps), Method::approximation);
}

TrainingLengthResult lt_antenna_basic(const CovarianceMatrix& R, double alpha) {
  check_alpha(alpha);
  const int M = static_cast<int>(R.size());
  std::vector<double> steps;
  steps.reserve(M - 1);
  std::vector<int> prefix;
  for (int m = 1; m <= M - 1; ++m) {
    prefix.push_back(m);
    steps.push_back(wcs_cdf(prefix_spectrum(R, prefix), alpha));
  }
  return sum_steps(std::move(steps), Method::exact);
}

TrainingLengthResult lt_antenna_basic_exp_approx(int M, double r, double alpha) {
  if (M < 1) throw InvalidParameter("M must be >= 1");
  if (!(r > 0.0 && r < 1.0)) throw InvalidParameter("need 0 < r < 1");
  check_alpha(alpha);
  std::vector<double> steps;
  if (M >= 2) steps.push_back(-std::expm1(-alpha));  // single entry: exact exponential step
  for (int m = 2; m <= M - 1; ++m) {
    const std::vector<double> v = exp_eig_approx_prefix(m, r);
    steps.push_back(wcs_cdf(distinct_groups(v, m), alpha));
  }
  return sum_steps(std::move(steps), Method::approximation);
}

TrainingLengthResult lt_iid(int M, double alpha) {
  if (M < 1) throw InvalidParameter("M must be >= 1");
  check_alpha(alpha);
  TrainingLengthResult out;
  out.method = Method::exact;
  out.step_cdfs.reserve(M - 1);
  for (int m = 1; m <= M - 1; ++m) out.step_cdfs.push_back(gamma_p(m, alpha));
  // Telescoped form of 1 + sum_m P(m, alpha): summing min(K, M-1) over a
  // Poisson(alpha) count K. Unlike the direct sum it cannot creep past the
  // 1 + alpha ceiling through rounding.
  out.value = 1.0;
  if (M >= 2) out.value += (M - 1) * gamma_p(M - 1, alpha);
  if (M >= 3) out.value += alpha * gamma_q(M - 2, alpha);
  return out;
}

TrainingLengthResult lt_fully_correlated(int M, double alpha) {
  if (M < 1) throw InvalidParameter("M must be >= 1");
  check_alpha(alpha);
  std::vector<double> steps;
  steps.reserve(M - 1);
  for (int m = 1; m <= M - 1; ++m) steps.push_back(-std::expm1(-alpha / m));
  return sum_steps(std::move(steps), Method::exact);
}

std::pair<double, double> fc_asymptotic_bounds(int M, double alpha) {
  if (M < 1) throw InvalidParameter("M must be >= 1");
  check_alpha(alpha);
  constexpr double kEulerGamma = 0.5772156649;
  constexpr double kPi = 3.14159265358979323846;
  const double upper = alpha * std::log(static_cast<double>(M)) + 1.0 + alpha * kEulerGamma;
  const double lower = upper - kPi * kPi * alpha * alpha / 12.0;
  return {lower, upper};
}

}  // namespace itrain
