#pragma once

#include <vector>

#include "itrain/channel_models.hpp"

namespace itrain {

// Antenna indices already trained (1-based, strictly increasing) with the
// observed channel values aligned to them.
struct TrainedSet {
  std::vector<int> indices;
  Vector values;

  TrainedSet() : values(0) {}
  int size() const { return static_cast<int>(indices.size()); }
  bool contains(int index) const;
  // Inserts keeping indices sorted; duplicate index is an error.
  void insert(int index, Complex value);
  double power() const { return values.squaredNorm(); }
};

// Distribution of one untrained entry given the trained ones: complex
// Gaussian with the stated mean and (real, nonnegative) variance.
struct ConditionalGaussian {
  Complex mean{0.0, 0.0};
  double variance = 1.0;
};

// General covariance path: solves on the trained principal block. Retries
// with a small ridge if the block is numerically singular.
ConditionalGaussian conditional_general(const Matrix& R, const TrainedSet& trained, int n);
ConditionalGaussian conditional_general(const CovarianceMatrix& R, const TrainedSet& trained,
                                        int n);

// Exponential-model closed form; only the nearest trained neighbors on each
// side of n enter. Exact, O(1).
ConditionalGaussian conditional_exponential(Complex rho, const TrainedSet& trained, int n);

// Pr(|h_n|^2 <= x) for h_n ~ CN(mean, variance), variance > 0.
double channel_power_cdf(const ConditionalGaussian& cond, double x);

// Pr(|h_n|^2 >= deficit) = 1 - channel_power_cdf(cond, deficit); handles the
// deterministic (zero-variance) limit by direct comparison.
double success_probability(const ConditionalGaussian& cond, double deficit);

// Antenna maximizing the probability that training it closes the remaining
// power deficit alpha - |trained|^2. Ties break to the lowest index. Uses the
// exponential closed form when R carries the model tag.
int select_next_antenna(const CovarianceMatrix& R, const TrainedSet& trained, double alpha);

// First antenna to train before any channel value is known: the one whose
// training minimizes the summed conditional variance of the others. For the
// exponential model this is floor((M+1)/2).
int first_antenna(const CovarianceMatrix& R);

}  // namespace itrain
