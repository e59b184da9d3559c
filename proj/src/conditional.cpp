#include "itrain/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "itrain/errors.hpp"
#include "itrain/special_functions.hpp"

namespace itrain {

bool TrainedSet::contains(int index) const {
  return std::binary_search(indices.begin(), indices.end(), index);
}

void TrainedSet::insert(int index, Complex value) {
  if (index < 1) throw InvalidParameter("trained index must be >= 1");
  const auto pos = std::lower_bound(indices.begin(), indices.end(), index);
  if (pos != indices.end() && *pos == index)
    throw InvalidParameter("trained index inserted twice");
  const Index at = pos - indices.begin();
  indices.insert(pos, index);
  Vector grown(values.size() + 1);
  grown.head(at) = values.head(at);
  grown(at) = value;
  grown.tail(values.size() - at) = values.tail(values.size() - at);
  values = std::move(grown);
}

namespace {

void check_target(int n, Index M, const TrainedSet& trained) {
  if (n < 1 || n > M) throw InvalidParameter("target antenna out of range");
  if (trained.contains(n)) throw InvalidParameter("target antenna already trained");
  if (static_cast<Index>(trained.size()) > 0 &&
      (trained.indices.front() < 1 || trained.indices.back() > M))
    throw InvalidParameter("trained indices out of range");
}

// One factorization of the trained block, reusable across targets.
struct TrainedBlock {
  Matrix block;
  Eigen::LDLT<Matrix> ldlt;
  Vector coeffs;  // R_A^{-1} h_A

  TrainedBlock(const Matrix& R, const TrainedSet& trained) {
    const int m = trained.size();
    block.resize(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        block(i, j) = R(trained.indices[i] - 1, trained.indices[j] - 1);

    ldlt.compute(block);
    coeffs = ldlt.solve(trained.values);
    if (!solve_ok(trained.values, coeffs)) {
      // Ridge retry scaled to the block's average diagonal power.
      const double ridge = 1e-12 * std::abs(block.trace()) / m;
      block += ridge * Matrix::Identity(m, m);
      ldlt.compute(block);
      coeffs = ldlt.solve(trained.values);
      if (!solve_ok(trained.values, coeffs))
        throw SingularConditioning("trained block is numerically singular");
    }
  }

  bool solve_ok(const Vector& rhs, const Vector& sol) const {
    if (!sol.allFinite()) return false;
    const double scale = rhs.norm();
    return (block * sol - rhs).norm() <= 1e-6 * (scale + 1e-30);
  }

  ConditionalGaussian condition(const Matrix& R, const TrainedSet& trained, int n) const {
    const int m = trained.size();
    Vector r_row(m), r_col(m);
    for (int i = 0; i < m; ++i) {
      r_row(i) = R(n - 1, trained.indices[i] - 1);
      r_col(i) = R(trained.indices[i] - 1, n - 1);
    }
    const Vector y = ldlt.solve(r_col);
    ConditionalGaussian out;
    out.mean = r_row.cwiseProduct(coeffs).sum();
    const double own = std::real(R(n - 1, n - 1));
    const double reduced = std::real(r_row.cwiseProduct(y).sum());
    out.variance = std::clamp(own - reduced, 0.0, own);
    return out;
  }
};

}  // namespace

ConditionalGaussian conditional_general(const Matrix& R, const TrainedSet& trained, int n) {
  check_target(n, R.rows(), trained);
  if (trained.size() == 0) return {Complex(0.0, 0.0), std::real(R(n - 1, n - 1))};
  const TrainedBlock block(R, trained);
  return block.condition(R, trained, n);
}

ConditionalGaussian conditional_general(const CovarianceMatrix& R, const TrainedSet& trained,
                                        int n) {
  return conditional_general(R.entries, trained, n);
}

// Markov property of the exponential model: only the nearest trained
// neighbor on each side of n matters, and the blend has a closed form.
ConditionalGaussian conditional_exponential(Complex rho, const TrainedSet& trained, int n) {
  const double r = std::abs(rho);
  if (!(r < 1.0)) throw InvalidParameter("exponential model requires |rho| < 1");
  if (n < 1) throw InvalidParameter("target antenna out of range");
  if (trained.contains(n)) throw InvalidParameter("target antenna already trained");
  if (trained.size() == 0) return {Complex(0.0, 0.0), 1.0};

  const auto above = std::lower_bound(trained.indices.begin(), trained.indices.end(), n);
  ConditionalGaussian out;
  if (above == trained.indices.begin()) {
    // All trained antennas sit to the right of n.
    const int a = trained.indices.front();
    const int d = a - n;
    out.mean = cpow_int(std::conj(rho), d) * trained.values(0);
    out.variance = 1.0 - std::pow(r, 2.0 * d);
  } else if (above == trained.indices.end()) {
    const int idx = trained.size() - 1;
    const int a = trained.indices.back();
    const int d = n - a;
    out.mean = cpow_int(rho, d) * trained.values(idx);
    out.variance = 1.0 - std::pow(r, 2.0 * d);
  } else {
    const Index right = above - trained.indices.begin();
    const int a_left = trained.indices[right - 1];
    const int a_right = trained.indices[right];
    const int x1 = n - a_left;
    const int x2 = a_right - n;
    const double r2x1 = std::pow(r, 2.0 * x1);
    const double r2x2 = std::pow(r, 2.0 * x2);
    const double denom = 1.0 - r2x1 * r2x2;
    out.mean = (cpow_int(rho, x1) * (1.0 - r2x2) * trained.values(right - 1) +
                cpow_int(std::conj(rho), x2) * (1.0 - r2x1) * trained.values(right)) /
               denom;
    out.variance = (1.0 - r2x1) * (1.0 - r2x2) / denom;
  }
  out.variance = std::clamp(out.variance, 0.0, 1.0);
  return out;
}

double channel_power_cdf(const ConditionalGaussian& cond, double x) {
  if (!(cond.variance > 0.0))
    throw DeterministicChannel("zero conditional variance: compare |mean|^2 directly");
  if (!(x >= 0.0)) return 0.0;
  const double sigma = std::sqrt(cond.variance);
  const double a = std::sqrt(2.0) * std::abs(cond.mean) / sigma;
  const double b = std::sqrt(2.0 * x) / sigma;
  if (!std::isfinite(a) || !std::isfinite(b))  // variance underflow: a step function
    return std::norm(cond.mean) <= x ? 1.0 : 0.0;
  return 1.0 - marcum_q1(a, b);
}

double success_probability(const ConditionalGaussian& cond, double deficit) {
  if (deficit <= 0.0) return 1.0;
  if (!(cond.variance > 0.0)) return std::norm(cond.mean) >= deficit ? 1.0 : 0.0;
  return 1.0 - channel_power_cdf(cond, deficit);
}

int select_next_antenna(const CovarianceMatrix& R, const TrainedSet& trained, double alpha) {
  const int M = static_cast<int>(R.size());
  if (trained.size() == 0)
    throw InvalidParameter("select_next_antenna needs at least one trained antenna");
  if (trained.indices.front() < 1 || trained.indices.back() > M)
    throw InvalidParameter("trained indices out of range");
  if (trained.size() >= M) throw InvalidParameter("no untrained antenna left");

  const double deficit = std::max(alpha - trained.power(), 0.0);
  int best = -1;
  double best_p = -1.0;

  if (R.exponential_rho) {
    const Complex rho = *R.exponential_rho;
    for (int n = 1; n <= M; ++n) {
      if (trained.contains(n)) continue;
      const double p = success_probability(conditional_exponential(rho, trained, n), deficit);
      if (p > best_p) {
        best_p = p;
        best = n;
      }
    }
  } else {
    const TrainedBlock block(R.entries, trained);
    for (int n = 1; n <= M; ++n) {
      if (trained.contains(n)) continue;
      const double p = success_probability(block.condition(R.entries, trained, n), deficit);
      if (p > best_p) {
        best_p = p;
        best = n;
      }
    }
  }
  return best;
}

int first_antenna(const CovarianceMatrix& R) {
  const int M = static_cast<int>(R.size());
  if (R.exponential_rho) return (M + 1) / 2;

  // Minimize the summed conditional variance of the untrained antennas.
  int best = 1;
  double best_total = std::numeric_limits<double>::max();
  for (int m = 0; m < M; ++m) {
    const double own = std::real(R.entries(m, m));
    double total = 0.0;
    for (int n = 0; n < M; ++n) {
      if (n == m) continue;
      const double var = std::real(R.entries(n, n));
      const double reduction = own > 1e-30 ? std::norm(R.entries(n, m)) / own : 0.0;
      total += var - reduction;
    }
    // Near-ties (e.g. the two central antennas of a Toeplitz model, equal
    // up to roundoff) resolve to the lowest index.
    if (total < best_total - 1e-12 * (1.0 + std::abs(best_total))) {
      best_total = total;
      best = m + 1;
    }
  }
  return best;
}

}  // namespace itrain
