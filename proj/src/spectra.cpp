#include "itrain/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "itrain/channel_models.hpp"
#include "itrain/errors.hpp"

namespace itrain {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Rotates each column so its first entry of significant magnitude is real
// and positive; pins an otherwise arbitrary per-eigenvector phase.
void normalize_phases(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    for (Index r = 0; r < vectors.rows(); ++r) {
      const Complex v = vectors(r, c);
      if (std::abs(v) > 1e-8) {
        vectors.col(c) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
}

}  // namespace

EigenSystem compact_eig(const Matrix& R, double rank_tol) {
  if (R.rows() != R.cols() || R.rows() < 1)
    throw InvalidParameter("compact_eig: matrix must be square and nonempty");
  Eigen::SelfAdjointEigenSolver<Matrix> es(R);
  if (es.info() != Eigen::Success) throw InvalidParameter("compact_eig: eigensolver failed");
  const RealVector& lambda = es.eigenvalues();  // ascending
  const double cutoff = rank_tol * std::max(lambda.maxCoeff(), 0.0);

  EigenSystem out;
  int kept = 0;
  for (Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > cutoff && lambda(i) > 0.0) ++kept;
  out.eigenvalues.resize(kept);
  out.eigenvectors.resize(R.rows(), kept);
  for (int j = 0; j < kept; ++j) {
    const Index src = lambda.size() - 1 - j;  // descending
    out.eigenvalues(j) = lambda(src);
    out.eigenvectors.col(j) = es.eigenvectors().col(src);
  }
  normalize_phases(out.eigenvectors);
  return out;
}

EigenSystem compact_eig(const CovarianceMatrix& R, double rank_tol) {
  return compact_eig(R.entries, rank_tol);
}

EigenvalueGroups group_eigenvalues(const std::vector<double>& descending, double group_tol) {
  EigenvalueGroups out;
  double running_sum = 0.0;
  int running_count = 0;
  double last = 0.0;
  for (std::size_t i = 0; i < descending.size(); ++i) {
    const double v = descending[i];
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidParameter("group_eigenvalues: values must be positive");
    if (i > 0 && v > last)
      throw InvalidParameter("group_eigenvalues: values must be descending");
    if (running_count > 0 && (last - v) / last < group_tol) {
      running_sum += v;
      ++running_count;
    } else {
      if (running_count > 0) {
        out.values.push_back(running_sum / running_count);
        out.multiplicities.push_back(running_count);
      }
      running_sum = v;
      running_count = 1;
    }
    last = v;
  }
  if (running_count > 0) {
    out.values.push_back(running_sum / running_count);
    out.multiplicities.push_back(running_count);
  }
  return out;
}

EigenvalueGroups prefix_spectrum(const Matrix& R, const std::vector<int>& indices,
                                 double rank_tol, double group_tol) {
  const int M = static_cast<int>(R.rows());
  if (indices.empty()) throw InvalidParameter("prefix_spectrum: index set must be nonempty");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || indices[i] > M)
      throw InvalidParameter("prefix_spectrum: index out of range");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw InvalidParameter("prefix_spectrum: indices must be strictly increasing");
  }

  const int b = static_cast<int>(indices.size());
  Matrix sub(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) sub(i, j) = R(indices[i] - 1, indices[j] - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
  const RealVector& lambda = es.eigenvalues();  // ascending
  const double cutoff = rank_tol * std::max(lambda.maxCoeff(), 0.0);
  std::vector<double> kept;
  for (Index i = lambda.size() - 1; i >= 0; --i)
    if (lambda(i) > cutoff && lambda(i) > 0.0) kept.push_back(lambda(i));
  return group_eigenvalues(kept, group_tol);
}

EigenvalueGroups prefix_spectrum(const CovarianceMatrix& R, const std::vector<int>& indices,
                                 double rank_tol, double group_tol) {
  return prefix_spectrum(R.entries, indices, rank_tol, group_tol);
}

std::vector<double> exp_eig_approx_full(int M, double r) {
  if (M < 1) throw InvalidParameter("exp_eig_approx_full: M must be >= 1");
  if (!(r >= 0.0 && r < 1.0)) throw InvalidParameter("exp_eig_approx_full: need 0 <= r < 1");
  // Eigenvalues are (1-r^2)/(1+r^2-2r cos(theta_k)) with theta_k the k-th
  // root of (M+1)theta + 2 arg(1 - r e^{-i theta}) = k pi. One fixed-point
  // pass from the uniform ladder theta = k pi / (M+1) approximates the root
  // with O(1/M) error while staying closed form.
  std::vector<double> delta(M);
  for (int k = 1; k <= M; ++k) {
    const double t0 = k * kPi / (M + 1.0);
    const double theta =
        (k * kPi - 2.0 * std::atan2(r * std::sin(t0), 1.0 - r * std::cos(t0))) / (M + 1.0);
    delta[k - 1] = (1.0 - r * r) / (1.0 + r * r - 2.0 * r * std::cos(theta));
  }
  return delta;  // descending: theta_k increases with k
}

namespace {

// Intermediate-regime per-mode power for the m x m leading principal block.
double phi_mode(double r, int m, int i) {
  const double num = 1.0 - r * r;
  const double den = 1.0 + r * r + 2.0 * r * r * std::cos(i * kPi / m) +
                     2.0 * r * (1.0 - r) * std::cos(i * kPi / (m + 1.0));
  return num / den;
}

std::vector<double> prefix_values_mid(double r, int m) {
  std::vector<double> v(m);
  double sum = 0.0;
  for (int i = 1; i <= m - 1; ++i) {
    v[i - 1] = phi_mode(r, m, i);
    sum += v[i - 1];
  }
  v[m - 1] = m - sum;  // trace matching pins the dominant mode
  return v;
}

std::vector<double> prefix_values_small_r(double r, int m) {
  std::vector<double> v(m);
  for (int j = 1; j <= m; ++j) v[j - 1] = 1.0 - 2.0 * r * std::cos(j * kPi / (m + 1.0));
  return v;
}

std::vector<double> prefix_values_near_one(double r, int m) {
  std::vector<double> v(m);
  for (int j = 1; j <= m - 1; ++j) {
    const double sec = 1.0 / std::cos(j * kPi / (2.0 * m));
    v[j - 1] = 0.5 * (1.0 - r) * sec * sec;
  }
  v[m - 1] = m - (m * m - 1.0) * (1.0 - r) / 3.0;
  return v;
}

// The two trace-matched branches put the dominant mode in the last slot;
// it colliding with any other mode is the closed form's equality condition.
void check_degenerate(const std::vector<double>& v) {
  const double dom = v.back();
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    if (std::abs(dom - v[j]) <= 1e-9 * std::max(std::abs(dom), std::abs(v[j])))
      throw DegenerateSpectrum("approximate prefix spectrum hits an equality condition");
  }
}

}  // namespace

std::vector<double> exp_eig_approx_prefix(int m, double r) {
  if (m < 1) throw InvalidParameter("exp_eig_approx_prefix: m must be >= 1");
  if (!(r > 0.0 && r < 1.0)) throw InvalidParameter("exp_eig_approx_prefix: need 0 < r < 1");
  std::vector<double> v;
  if (r < 0.2) {
    v = prefix_values_small_r(r, m);
  } else if (r > 0.9) {
    v = prefix_values_near_one(r, m);
    // The near-one closed form is asymptotic in (1-r) m; when it pushes the
    // dominant mode nonpositive the intermediate form still applies.
    if (!(v.back() > 0.0)) v = prefix_values_mid(r, m);
    check_degenerate(v);
  } else {
    v = prefix_values_mid(r, m);
    check_degenerate(v);
  }
  for (double d : v)
    if (!(d > 0.0)) throw DegenerateSpectrum("approximate prefix spectrum is not positive");
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

}  // namespace itrain
