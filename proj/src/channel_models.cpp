#include "itrain/channel_models.hpp"

#include <cmath>

#include "itrain/errors.hpp"

namespace itrain {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_antennas(int M) {
  if (M < 1) throw InvalidParameter("antenna count must be >= 1");
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidParameter("gauss_legendre: order must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

CovarianceMatrix build_exponential_covariance(int M, Complex rho) {
  check_antennas(M);
  const double r = std::abs(rho);
  if (!(r < 1.0)) throw InvalidParameter("exponential covariance requires |rho| < 1");
  // Powers by running product: entry (m, n) with m >= n is rho^(m - n).
  std::vector<Complex> powers(M);
  powers[0] = Complex(1.0, 0.0);
  for (int d = 1; d < M; ++d) powers[d] = powers[d - 1] * rho;

  CovarianceMatrix R;
  R.entries.resize(M, M);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n <= m; ++n) {
      R.entries(m, n) = powers[m - n];
      R.entries(n, m) = std::conj(powers[m - n]);
    }
  }
  R.exponential_rho = rho;
  return R;
}

double OneRingModel::angular_spread() const { return half_width / std::sqrt(3.0); }

OneRingModel OneRingModel::from_angular_spread(double mean_aod, double spread) {
  if (!(spread > 0.0)) throw InvalidParameter("angular spread must be positive");
  return {mean_aod, spread * std::sqrt(3.0)};
}

Vector steering_vector(const ArrayGeometry& array, double theta) {
  check_antennas(array.antennas);
  Vector a(array.antennas);
  const double phase_step = -2.0 * kPi * array.spacing * std::sin(theta);
  for (int m = 0; m < array.antennas; ++m) {
    const double phase = phase_step * m;
    a(m) = Complex(std::cos(phase), std::sin(phase));
  }
  return a;
}

CovarianceMatrix build_one_ring_covariance(const ArrayGeometry& array, const OneRingModel& model,
                                           int nodes) {
  check_antennas(array.antennas);
  if (nodes < 64) throw InvalidParameter("one-ring quadrature needs >= 64 nodes");
  if (!(model.half_width > 0.0))
    throw InvalidParameter("one-ring angle interval must have positive width");
  const double lo = model.mean_aod - model.half_width;
  const double hi = model.mean_aod + model.half_width;
  if (!(lo > -kPi / 2.0) || !(hi < kPi / 2.0))
    throw InvalidParameter("one-ring angle interval must lie inside (-pi/2, pi/2)");

  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(nodes, gl_nodes, gl_weights);

  // R = S S^H with columns sqrt(w_q g) a(theta_q); Gram form keeps the
  // result PSD by construction. g = 1 / (2 half_width) over the interval,
  // and the affine map contributes a factor half_width to each weight,
  // so the scaled weight is w_q / 2.
  const int M = array.antennas;
  Matrix S(M, nodes);
  for (int q = 0; q < nodes; ++q) {
    const double theta = model.mean_aod + model.half_width * gl_nodes[q];
    const double scale = std::sqrt(0.5 * gl_weights[q]);
    S.col(q) = scale * steering_vector(array, theta);
  }

  CovarianceMatrix R;
  R.entries = S * S.adjoint();
  R.entries = 0.5 * (R.entries + R.entries.adjoint().eval());  // exact Hermitian
  // Clamp the eigenvalues that are pure quadrature noise.
  Eigen::SelfAdjointEigenSolver<Matrix> es(R.entries);
  RealVector lambda = es.eigenvalues();
  const double cutoff = 1e-12 * lambda.maxCoeff();
  bool touched = false;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < cutoff) {
      lambda(i) = 0.0;
      touched = true;
    }
  }
  if (touched)
    R.entries = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
  return R;
}

Matrix dft_codebook(int M) {
  check_antennas(M);
  Matrix D(M, M);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < M; ++n) {
      const double phase = 2.0 * kPi * m * n / M;
      D(m, n) = scale * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return D;
}

double snr_threshold(double rate, double power) {
  if (!(rate >= 0.0)) throw InvalidParameter("rate must be nonnegative");
  if (!(power > 0.0)) throw InvalidParameter("power must be positive");
  return (std::exp2(rate) - 1.0) / power;
}

}  // namespace itrain
