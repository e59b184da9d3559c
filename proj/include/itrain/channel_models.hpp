#pragma once

#include <optional>
#include <vector>

#include "itrain/types.hpp"

namespace itrain {

// Uniform linear array: M antennas spaced `spacing` wavelengths apart.
struct ArrayGeometry {
  int antennas = 1;
  double spacing = 0.5;
};

// Hermitian PSD covariance with unit diagonal. `exponential_rho` is set when
// the matrix was built from the exponential-correlation model; consumers use
// it to take O(1) conditioning shortcuts that are exact for that model.
struct CovarianceMatrix {
  Matrix entries;
  std::optional<Complex> exponential_rho;
  Index size() const { return entries.rows(); }
};

// [R]_{m,n} = rho^{m-n} for m >= n (conjugate transpose above), |rho| < 1.
CovarianceMatrix build_exponential_covariance(int M, Complex rho);

// One-ring scatterer model: power spread uniformly over angles of departure
// in [mean_aod - half_width, mean_aod + half_width] (radians).
struct OneRingModel {
  double mean_aod = 0.0;
  double half_width = 0.0;
  // Root-mean-square angular spread of the uniform distribution.
  double angular_spread() const;
  static OneRingModel from_angular_spread(double mean_aod, double spread);
};

// ULA steering vector for angle of departure theta:
// element m (1-based) is exp(-j 2 pi spacing sin(theta) (m - 1)).
Vector steering_vector(const ArrayGeometry& array, double theta);

// R = integral over the angle interval of the steering outer product times
// the uniform power density, by Gauss-Legendre quadrature with `nodes`
// points (>= 64). The interval must lie inside (-pi/2, pi/2).
CovarianceMatrix build_one_ring_covariance(const ArrayGeometry& array,
                                           const OneRingModel& model,
                                           int nodes = 2048);

// Unitary DFT codebook: [D]_{m,n} = exp(j 2 pi (m-1)(n-1) / M) / sqrt(M).
Matrix dft_codebook(int M);

// SNR threshold for outage-free rate `rate` (bits) at transmit power
// `power` (linear): (2^rate - 1) / power.
double snr_threshold(double rate, double power);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace itrain
