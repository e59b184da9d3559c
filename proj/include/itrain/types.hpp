#pragma once

#include <Eigen/Dense>
#include <complex>

namespace itrain {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Integer power of a complex number by squaring. Avoids std::pow's
// exp/log branch, which loses precision and misbehaves at z = 0.
inline Complex cpow_int(Complex z, int n) {
  if (n < 0) return Complex(1.0) / cpow_int(z, -n);
  Complex out(1.0, 0.0);
  while (n > 0) {
    if (n & 1) out *= z;
    z *= z;
    n >>= 1;
  }
  return out;
}

}  // namespace itrain
