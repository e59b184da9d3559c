#include "itrain/oracles.hpp"

#include <cmath>
#include <random>

#include "itrain/errors.hpp"
#include "itrain/rng.hpp"
#include "itrain/special_functions.hpp"

namespace itrain::oracles {

double log_bessel_i0(double z) {
  if (!(z >= 0.0)) throw InvalidParameter("log_bessel_i0: argument must be nonnegative");
  if (z <= 300.0) {
    // Power series: all terms positive, so the sum is stable; the largest
    // term is O(I0), keeping relative error at ~#terms * eps.
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 100000; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::log(sum);
  }
  // Asymptotic expansion, 8 correction terms (z > 300 keeps them < 1e-14).
  double corr = 1.0, num = 1.0;
  for (int k = 1; k <= 8; ++k) {
    const double odd = 2.0 * k - 1.0;
    num *= odd * odd / (8.0 * k);
    corr += num / std::pow(z, k);
  }
  return z - 0.5 * std::log(2.0 * 3.14159265358979323846 * z) + std::log(corr);
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b >= a)) throw InvalidParameter("adaptive_simpson: invalid interval");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

double marcum_q1_quadrature(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0))
    throw InvalidParameter("marcum_q1_quadrature: arguments must be nonnegative");
  if (b == 0.0) return 1.0;
  const double upper = std::max(a, b) + 14.0;
  if (b >= upper) return 0.0;
  auto rice = [a](double t) {
    if (t <= 0.0) return 0.0;
    const double log_f = std::log(t) - 0.5 * (t * t + a * a) + log_bessel_i0(a * t);
    return std::exp(log_f);
  };
  // Split at the density peak so the adaptive rule sees smooth pieces.
  const double peak = std::max(a, 1.0);
  double total = 0.0;
  if (b < peak && peak < upper) {
    total += adaptive_simpson(rice, b, peak, 1e-13);
    total += adaptive_simpson(rice, peak, upper, 1e-13);
  } else {
    total += adaptive_simpson(rice, b, upper, 1e-13);
  }
  return std::min(total, 1.0);
}

double wcs_cdf_empirical(const EigenvalueGroups& groups, double x, long draws,
                         std::uint64_t seed, double* std_error) {
  if (draws < 1) throw InvalidParameter("wcs_cdf_empirical: draws must be >= 1");
  Xoshiro256pp rng(derive_seed(seed, 0x77C5ULL));
  std::vector<std::gamma_distribution<double>> gammas;
  gammas.reserve(groups.values.size());
  for (int r : groups.multiplicities)
    gammas.emplace_back(static_cast<double>(r), 1.0);

  long count = 0;
  for (long i = 0; i < draws; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < gammas.size(); ++t) sum += groups.values[t] * gammas[t](rng);
    if (sum < x) ++count;
  }
  const double p = static_cast<double>(count) / draws;
  if (std_error) *std_error = std::sqrt(std::max(p * (1.0 - p), 1.0 / draws) / draws);
  return p;
}

double wcs_pdf_mass(const EigenvalueGroups& groups, double upper) {
  double mean = 0.0, var = 0.0;
  for (std::size_t t = 0; t < groups.values.size(); ++t) {
    mean += groups.multiplicities[t] * groups.values[t];
    var += groups.multiplicities[t] * groups.values[t] * groups.values[t];
  }
  if (upper <= 0.0) upper = mean + 45.0 * std::sqrt(var) + 1.0;
  auto density = [&groups](double x) { return wcs_pdf(groups, x); };
  return adaptive_simpson(density, 0.0, upper, 1e-10);
}

}  // namespace itrain::oracles
