#include "itrain/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "itrain/channel_models.hpp"
#include "itrain/errors.hpp"

namespace itrain {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

// Series expansion of P(a, x); converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 2000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 2000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

void check_gamma_args(double a, double x, const char* who) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw InvalidParameter(std::string(who) + ": shape must be positive");
  if (!(x >= 0.0) || !std::isfinite(x))
    throw InvalidParameter(std::string(who) + ": argument must be nonnegative");
}

}  // namespace

double gamma_p(double a, double x) {
  check_gamma_args(a, x, "gamma_p");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::clamp(gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - gamma_q_cf(a, x), 0.0, 1.0);
}

double gamma_q(double a, double x) {
  check_gamma_args(a, x, "gamma_q");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_cf(a, x), 0.0, 1.0);
}

// Marcum Q1 as the Poisson mixture sum_k Pois(k; a^2/2) Q(k+1, b^2/2),
// summed outward from the Poisson mode so every retained term is
// representable. Geometric bounds on both Poisson tails control truncation.
double marcum_q1(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidParameter("marcum_q1: arguments must be nonnegative");
  if (b == 0.0) return 1.0;
  if (a == 0.0) return std::exp(-0.5 * b * b);
  // Q1(a,b) <= exp(-(b-a)^2/2) for b > a, and 1 - Q1 obeys the mirrored
  // bound, so beyond 12 sigma the value is 0 or 1 to < 1e-31.
  if (b - a > 12.0) return 0.0;
  if (a - b > 12.0) return 1.0;

  const double x = 0.5 * a * a;
  const double y = 0.5 * b * b;
  const long k0 = static_cast<long>(std::floor(x));
  const double lw0 = (k0 == 0) ? -x : k0 * std::log(x) - x - std::lgamma(k0 + 1.0);
  const double lt0 = (k0 == 0) ? -y : k0 * std::log(y) - y - std::lgamma(k0 + 1.0);
  const double w0 = std::exp(lw0);         // Pois(k0; x)
  const double t0 = std::exp(lt0);         // Pois(k0; y)
  const double f0 = gamma_q(k0 + 1.0, y);  // Pr(Pois(y) <= k0)

  double sum = w0 * f0;
  {  // ascending from the mode
    double w = w0, t = t0, f = f0;
    for (long k = k0 + 1; k < k0 + 1000000; ++k) {
      w *= x / k;
      t *= y / k;
      f = std::min(1.0, f + t);
      sum += w * f;
      if (k + 1 > x) {
        const double q = x / (k + 1);
        if (w * q / (1.0 - q) < 1e-16) break;
      }
    }
  }
  {  // descending from the mode
    double w = w0, t = t0, f = f0;
    for (long k = k0; k >= 1; --k) {
      w *= k / x;  // Pois(k-1; x)
      f -= t;      // Pr(Pois(y) <= k-1)
      t *= k / y;  // Pois(k-1; y)
      if (f <= 0.0) break;
      sum += w * f;
      if (k - 1 >= 1 && k - 1 < x) {
        const double q = (k - 1) / x;
        if (w * f * q / (1.0 - q) < 1e-16) break;
      }
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

int EigenvalueGroups::total_degrees() const {
  int total = 0;
  for (int r : multiplicities) total += r;
  return total;
}

namespace {

void check_groups(const EigenvalueGroups& g, const char* who) {
  if (g.values.size() != g.multiplicities.size())
    throw InvalidParameter(std::string(who) + ": values/multiplicities size mismatch");
  for (std::size_t t = 0; t < g.values.size(); ++t) {
    if (!(g.values[t] > 0.0) || !std::isfinite(g.values[t]))
      throw InvalidParameter(std::string(who) + ": eigenvalues must be positive");
    if (g.multiplicities[t] < 1)
      throw InvalidParameter(std::string(who) + ": multiplicities must be >= 1");
    if (t > 0 && !(g.values[t] < g.values[t - 1]))
      throw InvalidParameter(std::string(who) + ": eigenvalues must be strictly decreasing");
  }
}

// Sign-and-log representation: the partial-fraction coefficients overflow
// double long before their alternating sum does.
struct SignedLog {
  int sign = 0;
  long double logmag = -std::numeric_limits<long double>::infinity();
};

SignedLog sl_mul(const SignedLog& a, const SignedLog& b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.sign * b.sign, a.logmag + b.logmag};
}

SignedLog sl_add(SignedLog a, SignedLog b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (b.logmag > a.logmag) std::swap(a, b);
  const long double d = std::exp(b.logmag - a.logmag);
  const long double factor = (a.sign == b.sign) ? 1.0L + d : 1.0L - d;
  if (factor <= 0.0L) return {};
  return {a.sign, a.logmag + std::log(factor)};
}

long double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L);
}

// Coefficient for pole k at order s: the signed sum over compositions of
// s - 1 across the other groups of
//   prod_{n != k} C(i_n + r_n - 1, i_n) (1/delta_n - 1/delta_k)^{-(i_n + r_n)},
// times the leading (-1)^(r_k - 1).
SignedLog psi_coefficient(const EigenvalueGroups& g, int k, int s) {
  const int T = g.group_count();
  std::vector<int> others;
  others.reserve(T - 1);
  for (int n = 0; n < T; ++n)
    if (n != k) others.push_back(n);

  const int budget = s - 1;
  SignedLog total{};
  if (others.empty()) {
    if (budget == 0) total = {1, 0.0L};
  } else {
    std::vector<long double> log_base(others.size());
    std::vector<int> sign_base(others.size());
    for (std::size_t j = 0; j < others.size(); ++j) {
      const double diff = 1.0 / g.values[others[j]] - 1.0 / g.values[k];
      log_base[j] = std::log(std::abs(diff));
      sign_base[j] = diff > 0.0 ? 1 : -1;
    }
    auto slot_factor = [&](std::size_t slot, int i) {
      const int r_n = g.multiplicities[others[slot]];
      SignedLog f;
      f.sign = (sign_base[slot] < 0 && (i + r_n) % 2 != 0) ? -1 : 1;
      f.logmag = log_binomial(i + r_n - 1, i) - (i + r_n) * log_base[slot];
      return f;
    };
    // Depth-first over compositions; `partial` carries the product so far.
    struct Frame {
      std::size_t slot;
      int remaining;
      SignedLog partial;
    };
    std::vector<Frame> stack;
    stack.push_back({0, budget, {1, 0.0L}});
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      if (f.slot + 1 == others.size()) {
        total = sl_add(total, sl_mul(f.partial, slot_factor(f.slot, f.remaining)));
        continue;
      }
      for (int i = 0; i <= f.remaining; ++i)
        stack.push_back({f.slot + 1, f.remaining - i, sl_mul(f.partial, slot_factor(f.slot, i))});
    }
  }
  if (total.sign != 0 && (g.multiplicities[k] - 1) % 2 != 0) total.sign = -total.sign;
  return total;
}

struct ClosedForm {
  double value = 0.0;
  bool reliable = false;
};

// CDF partial-fraction sum. Terms are assembled in log scale and summed in
// long double; `reliable` is cleared when cancellation can have eaten the
// 1e-9 accuracy budget or the result leaves [0, 1] by more than 1e-6.
ClosedForm wcs_cdf_closed(const EigenvalueGroups& g, double x) {
  const int T = g.group_count();
  long double log_pref = 0.0L;
  for (int t = 0; t < T; ++t)
    log_pref -= g.multiplicities[t] * std::log(static_cast<long double>(g.values[t]));

  long double sum = 0.0L;
  long double max_term = 0.0L;
  long terms = 0;
  for (int k = 0; k < T; ++k) {
    const int r_k = g.multiplicities[k];
    const long double log_dk = std::log(static_cast<long double>(g.values[k]));
    for (int s = 1; s <= r_k; ++s) {
      const SignedLog psi = psi_coefficient(g, k, s);
      if (psi.sign == 0) continue;
      const int sgn = psi.sign * ((r_k - s) % 2 == 0 ? 1 : -1);
      const long double logmag = psi.logmag + log_pref + (r_k - s + 1) * log_dk;
      const double bracket = gamma_p(r_k - s + 1.0, x / g.values[k]);
      if (bracket <= 0.0) continue;
      const long double lt = logmag + std::log(static_cast<long double>(bracket));
      if (lt > 11000.0L) return {0.0, false};  // would overflow long double
      const long double term = sgn * std::exp(lt);
      sum += term;
      max_term = std::max(max_term, std::abs(term));
      ++terms;
    }
  }
  const long double err = max_term * 1.1e-19L * std::max<long>(terms, 4);
  const double value = static_cast<double>(sum);
  const bool reliable = std::isfinite(value) && err <= 1e-9L && value > -1e-6 && value < 1.0 + 1e-6;
  return {std::clamp(value, 0.0, 1.0), reliable};
}

// PDF partial-fraction sum (same coefficients, density kernel).
ClosedForm wcs_pdf_closed(const EigenvalueGroups& g, double x) {
  const int T = g.group_count();
  long double log_pref = 0.0L;
  for (int t = 0; t < T; ++t)
    log_pref -= g.multiplicities[t] * std::log(static_cast<long double>(g.values[t]));

  long double sum = 0.0L;
  long double max_term = 0.0L;
  long terms = 0;
  for (int k = 0; k < T; ++k) {
    const int r_k = g.multiplicities[k];
    for (int s = 1; s <= r_k; ++s) {
      const int power = r_k - s;
      if (x == 0.0 && power > 0) continue;
      const SignedLog psi = psi_coefficient(g, k, s);
      if (psi.sign == 0) continue;
      const int sgn = psi.sign * (power % 2 == 0 ? 1 : -1);  // (-x)^power, x >= 0
      long double lt = psi.logmag + log_pref - x / g.values[k] - std::lgamma(power + 1.0L);
      if (power > 0) lt += power * std::log(static_cast<long double>(x));
      if (lt > 11000.0L) return {0.0, false};
      const long double term = sgn * std::exp(lt);
      sum += term;
      max_term = std::max(max_term, std::abs(term));
      ++terms;
    }
  }
  const long double err = max_term * 1.1e-19L * std::max<long>(terms, 4);
  const double value = static_cast<double>(sum);
  const bool reliable = std::isfinite(value) && err <= 1e-9L && value > -1e-6;
  return {std::max(value, 0.0), reliable};
}

// 15-point Gauss-Legendre rule mapped to [0, 1], built once.
constexpr int kPanelOrder = 15;
struct PanelRule {
  double node[kPanelOrder];
  double weight[kPanelOrder];
  PanelRule() {
    std::vector<double> n, w;
    gauss_legendre(kPanelOrder, n, w);
    for (int i = 0; i < kPanelOrder; ++i) {
      node[i] = 0.5 * (n[i] + 1.0);
      weight[i] = 0.5 * w[i];
    }
  }
};

const PanelRule& panel_rule() {
  static const PanelRule rule;
  return rule;
}

struct InversionSetup {
  std::vector<double> delta;
  std::vector<int> mult;
  double rate_sum = 0.0;  // sum r_t delta_t = |phase'(0)|
};

InversionSetup inversion_setup(const EigenvalueGroups& g) {
  InversionSetup s;
  s.delta = g.values;
  s.mult = g.multiplicities;
  for (std::size_t t = 0; t < s.delta.size(); ++t) s.rate_sum += s.mult[t] * s.delta[t];
  return s;
}

// Upper bound on the integral of 1 / (u^excess * rho(u)) over (U, inf),
// using rho(u) >= prod over delta_t U >= 1 of (delta_t u)^{r_t}.
double inversion_tail_bound(const InversionSetup& s, double U, int excess) {
  double log_a = 0.0;
  int k = 0;
  for (std::size_t t = 0; t < s.delta.size(); ++t) {
    if (s.delta[t] * U >= 1.0) {
      log_a += s.mult[t] * std::log(s.delta[t]);
      k += s.mult[t];
    }
  }
  const int decay = k + excess - 1;  // integrand <= u^-(decay+1) / A
  if (decay < 1) return std::numeric_limits<double>::infinity();
  const double log_tail = -decay * std::log(U) - std::log(static_cast<double>(decay)) - log_a;
  return std::exp(log_tail);
}

// Gil-Pelaez inversion of the characteristic function
// phi(u) = prod_t (1 - i u delta_t)^(-r_t):
//   F(x) = 1/2 - (1/pi) Int_0^inf sin(beta(u) - u x) / (u rho(u)) du,
//   f(x) =       (1/pi) Int_0^inf cos(beta(u) - u x) / rho(u) du,
// with beta = sum r_t atan(delta_t u), log rho = sum (r_t/2) log1p(delta_t^2 u^2).
// Panels span at most a half period of the oscillation.
double inversion_integral(const InversionSetup& s, double x, bool density) {
  const double freq = std::max({s.rate_sum, x, 1e-30});
  const double width = 0.5 * 3.14159265358979323846 / freq;
  const int excess = density ? 0 : 1;
  const PanelRule& rule = panel_rule();

  double total = 0.0;
  double u0 = 0.0;
  for (long panel = 0; panel < 4000000; ++panel) {
    double acc = 0.0;
    for (int q = 0; q < kPanelOrder; ++q) {
      const double u = u0 + width * rule.node[q];
      double beta = 0.0, log_rho = 0.0;
      for (std::size_t t = 0; t < s.delta.size(); ++t) {
        const double du = s.delta[t] * u;
        beta += s.mult[t] * std::atan(du);
        log_rho += 0.5 * s.mult[t] * std::log1p(du * du);
      }
      const double phase = beta - u * x;
      const double osc = density ? std::cos(phase) : std::sin(phase);
      const double denom = density ? 1.0 : u;
      acc += rule.weight[q] * osc * std::exp(-log_rho) / denom;
    }
    total += acc * width;
    u0 += width;
    if (panel % 8 == 7 && inversion_tail_bound(s, u0, excess) < 1e-12) break;
  }
  return total;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

namespace detail {

double wcs_cdf_inversion(const EigenvalueGroups& groups, double x) {
  check_groups(groups, "wcs_cdf_inversion");
  if (x <= 0.0) return 0.0;
  if (groups.values.empty()) return 1.0;
  const InversionSetup s = inversion_setup(groups);
  const double value = 0.5 - inversion_integral(s, x, /*density=*/false) / kPi;
  return std::clamp(value, 0.0, 1.0);
}

double wcs_pdf_inversion(const EigenvalueGroups& groups, double x) {
  check_groups(groups, "wcs_pdf_inversion");
  if (x < 0.0) return 0.0;
  if (groups.values.empty()) return 0.0;
  const InversionSetup s = inversion_setup(groups);
  const double value = inversion_integral(s, x, /*density=*/true) / kPi;
  return std::max(value, 0.0);
}

}  // namespace detail

double wcs_cdf(const EigenvalueGroups& groups, double x) {
  check_groups(groups, "wcs_cdf");
  if (groups.values.empty()) return x > 0.0 ? 1.0 : 0.0;  // point mass at zero
  if (x <= 0.0) return 0.0;
  if (groups.group_count() == 1)
    return gamma_p(groups.multiplicities[0], x / groups.values[0]);
  const ClosedForm cf = wcs_cdf_closed(groups, x);
  if (cf.reliable) return cf.value;
  return detail::wcs_cdf_inversion(groups, x);
}

double wcs_pdf(const EigenvalueGroups& groups, double x) {
  check_groups(groups, "wcs_pdf");
  if (groups.values.empty()) return 0.0;
  if (x < 0.0) return 0.0;
  if (groups.group_count() == 1) {
    const double delta = groups.values[0];
    const int r = groups.multiplicities[0];
    if (x == 0.0) return r == 1 ? 1.0 / delta : 0.0;
    const double lt = (r - 1) * std::log(x / delta) - x / delta - std::lgamma(r) - std::log(delta);
    return std::exp(lt);
  }
  const ClosedForm cf = wcs_pdf_closed(groups, x);
  if (cf.reliable) return cf.value;
  return detail::wcs_pdf_inversion(groups, x);
}

}  // namespace itrain
