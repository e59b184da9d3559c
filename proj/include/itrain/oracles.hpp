#pragma once

#include <cstdint>
#include <functional>

#include "itrain/spectra.hpp"

namespace itrain::oracles {

// Reference implementations on independent numerical routes, used by the
// test and validation suites to check the production paths.

// Marcum Q1 by direct adaptive quadrature of the Rician density
// integral_b^inf t exp(-(t^2 + a^2)/2) I0(a t) dt, with a log-domain Bessel
// evaluation. Absolute accuracy ~1e-11.
double marcum_q1_quadrature(double a, double b);

// log I0(z), z >= 0 (power series / asymptotic expansion).
double log_bessel_i0(double z);

// Empirical CDF of the weighted chi-square sum at x from `draws` gamma
// samples. Returns the estimate and writes its standard error.
double wcs_cdf_empirical(const EigenvalueGroups& groups, double x, long draws,
                         std::uint64_t seed, double* std_error);

// Total mass of wcs_pdf by adaptive quadrature over [0, upper]; with
// `upper` <= 0 an upper limit covering all but <1e-12 of the mass is chosen.
double wcs_pdf_mass(const EigenvalueGroups& groups, double upper = 0.0);

// Generic adaptive Simpson quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

}  // namespace itrain::oracles
