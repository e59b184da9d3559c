#pragma once

#include "itrain/spectra.hpp"

namespace itrain {

// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
// a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// First-order Marcum Q function Q1(a, b), a >= 0, b >= 0. Absolute accuracy
// better than 1e-10 everywhere; ~1e-13 for moderate arguments.
double marcum_q1(double a, double b);

// CDF and PDF of sum_t delta_t * G_t with G_t ~ Gamma(r_t, 1) independent,
// i.e. a positively weighted sum of complex-Gaussian squared norms where
// delta_t has multiplicity r_t. Empty groups = point mass at zero.
// Uses the closed-form partial-fraction expansion; switches to numeric
// characteristic-function inversion when the expansion loses precision.
double wcs_cdf(const EigenvalueGroups& groups, double x);
double wcs_pdf(const EigenvalueGroups& groups, double x);

namespace detail {

// Characteristic-function (Gil-Pelaez) inversion used as the fallback path.
// Exposed for tests.
double wcs_cdf_inversion(const EigenvalueGroups& groups, double x);
double wcs_pdf_inversion(const EigenvalueGroups& groups, double x);

}  // namespace detail

}  // namespace itrain
