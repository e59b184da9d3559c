#include "itrain/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "itrain/analytic.hpp"
#include "itrain/channel_models.hpp"
#include "itrain/conditional.hpp"
#include "itrain/oracles.hpp"
#include "itrain/rng.hpp"
#include "itrain/simulator.hpp"
#include "itrain/special_functions.hpp"
#include "itrain/spectra.hpp"
#include "itrain/surrogate.hpp"
#include "itrain/sweep.hpp"

namespace itrain {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

long scaled_trials(long base, double scale) {
  return std::max(1L, std::lround(static_cast<double>(base) * scale));
}

double uniform01(Xoshiro256pp& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void progress(const ValidationOptions& opt, const std::string& msg) {
  if (opt.verbose) std::cerr << "[validate] " << msg << std::endl;
}

CriterionResult make_result(std::string id, double value, double threshold,
                            std::string relation, std::string note) {
  CriterionResult r;
  r.id = std::move(id);
  r.value = value;
  r.threshold = threshold;
  r.relation = std::move(relation);
  r.note = std::move(note);
  if (r.relation == "<=") r.pass = value <= threshold;
  else if (r.relation == ">=") r.pass = value >= threshold;
  else r.pass = value == threshold;
  if (!std::isfinite(value) && r.relation != "==") r.pass = false;
  return r;
}

// Wraps one criterion block so an exception becomes a FAIL row instead of
// aborting the whole report.
template <typename Fn>
void guarded(std::vector<CriterionResult>& out, const std::string& id, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    out.push_back(make_result(id, std::numeric_limits<double>::quiet_NaN(), 0.0, "<=",
                              std::string("exception: ") + e.what()));
  }
}

// --- 1. Closed forms vs Monte Carlo over the pinned model/scheme grid. ----

void criterion_analytic_mc(const ValidationOptions& opt, std::vector<CriterionResult>& out) {
  const auto start = std::chrono::steady_clock::now();
  const int M = 32;
  std::vector<std::pair<std::string, CovarianceMatrix>> models;
  for (double rho : {0.0, 0.4, 0.8})
    models.emplace_back("exp rho=" + fmt(rho), build_exponential_covariance(M, {rho, 0.0}));
  for (double as : {5.0, 10.0, 20.0})
    models.emplace_back(
        "one-ring AS=" + fmt(as),
        build_one_ring_covariance({M, 0.5}, OneRingModel::from_angular_spread(
                                                45.0 * kDegToRad, as * kDegToRad)));
  const std::vector<SchemeId> schemes = {SchemeId::basic_antenna, SchemeId::basic_beam,
                                         SchemeId::modified_beam};
  const std::vector<double> alphas = {7.0, 13.97, 17.58, 23.77, 27.87, 31.0};
  const long trials = scaled_trials(100000, opt.trial_scale);
  const Matrix dft = dft_codebook(M);

  double worst_z = 0.0;
  std::string worst;
  int cells = 0;
  std::uint64_t cell = 0;
  for (const auto& [label, R] : models) {
    for (SchemeId scheme : schemes) {
      for (double alpha : alphas) {
        double analytic = 0.0;
        switch (scheme) {
          case SchemeId::basic_antenna: analytic = lt_antenna_basic(R, alpha).value; break;
          case SchemeId::basic_beam: analytic = lt_beam_general(R, dft, alpha).value; break;
          default: analytic = lt_beam_modified(R, alpha).value; break;
        }
        const MCEstimate est = monte_carlo(SchemeKind{scheme, {}}, R, alpha, trials,
                                           derive_seed(1002, cell++), opt.threads);
        const double diff = std::abs(est.mean_length - analytic);
        // A zero-variance cell means every trial stopped at the same step;
        // the closed form must then agree to numerical precision.
        const double z = est.std_error > 0.0 ? diff / est.std_error
                                             : (diff < 1e-9 ? 0.0 : std::numeric_limits<double>::infinity());
        if (z > worst_z) {
          worst_z = z;
          worst = label + " " + scheme_name(scheme) + " alpha=" + fmt(alpha) + " analytic=" +
                  fmt(analytic) + " mc=" + fmt(est.mean_length);
        }
        ++cells;
      }
    }
    progress(opt, "analytic/mc block done: " + label);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.push_back(make_result("analytic-mc-z", worst_z, 3.0, "<=",
                            std::to_string(cells) + " cells, worst " + worst));
  out.push_back(make_result("analytic-mc-runtime", elapsed, 600.0, "<=",
                            "seconds for the analytic/MC agreement grid"));
}

// --- 2. Closed-form spectrum approximations against the exact formulas. ---

void criterion_approximations(const ValidationOptions&, std::vector<CriterionResult>& out) {
  double worst = 0.0;
  std::string note;
  auto track = [&](const std::string& label, double exact, double approx) {
    const double rel = std::abs(approx - exact) / exact;
    if (rel > worst) {
      worst = rel;
      note = "worst " + label + " exact=" + fmt(exact) + " approx=" + fmt(approx);
    }
  };
  {
    const CovarianceMatrix R = build_exponential_covariance(64, {0.8, 0.0});
    for (double alpha : {7.0, 31.0})
      track("beam M=64 r=0.8 alpha=" + fmt(alpha), lt_beam_modified(R, alpha).value,
            lt_beam_modified_exp_approx(64, 0.8, alpha).value);
  }
  for (double r : {0.1, 0.8}) {
    const CovarianceMatrix R = build_exponential_covariance(32, {r, 0.0});
    for (double alpha : {7.0, 17.58})
      track("antenna M=32 r=" + fmt(r) + " alpha=" + fmt(alpha),
            lt_antenna_basic(R, alpha).value, lt_antenna_basic_exp_approx(32, r, alpha).value);
  }
  out.push_back(make_result("approx-rel-err", worst, 0.05, "<=", note));
}

// --- 3. Exponential conditioning fast path vs the general solver. ----------

void criterion_fast_path(const ValidationOptions&, std::vector<CriterionResult>& out) {
  Xoshiro256pp rng(derive_seed(2026, 0));
  std::normal_distribution<double> dist(0.0, 0.7071067811865476);
  double worst = 0.0;
  std::string note;
  for (int iter = 0; iter < 1000; ++iter) {
    const int M = 2 + static_cast<int>(rng() % 15);
    const double mag = 0.02 + 0.96 * uniform01(rng);
    const double phase = 2.0 * 3.14159265358979323846 * uniform01(rng);
    const Complex rho = std::polar(mag, phase);
    const CovarianceMatrix R = build_exponential_covariance(M, rho);

    TrainedSet trained;
    for (int i = 1; i <= M; ++i)
      if (rng() % 2 == 0) trained.insert(i, complex_normal(rng, dist));
    if (trained.size() == 0)
      trained.insert(1 + static_cast<int>(rng() % M), complex_normal(rng, dist));
    if (trained.size() == M) continue;  // nothing left to condition on

    for (int n = 1; n <= M; ++n) {
      if (trained.contains(n)) continue;
      const ConditionalGaussian general = conditional_general(R.entries, trained, n);
      const ConditionalGaussian fast = conditional_exponential(rho, trained, n);
      const double mean_diff = std::abs(general.mean - fast.mean);
      const double var_diff = std::abs(general.variance - fast.variance);
      const double d = std::max(mean_diff, var_diff);
      if (d > worst) {
        worst = d;
        note = "worst M=" + std::to_string(M) + " |rho|=" + fmt(mag) + " n=" +
               std::to_string(n) + " dmean=" + fmt(mean_diff) + " dvar=" + fmt(var_diff);
      }
    }
  }
  out.push_back(make_result("fast-path-equiv", worst, 1e-9, "<=", note));
}

// --- 4. Special functions against independent oracles. ---------------------

std::vector<EigenvalueGroups> random_spectra(int count, std::uint64_t seed) {
  Xoshiro256pp rng(derive_seed(seed, 0));
  std::vector<EigenvalueGroups> spectra;
  for (int i = 0; i < count; ++i) {
    const int groups = 1 + static_cast<int>(rng() % 4);
    std::vector<double> values;
    for (int t = 0; t < groups; ++t) values.push_back(std::exp(-1.5 + 3.0 * uniform01(rng)));
    std::sort(values.rbegin(), values.rend());
    for (int t = 1; t < groups; ++t)  // keep groups clearly separated
      values[t] = std::min(values[t], values[t - 1] / 1.25);
    EigenvalueGroups g;
    g.values = values;
    for (int t = 0; t < groups; ++t)
      g.multiplicities.push_back(1 + static_cast<int>(rng() % 3));
    spectra.push_back(std::move(g));
  }
  return spectra;
}

void criterion_special_functions(const ValidationOptions& opt,
                                 std::vector<CriterionResult>& out) {
  double worst_marcum = 0.0;
  std::string marcum_note;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double a = 0.25 * i, b = 0.25 * j;
      const double diff = std::abs(marcum_q1(a, b) - oracles::marcum_q1_quadrature(a, b));
      if (diff > worst_marcum) {
        worst_marcum = diff;
        marcum_note = "worst at a=" + fmt(a) + " b=" + fmt(b);
      }
    }
  }
  out.push_back(make_result("marcum-oracle", worst_marcum, 1e-8, "<=", marcum_note));
  progress(opt, "marcum grid done");

  const std::vector<EigenvalueGroups> spectra = random_spectra(20, 2027);
  const long draws = scaled_trials(10000000, opt.trial_scale);
  double worst_z = 0.0;
  std::string cdf_note;
  for (int i = 0; i < static_cast<int>(spectra.size()); ++i) {
    const EigenvalueGroups& g = spectra[i];
    double mean = 0.0;
    for (int t = 0; t < g.group_count(); ++t) mean += g.values[t] * g.multiplicities[t];
    const double x = (0.4 + 0.05 * i) * mean;
    double se = 0.0;
    const double emp = oracles::wcs_cdf_empirical(g, x, draws, derive_seed(2028, i), &se);
    const double z = std::abs(emp - wcs_cdf(g, x)) / se;
    if (z > worst_z) {
      worst_z = z;
      cdf_note = "worst spectrum " + std::to_string(i) + " x=" + fmt(x) + " cdf=" +
                 fmt(wcs_cdf(g, x)) + " empirical=" + fmt(emp);
    }
    progress(opt, "wcs sampling " + std::to_string(i + 1) + "/20");
  }
  out.push_back(make_result("wcs-cdf-oracle", worst_z, 3.0, "<=", cdf_note));

  double worst_mass = 0.0;
  std::string mass_note;
  for (int i : {0, 5, 10, 15, 19}) {
    const double mass = oracles::wcs_pdf_mass(spectra[i]);
    const double err = std::abs(mass - 1.0);
    if (err > worst_mass) {
      worst_mass = err;
      mass_note = "worst spectrum " + std::to_string(i) + " mass=" + fmt(mass);
    }
  }
  out.push_back(make_result("wcs-pdf-mass", worst_mass, 1e-6, "<=", mass_note));
}

// --- 5. Asymptotic laws. ---------------------------------------------------

void criterion_asymptotics(const ValidationOptions&, std::vector<CriterionResult>& out) {
  const double iid = lt_iid(256, 4.0).value;
  out.push_back(make_result("iid-alpha-bound", iid, 5.0, "<=",
                            "average i.i.d. training length at the 1+alpha ceiling"));

  double worst = -std::numeric_limits<double>::infinity();
  std::string note;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const double lt = lt_fully_correlated(100000, alpha).value;
    const auto [lo, hi] = fc_asymptotic_bounds(100000, alpha);
    const double violation = std::max(lo - lt, lt - hi);
    if (violation > worst) {
      worst = violation;
      note = "tightest alpha=" + fmt(alpha) + " lt=" + fmt(lt) + " bounds=[" + fmt(lo) + "," +
             fmt(hi) + "]";
    }
  }
  out.push_back(make_result("fc-bounds", worst, 0.0, "<=", note));
}

// --- 6. Modified schemes beat basic schemes significantly. -----------------

void criterion_improvement(const ValidationOptions& opt, std::vector<CriterionResult>& out) {
  const CovarianceMatrix R = build_exponential_covariance(32, {0.8, 0.0});
  const double alpha = 31.0;
  const long trials = scaled_trials(100000, opt.trial_scale);
  const SchemeId ids[4] = {SchemeId::basic_beam, SchemeId::modified_beam,
                           SchemeId::basic_antenna, SchemeId::modified_antenna};
  MCEstimate est[4];
  for (int k = 0; k < 4; ++k) {
    est[k] = monte_carlo(SchemeKind{ids[k], {}}, R, alpha, trials, derive_seed(3001, k),
                         opt.threads);
    progress(opt, std::string("improvement: ") + scheme_name(ids[k]) + " done");
  }
  const double z_beam = (est[0].mean_length - est[1].mean_length) /
                        std::hypot(est[0].std_error, est[1].std_error);
  const double z_antenna = (est[2].mean_length - est[3].mean_length) /
                           std::hypot(est[2].std_error, est[3].std_error);
  out.push_back(make_result(
      "scheme-improvement", std::min(z_beam, z_antenna), 3.0, ">=",
      "gap significance; beam " + fmt(est[1].mean_length) + "<" + fmt(est[0].mean_length) +
          " z=" + fmt(z_beam) + ", antenna " + fmt(est[3].mean_length) + "<" +
          fmt(est[2].mean_length) + " z=" + fmt(z_antenna)));
}

// --- 7. Shape in M and outage equality under common random numbers. --------

void criterion_shape(const ValidationOptions& opt, std::vector<CriterionResult>& out) {
  const std::vector<int> sizes = {2, 4, 8, 16, 32, 64, 128};
  std::vector<double> lt;
  for (int M : sizes) {
    lt.push_back(lt_beam_modified(build_exponential_covariance(M, {0.8, 0.0}), 31.0).value);
    progress(opt, "shape: M=" + std::to_string(M) + " lt=" + fmt(lt.back()));
  }
  const int peak = static_cast<int>(std::max_element(lt.begin(), lt.end()) - lt.begin());
  bool unimodal = peak > 0 && peak + 1 < static_cast<int>(lt.size());
  for (int i = 0; i + 1 < static_cast<int>(lt.size()); ++i) {
    if (i < peak && !(lt[i] < lt[i + 1])) unimodal = false;
    if (i >= peak && !(lt[i] > lt[i + 1])) unimodal = false;
  }
  std::string values;
  for (double v : lt) values += (values.empty() ? "" : " ") + fmt(v);
  out.push_back(make_result("lt-unimodal-in-M", unimodal ? 1.0 : 0.0, 1.0, "==",
                            "lengths over M=2..128: " + values));

  const CovarianceMatrix R = build_exponential_covariance(32, {0.8, 0.0});
  const long trials = scaled_trials(100000, opt.trial_scale);
  const std::uint64_t seed = derive_seed(3002, 0);
  double rates[4];
  double mean_rate = 0.0;
  const SchemeId ids[4] = {SchemeId::basic_antenna, SchemeId::basic_beam,
                           SchemeId::modified_beam, SchemeId::modified_antenna};
  for (int k = 0; k < 4; ++k) {
    rates[k] =
        monte_carlo(SchemeKind{ids[k], {}}, R, 31.0, trials, seed, opt.threads).outage_rate;
    mean_rate += rates[k] / 4.0;
  }
  double max_diff = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) max_diff = std::max(max_diff, std::abs(rates[a] - rates[b]));
  const double pooled_se =
      std::sqrt(2.0 * std::max(mean_rate * (1.0 - mean_rate), 1.0 / trials) / trials);
  out.push_back(make_result("outage-crn", max_diff, 3.0 * pooled_se, "<=",
                            "outage " + fmt(mean_rate) +
                                "; shared draws make the rates exactly equal"));
}

// --- 8. Surrogate fit quality. ---------------------------------------------

void criterion_surrogate(const ValidationOptions& opt, std::vector<CriterionResult>& out) {
  std::vector<double> rho_grid, alpha_grid;
  for (int i = 0; i < 20; ++i) rho_grid.push_back(0.05 * i);
  for (int i = 1; i <= 31; ++i) alpha_grid.push_back(i);
  const long trials = scaled_trials(4000, opt.trial_scale);
  progress(opt, "surrogate: generating dataset (620 cells)");
  const SurrogateDataset data = generate_dataset(32, rho_grid, alpha_grid, trials, 4242);
  progress(opt, "surrogate: fitting");
  const RegressorModel model = fit_surrogate(data, 12000, 0.01, 77, nullptr);

  double sum_sq = 0.0;
  for (int i : data.split_indices(Split::test)) {
    const SurrogateSample& s = data.samples[i];
    const double rel = (predict(model, s.rho, s.alpha) - s.lt) / s.lt;
    sum_sq += rel * rel;
  }
  const double rel_rmse =
      std::sqrt(sum_sq / static_cast<double>(data.split_indices(Split::test).size()));
  out.push_back(make_result("surrogate-test-rmse", rel_rmse, 0.05, "<=",
                            std::to_string(data.split_indices(Split::test).size()) +
                                " held-out samples"));

  const double unseen[5][2] = {
      {0.05, 4.5}, {0.33, 11.2}, {0.52, 18.7}, {0.71, 25.3}, {0.88, 8.9}};
  const long mc_trials = scaled_trials(10000, opt.trial_scale);
  double worst_ratio = 0.0;
  std::string note;
  for (int k = 0; k < 5; ++k) {
    const auto [rho, alpha] = std::pair(unseen[k][0], unseen[k][1]);
    const CovarianceMatrix R = build_exponential_covariance(32, {rho, 0.0});
    const MCEstimate est = monte_carlo(SchemeKind::modified_antenna(), R, alpha, mc_trials,
                                       derive_seed(4100, k), opt.threads);
    const double pred = predict(model, rho, alpha);
    const double margin = 3.0 * est.std_error + 0.05 * est.mean_length;
    const double ratio = std::abs(pred - est.mean_length) / margin;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      note = "worst rho=" + fmt(rho) + " alpha=" + fmt(alpha) + " pred=" + fmt(pred) +
             " mc=" + fmt(est.mean_length);
    }
    progress(opt, "surrogate: unseen point " + std::to_string(k + 1) + "/5");
  }
  out.push_back(make_result("surrogate-unseen", worst_ratio, 1.0, "<=", note));
}

// --- 9. Byte-stable sweep output. ------------------------------------------

void criterion_determinism(const ValidationOptions& opt, std::vector<CriterionResult>& out) {
  const long trials = scaled_trials(1000, opt.trial_scale);
  const std::string config =
      "model = exponential\n"
      "rho = 0, 0.5, 0.9\n"
      "M = 8, 16\n"
      "scheme = basic-antenna, basic-beam, modified-beam, modified-antenna\n"
      "alpha = 7, 31\n"
      "trials = " + std::to_string(trials) + "\n"
      "seed = 7\n"
      "mode = both\n";
  const SweepConfig cfg = parse_sweep_config(config);
  const std::string first = to_csv(run_sweep(cfg));
  progress(opt, "determinism: first sweep done");
  const std::string second = to_csv(run_sweep(cfg));
  out.push_back(make_result("sweep-determinism", first == second ? 1.0 : 0.0, 1.0, "==",
                            std::to_string(first.size()) + "-byte CSV, two runs compared"));
}

}  // namespace

std::vector<CriterionResult> run_validation(const ValidationOptions& options) {
  std::vector<CriterionResult> out;
  guarded(out, "analytic-mc-z", [&] { criterion_analytic_mc(options, out); });
  guarded(out, "approx-rel-err", [&] { criterion_approximations(options, out); });
  guarded(out, "fast-path-equiv", [&] { criterion_fast_path(options, out); });
  guarded(out, "marcum-oracle", [&] { criterion_special_functions(options, out); });
  guarded(out, "iid-alpha-bound", [&] { criterion_asymptotics(options, out); });
  guarded(out, "scheme-improvement", [&] { criterion_improvement(options, out); });
  guarded(out, "lt-unimodal-in-M", [&] { criterion_shape(options, out); });
  guarded(out, "surrogate-test-rmse", [&] { criterion_surrogate(options, out); });
  guarded(out, "sweep-determinism", [&] { criterion_determinism(options, out); });
  return out;
}

bool print_validation_report(const std::vector<CriterionResult>& results, std::ostream& out) {
  bool all = true;
  int failed = 0;
  for (const CriterionResult& r : results) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%s,%s", r.id.c_str(), r.value, r.threshold,
                  r.relation.c_str(), r.pass ? "PASS" : "FAIL");
    out << buf;
    if (!r.note.empty()) out << "  " << r.note;
    out << "\n";
    if (!r.pass) {
      all = false;
      ++failed;
    }
  }
  if (all)
    out << "ALL PASS (" << results.size() << " criteria)\n";
  else
    out << "FAILURES: " << failed << " of " << results.size() << "\n";
  return all;
}

}  // namespace itrain
