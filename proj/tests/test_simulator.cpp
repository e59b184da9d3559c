#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "itrain/analytic.hpp"
#include "itrain/conditional.hpp"
#include "itrain/errors.hpp"
#include "itrain/simulator.hpp"
#include "itrain/special_functions.hpp"

using namespace itrain;

TEST_CASE("scheme names round trip") {
  for (SchemeId id : {SchemeId::basic_antenna, SchemeId::basic_beam, SchemeId::modified_beam,
                      SchemeId::modified_antenna})
    CHECK(scheme_from_name(scheme_name(id)) == id);
  CHECK_THROWS_AS(scheme_from_name("antenna"), InvalidParameter);
}

TEST_CASE("sampled channels reproduce the covariance") {
  const CovarianceMatrix R = build_exponential_covariance(4, Complex(0.6, 0.2));
  const EigenSystem eig = compact_eig(R);
  const long draws = 40000;
  Matrix acc = Matrix::Zero(4, 4);
  Xoshiro256pp rng(777);
  for (long i = 0; i < draws; ++i) {
    const Vector h = sample_channel(eig, rng);
    acc += h * h.adjoint();
  }
  acc /= static_cast<double>(draws);
  // Entry-wise CLT bound: each sample product has variance ~1, so the
  // empirical mean sits within ~5 / sqrt(draws) of the truth.
  CHECK((acc - R.entries).cwiseAbs().maxCoeff() <= 5.0 / std::sqrt(double(draws)));
}

TEST_CASE("sampling consumes exactly rank complex draws") {
  const CovarianceMatrix R = build_exponential_covariance(5, Complex(0.5, 0.0));
  const EigenSystem eig = compact_eig(R);
  Xoshiro256pp a(42), b(42);
  (void)sample_channel(eig, a);
  (void)complex_normal_vector(b, eig.rank());
  CHECK(a() == b());
}

TEST_CASE("sequential schemes replay their stop rule") {
  const CovarianceMatrix R = build_exponential_covariance(8, Complex(0.7, 0.0));
  const EigenSystem eig = compact_eig(R);
  const Matrix shaping = eig.eigenvectors * eig.eigenvalues.cwiseSqrt().asDiagonal();
  const double alpha = 6.0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Xoshiro256pp rng = trial_stream(31337, trial);
    const TrialOutcome out = run_trial(SchemeKind::basic_antenna(), R, alpha, rng);

    Xoshiro256pp replay_rng = trial_stream(31337, trial);
    const Vector h = shaping * complex_normal_vector(replay_rng, eig.rank());
    double power = 0.0;
    int len = 0;
    do {
      power += std::norm(h(len));
      ++len;
    } while (power < alpha && len < 8);

    CHECK(out.training_length == len);
    CHECK(out.achieved_snr == doctest::Approx(power).epsilon(1e-12));
    CHECK(out.outage == (power < alpha));
    REQUIRE(out.trained_indices.size() == static_cast<std::size_t>(len));
    for (int b = 0; b < len; ++b) CHECK(out.trained_indices[b] == b + 1);
  }
}

TEST_CASE("eigenbeam scheme trains beams in descending-power order") {
  const CovarianceMatrix R = build_exponential_covariance(8, Complex(0.8, 0.0));
  const EigenSystem eig = compact_eig(R);
  const double alpha = 5.0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Xoshiro256pp rng = trial_stream(9090, trial);
    const TrialOutcome out = run_trial(SchemeKind::modified_beam(), R, alpha, rng);

    Xoshiro256pp replay_rng = trial_stream(9090, trial);
    const Vector g = complex_normal_vector(replay_rng, eig.rank());
    double power = 0.0;
    int len = 0;
    do {
      power += eig.eigenvalues(len) * std::norm(g(len));
      ++len;
    } while (power < alpha && len < eig.rank());

    CHECK(out.training_length == len);
    CHECK(out.achieved_snr == doctest::Approx(power).epsilon(1e-12));
    CHECK(out.outage == (power < alpha));
  }
}

TEST_CASE("adaptive antenna scheme is reproducible from its selection rule") {
  const CovarianceMatrix R = build_exponential_covariance(8, Complex(0.7, 0.1));
  const EigenSystem eig = compact_eig(R);
  const Matrix shaping = eig.eigenvectors * eig.eigenvalues.cwiseSqrt().asDiagonal();
  const double alpha = 6.0;
  const int first = first_antenna(R);
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Xoshiro256pp rng = trial_stream(2718, trial);
    const TrialOutcome out = run_trial(SchemeKind::modified_antenna(), R, alpha, rng);

    Xoshiro256pp replay_rng = trial_stream(2718, trial);
    const Vector h = shaping * complex_normal_vector(replay_rng, eig.rank());
    TrainedSet t;
    REQUIRE_FALSE(out.trained_indices.empty());
    CHECK(out.trained_indices[0] == first);
    t.insert(first, h(first - 1));
    std::size_t step = 1;
    while (t.power() < alpha && t.size() < 8) {
      const int next = select_next_antenna(R, t, alpha);
      REQUIRE(step < out.trained_indices.size());
      CHECK(out.trained_indices[step] == next);
      t.insert(next, h(next - 1));
      ++step;
    }
    CHECK(out.training_length == t.size());
    CHECK(out.achieved_snr == doctest::Approx(t.power()).epsilon(1e-10));
    CHECK(out.outage == (t.power() < alpha));
  }
}

TEST_CASE("default beam codebook is the dft") {
  const CovarianceMatrix R = build_exponential_covariance(6, Complex(0.5, 0.3));
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Xoshiro256pp a = trial_stream(5, trial), b = trial_stream(5, trial);
    const TrialOutcome x = run_trial(SchemeKind::basic_beam(), R, 4.0, a);
    const TrialOutcome y = run_trial(SchemeKind::basic_beam(dft_codebook(6)), R, 4.0, b);
    CHECK(x.training_length == y.training_length);
    CHECK(x.achieved_snr == y.achieved_snr);
    CHECK(x.outage == y.outage);
  }
}

TEST_CASE("zero threshold trains exactly one unit and never fails") {
  const CovarianceMatrix R = build_exponential_covariance(5, Complex(0.6, 0.0));
  for (const SchemeKind& s : {SchemeKind::basic_antenna(), SchemeKind::basic_beam(),
                              SchemeKind::modified_beam(), SchemeKind::modified_antenna()}) {
    Xoshiro256pp rng = trial_stream(1, 0);
    const TrialOutcome out = run_trial(s, R, 0.0, rng);
    CHECK(out.training_length == 1);
    CHECK_FALSE(out.outage);
  }
  Xoshiro256pp rng(2);
  CHECK_THROWS_AS(run_trial(SchemeKind::basic_antenna(), R, -1.0, rng), InvalidParameter);
}

TEST_CASE("partial beamformer matches the trained channel segment") {
  Vector h(5);
  h << Complex(1.0, 1.0), Complex(0.5, -0.2), Complex(0.0, 0.0), Complex(-0.3, 0.4),
      Complex(2.0, 0.0);
  const std::vector<int> trained = {1, 4, 5};
  const auto [w, snr] = partial_beamformer(h, trained);
  const double power = std::norm(h(0)) + std::norm(h(3)) + std::norm(h(4));
  CHECK(snr == doctest::Approx(power).epsilon(1e-14));
  CHECK(w.squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w(1) == Complex(0.0, 0.0));
  CHECK(w(2) == Complex(0.0, 0.0));
  for (int idx : trained)
    CHECK(std::abs(w(idx - 1) - h(idx - 1) / std::sqrt(power)) <= 1e-14);
}

TEST_CASE("partial beamformer is phase covariant") {
  Vector h(3);
  h << Complex(0.4, 0.3), Complex(-1.0, 0.1), Complex(0.2, -0.9);
  const auto [w, snr] = partial_beamformer(h, {1, 3});
  const Complex phase = std::polar(1.0, 1.234);
  const auto [w2, snr2] = partial_beamformer((phase * h).eval(), {1, 3});
  CHECK(snr2 == doctest::Approx(snr).epsilon(1e-13));
  CHECK((w2 - phase * w).norm() <= 1e-13);
}

TEST_CASE("partial beamformer error conditions") {
  Vector h = Vector::Zero(4);
  h(1) = Complex(1.0, 0.0);
  CHECK_THROWS_AS(partial_beamformer(h, {}), InvalidParameter);
  CHECK_THROWS_AS(partial_beamformer(h, {5}), InvalidParameter);
  CHECK_THROWS_AS(partial_beamformer(h, {1, 3}), UndefinedBeamformer);
}

TEST_CASE("monte carlo is deterministic and thread-count independent") {
  const CovarianceMatrix R = build_exponential_covariance(8, Complex(0.5, 0.0));
  const MCEstimate a = monte_carlo(SchemeKind::modified_antenna(), R, 6.0, 4001, 12345, 1);
  const MCEstimate b = monte_carlo(SchemeKind::modified_antenna(), R, 6.0, 4001, 12345, 3);
  const MCEstimate c = monte_carlo(SchemeKind::modified_antenna(), R, 6.0, 4001, 12345, 0);
  CHECK(a.mean_length == b.mean_length);
  CHECK(a.std_error == b.std_error);
  CHECK(a.outage_rate == b.outage_rate);
  CHECK(a.mean_length == c.mean_length);
  CHECK(a.trials == 4001);
  CHECK(a.master_seed == 12345);
  CHECK(a.mean_length >= 1.0);
  CHECK(a.mean_length <= 8.0);
  CHECK_THROWS_AS(monte_carlo(SchemeKind::basic_antenna(), R, 1.0, 0, 1, 1), InvalidParameter);
}

TEST_CASE("monte carlo means agree with the closed forms") {
  const CovarianceMatrix R = build_exponential_covariance(8, Complex(0.5, 0.0));
  const double alpha = 6.0;
  const long trials = 20000;
  struct Case {
    SchemeKind scheme;
    double want;
  };
  const Case cases[] = {
      {SchemeKind::basic_antenna(), lt_antenna_basic(R, alpha).value},
      {SchemeKind::basic_beam(), lt_beam_general(R, dft_codebook(8), alpha).value},
      {SchemeKind::modified_beam(), lt_beam_modified(R, alpha).value},
  };
  std::uint64_t seed = 606;
  for (const Case& c : cases) {
    const MCEstimate est = monte_carlo(c.scheme, R, alpha, trials, seed++, 1);
    CHECK(std::abs(est.mean_length - c.want) <= 4.0 * est.std_error);
  }
}

TEST_CASE("outage rate matches the full-spectrum tail probability") {
  const CovarianceMatrix R = build_exponential_covariance(8, Complex(0.5, 0.0));
  const double alpha = 8.5;
  std::vector<int> all(8);
  std::iota(all.begin(), all.end(), 1);
  const double want = wcs_cdf(prefix_spectrum(R, all), alpha);
  const long trials = 20000;
  const MCEstimate est = monte_carlo(SchemeKind::basic_antenna(), R, alpha, trials, 404, 1);
  const double se = std::sqrt(want * (1.0 - want) / trials);
  CHECK(std::abs(est.outage_rate - want) <= 4.0 * se);
}

TEST_CASE("common draws give every scheme the same outage set") {
  const CovarianceMatrix R = build_exponential_covariance(8, Complex(0.6, 0.0));
  const double alpha = 8.5;
  const long trials = 5000;
  const double a = monte_carlo(SchemeKind::basic_antenna(), R, alpha, trials, 7878, 1).outage_rate;
  const double b = monte_carlo(SchemeKind::basic_beam(), R, alpha, trials, 7878, 1).outage_rate;
  const double c = monte_carlo(SchemeKind::modified_beam(), R, alpha, trials, 7878, 1).outage_rate;
  const double d =
      monte_carlo(SchemeKind::modified_antenna(), R, alpha, trials, 7878, 1).outage_rate;
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a == d);
  CHECK(a > 0.0);  // the threshold sits in the distribution's bulk
}

TEST_CASE("beam codebook validation happens before any trial runs") {
  const CovarianceMatrix R = build_exponential_covariance(4, Complex(0.4, 0.0));
  Matrix bad = dft_codebook(4);
  bad.col(0) *= 0.5;
  Xoshiro256pp rng(3);
  CHECK_THROWS_AS(run_trial(SchemeKind::basic_beam(bad), R, 1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(run_trial(SchemeKind::basic_beam(dft_codebook(5)), R, 1.0, rng),
                  InvalidParameter);
}
