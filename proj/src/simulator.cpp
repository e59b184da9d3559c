#include "itrain/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "itrain/conditional.hpp"
#include "itrain/errors.hpp"

namespace itrain {

std::string scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::basic_antenna: return "basic-antenna";
    case SchemeId::basic_beam: return "basic-beam";
    case SchemeId::modified_beam: return "modified-beam";
    case SchemeId::modified_antenna: return "modified-antenna";
  }
  return "unknown";
}

SchemeId scheme_from_name(const std::string& name) {
  if (name == "basic-antenna") return SchemeId::basic_antenna;
  if (name == "basic-beam") return SchemeId::basic_beam;
  if (name == "modified-beam") return SchemeId::modified_beam;
  if (name == "modified-antenna") return SchemeId::modified_antenna;
  throw InvalidParameter("unknown scheme: " + name);
}

Vector sample_channel(const EigenSystem& eig, Xoshiro256pp& rng) {
  const Vector g = complex_normal_vector(rng, eig.rank());
  return eig.eigenvectors * eig.eigenvalues.cwiseSqrt().asDiagonal() * g;
}

namespace {

// Everything trial-independent, built once per (scheme, R, alpha) so the
// Monte Carlo loop only does a matrix-vector product per trial.
struct TrialContext {
  SchemeId id = SchemeId::basic_antenna;
  int steps = 0;  // trainable units
  int rank = 0;
  int antennas = 0;
  Matrix sampler;  // maps the rank-sized white vector into the training domain
  const CovarianceMatrix* R = nullptr;
  int first = 0;  // modified-antenna starting index
};

TrialContext prepare(const SchemeKind& scheme, const CovarianceMatrix& R) {
  const int M = static_cast<int>(R.size());
  const EigenSystem eig = compact_eig(R);

  TrialContext ctx;
  ctx.id = scheme.id;
  ctx.rank = eig.rank();
  ctx.antennas = M;
  const Matrix shaping =
      eig.eigenvectors * eig.eigenvalues.cwiseSqrt().asDiagonal();  // h = shaping * g

  switch (scheme.id) {
    case SchemeId::basic_antenna:
      ctx.sampler = shaping;
      ctx.steps = M;
      break;
    case SchemeId::basic_beam: {
      Matrix W = scheme.codebook.size() == 0 ? dft_codebook(M) : scheme.codebook;
      if (W.rows() != M) throw InvalidParameter("codebook rows must match antenna count");
      if (W.cols() < 1 || W.cols() > M)
        throw InvalidParameter("codebook must have between 1 and M columns");
      for (Index c = 0; c < W.cols(); ++c)
        if (std::abs(W.col(c).norm() - 1.0) > 1e-9)
          throw InvalidParameter("codebook columns must be unit norm");
      ctx.sampler = W.adjoint() * shaping;
      ctx.steps = static_cast<int>(W.cols());
      break;
    }
    case SchemeId::modified_beam:
      // Eigenbeam training observes the channel in the eigenbasis directly.
      ctx.sampler = eig.eigenvalues.cwiseSqrt().cast<Complex>().asDiagonal();
      ctx.steps = ctx.rank;
      break;
    case SchemeId::modified_antenna:
      ctx.sampler = shaping;
      ctx.steps = M;
      ctx.R = &R;
      ctx.first = first_antenna(R);
      break;
  }
  return ctx;
}

TrialOutcome run_prepared(const TrialContext& ctx, double alpha, Xoshiro256pp& rng) {
  const Vector g = complex_normal_vector(rng, ctx.rank);
  const Vector v = ctx.sampler * g;  // channel seen by the training domain

  TrialOutcome out;
  if (ctx.id == SchemeId::modified_antenna) {
    TrainedSet trained;
    int n = ctx.first;
    trained.insert(n, v(n - 1));
    out.trained_indices.push_back(n);
    double power = std::norm(v(n - 1));
    while (power < alpha && trained.size() < ctx.antennas) {
      n = select_next_antenna(*ctx.R, trained, alpha);
      trained.insert(n, v(n - 1));
      out.trained_indices.push_back(n);
      power += std::norm(v(n - 1));
    }
    out.training_length = trained.size();
    out.achieved_snr = power;
    out.outage = power < alpha;
  } else {
    double power = 0.0;
    int len = 0;
    do {
      power += std::norm(v(len));
      ++len;
    } while (power < alpha && len < ctx.steps);
    out.training_length = len;
    out.achieved_snr = power;
    out.outage = power < alpha;
    out.trained_indices.resize(len);
    std::iota(out.trained_indices.begin(), out.trained_indices.end(), 1);
  }
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InvalidParameter("threshold alpha must be nonnegative and finite");
}

}  // namespace

TrialOutcome run_trial(const SchemeKind& scheme, const CovarianceMatrix& R, double alpha,
                       Xoshiro256pp& rng) {
  check_alpha(alpha);
  const TrialContext ctx = prepare(scheme, R);
  return run_prepared(ctx, alpha, rng);
}

std::pair<Vector, double> partial_beamformer(const Vector& h, const std::vector<int>& trained) {
  if (trained.empty()) throw InvalidParameter("trained index set must be nonempty");
  double power = 0.0;
  for (int idx : trained) {
    if (idx < 1 || idx > h.size()) throw InvalidParameter("trained index out of range");
    power += std::norm(h(idx - 1));
  }
  if (power <= 0.0)
    throw UndefinedBeamformer("trained channel segment is all zero");
  Vector w = Vector::Zero(h.size());
  const double inv_norm = 1.0 / std::sqrt(power);
  for (int idx : trained) w(idx - 1) = h(idx - 1) * inv_norm;
  return {std::move(w), power};
}

MCEstimate monte_carlo(const SchemeKind& scheme, const CovarianceMatrix& R, double alpha,
                       long trials, std::uint64_t master_seed, int threads) {
  check_alpha(alpha);
  if (trials < 1) throw InvalidParameter("trial count must be >= 1");
  const TrialContext ctx = prepare(scheme, R);

  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 0 ? static_cast<int>(hw) : 1;
  }
  threads = static_cast<int>(std::min<long>(threads, trials));

  // Integer accumulators make the reduction exact and order-independent, so
  // the estimate is identical for any thread count.
  struct Tally {
    long long length_sum = 0;
    long long length_sq_sum = 0;
    long long outages = 0;
  };
  std::vector<Tally> tallies(threads);

  auto worker = [&](int slot, long lo, long hi) {
    Tally& t = tallies[slot];
    for (long i = lo; i < hi; ++i) {
      Xoshiro256pp rng = trial_stream(master_seed, static_cast<std::uint64_t>(i));
      const TrialOutcome out = run_prepared(ctx, alpha, rng);
      t.length_sum += out.training_length;
      t.length_sq_sum += static_cast<long long>(out.training_length) * out.training_length;
      t.outages += out.outage ? 1 : 0;
    }
  };

  if (threads == 1) {
    worker(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const long chunk = (trials + threads - 1) / threads;
    for (int s = 0; s < threads; ++s) {
      const long lo = s * chunk;
      const long hi = std::min(trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, s, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  Tally total;
  for (const Tally& t : tallies) {
    total.length_sum += t.length_sum;
    total.length_sq_sum += t.length_sq_sum;
    total.outages += t.outages;
  }

  MCEstimate est;
  est.trials = trials;
  est.master_seed = master_seed;
  est.mean_length = static_cast<double>(total.length_sum) / trials;
  est.outage_rate = static_cast<double>(total.outages) / trials;
  if (trials > 1) {
    const double mean = est.mean_length;
    const double var =
        (static_cast<double>(total.length_sq_sum) - trials * mean * mean) / (trials - 1.0);
    est.std_error = std::sqrt(std::max(var, 0.0) / trials);
  }
  return est;
}

}  // namespace itrain
