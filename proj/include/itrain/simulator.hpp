#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itrain/channel_models.hpp"
#include "itrain/rng.hpp"
#include "itrain/spectra.hpp"

namespace itrain {

enum class SchemeId { basic_antenna, basic_beam, modified_beam, modified_antenna };

// A training scheme. basic_beam carries its codebook (empty = DFT of size M,
// chosen when the trial runs); modified_beam derives eigenbeams from R.
struct SchemeKind {
  SchemeId id = SchemeId::basic_antenna;
  Matrix codebook;

  static SchemeKind basic_antenna() { return {SchemeId::basic_antenna, {}}; }
  static SchemeKind basic_beam(Matrix codebook = {}) {
    return {SchemeId::basic_beam, std::move(codebook)};
  }
  static SchemeKind modified_beam() { return {SchemeId::modified_beam, {}}; }
  static SchemeKind modified_antenna() { return {SchemeId::modified_antenna, {}}; }
};

std::string scheme_name(SchemeId id);
SchemeId scheme_from_name(const std::string& name);

struct TrialOutcome {
  int training_length = 0;
  bool outage = false;
  std::vector<int> trained_indices;  // 1-based, in training order
  double achieved_snr = 0.0;         // |trained segment|^2 at stop (unit power)
};

struct MCEstimate {
  double mean_length = 0.0;
  double std_error = 0.0;
  double outage_rate = 0.0;
  long trials = 0;
  std::uint64_t master_seed = 0;
};

// Draws h ~ CN(0, R) from the compact eigensystem of R. Consumes exactly
// rank(R) complex normal draws from the stream.
Vector sample_channel(const EigenSystem& eig, Xoshiro256pp& rng);

// One interleaved-training trial. The stream is consumed exactly as by
// sample_channel(compact_eig(R)) first; selection logic draws nothing.
TrialOutcome run_trial(const SchemeKind& scheme, const CovarianceMatrix& R, double alpha,
                       Xoshiro256pp& rng);

// Partial match beamformer over the trained entries of the length-L channel
// vector h: proportional to h on `trained` (1-based), zero elsewhere, unit
// norm. Second element is the resulting SNR factor |h_trained|^2.
std::pair<Vector, double> partial_beamformer(const Vector& h, const std::vector<int>& trained);

// Monte Carlo average over `trials` independent trials with per-trial
// substreams of `master_seed`. `threads` <= 0 picks the hardware count.
// The estimate is bit-identical for a given seed regardless of thread count.
MCEstimate monte_carlo(const SchemeKind& scheme, const CovarianceMatrix& R, double alpha,
                       long trials, std::uint64_t master_seed, int threads = 1);

}  // namespace itrain
