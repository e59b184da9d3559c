#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "itrain/types.hpp"

namespace itrain {

// One labelled point: simulated average training length of the
// modified antenna-domain scheme on the exponential model.
struct SurrogateSample {
  double rho = 0.0;
  double alpha = 0.0;
  double lt = 1.0;
};

enum class Split { train, validation, test };

struct SurrogateDataset {
  int antennas = 0;
  std::vector<SurrogateSample> samples;
  std::vector<int> train_indices;
  std::vector<int> validation_indices;
  std::vector<int> test_indices;
  const std::vector<int>& split_indices(Split s) const;
};

// Simulates the (rho, alpha) grid and splits 70/15/15 at random (seeded).
SurrogateDataset generate_dataset(int M, const std::vector<double>& rho_grid,
                                  const std::vector<double>& alpha_grid, long trials,
                                  std::uint64_t seed);

// Fully connected ReLU regressor 2 -> 4 -> 8 -> 16 -> 32 -> 1 with linear
// output, plus the standardization constants baked in at fit time.
struct RegressorModel {
  int antennas = 0;
  std::vector<RealMatrix> weights;  // weights[l]: out x in
  std::vector<RealVector> biases;
  Eigen::Vector2d input_mean{0.0, 0.0};
  Eigen::Vector2d input_std{1.0, 1.0};
  double target_mean = 0.0;
  double target_std = 1.0;
  // Training-domain box; predictions outside it are extrapolations.
  double rho_min = 0.0, rho_max = 0.0, alpha_min = 0.0, alpha_max = 0.0;
};

struct FitReport {
  std::vector<double> validation_mse;  // per epoch, raw target scale
  double best_validation_mse = 0.0;
  int best_epoch = -1;
};

// Full-batch Adam on mean squared error over the train split; keeps the
// weights with the best validation MSE. Deterministic for a given seed.
// Throws TrainingFailure if the loss becomes non-finite.
RegressorModel fit_surrogate(const SurrogateDataset& data, int epochs, double learning_rate,
                             std::uint64_t seed, FitReport* report = nullptr);

// Forward pass; the output is clamped to the feasible range [1, antennas].
// `extrapolating`, if given, is set when (rho, alpha) leaves the training box.
double predict(const RegressorModel& model, double rho, double alpha,
               bool* extrapolating = nullptr);

// Mean squared residual of the model over one split, raw target scale.
double evaluate(const RegressorModel& model, const SurrogateDataset& data, Split split);

// Plain-text serialization; numbers carry 17 significant digits so the
// round trip is bit exact.
void save_model(const RegressorModel& model, std::ostream& out);
void save_model(const RegressorModel& model, const std::string& path);
RegressorModel load_model(std::istream& in);
RegressorModel load_model(const std::string& path);

}  // namespace itrain
