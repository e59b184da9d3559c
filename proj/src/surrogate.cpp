#include "itrain/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "itrain/channel_models.hpp"
#include "itrain/errors.hpp"
#include "itrain/rng.hpp"
#include "itrain/simulator.hpp"

namespace itrain {

namespace {

constexpr int kLayerDims[] = {2, 4, 8, 16, 32, 1};
constexpr int kLayers = 5;

// Fisher-Yates with an explicit generator so the split does not depend on
// the standard library's std::shuffle implementation.
void deterministic_shuffle(std::vector<int>& v, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

const std::vector<int>& SurrogateDataset::split_indices(Split s) const {
  switch (s) {
    case Split::train: return train_indices;
    case Split::validation: return validation_indices;
    case Split::test: return test_indices;
  }
  return train_indices;
}

SurrogateDataset generate_dataset(int M, const std::vector<double>& rho_grid,
                                  const std::vector<double>& alpha_grid, long trials,
                                  std::uint64_t seed) {
  if (M < 1) throw InvalidParameter("antenna count must be >= 1");
  if (rho_grid.empty() || alpha_grid.empty())
    throw InvalidParameter("surrogate grids must be nonempty");
  if (trials < 1) throw InvalidParameter("trial count must be >= 1");
  for (double rho : rho_grid)
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidParameter("rho grid values must be in [0, 1)");
  for (double alpha : alpha_grid)
    if (!(alpha >= 0.0)) throw InvalidParameter("alpha grid values must be nonnegative");

  SurrogateDataset data;
  data.antennas = M;
  const SchemeKind scheme = SchemeKind::modified_antenna();
  long point = 0;
  for (double rho : rho_grid) {
    const CovarianceMatrix R = build_exponential_covariance(M, Complex(rho, 0.0));
    for (double alpha : alpha_grid) {
      const MCEstimate est =
          monte_carlo(scheme, R, alpha, trials, derive_seed(seed, 1 + point));
      data.samples.push_back({rho, alpha, est.mean_length});
      ++point;
    }
  }

  const int n = static_cast<int>(data.samples.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  deterministic_shuffle(order, derive_seed(seed, 0x5B1F7ULL));
  int n_train = static_cast<int>(std::lround(0.70 * n));
  int n_val = static_cast<int>(std::lround(0.15 * n));
  if (n >= 3) {
    n_train = std::clamp(n_train, 1, n - 2);
    n_val = std::clamp(n_val, 1, n - n_train - 1);
  }
  data.train_indices.assign(order.begin(), order.begin() + n_train);
  data.validation_indices.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  data.test_indices.assign(order.begin() + n_train + n_val, order.end());
  return data;
}

namespace {

struct Batch {
  RealMatrix inputs;   // 2 x n, standardized
  RealVector targets;  // n, standardized
};

Batch standardized_batch(const SurrogateDataset& data, const std::vector<int>& idx,
                         const RegressorModel& model) {
  Batch b;
  b.inputs.resize(2, idx.size());
  b.targets.resize(idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const SurrogateSample& s = data.samples[idx[c]];
    b.inputs(0, c) = (s.rho - model.input_mean(0)) / model.input_std(0);
    b.inputs(1, c) = (s.alpha - model.input_mean(1)) / model.input_std(1);
    b.targets(c) = (s.lt - model.target_mean) / model.target_std;
  }
  return b;
}

// Forward pass on standardized inputs; returns standardized outputs and
// fills the post-activation values per layer when `acts` is given.
RealVector forward(const RegressorModel& model, const RealMatrix& inputs,
                   std::vector<RealMatrix>* acts) {
  RealMatrix a = inputs;
  if (acts) acts->push_back(a);
  for (int l = 0; l < kLayers; ++l) {
    RealMatrix z = (model.weights[l] * a).colwise() + model.biases[l];
    if (l + 1 < kLayers) z = z.cwiseMax(0.0);  // ReLU on hidden layers
    a = std::move(z);
    if (acts) acts->push_back(a);
  }
  return a.row(0).transpose();
}

double raw_scale_mse(const RegressorModel& model, const SurrogateDataset& data,
                     const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  double sum = 0.0;
  for (int i : idx) {
    const SurrogateSample& s = data.samples[i];
    const double r = predict(model, s.rho, s.alpha) - s.lt;
    sum += r * r;
  }
  return sum / idx.size();
}

}  // namespace

RegressorModel fit_surrogate(const SurrogateDataset& data, int epochs, double learning_rate,
                             std::uint64_t seed, FitReport* report) {
  if (epochs < 0) throw InvalidParameter("epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidParameter("learning rate must be positive");
  if (data.train_indices.empty()) throw InvalidParameter("train split is empty");
  if (data.validation_indices.empty()) throw InvalidParameter("validation split is empty");

  RegressorModel model;
  model.antennas = data.antennas;

  // Standardization constants from the train split only.
  {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    double t_mean = 0.0;
    for (int i : data.train_indices) {
      mean(0) += data.samples[i].rho;
      mean(1) += data.samples[i].alpha;
      t_mean += data.samples[i].lt;
    }
    const double n = static_cast<double>(data.train_indices.size());
    mean /= n;
    t_mean /= n;
    Eigen::Vector2d var = Eigen::Vector2d::Zero();
    double t_var = 0.0;
    model.rho_min = model.rho_max = data.samples[data.train_indices[0]].rho;
    model.alpha_min = model.alpha_max = data.samples[data.train_indices[0]].alpha;
    for (int i : data.train_indices) {
      const SurrogateSample& s = data.samples[i];
      var(0) += (s.rho - mean(0)) * (s.rho - mean(0));
      var(1) += (s.alpha - mean(1)) * (s.alpha - mean(1));
      t_var += (s.lt - t_mean) * (s.lt - t_mean);
      model.rho_min = std::min(model.rho_min, s.rho);
      model.rho_max = std::max(model.rho_max, s.rho);
      model.alpha_min = std::min(model.alpha_min, s.alpha);
      model.alpha_max = std::max(model.alpha_max, s.alpha);
    }
    var /= n;
    t_var /= n;
    model.input_mean = mean;
    model.input_std(0) = var(0) > 1e-24 ? std::sqrt(var(0)) : 1.0;
    model.input_std(1) = var(1) > 1e-24 ? std::sqrt(var(1)) : 1.0;
    model.target_mean = t_mean;
    model.target_std = t_var > 1e-24 ? std::sqrt(t_var) : 1.0;
  }

  // Glorot-uniform initialization, deterministic in the seed.
  Xoshiro256pp rng(derive_seed(seed, 0xF17ULL));
  auto uniform = [&rng](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  model.weights.resize(kLayers);
  model.biases.resize(kLayers);
  for (int l = 0; l < kLayers; ++l) {
    const int rows = kLayerDims[l + 1], cols = kLayerDims[l];
    const double limit = std::sqrt(6.0 / (rows + cols));
    model.weights[l].resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) model.weights[l](i, j) = uniform(-limit, limit);
    model.biases[l] = RealVector::Zero(rows);
  }

  const Batch train = standardized_batch(data, data.train_indices, model);
  const long n = train.targets.size();

  // Adam state.
  std::vector<RealMatrix> mW(kLayers), vW(kLayers);
  std::vector<RealVector> mb(kLayers), vb(kLayers);
  for (int l = 0; l < kLayers; ++l) {
    mW[l] = RealMatrix::Zero(model.weights[l].rows(), model.weights[l].cols());
    vW[l] = mW[l];
    mb[l] = RealVector::Zero(model.biases[l].size());
    vb[l] = mb[l];
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  RegressorModel best = model;
  double best_val = raw_scale_mse(model, data, data.validation_indices);
  int best_epoch = -1;
  if (report) {
    report->validation_mse.clear();
    report->validation_mse.reserve(epochs);
  }

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::vector<RealMatrix> acts;
    forward(model, train.inputs, &acts);
    const RealMatrix& out = acts.back();  // 1 x n
    RealMatrix delta = out;               // becomes dL/dz at the output
    delta.row(0) -= train.targets.transpose();
    const double loss = delta.row(0).squaredNorm() / n;
    if (!std::isfinite(loss))
      throw TrainingFailure("loss diverged at epoch " + std::to_string(epoch));
    delta *= 2.0 / static_cast<double>(n);

    // Cosine-decayed step size, fixed schedule.
    const double lr =
        learning_rate * (0.01 + 0.99 * 0.5 * (1.0 + std::cos(3.14159265358979323846 *
                                                             static_cast<double>(epoch) / epochs)));
    const double bc1 = 1.0 - std::pow(kBeta1, epoch);
    const double bc2 = 1.0 - std::pow(kBeta2, epoch);

    for (int l = kLayers - 1; l >= 0; --l) {
      const RealMatrix& a_in = acts[l];
      const RealMatrix gW = delta * a_in.transpose();
      const RealVector gb = delta.rowwise().sum();
      if (l > 0) {
        RealMatrix next = model.weights[l].transpose() * delta;
        // ReLU gate on the preceding hidden activation.
        next = (acts[l].array() > 0.0).select(next, RealMatrix::Zero(next.rows(), next.cols()));
        delta = std::move(next);
      }
      mW[l] = kBeta1 * mW[l] + (1.0 - kBeta1) * gW;
      vW[l] = kBeta2 * vW[l] + (1.0 - kBeta2) * gW.cwiseProduct(gW);
      mb[l] = kBeta1 * mb[l] + (1.0 - kBeta1) * gb;
      vb[l] = kBeta2 * vb[l] + (1.0 - kBeta2) * gb.cwiseProduct(gb);
      model.weights[l] -=
          lr * (mW[l] / bc1).cwiseQuotient(((vW[l] / bc2).cwiseSqrt().array() + kEps).matrix());
      model.biases[l] -=
          lr * (mb[l] / bc1).cwiseQuotient(((vb[l] / bc2).cwiseSqrt().array() + kEps).matrix());
    }

    const double val = raw_scale_mse(model, data, data.validation_indices);
    if (!std::isfinite(val))
      throw TrainingFailure("validation loss diverged at epoch " + std::to_string(epoch));
    if (report) report->validation_mse.push_back(val);
    if (val < best_val) {
      best_val = val;
      best = model;
      best_epoch = epoch;
    }
  }

  if (report) {
    report->best_validation_mse = best_val;
    report->best_epoch = best_epoch;
  }
  return best;
}

double predict(const RegressorModel& model, double rho, double alpha, bool* extrapolating) {
  if (model.weights.size() != kLayers) throw InvalidParameter("model is not initialized");
  if (extrapolating)
    *extrapolating = rho < model.rho_min || rho > model.rho_max || alpha < model.alpha_min ||
                     alpha > model.alpha_max;
  RealMatrix input(2, 1);
  input(0, 0) = (rho - model.input_mean(0)) / model.input_std(0);
  input(1, 0) = (alpha - model.input_mean(1)) / model.input_std(1);
  const RealVector out = forward(model, input, nullptr);
  const double raw = out(0) * model.target_std + model.target_mean;
  return std::clamp(raw, 1.0, static_cast<double>(model.antennas));
}

double evaluate(const RegressorModel& model, const SurrogateDataset& data, Split split) {
  return raw_scale_mse(model, data, data.split_indices(split));
}

namespace {

void write_value(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void save_model(const RegressorModel& model, std::ostream& out) {
  out << "itrain-mlp 1\n";
  out << "antennas " << model.antennas << "\n";
  out << "layers";
  for (int d : kLayerDims) out << ' ' << d;
  out << "\n";
  for (int l = 0; l < kLayers; ++l) {
    out << "W " << model.weights[l].rows() << ' ' << model.weights[l].cols() << "\n";
    for (Index i = 0; i < model.weights[l].rows(); ++i) {
      for (Index j = 0; j < model.weights[l].cols(); ++j) {
        if (j) out << ' ';
        write_value(out, model.weights[l](i, j));
      }
      out << "\n";
    }
    out << "b " << model.biases[l].size() << "\n";
    for (Index i = 0; i < model.biases[l].size(); ++i) {
      if (i) out << ' ';
      write_value(out, model.biases[l](i));
    }
    out << "\n";
  }
  out << "input_mean ";
  write_value(out, model.input_mean(0));
  out << ' ';
  write_value(out, model.input_mean(1));
  out << "\ninput_std ";
  write_value(out, model.input_std(0));
  out << ' ';
  write_value(out, model.input_std(1));
  out << "\ntarget_mean ";
  write_value(out, model.target_mean);
  out << "\ntarget_std ";
  write_value(out, model.target_std);
  out << "\ndomain ";
  write_value(out, model.rho_min);
  out << ' ';
  write_value(out, model.rho_max);
  out << ' ';
  write_value(out, model.alpha_min);
  out << ' ';
  write_value(out, model.alpha_max);
  out << "\n";
}

void save_model(const RegressorModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot open model file for writing: " + path);
  save_model(model, out);
}

namespace {

void expect_token(std::istream& in, const std::string& want) {
  std::string got;
  if (!(in >> got) || got != want)
    throw InvalidParameter("malformed model file: expected '" + want + "'");
}

}  // namespace

RegressorModel load_model(std::istream& in) {
  expect_token(in, "itrain-mlp");
  int version = 0;
  if (!(in >> version) || version != 1)
    throw InvalidParameter("unsupported model file version");
  RegressorModel model;
  expect_token(in, "antennas");
  if (!(in >> model.antennas) || model.antennas < 1)
    throw InvalidParameter("malformed model file: antennas");
  expect_token(in, "layers");
  for (int d : kLayerDims) {
    int got = 0;
    if (!(in >> got) || got != d)
      throw InvalidParameter("malformed model file: unexpected layer widths");
  }
  model.weights.resize(kLayers);
  model.biases.resize(kLayers);
  for (int l = 0; l < kLayers; ++l) {
    expect_token(in, "W");
    Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows != kLayerDims[l + 1] || cols != kLayerDims[l])
      throw InvalidParameter("malformed model file: weight shape");
    model.weights[l].resize(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        if (!(in >> model.weights[l](i, j)))
          throw InvalidParameter("malformed model file: weight entries");
    expect_token(in, "b");
    Index len = 0;
    if (!(in >> len) || len != rows) throw InvalidParameter("malformed model file: bias shape");
    model.biases[l].resize(len);
    for (Index i = 0; i < len; ++i)
      if (!(in >> model.biases[l](i)))
        throw InvalidParameter("malformed model file: bias entries");
  }
  expect_token(in, "input_mean");
  if (!(in >> model.input_mean(0) >> model.input_mean(1)))
    throw InvalidParameter("malformed model file: input_mean");
  expect_token(in, "input_std");
  if (!(in >> model.input_std(0) >> model.input_std(1)))
    throw InvalidParameter("malformed model file: input_std");
  expect_token(in, "target_mean");
  if (!(in >> model.target_mean)) throw InvalidParameter("malformed model file: target_mean");
  expect_token(in, "target_std");
  if (!(in >> model.target_std)) throw InvalidParameter("malformed model file: target_std");
  expect_token(in, "domain");
  if (!(in >> model.rho_min >> model.rho_max >> model.alpha_min >> model.alpha_max))
    throw InvalidParameter("malformed model file: domain");
  return model;
}

RegressorModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open model file: " + path);
  return load_model(in);
}

}  // namespace itrain
