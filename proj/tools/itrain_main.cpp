#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "itrain/analytic.hpp"
#include "itrain/errors.hpp"
#include "itrain/simulator.hpp"
#include "itrain/surrogate.hpp"
#include "itrain/sweep.hpp"
#include "itrain/validation.hpp"

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Options shared by the single-point `analytic` and `simulate` subcommands.
struct PointOptions {
  std::string model = "exponential";
  double rho = 0.0;
  double as_deg = 10.0;
  double theta_deg = 45.0;
  double spacing = 0.5;
  int nodes = 2048;
  int antennas = 32;
  std::string scheme = "modified-beam";
  double alpha = -1.0;
  double rate = -1.0;
  double power_db = 0.0;
};

void add_point_options(CLI::App* cmd, PointOptions& p) {
  cmd->add_option("--model", p.model, "Covariance model: exponential | one-ring")
      ->check(CLI::IsMember({"exponential", "one-ring"}));
  cmd->add_option("--rho", p.rho, "Exponential correlation magnitude in [0,1)");
  cmd->add_option("--as-deg", p.as_deg, "One-ring RMS angular spread, degrees");
  cmd->add_option("--theta-deg", p.theta_deg, "One-ring mean angle of departure, degrees");
  cmd->add_option("--spacing", p.spacing, "Antenna spacing in wavelengths");
  cmd->add_option("--nodes", p.nodes, "Quadrature nodes for the one-ring integral");
  cmd->add_option("-M,--antennas", p.antennas, "Number of transmit antennas");
  cmd->add_option("--scheme", p.scheme,
                  "basic-antenna | basic-beam | modified-beam | modified-antenna");
  cmd->add_option("--alpha", p.alpha, "SNR threshold (overrides --rate/--power-db)");
  cmd->add_option("--rate", p.rate, "Outage rate threshold R_th, bits");
  cmd->add_option("--power-db", p.power_db, "Transmit power, dB");
}

itrain::CovarianceMatrix build_covariance(const PointOptions& p) {
  if (p.model == "exponential")
    return itrain::build_exponential_covariance(p.antennas, {p.rho, 0.0});
  const itrain::ArrayGeometry array{p.antennas, p.spacing};
  const itrain::OneRingModel model = itrain::OneRingModel::from_angular_spread(
      p.theta_deg * kDegToRad, p.as_deg * kDegToRad);
  return itrain::build_one_ring_covariance(array, model, p.nodes);
}

double resolve_alpha(const PointOptions& p) {
  if (p.alpha >= 0.0) return p.alpha;
  if (p.rate >= 0.0)
    return itrain::snr_threshold(p.rate, std::pow(10.0, p.power_db / 10.0));
  throw itrain::InvalidParameter("give --alpha, or --rate with --power-db");
}

int run_analytic(const PointOptions& p, bool approx) {
  const double alpha = resolve_alpha(p);
  const itrain::SchemeId scheme = itrain::scheme_from_name(p.scheme);
  itrain::TrainingLengthResult result;
  if (approx) {
    if (p.model != "exponential")
      throw itrain::InvalidParameter("--approx needs the exponential model");
    if (scheme == itrain::SchemeId::modified_beam)
      result = itrain::lt_beam_modified_exp_approx(p.antennas, p.rho, alpha);
    else if (scheme == itrain::SchemeId::basic_antenna)
      result = itrain::lt_antenna_basic_exp_approx(p.antennas, p.rho, alpha);
    else
      throw itrain::InvalidParameter("--approx covers modified-beam and basic-antenna");
  } else {
    const itrain::CovarianceMatrix R = build_covariance(p);
    switch (scheme) {
      case itrain::SchemeId::basic_antenna: result = itrain::lt_antenna_basic(R, alpha); break;
      case itrain::SchemeId::basic_beam:
        result = itrain::lt_beam_general(R, itrain::dft_codebook(p.antennas), alpha);
        break;
      case itrain::SchemeId::modified_beam: result = itrain::lt_beam_modified(R, alpha); break;
      case itrain::SchemeId::modified_antenna:
        std::cerr << "modified-antenna has no closed form; use `simulate`\n";
        return 2;
    }
  }
  std::printf("scheme=%s alpha_th=%.10g L_t=%.10g method=%s\n", p.scheme.c_str(), alpha,
              result.value, result.method == itrain::Method::exact ? "exact" : "approximation");
  return 0;
}

int run_simulate(const PointOptions& p, long trials, std::uint64_t seed, int threads) {
  const double alpha = resolve_alpha(p);
  const itrain::CovarianceMatrix R = build_covariance(p);
  const itrain::SchemeKind scheme{itrain::scheme_from_name(p.scheme), {}};
  const itrain::MCEstimate est = itrain::monte_carlo(scheme, R, alpha, trials, seed, threads);
  std::printf("scheme=%s alpha_th=%.10g mean=%.10g stderr=%.10g outage=%.10g trials=%ld seed=%llu\n",
              p.scheme.c_str(), alpha, est.mean_length, est.std_error, est.outage_rate,
              est.trials, static_cast<unsigned long long>(est.master_seed));
  return 0;
}

int run_sweep_cmd(const std::string& config_path, std::string output) {
  const itrain::SweepConfig cfg = itrain::load_sweep_config(config_path);
  const std::string csv = itrain::to_csv(itrain::run_sweep(cfg));
  if (output.empty()) output = cfg.output;
  if (output.empty() || output == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw itrain::ConfigError("cannot open output file: " + output);
    out << csv;
    std::cerr << "wrote " << output << "\n";
  }
  return 0;
}

int run_validate(double trial_scale, int threads, bool verbose) {
  itrain::ValidationOptions opt;
  opt.trial_scale = trial_scale;
  opt.threads = threads;
  opt.verbose = verbose;
  const std::vector<itrain::CriterionResult> results = itrain::run_validation(opt);
  return itrain::print_validation_report(results, std::cout) ? 0 : 1;
}

int run_fit(const std::string& config_path) {
  const itrain::SurrogateConfig cfg = itrain::load_surrogate_config(config_path);
  std::cerr << "simulating " << cfg.rho_grid.size() * cfg.alpha_grid.size()
            << " grid cells at " << cfg.trials << " trials each\n";
  const itrain::SurrogateDataset data = itrain::generate_dataset(
      cfg.antennas, cfg.rho_grid, cfg.alpha_grid, cfg.trials, cfg.seed);
  itrain::FitReport report;
  const itrain::RegressorModel model =
      itrain::fit_surrogate(data, cfg.epochs, cfg.learning_rate, cfg.seed, &report);
  itrain::save_model(model, cfg.model_out);
  std::printf("samples=%zu best_epoch=%d validation_mse=%.10g test_mse=%.10g model=%s\n",
              data.samples.size(), report.best_epoch, report.best_validation_mse,
              itrain::evaluate(model, data, itrain::Split::test), cfg.model_out.c_str());
  return 0;
}

int run_predict(const std::string& model_path, double rho, double alpha) {
  const itrain::RegressorModel model = itrain::load_model(model_path);
  bool extrapolating = false;
  const double lt = itrain::predict(model, rho, alpha, &extrapolating);
  if (extrapolating)
    std::cerr << "warning: (rho, alpha) outside the training domain; extrapolating\n";
  std::printf("L_t=%.10g\n", lt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interleaved training-length analysis for correlated MIMO downlink channels"};
  app.require_subcommand(1);

  PointOptions analytic_opts;
  bool approx = false;
  CLI::App* analytic = app.add_subcommand("analytic", "Closed-form average training length");
  add_point_options(analytic, analytic_opts);
  analytic->add_flag("--approx", approx, "Use the closed-form spectrum approximation");

  PointOptions sim_opts;
  long trials = 100000;
  std::uint64_t seed = 42;
  int threads = 1;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo average training length");
  add_point_options(simulate, sim_opts);
  simulate->add_option("--trials", trials, "Number of trials");
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--threads", threads, "Worker threads (<=0: hardware)");

  std::string sweep_config, sweep_output;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a configured sweep, emit CSV");
  sweep->add_option("config", sweep_config, "Sweep configuration file")->required();
  sweep->add_option("-o,--output", sweep_output, "Output path ('-' = stdout)");

  double trial_scale = 1.0;
  int validate_threads = 1;
  bool verbose = false;
  CLI::App* validate = app.add_subcommand("validate", "Run the acceptance checks");
  validate->add_option("--trial-scale", trial_scale, "Scale Monte Carlo trial counts");
  validate->add_option("--threads", validate_threads, "Worker threads");
  validate->add_flag("-v,--verbose", verbose, "Progress notes on stderr");

  std::string fit_config;
  CLI::App* fit = app.add_subcommand("fit-surrogate", "Fit the training-length regressor");
  fit->add_option("config", fit_config, "Surrogate configuration file")->required();

  std::string model_path;
  double pred_rho = 0.0, pred_alpha = 0.0;
  CLI::App* predict = app.add_subcommand("predict", "Evaluate a saved regressor");
  predict->add_option("model", model_path, "Model file")->required();
  predict->add_option("rho", pred_rho, "Correlation magnitude")->required();
  predict->add_option("alpha", pred_alpha, "SNR threshold")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analytic->parsed()) return run_analytic(analytic_opts, approx);
    if (simulate->parsed()) return run_simulate(sim_opts, trials, seed, threads);
    if (sweep->parsed()) return run_sweep_cmd(sweep_config, sweep_output);
    if (validate->parsed()) return run_validate(trial_scale, validate_threads, verbose);
    if (fit->parsed()) return run_fit(fit_config);
    if (predict->parsed()) return run_predict(model_path, pred_rho, pred_alpha);
  } catch (const itrain::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
