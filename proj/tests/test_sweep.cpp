#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <itrain/analytic.hpp>
#include <itrain/channel_models.hpp>
#include <itrain/errors.hpp>
#include <itrain/rng.hpp>
#include <itrain/simulator.hpp>
#include <itrain/sweep.hpp>

using namespace itrain;

namespace {

// Line number carried by the ConfigError a parse raises; -1 if it parses.
int sweep_error_line(const std::string& text) {
  try {
    parse_sweep_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

int surrogate_error_line(const std::string& text) {
  try {
    parse_surrogate_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const std::string kMinimalSweep =
    "model = exponential\n"
    "rho = 0.5\n"
    "M = 4\n"
    "scheme = basic-antenna\n"
    "alpha = 3\n";

}  // namespace

TEST_CASE("exponential sweep config parses lists, ranges, and defaults") {
  const std::string text =
      "# threshold sweep\n"
      "model = exponential\n"
      "rho = 0:0.1:0.3, 0.9\n"
      "M = 4, 8\n"
      "scheme = basic-antenna, modified-beam\n"
      "alpha = 2,4\n";
  const SweepConfig cfg = parse_sweep_config(text);

  CHECK(cfg.model == ModelKind::exponential);
  REQUIRE_EQ(cfg.rho.size(), 5);
  CHECK_EQ(cfg.rho[0], doctest::Approx(0.0));
  CHECK_EQ(cfg.rho[1], doctest::Approx(0.1));
  CHECK_EQ(cfg.rho[2], doctest::Approx(0.2));
  CHECK_EQ(cfg.rho[3], doctest::Approx(0.3));
  CHECK_EQ(cfg.rho[4], doctest::Approx(0.9));
  REQUIRE_EQ(cfg.antennas.size(), 2);
  CHECK_EQ(cfg.antennas[0], 4);
  CHECK_EQ(cfg.antennas[1], 8);
  REQUIRE_EQ(cfg.schemes.size(), 2);
  CHECK(cfg.schemes[0] == SchemeId::basic_antenna);
  CHECK(cfg.schemes[1] == SchemeId::modified_beam);
  REQUIRE_EQ(cfg.alpha.size(), 2);
  CHECK_EQ(cfg.alpha[0], 2.0);
  CHECK_EQ(cfg.alpha[1], 4.0);

  CHECK_EQ(cfg.trials, 100000);
  CHECK_EQ(cfg.seed, 42);
  CHECK(cfg.mode == SweepMode::both);
  CHECK(cfg.output.empty());
}

TEST_CASE("one-ring sweep config accepts geometry and run options") {
  const std::string text =
      "model = one-ring\n"
      "as_deg = 5, 10\n"
      "theta_deg = 30\n"
      "spacing = 0.25\n"
      "nodes = 128\n"
      "M = 16\n"
      "scheme = basic-beam\n"
      "alpha = 3\n"
      "trials = 5000\n"
      "seed = 7\n"
      "mode = analytic\n"
      "output = rows.csv\n";
  const SweepConfig cfg = parse_sweep_config(text);

  CHECK(cfg.model == ModelKind::one_ring);
  REQUIRE_EQ(cfg.spread_deg.size(), 2);
  CHECK_EQ(cfg.spread_deg[0], 5.0);
  CHECK_EQ(cfg.spread_deg[1], 10.0);
  CHECK_EQ(cfg.mean_aod_deg, 30.0);
  CHECK_EQ(cfg.spacing, 0.25);
  CHECK_EQ(cfg.nodes, 128);
  CHECK_EQ(cfg.antennas.size(), 1);
  CHECK(cfg.schemes[0] == SchemeId::basic_beam);
  CHECK_EQ(cfg.trials, 5000);
  CHECK_EQ(cfg.seed, 7);
  CHECK(cfg.mode == SweepMode::analytic);
  CHECK_EQ(cfg.output, "rows.csv");
}

TEST_CASE("rate and power resolve to the SNR threshold") {
  const std::string text =
      "model = exponential\n"
      "rho = 0.5\n"
      "M = 8\n"
      "scheme = basic-antenna\n"
      "R_th = 3\n"
      "P_dB = -3, 0\n";
  const SweepConfig cfg = parse_sweep_config(text);

  REQUIRE_EQ(cfg.alpha.size(), 2);
  // (2^3 - 1) / 10^(-0.3) and (2^3 - 1) / 1.
  CHECK_EQ(cfg.alpha[0], doctest::Approx(7.0 / std::pow(10.0, -0.3)).epsilon(1e-12));
  CHECK_EQ(cfg.alpha[0], snr_threshold(3.0, std::pow(10.0, -0.3)));
  CHECK_EQ(cfg.alpha[1], 7.0);
}

TEST_CASE("syntax errors report the offending line") {
  CHECK_THROWS_WITH_AS(parse_sweep_config("# intro\nmodel exponential\n"),
                       "line 2: expected 'key = value'", ConfigError);
  CHECK_EQ(sweep_error_line("# intro\nmodel exponential\n"), 2);

  CHECK_THROWS_WITH_AS(parse_sweep_config("= 4\n"), "line 1: empty key", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("rho =\n"), "line 1: empty value for key 'rho'",
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\nrho = 0.5\nmodel = one-ring\n"),
                       "line 3: duplicate key 'model'", ConfigError);

  const std::string unknown = kMinimalSweep + "fnord = 1\n";
  CHECK_THROWS_WITH_AS(parse_sweep_config(unknown), "line 6: unknown key 'fnord'", ConfigError);
  CHECK_EQ(sweep_error_line(unknown), 6);
}

TEST_CASE("missing required keys raise line-less errors") {
  CHECK_THROWS_WITH_AS(parse_sweep_config(""), "missing required key 'model'", ConfigError);
  CHECK_EQ(sweep_error_line(""), 0);

  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\n"),
                       "exponential model needs key 'rho'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = one-ring\n"),
                       "one-ring model needs key 'as_deg'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\nrho = 0.5\n"),
                       "missing required key 'M'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\nrho = 0.5\nM = 4\n"),
                       "missing required key 'scheme'", ConfigError);

  const std::string no_threshold =
      "model = exponential\nrho = 0.5\nM = 4\nscheme = basic-antenna\n";
  CHECK_THROWS_WITH_AS(parse_sweep_config(no_threshold),
                       "need either 'alpha' or both 'R_th' and 'P_dB'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(no_threshold + "R_th = 2\n"),
                       "need either 'alpha' or both 'R_th' and 'P_dB'", ConfigError);
}

TEST_CASE("value validation rejects out-of-range settings") {
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = gaussian\n"),
                       "line 1: model must be 'exponential' or 'one-ring'", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\nrho = 1.0\n"),
                       "line 2: rho values must be in [0, 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\nrho = -0.1\n"),
                       "line 2: rho values must be in [0, 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = one-ring\nas_deg = 0\n"),
                       "line 2: angular spreads must be positive", ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_sweep_config("model = one-ring\nas_deg = 5\nspacing = 0\n"),
      "line 3: spacing must be positive", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = one-ring\nas_deg = 5\nnodes = 32\n"),
                       "line 3: nodes must be >= 64", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\nrho = 0.5\nM = 2.5\n"),
                       "line 3: M values must be integers >= 1", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config("model = exponential\nrho = 0.5\nM = 0\n"),
                       "line 3: M values must be integers >= 1", ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_sweep_config("model = exponential\nrho = 0.5\nM = 4\nscheme = warble\n"),
      "line 4: unknown scheme 'warble'", ConfigError);

  const std::string base = "model = exponential\nrho = 0.5\nM = 4\nscheme = basic-antenna\n";
  CHECK_THROWS_WITH_AS(parse_sweep_config(base + "alpha = -1\n"),
                       "line 5: alpha values must be nonnegative", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(base + "alpha = 2\nR_th = 1\nP_dB = 0\n"),
                       "line 5: give either alpha or R_th with P_dB, not both", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(base + "R_th = -1\nP_dB = 0\n"),
                       "line 5: R_th must be nonnegative", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(base + "alpha = 2\ntrials = 0\n"),
                       "line 6: trials must be >= 1", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(base + "alpha = 2\ntrials = 2.5\n"),
                       "line 6: expected an integer", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(base + "alpha = 2\nseed = -1\n"),
                       "line 6: seed must be nonnegative", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(base + "alpha = 2\nmode = sometimes\n"),
                       "line 6: mode must be analytic, simulate, or both", ConfigError);
}

TEST_CASE("number list syntax errors name the problem") {
  const std::string head = "model = exponential\nrho = ";
  CHECK_THROWS_WITH_AS(parse_sweep_config(head + "0.1,,0.3\n"), "line 2: empty list entry",
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(head + "0:0.1\n"), "line 2: range needs start:step:stop",
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(head + "0:0:0.5\n"),
                       "line 2: range step must be positive", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(head + "0.5:0.1:0.2\n"),
                       "line 2: range stop must be >= start", ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(head + "banana\n"), "line 2: not a number: 'banana'",
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_sweep_config(head + "1x\n"), "line 2: not a number: '1x'",
                       ConfigError);
}

TEST_CASE("sweep rows carry the cell settings and per-scheme analytic values") {
  const std::string text =
      "model = exponential\n"
      "rho = 0.5\n"
      "M = 4\n"
      "scheme = basic-antenna, basic-beam, modified-beam, modified-antenna\n"
      "alpha = 3\n"
      "trials = 300\n"
      "seed = 5\n";
  const SweepConfig cfg = parse_sweep_config(text);
  const std::vector<SweepRow> rows = run_sweep(cfg);
  REQUIRE_EQ(rows.size(), 4);

  const CovarianceMatrix R = build_exponential_covariance(4, Complex(0.5, 0.0));
  for (const SweepRow& row : rows) {
    CHECK_EQ(row.model, "exponential");
    CHECK_EQ(row.rho_or_spread, 0.5);
    CHECK_EQ(row.antennas, 4);
    CHECK_EQ(row.alpha, 3.0);
    CHECK_EQ(row.trials, 300);
    CHECK_EQ(row.seed, 5);
    REQUIRE(row.mc_mean.has_value());
    CHECK(*row.mc_mean >= 1.0);
    CHECK(*row.mc_mean <= 4.0);
    REQUIRE(row.outage_rate.has_value());
    CHECK(*row.outage_rate >= 0.0);
    CHECK(*row.outage_rate <= 1.0);
  }

  CHECK_EQ(rows[0].scheme, "basic-antenna");
  CHECK_EQ(rows[1].scheme, "basic-beam");
  CHECK_EQ(rows[2].scheme, "modified-beam");
  CHECK_EQ(rows[3].scheme, "modified-antenna");

  REQUIRE(rows[0].analytic_lt.has_value());
  CHECK_EQ(*rows[0].analytic_lt, lt_antenna_basic(R, 3.0).value);
  REQUIRE(rows[1].analytic_lt.has_value());
  CHECK_EQ(*rows[1].analytic_lt, lt_beam_general(R, dft_codebook(4), 3.0).value);
  REQUIRE(rows[2].analytic_lt.has_value());
  CHECK_EQ(*rows[2].analytic_lt, lt_beam_modified(R, 3.0).value);
  CHECK_FALSE(rows[3].analytic_lt.has_value());  // no closed form

  // Each cell simulates under its own derived substream.
  const MCEstimate cell2 =
      monte_carlo(SchemeKind::modified_beam(), R, 3.0, 300, derive_seed(5, 2));
  CHECK_EQ(*rows[2].mc_mean, cell2.mean_length);
  CHECK_EQ(*rows[2].mc_stderr, cell2.std_error);
  CHECK_EQ(*rows[2].outage_rate, cell2.outage_rate);
}

TEST_CASE("sweep mode selects which columns are filled") {
  SweepConfig cfg = parse_sweep_config(kMinimalSweep + "trials = 200\n");

  cfg.mode = SweepMode::analytic;
  for (const SweepRow& row : run_sweep(cfg)) {
    CHECK(row.analytic_lt.has_value());
    CHECK_FALSE(row.mc_mean.has_value());
    CHECK_FALSE(row.mc_stderr.has_value());
    CHECK_FALSE(row.outage_rate.has_value());
  }

  cfg.mode = SweepMode::simulate;
  for (const SweepRow& row : run_sweep(cfg)) {
    CHECK_FALSE(row.analytic_lt.has_value());
    CHECK(row.mc_mean.has_value());
    CHECK(row.mc_stderr.has_value());
    CHECK(row.outage_rate.has_value());
  }
}

TEST_CASE("sweep iterates points outermost, then arrays, schemes, thresholds") {
  const std::string text =
      "model = exponential\n"
      "rho = 0.2, 0.6\n"
      "M = 2, 4\n"
      "scheme = basic-antenna\n"
      "alpha = 1\n"
      "mode = analytic\n";
  const std::vector<SweepRow> rows = run_sweep(parse_sweep_config(text));
  REQUIRE_EQ(rows.size(), 4);
  CHECK_EQ(rows[0].rho_or_spread, 0.2);
  CHECK_EQ(rows[0].antennas, 2);
  CHECK_EQ(rows[1].rho_or_spread, 0.2);
  CHECK_EQ(rows[1].antennas, 4);
  CHECK_EQ(rows[2].rho_or_spread, 0.6);
  CHECK_EQ(rows[2].antennas, 2);
  CHECK_EQ(rows[3].rho_or_spread, 0.6);
  CHECK_EQ(rows[3].antennas, 4);
}

TEST_CASE("one-ring sweep rows match direct model construction") {
  const std::string text =
      "model = one-ring\n"
      "as_deg = 10\n"
      "theta_deg = 30\n"
      "nodes = 128\n"
      "M = 8\n"
      "scheme = basic-beam\n"
      "alpha = 2\n"
      "mode = analytic\n";
  const std::vector<SweepRow> rows = run_sweep(parse_sweep_config(text));
  REQUIRE_EQ(rows.size(), 1);
  CHECK_EQ(rows[0].model, "one-ring");
  CHECK_EQ(rows[0].rho_or_spread, 10.0);

  const double deg = 3.14159265358979323846 / 180.0;
  const CovarianceMatrix R = build_one_ring_covariance(
      ArrayGeometry{8, 0.5}, OneRingModel::from_angular_spread(30.0 * deg, 10.0 * deg), 128);
  REQUIRE(rows[0].analytic_lt.has_value());
  CHECK_EQ(*rows[0].analytic_lt, lt_beam_general(R, dft_codebook(8), 2.0).value);
}

TEST_CASE("csv output has the fixed header and blanks for missing values") {
  CHECK_EQ(sweep_csv_header(),
           "model,rho_or_AS,M,scheme,alpha_th,analytic_Lt,mc_mean,mc_stderr,outage_rate,"
           "trials,seed");

  SweepRow row;
  row.model = "exponential";
  row.rho_or_spread = 0.25;
  row.antennas = 4;
  row.scheme = "basic-antenna";
  row.alpha = 2.5;
  row.analytic_lt = 3.25;
  row.trials = 10;
  row.seed = 3;
  CHECK_EQ(to_csv({row}),
           sweep_csv_header() + "\nexponential,0.25,4,basic-antenna,2.5,3.25,,,,10,3\n");

  // Values print with 10 significant digits.
  row.analytic_lt = 1.2345678912345;
  CHECK_EQ(to_csv({row}),
           sweep_csv_header() + "\nexponential,0.25,4,basic-antenna,2.5,1.234567891,,,,10,3\n");
}

TEST_CASE("repeating a sweep reproduces the csv byte for byte") {
  const SweepConfig cfg = parse_sweep_config(
      "model = exponential\n"
      "rho = 0.3, 0.7\n"
      "M = 3\n"
      "scheme = basic-antenna, modified-antenna\n"
      "alpha = 2\n"
      "trials = 500\n"
      "seed = 11\n");
  const std::string first = to_csv(run_sweep(cfg));
  const std::string second = to_csv(run_sweep(cfg));
  CHECK_EQ(first, second);
  CHECK_EQ(std::count(first.begin(), first.end(), '\n'), 5);
}

TEST_CASE("configs load from disk and missing files are reported") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "itrain_sweep_config_test.cfg";
  {
    std::ofstream out(path);
    out << kMinimalSweep << "seed = 9\n";
  }
  const SweepConfig cfg = load_sweep_config(path.string());
  CHECK_EQ(cfg.seed, 9);
  CHECK_EQ(cfg.rho.size(), 1);
  fs::remove(path);

  CHECK_THROWS_WITH_AS(load_sweep_config(path.string()),
                       ("cannot open config file: " + path.string()).c_str(), ConfigError);
}

TEST_CASE("surrogate config parses grids and applies defaults") {
  const SurrogateConfig full = parse_surrogate_config(
      "M = 16\n"
      "rho = 0:0.45:0.9\n"
      "alpha = 1, 2\n"
      "trials = 500\n"
      "epochs = 100\n"
      "learning_rate = 0.005\n"
      "seed = 9\n"
      "model_out = fit.model\n");
  CHECK_EQ(full.antennas, 16);
  REQUIRE_EQ(full.rho_grid.size(), 3);
  CHECK_EQ(full.rho_grid[1], doctest::Approx(0.45));
  CHECK_EQ(full.alpha_grid.size(), 2);
  CHECK_EQ(full.trials, 500);
  CHECK_EQ(full.epochs, 100);
  CHECK_EQ(full.learning_rate, 0.005);
  CHECK_EQ(full.seed, 9);
  CHECK_EQ(full.model_out, "fit.model");

  const SurrogateConfig minimal = parse_surrogate_config("rho = 0.1\nalpha = 1\n");
  CHECK_EQ(minimal.antennas, 32);
  CHECK_EQ(minimal.trials, 10000);
  CHECK_EQ(minimal.epochs, 8000);
  CHECK_EQ(minimal.learning_rate, 0.01);
  CHECK_EQ(minimal.seed, 42);
  CHECK_EQ(minimal.model_out, "surrogate.model");
}

TEST_CASE("surrogate config validation") {
  CHECK_THROWS_WITH_AS(parse_surrogate_config("alpha = 1\n"), "missing required key 'rho'",
                       ConfigError);
  CHECK_EQ(surrogate_error_line("alpha = 1\n"), 0);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 0.1\n"), "missing required key 'alpha'",
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 1\nalpha = 1\n"),
                       "line 1: rho values must be in [0, 1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 0.1\nalpha = -2\n"),
                       "line 2: alpha values must be nonnegative", ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("M = 0\nrho = 0.1\nalpha = 1\n"),
                       "line 1: M must be >= 1", ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 0.1\nalpha = 1\ntrials = 0\n"),
                       "line 3: trials must be >= 1", ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 0.1\nalpha = 1\nepochs = -1\n"),
                       "line 3: epochs must be >= 0", ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 0.1\nalpha = 1\nlearning_rate = 0\n"),
                       "line 3: learning_rate must be positive", ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 0.1\nalpha = 1\nseed = -4\n"),
                       "line 3: seed must be nonnegative", ConfigError);
  CHECK_THROWS_WITH_AS(parse_surrogate_config("rho = 0.1\nalpha = 1\nwat = 2\n"),
                       "line 3: unknown key 'wat'", ConfigError);
  CHECK_EQ(surrogate_error_line("rho = 0.1\nalpha = 1\nwat = 2\n"), 3);
}
