#include "itrain/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "itrain/analytic.hpp"
#include "itrain/errors.hpp"
#include "itrain/rng.hpp"

namespace itrain {

namespace {

struct KeyValue {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment; keys are unique.
std::map<std::string, KeyValue> parse_kv(const std::string& text) {
  std::map<std::string, KeyValue> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "empty key");
    if (value.empty()) throw ConfigError(line, "empty value for key '" + key + "'");
    if (out.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
    out[key] = {value, line};
  }
  return out;
}

double parse_double(const std::string& token, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ConfigError(line, "not a number: '" + token + "'");
  }
  if (used != token.size()) throw ConfigError(line, "not a number: '" + token + "'");
  return v;
}

// Comma-separated scalars; a token may be an inclusive range start:step:stop.
std::vector<double> parse_number_list(const std::string& value, int line) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) throw ConfigError(line, "empty list entry");
    const std::size_t c1 = token.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_double(token, line));
      continue;
    }
    const std::size_t c2 = token.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError(line, "range needs start:step:stop");
    const double start = parse_double(trim(token.substr(0, c1)), line);
    const double step = parse_double(trim(token.substr(c1 + 1, c2 - c1 - 1)), line);
    const double stop = parse_double(trim(token.substr(c2 + 1)), line);
    if (!(step > 0.0)) throw ConfigError(line, "range step must be positive");
    if (stop < start) throw ConfigError(line, "range stop must be >= start");
    for (double v = start; v <= stop + 1e-12 * step; v += step) out.push_back(v);
  }
  if (out.empty()) throw ConfigError(line, "empty list");
  return out;
}

long parse_long(const std::string& value, int line) {
  const double v = parse_double(value, line);
  if (v != std::floor(v)) throw ConfigError(line, "expected an integer");
  return static_cast<long>(v);
}

class KvReader {
 public:
  explicit KvReader(const std::string& text) : kv_(parse_kv(text)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  const KeyValue& get(const std::string& key) {
    used_.insert(key);
    return kv_.at(key);
  }
  // Every key must have been consumed by the schema.
  void check_consumed() const {
    for (const auto& [key, entry] : kv_)
      if (!used_.count(key)) throw ConfigError(entry.line, "unknown key '" + key + "'");
  }

 private:
  std::map<std::string, KeyValue> kv_;
  std::set<std::string> used_;
};

}  // namespace

SweepConfig parse_sweep_config(const std::string& text) {
  KvReader kv(text);
  SweepConfig cfg;

  if (!kv.has("model")) throw ConfigError("missing required key 'model'");
  {
    const KeyValue& m = kv.get("model");
    if (m.value == "exponential") cfg.model = ModelKind::exponential;
    else if (m.value == "one-ring") cfg.model = ModelKind::one_ring;
    else throw ConfigError(m.line, "model must be 'exponential' or 'one-ring'");
  }

  if (cfg.model == ModelKind::exponential) {
    if (!kv.has("rho")) throw ConfigError("exponential model needs key 'rho'");
    const KeyValue& e = kv.get("rho");
    cfg.rho = parse_number_list(e.value, e.line);
    for (double r : cfg.rho)
      if (!(r >= 0.0 && r < 1.0)) throw ConfigError(e.line, "rho values must be in [0, 1)");
  } else {
    if (!kv.has("as_deg")) throw ConfigError("one-ring model needs key 'as_deg'");
    const KeyValue& e = kv.get("as_deg");
    cfg.spread_deg = parse_number_list(e.value, e.line);
    for (double s : cfg.spread_deg)
      if (!(s > 0.0)) throw ConfigError(e.line, "angular spreads must be positive");
    if (kv.has("theta_deg")) {
      const KeyValue& t = kv.get("theta_deg");
      cfg.mean_aod_deg = parse_double(t.value, t.line);
    }
    if (kv.has("spacing")) {
      const KeyValue& s = kv.get("spacing");
      cfg.spacing = parse_double(s.value, s.line);
      if (!(cfg.spacing > 0.0)) throw ConfigError(s.line, "spacing must be positive");
    }
    if (kv.has("nodes")) {
      const KeyValue& n = kv.get("nodes");
      cfg.nodes = static_cast<int>(parse_long(n.value, n.line));
      if (cfg.nodes < 64) throw ConfigError(n.line, "nodes must be >= 64");
    }
  }

  if (!kv.has("M")) throw ConfigError("missing required key 'M'");
  {
    const KeyValue& m = kv.get("M");
    for (double v : parse_number_list(m.value, m.line)) {
      if (v != std::floor(v) || v < 1) throw ConfigError(m.line, "M values must be integers >= 1");
      cfg.antennas.push_back(static_cast<int>(v));
    }
  }

  if (!kv.has("scheme")) throw ConfigError("missing required key 'scheme'");
  {
    const KeyValue& s = kv.get("scheme");
    std::istringstream in(s.value);
    std::string token;
    while (std::getline(in, token, ',')) {
      token = trim(token);
      try {
        cfg.schemes.push_back(scheme_from_name(token));
      } catch (const InvalidParameter&) {
        throw ConfigError(s.line, "unknown scheme '" + token + "'");
      }
    }
    if (cfg.schemes.empty()) throw ConfigError(s.line, "empty scheme list");
  }

  const bool has_alpha = kv.has("alpha");
  const bool has_rate = kv.has("R_th");
  const bool has_power = kv.has("P_dB");
  if (has_alpha && (has_rate || has_power))
    throw ConfigError(kv.get("alpha").line, "give either alpha or R_th with P_dB, not both");
  if (has_alpha) {
    const KeyValue& a = kv.get("alpha");
    cfg.alpha = parse_number_list(a.value, a.line);
    for (double v : cfg.alpha)
      if (!(v >= 0.0)) throw ConfigError(a.line, "alpha values must be nonnegative");
  } else {
    if (!has_rate || !has_power)
      throw ConfigError("need either 'alpha' or both 'R_th' and 'P_dB'");
    const KeyValue& r = kv.get("R_th");
    const KeyValue& p = kv.get("P_dB");
    const double rate = parse_double(r.value, r.line);
    if (!(rate >= 0.0)) throw ConfigError(r.line, "R_th must be nonnegative");
    for (double p_db : parse_number_list(p.value, p.line))
      cfg.alpha.push_back(snr_threshold(rate, std::pow(10.0, p_db / 10.0)));
  }

  if (kv.has("trials")) {
    const KeyValue& t = kv.get("trials");
    cfg.trials = parse_long(t.value, t.line);
    if (cfg.trials < 1) throw ConfigError(t.line, "trials must be >= 1");
  }
  if (kv.has("seed")) {
    const KeyValue& s = kv.get("seed");
    const long v = parse_long(s.value, s.line);
    if (v < 0) throw ConfigError(s.line, "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  if (kv.has("mode")) {
    const KeyValue& m = kv.get("mode");
    if (m.value == "analytic") cfg.mode = SweepMode::analytic;
    else if (m.value == "simulate") cfg.mode = SweepMode::simulate;
    else if (m.value == "both") cfg.mode = SweepMode::both;
    else throw ConfigError(m.line, "mode must be analytic, simulate, or both");
  }
  if (kv.has("output")) cfg.output = kv.get("output").value;

  kv.check_consumed();
  return cfg;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

SweepConfig load_sweep_config(const std::string& path) {
  return parse_sweep_config(read_file(path));
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  std::vector<SweepRow> rows;
  const std::vector<double>& points =
      config.model == ModelKind::exponential ? config.rho : config.spread_deg;
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

  long cell = 0;
  for (double point : points) {
    for (int M : config.antennas) {
      CovarianceMatrix R;
      if (config.model == ModelKind::exponential) {
        R = build_exponential_covariance(M, Complex(point, 0.0));
      } else {
        const ArrayGeometry array{M, config.spacing};
        const OneRingModel model = OneRingModel::from_angular_spread(
            config.mean_aod_deg * kDegToRad, point * kDegToRad);
        R = build_one_ring_covariance(array, model, config.nodes);
      }
      for (SchemeId scheme : config.schemes) {
        for (double alpha : config.alpha) {
          SweepRow row;
          row.model = config.model == ModelKind::exponential ? "exponential" : "one-ring";
          row.rho_or_spread = point;
          row.antennas = M;
          row.scheme = scheme_name(scheme);
          row.alpha = alpha;
          row.trials = config.trials;
          row.seed = config.seed;
          if (config.mode != SweepMode::simulate) {
            switch (scheme) {
              case SchemeId::basic_antenna:
                row.analytic_lt = lt_antenna_basic(R, alpha).value;
                break;
              case SchemeId::basic_beam:
                row.analytic_lt = lt_beam_general(R, dft_codebook(M), alpha).value;
                break;
              case SchemeId::modified_beam:
                row.analytic_lt = lt_beam_modified(R, alpha).value;
                break;
              case SchemeId::modified_antenna:
                break;  // no closed form; simulation only
            }
          }
          if (config.mode != SweepMode::analytic) {
            const MCEstimate est = monte_carlo(SchemeKind{scheme, {}}, R, alpha, config.trials,
                                               derive_seed(config.seed, cell));
            row.mc_mean = est.mean_length;
            row.mc_stderr = est.std_error;
            row.outage_rate = est.outage_rate;
          }
          rows.push_back(std::move(row));
          ++cell;
        }
      }
    }
  }
  return rows;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string sweep_csv_header() {
  return "model,rho_or_AS,M,scheme,alpha_th,analytic_Lt,mc_mean,mc_stderr,outage_rate,trials,seed";
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << sweep_csv_header() << "\n";
  for (const SweepRow& r : rows) {
    out << r.model << ',' << format_double(r.rho_or_spread) << ',' << r.antennas << ','
        << r.scheme << ',' << format_double(r.alpha) << ',' << format_opt(r.analytic_lt) << ','
        << format_opt(r.mc_mean) << ',' << format_opt(r.mc_stderr) << ','
        << format_opt(r.outage_rate) << ',' << r.trials << ',' << r.seed << "\n";
  }
  return out.str();
}

SurrogateConfig parse_surrogate_config(const std::string& text) {
  KvReader kv(text);
  SurrogateConfig cfg;

  if (kv.has("M")) {
    const KeyValue& m = kv.get("M");
    const long v = parse_long(m.value, m.line);
    if (v < 1) throw ConfigError(m.line, "M must be >= 1");
    cfg.antennas = static_cast<int>(v);
  }
  if (!kv.has("rho")) throw ConfigError("missing required key 'rho'");
  {
    const KeyValue& e = kv.get("rho");
    cfg.rho_grid = parse_number_list(e.value, e.line);
    for (double r : cfg.rho_grid)
      if (!(r >= 0.0 && r < 1.0)) throw ConfigError(e.line, "rho values must be in [0, 1)");
  }
  if (!kv.has("alpha")) throw ConfigError("missing required key 'alpha'");
  {
    const KeyValue& a = kv.get("alpha");
    cfg.alpha_grid = parse_number_list(a.value, a.line);
    for (double v : cfg.alpha_grid)
      if (!(v >= 0.0)) throw ConfigError(a.line, "alpha values must be nonnegative");
  }
  if (kv.has("trials")) {
    const KeyValue& t = kv.get("trials");
    cfg.trials = parse_long(t.value, t.line);
    if (cfg.trials < 1) throw ConfigError(t.line, "trials must be >= 1");
  }
  if (kv.has("epochs")) {
    const KeyValue& e = kv.get("epochs");
    cfg.epochs = static_cast<int>(parse_long(e.value, e.line));
    if (cfg.epochs < 0) throw ConfigError(e.line, "epochs must be >= 0");
  }
  if (kv.has("learning_rate")) {
    const KeyValue& l = kv.get("learning_rate");
    cfg.learning_rate = parse_double(l.value, l.line);
    if (!(cfg.learning_rate > 0.0)) throw ConfigError(l.line, "learning_rate must be positive");
  }
  if (kv.has("seed")) {
    const KeyValue& s = kv.get("seed");
    const long v = parse_long(s.value, s.line);
    if (v < 0) throw ConfigError(s.line, "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  if (kv.has("model_out")) cfg.model_out = kv.get("model_out").value;

  kv.check_consumed();
  return cfg;
}

SurrogateConfig load_surrogate_config(const std::string& path) {
  return parse_surrogate_config(read_file(path));
}

}  // namespace itrain
