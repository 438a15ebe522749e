#include "robsvm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace robsvm {

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"seed", "0", "master seed; every random stream is derived from it"},
      {"data", "", "training set (libsvm format); empty means generate one"},
      {"test_data", "", "optional test set (libsvm format)"},
      {"output", "-", "report path, '-' for standard output"},
      {"model_out", "", "optional plain-text dump of the trained classifier"},
      {"gen.kind", "blobs", "generator when no data is given: blobs | mixture"},
      {"gen.m", "40", "generated sample count"},
      {"gen.n", "2", "generated dimension (blobs only)"},
      {"gen.separation", "2", "distance between class means"},
      {"gen.sigma", "1", "per-coordinate class standard deviation"},
      {"norm", "l2", "regularizing norm on w: l1 | l2 | linf"},
      {"c", "1", "regularization coefficient / atomic radius"},
      {"aggregation", "sum", "aggregation of per-sample disturbances: sum | single | sqrt"},
      {"w", "", "comma-separated weights to evaluate instead of training"},
      {"b", "0", "offset used together with w"},
      {"resolution", "64", "brute-force discretization resolution (0 disables)"},
      {"instances", "100", "random instances for equivalence-check"},
      {"max_m", "6", "largest instance size for equivalence-check"},
      {"max_n", "3", "largest dimension for equivalence-check"},
      {"solver.max_iters", "20000", "subgradient iteration budget"},
      {"solver.eta0", "1", "initial step length"},
      {"solver.tolerance", "1e-10", "relative improvement below which an epoch stalls"},
      {"solver.restart_period", "400", "iterations per restart epoch"},
      {"solver.stall_epochs", "4", "stalled epochs before stopping"},
      {"solver.averaging", "true", "consider suffix averages as candidates"},
      {"kernel", "rbf", "kernel: linear | poly | rbf | indicator"},
      {"kernel.degree", "2", "polynomial degree"},
      {"kernel.gamma", "1", "rbf width parameter"},
      {"source", "chance", "calibrate source: chance | bayes"},
      {"eta", "0.1", "chance-constraint violation level"},
      {"n_draws", "10000", "Monte-Carlo draws"},
      {"model", "gaussian", "disturbance model: zero | gaussian | uniform_ball | point_mass | uniform_budget"},
      {"model.scale", "0.1", "sigma, radius, total or upper budget of the disturbance model"},
      {"prior", "point_mass:1", "budget prior: point_mass:c | uniform:lo,hi | discrete:c@p,c@p,..."},
      {"train", "true", "calibrate: also train at the calibrated coefficient"},
      {"sizes", "50,200,800", "consistency-exp sample sizes"},
      {"trials", "20", "trials per size"},
      {"c_exponent", "0.125", "consistency-exp schedule c(m) = max(m^-c_exponent, c_floor)"},
      {"c_floor", "0.05", "consistency-exp schedule floor"},
      {"m", "200", "pathological-demo sample count"},
  };
  return schema;
}

RunConfig::RunConfig() {
  for (const auto& k : config_schema()) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  return it->second;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& v, const char* type) {
  throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a valid " + type);
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw std::invalid_argument(where + "repeated key '" + key + "'");
    try {
      cfg.set(key, trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

double RunConfig::get_double(const std::string& key) const {
  const auto& v = get(key);
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "number");
  }
  if (used != v.size() || !std::isfinite(d)) bad_value(key, v, "number");
  return d;
}

long long RunConfig::get_int(const std::string& key) const {
  const auto& v = get(key);
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "integer");
  }
  if (used != v.size()) bad_value(key, v, "integer");
  return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const auto& v = get(key);
  std::size_t used = 0;
  unsigned long long u = 0;
  try {
    if (!v.empty() && v[0] == '-') bad_value(key, v, "unsigned integer");
    u = std::stoull(v, &used, 0);
  } catch (const std::invalid_argument&) {
    bad_value(key, v, "unsigned integer");
  } catch (const std::out_of_range&) {
    bad_value(key, v, "unsigned integer");
  }
  if (used != v.size()) bad_value(key, v, "unsigned integer");
  return u;
}

bool RunConfig::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "boolean");
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(tok, &used);
    } catch (const std::exception&) {
      bad_value(key, tok, "number");
    }
    if (used != tok.size() || !std::isfinite(d)) bad_value(key, tok, "number");
    out.push_back(d);
  }
  return out;
}

}  // namespace robsvm
