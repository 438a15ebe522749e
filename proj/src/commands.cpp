#include "robsvm/commands.hpp"

#include "robsvm/consistency.hpp"
#include "robsvm/data.hpp"
#include "robsvm/probabilistic.hpp"
#include "robsvm/solver.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace robsvm {

using Json = nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"train",    "robust-eval",     "equivalence-check", "calibrate",
                                                 "kernel-train", "consistency-exp", "pathological-demo"};
  return names;
}

NormSpec parse_norm(const std::string& name) {
  if (name == "l1") return NormSpec::l1();
  if (name == "l2") return NormSpec::l2();
  if (name == "linf") return NormSpec::linf();
  throw std::invalid_argument("unknown norm '" + name + "' (expected l1, l2 or linf)");
}

KernelSpec parse_kernel(const std::string& name, int degree, double gamma) {
  if (name == "linear") return KernelSpec::linear();
  if (name == "poly") return KernelSpec::polynomial(degree);
  if (name == "rbf") return KernelSpec::rbf(gamma);
  if (name == "indicator") return KernelSpec::indicator();
  throw std::invalid_argument("unknown kernel '" + name + "' (expected linear, poly, rbf or indicator)");
}

namespace {

std::vector<double> split_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, sep)) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("malformed number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

BudgetPrior parse_prior(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("prior must look like kind:params, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string params = text.substr(colon + 1);
  try {
    if (kind == "point_mass") {
      const auto v = split_numbers(params, ',');
      if (v.size() != 1) throw std::invalid_argument("point_mass takes one value");
      return BudgetPrior::point_mass(v[0]);
    }
    if (kind == "uniform") {
      const auto v = split_numbers(params, ',');
      if (v.size() != 2) throw std::invalid_argument("uniform takes lo,hi");
      return BudgetPrior::uniform(v[0], v[1]);
    }
    if (kind == "discrete") {
      std::vector<std::pair<double, double>> atoms;
      std::istringstream in(params);
      std::string atom;
      while (std::getline(in, atom, ',')) {
        const auto v = split_numbers(atom, '@');
        if (v.size() != 2) throw std::invalid_argument("discrete atoms look like value@probability");
        atoms.emplace_back(v[0], v[1]);
      }
      return BudgetPrior::discrete(std::move(atoms));
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("bad prior '" + text + "': " + e.what());
  }
  throw std::invalid_argument("unknown prior kind '" + kind + "'");
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}

  void emit(const std::string& kind, Json body) {
    Json rec;
    rec["record"] = kind;
    for (auto& [k, v] : body.items()) rec[k] = v;
    out_ << rec.dump() << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
};

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.max_iters = static_cast<int>(cfg.get_int("solver.max_iters"));
  s.eta0 = cfg.get_double("solver.eta0");
  s.tolerance = cfg.get_double("solver.tolerance");
  s.restart_period = static_cast<int>(cfg.get_int("solver.restart_period"));
  s.stall_epochs = static_cast<int>(cfg.get_int("solver.stall_epochs"));
  s.averaging = cfg.get_bool("solver.averaging");
  s.seed = cfg.get_u64("seed");
  s.validate();
  return s;
}

std::size_t positive_size(const RunConfig& cfg, const std::string& key) {
  const auto v = cfg.get_int(key);
  if (v < 1) throw std::invalid_argument("config key '" + key + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

/// The training set: loaded from `data`, or generated from gen.* and the seed.
Dataset training_data(const RunConfig& cfg, Report& report) {
  const auto& path = cfg.get("data");
  if (!path.empty()) {
    auto loaded = load_dataset(path);
    Json note;
    note["path"] = path;
    note["samples"] = loaded.dataset.size();
    note["dim"] = loaded.dataset.dim();
    note["labels_remapped"] = loaded.remapped_labels;
    report.emit("data", std::move(note));
    return std::move(loaded.dataset);
  }
  const auto m = positive_size(cfg, "gen.m");
  const auto seed = cfg.get_u64("seed");
  const std::string kind = cfg.get("gen.kind");
  if (kind == "blobs") {
    const auto n = static_cast<Index>(positive_size(cfg, "gen.n"));
    return gaussian_blobs(m, n, cfg.get_double("gen.separation"), cfg.get_double("gen.sigma"), seed);
  }
  if (kind == "mixture") {
    Rng rng = make_rng(seed, {0x6d6978});
    return gaussian_mixture_2d(m, cfg.get_double("gen.separation"), cfg.get_double("gen.sigma"), false, rng);
  }
  throw std::invalid_argument("unknown gen.kind '" + kind + "'");
}

std::optional<Dataset> test_data(const RunConfig& cfg) {
  const auto& path = cfg.get("test_data");
  if (path.empty()) return std::nullopt;
  return load_dataset(path).dataset;
}

double nonnegative(const RunConfig& cfg, const std::string& key) {
  const double v = cfg.get_double(key);
  if (v < 0.0) throw std::invalid_argument("config key '" + key + "' must be >= 0");
  return v;
}

Json train_json(const TrainResult& r, const Dataset& ds) {
  Json j;
  j["w"] = to_json(r.classifier.w);
  j["b"] = r.classifier.b;
  j["objective"] = r.objective;
  j["iterations"] = r.iterations_used;
  j["converged"] = r.converged;
  j["separable"] = r.separable;
  j["train_error"] = classification_error(r.classifier, ds);
  j["train_hinge"] = empirical_hinge(r.classifier, ds);
  return j;
}

void dump_linear_model(const RunConfig& cfg, const LinearClassifier& clf) {
  const auto& path = cfg.get("model_out");
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model '" + path + "'");
  out.precision(17);
  out << "linear\nw";
  for (Index i = 0; i < clf.w.size(); ++i) out << ' ' << clf.w[i];
  out << "\nb " << clf.b << '\n';
}

void cmd_train(const RunConfig& cfg, Report& report) {
  const Dataset ds = training_data(cfg, report);
  const NormSpec norm = parse_norm(cfg.get("norm"));
  const double c = nonnegative(cfg, "c");
  const auto r = train_regularized(ds, norm, c, solver_config(cfg));
  Json j = train_json(r, ds);
  if (auto test = test_data(cfg)) j["test_error"] = classification_error(r.classifier, *test);
  dump_linear_model(cfg, r.classifier);
  report.emit("result", std::move(j));
}

LinearClassifier classifier_from_config(const RunConfig& cfg, const Dataset& ds, const NormSpec& norm, double c) {
  if (cfg.get("w").empty()) return train_regularized(ds, norm, c, solver_config(cfg)).classifier;
  const auto w = cfg.get_list("w");
  if (static_cast<Index>(w.size()) != ds.dim()) throw DimensionError("config key 'w' does not match the data dimension");
  return LinearClassifier{Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size())), cfg.get_double("b")};
}

void cmd_robust_eval(const RunConfig& cfg, Report& report) {
  const Dataset ds = training_data(cfg, report);
  const NormSpec norm = parse_norm(cfg.get("norm"));
  const double c = nonnegative(cfg, "c");
  const SublinearSet set{AtomicSet::norm_ball(norm.dual_spec(), c), aggregation_from_string(cfg.get("aggregation"))};
  const LinearClassifier clf = classifier_from_config(cfg, ds, norm, c);
  const auto problem = robustify(ds, set);
  const auto box = BoxSet::replicate(set.atomic, ds.size());
  const auto upper = worst_case_loss_upper(clf, ds, set);

  Json j;
  j["w"] = to_json(clf.w);
  j["b"] = clf.b;
  j["atomic"] = set.atomic.describe();
  j["aggregation"] = to_string(set.aggregation);
  j["empirical_hinge"] = empirical_hinge(clf, ds);
  j["support"] = support_function(set.atomic, clf.w);
  j["robust_objective"] = robust_objective(clf, problem);
  j["worst_case_lower"] = worst_case_loss_lower(clf, ds, set);
  j["worst_case_upper"] = upper.value;
  j["upper_is_exact"] = upper.is_exact;
  j["box_objective"] = box_robust_objective(clf, ds, box);
  j["conservatism_gap"] = conservatism_gap(clf, ds, set, box);
  const auto resolution = cfg.get_int("resolution");
  if (resolution > 0) {
    try {
      j["brute_force"] = brute_force_worst_case(clf, ds, set, static_cast<int>(resolution));
    } catch (const std::exception& e) {
      j["brute_force"] = nullptr;
      j["brute_force_skipped"] = e.what();
    }
  }
  report.emit("result", std::move(j));
}

void cmd_equivalence_check(const RunConfig& cfg, Report& report) {
  const auto instances = positive_size(cfg, "instances");
  const auto max_m = positive_size(cfg, "max_m");
  const auto max_n = positive_size(cfg, "max_n");
  const auto resolution = static_cast<int>(positive_size(cfg, "resolution"));
  const NormSpec norm = parse_norm(cfg.get("norm"));
  const double c = nonnegative(cfg, "c");
  const auto seed = cfg.get_u64("seed");
  const SublinearSet set{AtomicSet::norm_ball(norm.dual_spec(), c), Aggregation::SumBudget};

  double max_abs_gap = 0.0, max_sandwich_gap = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = make_rng(seed, {0x6571, i});
    std::uniform_int_distribution<std::size_t> pick_m(std::min<std::size_t>(2, max_m), max_m);
    std::uniform_int_distribution<std::size_t> pick_n(1, max_n);
    const std::size_t m = pick_m(rng);
    const auto n = static_cast<Index>(pick_n(rng));
    const Dataset ds = gaussian_blobs(m, n, 1.0, 1.0, rng);
    std::normal_distribution<double> normal;
    LinearClassifier clf{Vector(n), normal(rng)};
    for (Index k = 0; k < n; ++k) clf.w[k] = normal(rng);
    // Probe at a point with a strictly misclassified sample; negating (w, b) flips every margin.
    if (!has_strict_violation(clf, ds)) clf = LinearClassifier{-clf.w, -clf.b};

    const double brute = brute_force_worst_case(clf, ds, set, resolution);
    const auto upper = worst_case_loss_upper(clf, ds, set);
    const double lower = worst_case_loss_lower(clf, ds, set);
    const double abs_gap = std::abs(brute - upper.value);
    const double sandwich_gap = std::abs(upper.value - lower);
    max_abs_gap = std::max(max_abs_gap, abs_gap);
    max_sandwich_gap = std::max(max_sandwich_gap, sandwich_gap);

    Json j;
    j["instance"] = i;
    j["m"] = m;
    j["n"] = n;
    j["brute_force"] = brute;
    j["hinge_plus_support"] = upper.value;
    j["worst_case_lower"] = lower;
    j["upper_is_exact"] = upper.is_exact;
    j["abs_gap"] = abs_gap;
    j["sandwich_gap"] = sandwich_gap;
    report.emit("result", std::move(j));
  }
  Json s;
  s["instances"] = instances;
  s["resolution"] = resolution;
  s["max_abs_gap"] = max_abs_gap;
  s["max_sandwich_gap"] = max_sandwich_gap;
  report.emit("aggregate", std::move(s));
}

DisturbanceModel model_from_config(const RunConfig& cfg, const Dataset& ds, const NormSpec& budget_norm) {
  const std::string kind = cfg.get("model");
  const double scale = nonnegative(cfg, "model.scale");
  const std::size_t m = ds.size();
  const Index n = ds.dim();
  if (kind == "zero") return DisturbanceModel::zero(m, n, budget_norm);
  if (kind == "gaussian") return DisturbanceModel::gaussian(m, n, scale, budget_norm);
  if (kind == "uniform_ball") return DisturbanceModel::uniform_ball(m, n, scale, budget_norm);
  if (kind == "point_mass") return DisturbanceModel::point_mass(m, n, scale, budget_norm);
  if (kind == "uniform_budget") return DisturbanceModel::uniform_budget(m, n, scale, budget_norm);
  throw std::invalid_argument("unknown disturbance model '" + kind + "'");
}

void cmd_calibrate(const RunConfig& cfg, Report& report) {
  const Dataset ds = training_data(cfg, report);
  const NormSpec norm = parse_norm(cfg.get("norm"));
  const std::string source = cfg.get("source");
  const auto seed = cfg.get_u64("seed");
  const auto n_draws = positive_size(cfg, "n_draws");

  Json j;
  j["source"] = source;
  double c = 0.0;
  std::optional<DisturbanceModel> model;
  if (source == "chance") {
    // Disturbances are measured in the dual of the regularizing norm, so c ||w|| bounds their effect.
    model.emplace(model_from_config(cfg, ds, norm.dual_spec()));
    const double eta = cfg.get_double("eta");
    c = calibrate_chance(*model, eta, n_draws, derive_seed(seed, {0x63616c}));
    j["model"] = model->name();
    j["eta"] = eta;
    j["n_draws"] = n_draws;
  } else if (source == "bayes") {
    const BudgetPrior prior = parse_prior(cfg.get("prior"));
    c = bayes_regularizer(prior);
    j["prior"] = prior.describe();
  } else {
    throw std::invalid_argument("unknown calibration source '" + source + "' (expected chance or bayes)");
  }
  j["c"] = c;
  if (cfg.get_bool("train")) {
    const auto r = train_regularized(ds, norm, c, solver_config(cfg));
    j["train"] = train_json(r, ds);
    if (model) {
      j["coverage"] = chance_bound_check(r.classifier, ds, *model, c, n_draws, derive_seed(seed, {0x636f76}));
    }
    dump_linear_model(cfg, r.classifier);
  }
  report.emit("result", std::move(j));
}

void cmd_kernel_train(const RunConfig& cfg, Report& report) {
  const Dataset ds = training_data(cfg, report);
  const KernelSpec spec = parse_kernel(cfg.get("kernel"), static_cast<int>(cfg.get_int("kernel.degree")),
                                       cfg.get_double("kernel.gamma"));
  const double c = nonnegative(cfg, "c");
  const auto r = train_kernel_regularized(ds, spec, c, solver_config(cfg));
  Json j;
  j["kernel"] = spec.name();
  j["alphas"] = to_json(r.classifier.alphas());
  j["b"] = r.classifier.offset();
  j["objective"] = r.objective;
  j["rkhs_norm"] = r.classifier.rkhs_norm();
  j["iterations"] = r.iterations_used;
  j["converged"] = r.converged;
  j["train_error"] = kernel_error(r.classifier, ds);
  j["train_hinge"] = kernel_hinge(r.classifier, ds);
  if (auto test = test_data(cfg)) j["test_error"] = kernel_error(r.classifier, *test);
  if (const auto& path = cfg.get("model_out"); !path.empty()) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model '" + path + "'");
    out.precision(17);
    out << "kernel " << spec.name() << "\nalpha";
    for (Index i = 0; i < r.classifier.alphas().size(); ++i) out << ' ' << r.classifier.alphas()[i];
    out << "\nb " << r.classifier.offset() << '\n';
  }
  report.emit("result", std::move(j));
}

DataGenerator mixture_generator(const RunConfig& cfg, bool balanced) {
  const double sep = cfg.get_double("gen.separation");
  const double sigma = cfg.get_double("gen.sigma");
  return [sep, sigma, balanced](std::size_t m, Rng& rng) { return gaussian_mixture_2d(m, sep, sigma, balanced, rng); };
}

void cmd_consistency_exp(const RunConfig& cfg, Report& report) {
  ExperimentConfig ec;
  for (double s : cfg.get_list("sizes")) {
    if (s < 1 || s != std::floor(s)) throw std::invalid_argument("config key 'sizes' must list positive integers");
    ec.sizes.push_back(static_cast<std::size_t>(s));
  }
  const double exponent = cfg.get_double("c_exponent");
  const double floor = nonnegative(cfg, "c_floor");
  ec.c_schedule = [exponent, floor](std::size_t m) {
    return std::max(std::pow(static_cast<double>(m), -exponent), floor);
  };
  ec.trials = static_cast<int>(positive_size(cfg, "trials"));
  ec.solver = solver_config(cfg);
  ec.seed = cfg.get_u64("seed");
  const auto trend = run_consistency_experiment(mixture_generator(cfg, false), ec);
  for (const auto& r : trend.records) {
    Json j;
    j["m"] = r.m;
    j["trial"] = r.trial;
    j["c"] = r.c;
    j["pairs"] = r.pairs;
    j["gamma"] = r.bound.gamma;
    j["test_error"] = r.bound.test_error;
    j["error_bound"] = r.bound.error_bound;
    j["test_avg_hinge"] = r.bound.test_avg_hinge;
    j["hinge_bound"] = r.bound.hinge_bound;
    j["train_avg_hinge"] = r.bound.train_avg_hinge;
    j["regularization"] = r.bound.regularization;
    j["K"] = r.bound.K;
    report.emit("trial", std::move(j));
  }
  for (const auto& s : trend.summaries) {
    Json j;
    j["m"] = s.m;
    j["c"] = s.c;
    j["median_gamma"] = s.median_gamma;
    j["median_error_bound"] = s.median_error_bound;
    j["median_test_error"] = s.median_test_error;
    j["bound_violations"] = s.bound_violations;
    report.emit("size", std::move(j));
  }
  Json j;
  j["gamma_nonincreasing"] = trend.gamma_nonincreasing;
  j["gamma_strictly_decreasing"] = trend.gamma_strictly_decreasing;
  j["test_error_nonincreasing"] = trend.test_error_nonincreasing;
  j["bound_violations"] = trend.bound_violations;
  report.emit("aggregate", std::move(j));
}

void cmd_pathological_demo(const RunConfig& cfg, Report& report) {
  const auto m = positive_size(cfg, "m");
  const auto trials = static_cast<int>(positive_size(cfg, "trials"));
  const double c = nonnegative(cfg, "c");
  const auto demo = run_pathological_demo(mixture_generator(cfg, true), m, trials, c, solver_config(cfg),
                                          cfg.get_u64("seed"));
  for (const auto& t : demo.trials) {
    Json j;
    j["trial"] = t.trial;
    j["train_avg_hinge"] = t.train_avg_hinge;
    j["train_error"] = t.train_error;
    j["test_error"] = t.test_error;
    j["b"] = t.offset;
    report.emit("trial", std::move(j));
  }
  Json j;
  j["m"] = m;
  j["max_train_avg_hinge"] = demo.max_train_avg_hinge;
  j["min_test_error"] = demo.min_test_error;
  j["max_test_error"] = demo.max_test_error;
  report.emit("aggregate", std::move(j));
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out) {
  static const std::map<std::string, std::function<void(const RunConfig&, Report&)>> table = {
      {"train", cmd_train},
      {"robust-eval", cmd_robust_eval},
      {"equivalence-check", cmd_equivalence_check},
      {"calibrate", cmd_calibrate},
      {"kernel-train", cmd_kernel_train},
      {"consistency-exp", cmd_consistency_exp},
      {"pathological-demo", cmd_pathological_demo},
  };
  Report report(out);
  Json header;
  header["command"] = command;
  header["version"] = ROBSVM_VERSION;
  header["seed"] = cfg.get("seed");
  header["timestamp"] = utc_timestamp();
  Json echo;
  for (const auto& k : config_schema()) echo[k.name] = cfg.get(k.name);
  header["config"] = std::move(echo);
  report.emit("header", std::move(header));

  try {
    const auto it = table.find(command);
    if (it == table.end()) throw std::invalid_argument("unknown command '" + command + "'");
    it->second(cfg, report);
  } catch (const std::exception& e) {
    Json err;
    err["complete"] = false;
    err["error"] = e.what();
    report.emit("end", std::move(err));
    return 1;
  }
  Json done;
  done["complete"] = true;
  report.emit("end", std::move(done));
  return 0;
}

}  // namespace robsvm
