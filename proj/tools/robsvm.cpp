// robsvm command-line tool: one subcommand per experiment, JSON-lines reports.
//
//   robsvm train --config run.cfg --c 0.5
//   robsvm equivalence-check --instances 100 --resolution 200

#include "robsvm/commands.hpp"
#include "robsvm/config.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace {

const std::map<std::string, std::string> kDescriptions = {
    {"train", "train a regularized linear SVM on a file or generated data"},
    {"robust-eval", "worst-case loss of a fixed classifier: closed form, bounds, brute force"},
    {"equivalence-check", "compare brute-force worst case with hinge plus support on random instances"},
    {"calibrate", "choose c from a disturbance model (chance) or a budget prior (bayes), then train"},
    {"kernel-train", "train a kernel SVM"},
    {"consistency-exp", "pairing distance and test error across sample sizes"},
    {"pathological-demo", "indicator-kernel classifier that fits training data and generalizes at chance"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust and regularized SVM experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ROBSVM_VERSION));

  std::string config_path;
  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto& name : robsvm::command_names()) {
    auto* sub = app.add_subcommand(name, kDescriptions.at(name));
    sub->add_option("--config", config_path, "flat key=value config file");
    for (const auto& key : robsvm::config_schema()) {
      sub->add_option("--" + key.name, overrides[key.name], key.help + " [" + key.default_value + "]");
    }
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  robsvm::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = robsvm::RunConfig::from_file(config_path);
    for (const auto& [key, value] : overrides) {
      if (value) cfg.set(key, *value);
    }
  } catch (const std::exception& e) {
    std::cerr << "robsvm: " << e.what() << '\n';
    return 2;
  }

  const std::string& output = cfg.get("output");
  if (output == "-") return robsvm::run_command(command, cfg, std::cout);
  std::ofstream out(output);
  if (!out) {
    std::cerr << "robsvm: cannot open output '" << output << "'\n";
    return 2;
  }
  const int rc = robsvm::run_command(command, cfg, out);
  if (rc != 0) std::cerr << "robsvm: " << command << " failed; see the report's end record\n";
  return rc;
}
