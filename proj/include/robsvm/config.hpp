#pragma once

// Flat key=value run configuration with a fixed schema of known keys.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace robsvm {

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every recognized key, in echo order.
const std::vector<ConfigKey>& config_schema();

class RunConfig {
 public:
  /// All keys at their defaults.
  RunConfig();

  /// Reads `key = value` lines; '#' starts a comment. Unknown or repeated keys are errors.
  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text, const std::string& source = "<string>");

  /// Throws for unknown keys.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  /// Resolved values of every key, in schema order.
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace robsvm
