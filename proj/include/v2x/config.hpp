#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "v2x/simulation.hpp"

namespace v2x {

struct Sweep {
  std::string key;  // dotted, e.g. "scenario.num_cues"
  std::vector<std::string> values;
};

/// Everything that determines a set of runs. Output location and worker count
/// live outside: they never change results.
struct RunPlan {
  SimulationConfig sim;
  std::vector<std::uint64_t> seeds{1};
  std::optional<Sweep> sweep;

  void validate() const;
};

/// One registered configuration key, addressable as `section.name`.
struct ConfigKey {
  std::string section;
  std::string name;
  std::string help;
  std::function<void(RunPlan&, const std::string&)> set;
  std::function<std::string(const RunPlan&)> get;

  std::string dotted() const { return section + "." + name; }
  std::string env_name() const;  // V2XSIM_<SECTION>_<NAME>
};

const std::vector<ConfigKey>& config_keys();

/// Throws ConfigError for an unknown key or a malformed value.
void set_config_value(RunPlan& plan, const std::string& dotted_key, const std::string& value);
std::string get_config_value(const RunPlan& plan, const std::string& dotted_key);

/// Every key with its current value, in registry order.
std::vector<std::pair<std::string, std::string>> config_items(const RunPlan& plan);

/// Applies `[section]` / `key = value` text on top of `plan`. `origin` prefixes
/// error messages, which carry the offending line number.
void apply_config_text(RunPlan& plan, const std::string& text, const std::string& origin = "<config>");
void apply_config_file(RunPlan& plan, const std::string& path);

/// Applies V2XSIM_<SECTION>_<KEY> variables found through `lookup`.
void apply_env_overrides(RunPlan& plan,
                         const std::function<std::optional<std::string>(const std::string&)>& lookup);
void apply_env_overrides(RunPlan& plan);

/// `key=a,b,c`
Sweep parse_sweep(const std::string& text);

/// Comma-separated seeds, with `a-b` ranges.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// INI text that reproduces `plan` when applied to a default plan.
std::string to_config_text(const RunPlan& plan);

}  // namespace v2x
