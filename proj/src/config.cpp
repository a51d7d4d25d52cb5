#include "v2x/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace v2x {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  T v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  }
  return v;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

ConfigKey real(std::string section, std::string name, std::string help, double SimulationConfig::*field) {
  const std::string key = section + "." + name;
  return {section, name, help,
          [=](RunPlan& p, const std::string& v) { p.sim.*field = parse_number<double>(key, v); },
          [=](const RunPlan& p) { return format_double(p.sim.*field); }};
}

template <class S, class T>
ConfigKey member(std::string section, std::string name, std::string help, S SimulationConfig::*outer,
                 T S::*field) {
  const std::string key = section + "." + name;
  ConfigKey k{section, name, help, nullptr, nullptr};
  if constexpr (std::is_same_v<T, bool>) {
    k.set = [=](RunPlan& p, const std::string& v) { p.sim.*outer.*field = parse_bool(key, v); };
    k.get = [=](const RunPlan& p) { return std::string(p.sim.*outer.*field ? "true" : "false"); };
  } else if constexpr (std::is_same_v<T, std::string>) {
    k.set = [=](RunPlan& p, const std::string& v) { p.sim.*outer.*field = trim(v); };
    k.get = [=](const RunPlan& p) { return p.sim.*outer.*field; };
  } else if constexpr (std::is_integral_v<T>) {
    k.set = [=](RunPlan& p, const std::string& v) { p.sim.*outer.*field = parse_number<T>(key, v); };
    k.get = [=](const RunPlan& p) { return std::to_string(p.sim.*outer.*field); };
  } else {
    k.set = [=](RunPlan& p, const std::string& v) { p.sim.*outer.*field = parse_number<T>(key, v); };
    k.get = [=](const RunPlan& p) { return format_double(p.sim.*outer.*field); };
  }
  return k;
}

std::vector<ConfigKey> build_registry() {
  using SC = SimulationConfig;
  std::vector<ConfigKey> r;
  auto sc = [&](std::string name, std::string help, auto field) {
    r.push_back(member("scenario", std::move(name), std::move(help), &SC::scenario, field));
  };
  sc("num_cues", "cellular users", &ScenarioConfig::num_cues);
  sc("num_vue_pairs", "sidelink pairs", &ScenarioConfig::num_vue_pairs);
  sc("num_bues", "best-effort users on BWP-2", &ScenarioConfig::num_bues);
  sc("area_side_m", "side of the square service area", &ScenarioConfig::area_side_m);
  sc("lane_count", "lanes, half in each direction", &ScenarioConfig::lane_count);
  sc("lane_width_m", "lane width", &ScenarioConfig::lane_width_m);
  sc("lane_offset_south_m", "distance from the gNB to the first lane", &ScenarioConfig::lane_offset_south_m);
  sc("vehicle_speed_mps", "vehicle speed", &ScenarioConfig::vehicle_speed_mps);
  sc("carrier_freq_bwp1_ghz", "BWP-1 carrier", &ScenarioConfig::carrier_freq_bwp1_ghz);
  sc("carrier_freq_bwp2_ghz", "BWP-2 carrier", &ScenarioConfig::carrier_freq_bwp2_ghz);
  sc("gnb_antenna_gain_dbi", "gNB antenna gain", &ScenarioConfig::gnb_antenna_gain_dbi);
  sc("vehicle_antenna_gain_dbi", "vehicle and handset antenna gain", &ScenarioConfig::vehicle_antenna_gain_dbi);
  sc("noise_figure_bs_db", "gNB noise figure", &ScenarioConfig::noise_figure_bs_db);
  sc("noise_figure_vehicle_db", "vehicle noise figure", &ScenarioConfig::noise_figure_vehicle_db);
  sc("noise_power_dbm", "thermal noise per RB", &ScenarioConfig::noise_power_dbm);
  sc("tx_power_dbm", "maximum transmit power", &ScenarioConfig::tx_power_dbm);
  sc("shadowing_v2v_db", "V2V log-normal shadowing deviation", &ScenarioConfig::shadowing_v2v_db);
  sc("shadowing_v2i_db", "V2I log-normal shadowing deviation", &ScenarioConfig::shadowing_v2i_db);
  sc("vue_headway_s", "mean headway to the VUE receiver", &ScenarioConfig::vue_headway_s);
  sc("vue_gap_cap_m", "largest VUE transmitter-receiver gap", &ScenarioConfig::vue_gap_cap_m);
  sc("min_link_distance_m", "path-loss distance floor", &ScenarioConfig::min_link_distance_m);

  r.push_back({"traffic", "cue_arrivals", "poisson or periodic",
               [](RunPlan& p, const std::string& v) {
                 const auto s = trim(v);
                 if (s == "poisson") {
                   p.sim.traffic.cue_mode = CueArrivalMode::kPoisson;
                 } else if (s == "periodic") {
                   p.sim.traffic.cue_mode = CueArrivalMode::kPeriodic;
                 } else {
                   throw ConfigError("traffic.cue_arrivals: expected poisson or periodic, got '" + v + "'");
                 }
               },
               [](const RunPlan& p) {
                 return std::string(p.sim.traffic.cue_mode == CueArrivalMode::kPoisson ? "poisson" : "periodic");
               }});
  auto tr = [&](std::string name, std::string help, auto field) {
    r.push_back(member("traffic", std::move(name), std::move(help), &SC::traffic, field));
  };
  tr("cue_period_ms", "mean CUE inter-arrival per user", &TrafficConfig::cue_period_ms);
  tr("vue_period_ms", "VUE packet period", &TrafficConfig::vue_period_ms);
  tr("cue_ttl_ms", "CUE delay budget", &TrafficConfig::cue_ttl_ms);
  tr("vue_ttl_ms", "VUE delay budget", &TrafficConfig::vue_ttl_ms);
  tr("cue_bits", "CUE packet size", &TrafficConfig::cue_bits);
  tr("vue_bits", "VUE packet size", &TrafficConfig::vue_bits);

  auto ra = [&](std::string name, std::string help, auto field) {
    r.push_back(member("radio", std::move(name), std::move(help), &SC::radio, field));
  };
  ra("bwp1_rbs", "BWP-1 RB count", &RadioConfig::bwp1_rbs);
  ra("bwp2_rbs", "BWP-2 RB count", &RadioConfig::bwp2_rbs);
  ra("mcs_table", "MCS table file, empty for the built-in table", &RadioConfig::mcs_table);

  r.push_back({"scheduler", "kind", "grahs, hrahs or ora",
               [](RunPlan& p, const std::string& v) { p.sim.kind = parse_scheduler(trim(v)); },
               [](const RunPlan& p) { return to_string(p.sim.kind); }});
  auto sch = [&](std::string name, std::string help, auto field) {
    r.push_back(member("scheduler", std::move(name), std::move(help), &SC::scheduler, field));
  };
  sch("c_t", "users scheduled per TTI", &SchedulerConfig::c_t);
  sch("rc_size", "RBs per resource chunk", &SchedulerConfig::rc_size);
  sch("n_rc", "resource chunks", &SchedulerConfig::n_rc);
  sch("r0", "minimum CUE spectral efficiency when paired", &SchedulerConfig::r0);
  sch("gamma0_db", "VUE SINR threshold", &SchedulerConfig::gamma0_db);
  sch("p0", "VUE outage target", &SchedulerConfig::p0);
  for (auto [name, field] : {std::pair{"bler_cue", &SchedulerConfig::bler_cue},
                             std::pair{"bler_vue", &SchedulerConfig::bler_vue}}) {
    r.push_back({"scheduler", name, "0.1 or 0.01",
                 [field](RunPlan& p, const std::string& v) { p.sim.scheduler.*field = parse_bler_target(trim(v)); },
                 [field](const RunPlan& p) { return to_string(p.sim.scheduler.*field); }});
  }
  sch("max_rbs_per_packet", "RB cap per packet", &SchedulerConfig::max_rbs_per_packet);
  sch("one_rb_only", "serve a CUE only when one RB carries its packet", &SchedulerConfig::one_rb_only);

  r.push_back(real("run", "duration_s", "simulated time per run", &SC::duration_s));
  r.push_back({"run", "seeds", "comma-separated seeds, ranges as a-b",
               [](RunPlan& p, const std::string& v) { p.seeds = parse_seed_list(v); },
               [](const RunPlan& p) {
                 std::string s;
                 for (auto x : p.seeds) s += (s.empty() ? "" : ",") + std::to_string(x);
                 return s;
               }});
  r.push_back({"run", "sweep", "key=v1,v2,... or empty",
               [](RunPlan& p, const std::string& v) {
                 if (trim(v).empty()) {
                   p.sweep.reset();
                 } else {
                   p.sweep = parse_sweep(v);
                 }
               },
               [](const RunPlan& p) {
                 if (!p.sweep) return std::string();
                 std::string s = p.sweep->key + "=";
                 for (std::size_t i = 0; i < p.sweep->values.size(); ++i) s += (i ? "," : "") + p.sweep->values[i];
                 return s;
               }});
  return r;
}

const ConfigKey& find_key(const std::string& dotted) {
  for (const auto& k : config_keys()) {
    if (k.dotted() == dotted) return k;
  }
  throw ConfigError("unknown configuration key '" + dotted + "'");
}

}  // namespace

std::string ConfigKey::env_name() const { return "V2XSIM_" + upper(section) + "_" + upper(name); }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_registry();
  return keys;
}

void RunPlan::validate() const {
  sim.validate();
  if (seeds.empty()) throw ConfigError("run.seeds must not be empty");
  if (sweep) {
    if (sweep->key.rfind("run.", 0) == 0) throw ConfigError("run.sweep cannot sweep a run.* key");
    find_key(sweep->key);
    if (sweep->values.empty()) throw ConfigError("run.sweep needs at least one value");
    for (const auto& v : sweep->values) {
      RunPlan probe = *this;
      probe.sweep.reset();
      set_config_value(probe, sweep->key, v);
      probe.sim.validate();
    }
  }
}

void set_config_value(RunPlan& plan, const std::string& dotted_key, const std::string& value) {
  find_key(trim(dotted_key)).set(plan, value);
}

std::string get_config_value(const RunPlan& plan, const std::string& dotted_key) {
  return find_key(dotted_key).get(plan);
}

std::vector<std::pair<std::string, std::string>> config_items(const RunPlan& plan) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : config_keys()) out.emplace_back(k.dotted(), k.get(plan));
  return out;
}

void apply_config_text(RunPlan& plan, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = origin + ":" + std::to_string(lineno) + ": ";
    auto s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      const bool known = std::any_of(config_keys().begin(), config_keys().end(),
                                     [&](const ConfigKey& k) { return k.section == section; });
      if (!known) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside any [section]");
    const auto key = trim(s.substr(0, eq));
    auto value = trim(s.substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    try {
      set_config_value(plan, section + "." + key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void apply_config_file(RunPlan& plan, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(plan, ss.str(), path);
}

void apply_env_overrides(RunPlan& plan,
                         const std::function<std::optional<std::string>(const std::string&)>& lookup) {
  for (const auto& k : config_keys()) {
    if (const auto v = lookup(k.env_name())) {
      try {
        k.set(plan, *v);
      } catch (const ConfigError& e) {
        throw ConfigError(k.env_name() + ": " + e.what());
      }
    }
  }
}

void apply_env_overrides(RunPlan& plan) {
  apply_env_overrides(plan, [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  });
}

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must look like key=v1,v2 (got '" + text + "')");
  Sweep s{trim(text.substr(0, eq)), {}};
  find_key(s.key);
  for (auto& v : split(text.substr(eq + 1), ',')) {
    if (v.empty()) throw ConfigError("sweep '" + text + "' has an empty value");
    s.values.push_back(v);
  }
  if (s.values.empty()) throw ConfigError("sweep '" + text + "' lists no values");
  return s;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) throw ConfigError("run.seeds: empty entry in '" + text + "'");
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_number<std::uint64_t>("run.seeds", part));
      continue;
    }
    const auto a = parse_number<std::uint64_t>("run.seeds", part.substr(0, dash));
    const auto b = parse_number<std::uint64_t>("run.seeds", part.substr(dash + 1));
    if (b < a) throw ConfigError("run.seeds: descending range '" + part + "'");
    for (auto x = a; x <= b; ++x) out.push_back(x);
  }
  if (out.empty()) throw ConfigError("run.seeds must not be empty");
  return out;
}

std::string to_config_text(const RunPlan& plan) {
  std::string out;
  std::string section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      section = k.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += k.name + " = " + k.get(plan) + "\n";
  }
  return out;
}

}  // namespace v2x
