// Copyright 2026 The relaysel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relaysel/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <system_error>

namespace relaysel {

using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

Eigen::VectorXd vector_from(const json& j, const char* key) {
  if (!j.is_array()) throw InvalidInput(std::string("instance: '") + key + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidInput(std::string("instance: '") + key + "' entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json vector_to(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_to(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to(m.row(r).transpose()));
  return out;
}

}  // namespace

InstanceFile parse_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("instance: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("instance: top level must be an object");
  for (const auto& item : doc.items())
    if (item.key() != "c" && item.key() != "p" && item.key() != "sr" && item.key() != "targets")
      throw InvalidInput("instance: unknown key '" + item.key() + "'");
  if (!doc.contains("c") || !doc.contains("p")) throw InvalidInput("instance: keys 'c' and 'p' are required");

  const Eigen::VectorXd c = vector_from(doc["c"], "c");
  const json& p = doc["p"];
  if (!p.is_array() || p.empty()) throw InvalidInput("instance: 'p' must be a non-empty array of arrays");
  Eigen::MatrixXd relay(static_cast<Eigen::Index>(p.size()), c.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const Eigen::VectorXd row = vector_from(p[j], "p");
    if (row.size() != c.size()) throw InvalidInput("instance: every row of 'p' needs one entry per user");
    relay.row(static_cast<Eigen::Index>(j)) = row.transpose();
  }
  std::optional<Eigen::VectorXd> sr;
  if (doc.contains("sr")) sr = vector_from(doc["sr"], "sr");

  InstanceFile file{ChannelInstance(c, relay, sr), std::nullopt};
  if (doc.contains("targets")) {
    Eigen::VectorXd r = vector_from(doc["targets"], "targets");
    if (r.size() != c.size()) throw InvalidInput("instance: 'targets' needs one entry per user");
    if (!r.allFinite() || (r.array() < 0.0).any())
      throw InvalidInput("instance: targets must be finite and non-negative");
    file.targets = MinRateTargets{std::move(r)};
  }
  return file;
}

InstanceFile read_instance(const std::string& path) { return parse_instance(read_file(path)); }

json instance_to_json(const InstanceFile& file) {
  const ChannelInstance& inst = file.instance;
  json out;
  out["c"] = vector_to(inst.direct());
  out["p"] = matrix_to(inst.relay());
  if (inst.has_source_relay()) out["sr"] = vector_to(*inst.source_relay());
  if (file.targets) out["targets"] = vector_to(file.targets->r);
  return out;
}

json solution_to_json(const BoundPair& result, const Objective& objective, Codebook codebook,
                      const ChannelInstance& inst) {
  json out;
  out["objective"] = to_string(objective.kind);
  out["codebook"] = to_string(codebook);
  out["upper_bound"] = result.upper;
  out["lower_bound"] = result.lower;
  out["gap"] = result.gap;

  out["alpha"] = matrix_to(result.relaxed.alpha.alpha());
  out["relaxed_rates"] = vector_to(result.relaxed.rates.per_user);
  out["kkt_residual"] = result.relaxed.kkt_residual;
  out["certified"] = result.relaxed.certified;
  json multi = json::array();
  for (int k : result.relaxed.multi_relay_users) multi.push_back(k + 1);
  out["multi_relay_users"] = multi;
  out["nu"] = vector_to(result.relaxed.duals.nu);
  out["gamma"] = vector_to(result.relaxed.duals.gamma);

  json assignment = json::array();
  for (int r : result.selection.assignment.relay_of()) assignment.push_back(r + 1);
  out["assignment"] = assignment;
  out["selected_alpha"] = matrix_to(result.selection.alpha.alpha());
  out["rates"] = vector_to(result.rates.per_user);
  out["sum_rate"] = result.rates.sum_rate;
  out["min_rate"] = result.rates.min_rate;
  if (inst.has_source_relay()) {
    const RateReport capped = evaluate_rates(inst, result.selection.alpha.alpha(), codebook);
    out["capped_rates"] = vector_to(capped.per_user);
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (out.empty() || std::any_of(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }))
    throw InvalidInput("expected a non-empty comma-separated list");
  return out;
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && text[0] == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) throw InvalidInput("invalid number '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw InvalidInput("invalid boolean '" + text + "'");
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format(values[i]);
  return out;
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

Field real(std::string key, double ScenarioConfig::*member) {
  return {std::move(key), [member](const ExperimentConfig& c) { return format_double(c.scenario.*member); },
          [member](ExperimentConfig& c, const std::string& v) { c.scenario.*member = parse_number<double>(v); }};
}

Field optional_real(std::string key, std::optional<double> ScenarioConfig::*member) {
  return {std::move(key),
          [member](const ExperimentConfig& c) {
            const auto& v = c.scenario.*member;
            return v ? format_double(*v) : std::string();
          },
          [member](ExperimentConfig& c, const std::string& v) {
            if (v.empty())
              (c.scenario.*member).reset();
            else
              c.scenario.*member = parse_number<double>(v);
          }};
}

template <typename T>
Field number(std::string key, T ExperimentConfig::*member) {
  return {std::move(key),
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return format_double(c.*member);
            else
              return std::to_string(c.*member);
          },
          [member](ExperimentConfig& c, const std::string& v) { c.*member = parse_number<T>(v); }};
}

template <typename T>
Field list(std::string key, std::vector<T> ExperimentConfig::*member) {
  return {std::move(key),
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return join(c.*member, format_double);
            else
              return join(c.*member, [](T v) { return std::to_string(v); });
          },
          [member](ExperimentConfig& c, const std::string& v) {
            std::vector<T> out;
            for (const auto& item : split_list(v)) out.push_back(parse_number<T>(item));
            c.*member = std::move(out);
          }};
}

const std::vector<Field>& fields() {
  using S = ScenarioConfig;
  using E = ExperimentConfig;
  static const std::vector<Field> table = {
      real("cell_radius_km", &S::cell_radius_km),
      real("relay_ring_fraction", &S::relay_ring_fraction),
      {"num_relays", [](const E& c) { return std::to_string(c.scenario.num_relays); },
       [](E& c, const std::string& v) { c.scenario.num_relays = parse_number<int>(v); }},
      real("bs_height_m", &S::bs_height_m),
      real("relay_height_m", &S::relay_height_m),
      real("user_height_m", &S::user_height_m),
      real("rooftop_height_m", &S::rooftop_height_m),
      real("frequency_GHz", &S::frequency_GHz),
      real("building_spacing_m", &S::building_spacing_m),
      real("street_width_m", &S::street_width_m),
      real("road_orientation_deg", &S::road_orientation_deg),
      real("tx_power_dBm", &S::tx_power_dBm),
      real("noise_psd_dBm_per_Hz", &S::noise_psd_dBm_per_Hz),
      real("channel_bandwidth_kHz", &S::channel_bandwidth_kHz),
      real("shadowing_sigma_dB", &S::shadowing_sigma_dB),
      real("los_shadowing_sigma_dB", &S::los_shadowing_sigma_dB),
      real("rician_K_dB", &S::rician_K_dB),
      real("user_density_per_km2", &S::user_density_per_km2),
      {"seed", [](const E& c) { return std::to_string(c.scenario.seed); },
       [](E& c, const std::string& v) { c.scenario.seed = parse_number<std::uint64_t>(v); }},
      optional_real("noise_power_dBm", &S::noise_power_dBm),
      optional_real("path_loss_intercept_dB", &S::path_loss_intercept_dB),
      real("path_loss_breakpoint_km", &S::path_loss_breakpoint_km),
      real("path_loss_near_slope_dB_per_km", &S::path_loss_near_slope_dB_per_km),
      real("path_loss_far_slope_dB_per_km", &S::path_loss_far_slope_dB_per_km),
      optional_real("user_link_extra_loss_dB", &S::user_link_extra_loss_dB),
      {"fading", [](const E& c) { return std::string(c.scenario.fading ? "true" : "false"); },
       [](E& c, const std::string& v) { c.scenario.fading = parse_bool(v); }},

      number("table_samples", &E::table_samples),
      number("table_bin_width_km", &E::table_bin_width_km),

      list("bound_relays", &E::bound_relays),
      list("bound_users", &E::bound_users),
      number("bound_snr_dB", &E::bound_snr_dB),
      number("bound_trials", &E::bound_trials),
      {"bound_objective", [](const E& c) { return to_string(c.bound_objective); },
       [](E& c, const std::string& v) { c.bound_objective = parse_objective(v); }},

      list("oracle_relays", &E::oracle_relays),
      list("oracle_users", &E::oracle_users),
      number("oracle_snr_dB", &E::oracle_snr_dB),
      number("oracle_trials", &E::oracle_trials),
      number("oracle_tolerance", &E::oracle_tolerance),
      {"refine_lower_bound",
       [](const E& c) {
         return std::string(!c.refine_lower_bound ? "default" : *c.refine_lower_bound ? "on" : "off");
       },
       [](E& c, const std::string& v) {
         if (v == "default")
           c.refine_lower_bound.reset();
         else if (v == "on")
           c.refine_lower_bound = true;
         else if (v == "off")
           c.refine_lower_bound = false;
         else
           throw InvalidInput("expected default, on or off");
       }},

      list("cell_radii_km", &E::cell_radii_km),
      number("cell_location_sets", &E::cell_location_sets),
      number("cell_fades_per_set", &E::cell_fades_per_set),
      {"cell_objectives",
       [](const E& c) { return join(c.cell_objectives, [](ObjectiveKind k) { return to_string(k); }); },
       [](E& c, const std::string& v) {
         std::vector<ObjectiveKind> out;
         for (const auto& item : split_list(v)) out.push_back(parse_objective(item));
         c.cell_objectives = std::move(out);
       }},
      {"rate_in_bps", [](const E& c) { return std::string(c.rate_in_bps ? "true" : "false"); },
       [](E& c, const std::string& v) { c.rate_in_bps = parse_bool(v); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::vector<std::string> seen;
  std::stringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw ConfigError(where + "duplicate key '" + key + "'");
    seen.push_back(key);
    try {
      it->set(config, value);
    } catch (const InvalidInput& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  try {
    config.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config;
}

ExperimentConfig read_config(const std::string& path) { return parse_config(read_file(path)); }

std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(config));
  return out;
}

std::string echo_config_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : echo_config(config)) out += key + " = " + value + "\n";
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace relaysel
