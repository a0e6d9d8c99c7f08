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

#pragma once

#include "relaysel/experiments.hpp"
#include "relaysel/selection.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace relaysel {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Instance file: {"c": [...], "p": [[...], ...], "sr": [...]?, "targets": [...]?}
/// with linear SNRs; one inner array of p per relay.
struct InstanceFile {
  ChannelInstance instance;
  std::optional<MinRateTargets> targets;
};

InstanceFile parse_instance(const std::string& json_text);
InstanceFile read_instance(const std::string& path);
nlohmann::json instance_to_json(const InstanceFile& file);

/// Result document of `relaysel solve`: relaxed alpha and its certificate, then
/// the rounded selection with its rates. Relay and user indices are 1-based.
nlohmann::json solution_to_json(const BoundPair& result, const Objective& objective, Codebook codebook,
                                const ChannelInstance& inst);

/// Error in a config file, with its 1-based line number in the message.
class ConfigError : public InvalidInput {
public:
  using InvalidInput::InvalidInput;
};

/// Flat `key = value` config with `#` comments and comma-separated lists.
/// Unknown keys and malformed values are errors. Keys not given keep their
/// defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig read_config(const std::string& path);

/// Effective configuration as ordered (key, value) pairs; feeding
/// `echo_config_text` back to `parse_config` reproduces the same config.
std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& config);
std::string echo_config_text(const ExperimentConfig& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace relaysel
