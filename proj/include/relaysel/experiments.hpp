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

#include "relaysel/channel.hpp"
#include "relaysel/selection.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace relaysel {

/// Everything an experiment run depends on besides the seed and thread count.
struct ExperimentConfig {
  ScenarioConfig scenario;

  // assumption-table
  std::int64_t table_samples = 300'000;
  double table_bin_width_km = 0.1;

  // bound-tightness
  std::vector<int> bound_relays{4};
  std::vector<int> bound_users{8, 16, 24, 32};
  double bound_snr_dB = 30.0;
  int bound_trials = 200;
  ObjectiveKind bound_objective = ObjectiveKind::sum;

  // oracle-check
  std::vector<int> oracle_relays{2};
  std::vector<int> oracle_users{2, 3, 4, 5, 6, 7, 8};
  double oracle_snr_dB = 30.0;
  int oracle_trials = 100;
  double oracle_tolerance = 1e-3;

  // Per-relay refinement of the lower bound in bound-tightness and
  // oracle-check; unset keeps the objective's default (off for sum).
  std::optional<bool> refine_lower_bound;

  // cell-comparison
  std::vector<double> cell_radii_km{1.0, 2.0, 3.0};
  int cell_location_sets = 50;
  int cell_fades_per_set = 500;
  std::vector<ObjectiveKind> cell_objectives{ObjectiveKind::sum, ObjectiveKind::max_min};
  bool rate_in_bps = false;  // bits/s at the channel bandwidth instead of bits/s/Hz

  void validate() const;
};

/// Runs fn(0..count-1) on `threads` workers (0: hardware concurrency).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// q-th percentile (nearest rank) of the values; sorts in place.
double percentile(std::vector<double>& values, double q);

struct AssumptionRow {
  double inner_m = 0.0;
  double outer_m = 0.0;
  std::int64_t samples = 0;
  std::int64_t valid = 0;
  double percent_valid = 0.0;
};

/// Uniform single-user locations over the disk, one channel draw each;
/// percentage satisfying the decode assumption per annulus.
std::vector<AssumptionRow> run_assumption_table(const ExperimentConfig& config, std::uint64_t seed,
                                                int threads);

struct BoundRow {
  int relays = 0;
  int users = 0;
  int trials = 0;
  double mean_upper = 0.0;
  double mean_lower = 0.0;
  double mean_gap = 0.0;
  double median_gap = 0.0;
  double max_gap = 0.0;
  int certified = 0;
  bool has_oracle = false;
  double mean_oracle = 0.0;
};

std::vector<BoundRow> run_bound_tightness(const ExperimentConfig& config, std::uint64_t seed, int threads,
                                          bool with_oracle);

struct OracleRow {
  int relays = 0;
  int users = 0;
  int trials = 0;
  double mean_upper = 0.0;
  double mean_oracle = 0.0;
  double mean_lower = 0.0;
  double fraction_within = 0.0;    // lower within tolerance (relative) of the oracle
  double fraction_sandwich = 0.0;  // lower <= oracle <= upper within 1e-6
  double max_relative_error = 0.0;
};

std::vector<OracleRow> run_oracle_check(const ExperimentConfig& config, std::uint64_t seed, int threads);

struct CellRow {
  double radius_km = 0.0;
  ObjectiveKind objective = ObjectiveKind::sum;
  std::string system;
  int users = 0;
  std::int64_t samples = 0;
  double mean_rate = 0.0;
  double outage10 = 0.0;
  double outage1 = 0.0;
};

struct DrawAudit {
  std::int64_t location_sets = 0;
  std::int64_t fades = 0;
  // Large-scale fingerprints each system saw that differ from the draw.
  std::int64_t mismatches = 0;
};

struct CellResult {
  std::vector<CellRow> rows;
  DrawAudit audit;
};

/// SISO, MISO and relay systems on identical large- and small-scale draws.
/// Sum objective: direct systems water-fill, the relay system uses the
/// rounded heuristic. Max-min: direct systems equalize rates, the relay
/// system rounds and refines. Per-user rates are pooled over all sets and
/// fades.
CellResult run_cell_comparison(const ExperimentConfig& config, std::uint64_t seed, int threads);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

Table to_table(const std::vector<AssumptionRow>& rows);
Table to_table(const std::vector<BoundRow>& rows);
Table to_table(const std::vector<OracleRow>& rows);
Table to_table(const std::vector<CellRow>& rows);

}  // namespace relaysel
