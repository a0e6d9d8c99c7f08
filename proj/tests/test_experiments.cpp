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

#include "doctest.h"

#include "oracles.hpp"
#include "relaysel/experiments.hpp"

#include <atomic>
#include <stdexcept>

using namespace relaysel;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.table_samples = 20000;
  cfg.bound_relays = {2, 3};
  cfg.bound_users = {3, 6};
  cfg.bound_trials = 12;
  cfg.oracle_users = {2, 4};
  cfg.oracle_trials = 10;
  cfg.cell_radii_km = {1.0, 2.0};
  cfg.cell_location_sets = 2;
  cfg.cell_fades_per_set = 3;
  return cfg;
}

}  // namespace

TEST_CASE("parallel_for visits every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](int i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("nearest-rank percentile") {
  std::vector<double> v{5, 1, 4, 2, 3, 6, 7, 8, 9, 10};
  CHECK(percentile(v, 10) == 1.0);
  CHECK(percentile(v, 50) == 5.0);
  CHECK(percentile(v, 100) == 10.0);
  std::vector<double> one{3.5};
  CHECK(percentile(one, 1) == 3.5);
}

TEST_CASE("assumption table has one row per 100 m annulus") {
  const auto rows = run_assumption_table(small_config(), 1, 2);
  REQUIRE(rows.size() == 10);
  std::int64_t total = 0;
  for (std::size_t b = 0; b < rows.size(); ++b) {
    CHECK(rows[b].inner_m == doctest::Approx(100.0 * static_cast<double>(b)));
    CHECK(rows[b].outer_m == doctest::Approx(100.0 * static_cast<double>(b + 1)));
    CHECK(rows[b].valid <= rows[b].samples);
    total += rows[b].samples;
  }
  CHECK(total == 20000);
  // Uniform over the disk: the outer annulus holds about 19% of the samples.
  CHECK(static_cast<double>(rows[9].samples) / 20000.0 == doctest::Approx(0.19).epsilon(0.1));
}

TEST_CASE("without shadowing or fading every location beyond the relay ring is valid") {
  ExperimentConfig cfg = small_config();
  cfg.scenario.shadowing_sigma_dB = 0.0;
  cfg.scenario.los_shadowing_sigma_dB = 0.0;
  cfg.scenario.fading = false;
  const auto rows = run_assumption_table(cfg, 3, 1);
  for (std::size_t b = 4; b < rows.size(); ++b) CHECK(rows[b].percent_valid == 100.0);
}

TEST_CASE("bound tightness is exact with one relay") {
  ExperimentConfig cfg = small_config();
  cfg.bound_relays = {1};
  cfg.bound_users = {1, 5, 9};
  for (ObjectiveKind obj : {ObjectiveKind::sum, ObjectiveKind::max_min}) {
    cfg.bound_objective = obj;
    for (const auto& row : run_bound_tightness(cfg, 4, 2, false)) {
      CHECK(row.mean_gap <= 1e-8);
      CHECK(row.certified == row.trials);
    }
  }
}

TEST_CASE("bound tightness rows and oracle column") {
  ExperimentConfig cfg = small_config();
  const auto rows = run_bound_tightness(cfg, 5, 2, true);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.has_oracle);
    CHECK(r.mean_lower <= r.mean_oracle + 1e-9);
    CHECK(r.mean_oracle <= r.mean_upper + 1e-9);
    CHECK(r.median_gap <= r.max_gap);
  }
  const Table t = to_table(rows);
  CHECK(t.header.back() == "mean_oracle");
  CHECK(to_table(run_bound_tightness(cfg, 5, 2, false)).header.back() == "certified");
}

TEST_CASE("oracle check sandwiches the optimum") {
  for (const auto& r : run_oracle_check(small_config(), 6, 2)) {
    CHECK(r.fraction_sandwich == 1.0);
    CHECK(r.mean_lower <= r.mean_oracle + 1e-9);
    CHECK(r.mean_oracle <= r.mean_upper + 1e-9);
  }
}

TEST_CASE("cell comparison rows and draw audit") {
  const CellResult res = run_cell_comparison(small_config(), 7, 2);
  CHECK(res.rows.size() == 2 * 2 * 3);
  CHECK(res.audit.location_sets == 4);
  CHECK(res.audit.fades == 12);
  CHECK(res.audit.mismatches == 0);
  for (const auto& r : res.rows) {
    CHECK(r.samples == static_cast<std::int64_t>(r.users) * 6);
    CHECK(r.outage1 <= r.outage10);
    CHECK(r.outage10 <= r.mean_rate * 10.0);
    CHECK(r.mean_rate >= 0.0);
  }
  CHECK(res.rows[0].users == 23);
  CHECK(res.rows[6].users == 90);
}

TEST_CASE("results do not depend on the thread count") {
  const ExperimentConfig cfg = small_config();
  CHECK(to_table(run_assumption_table(cfg, 11, 1)).to_csv() == to_table(run_assumption_table(cfg, 11, 3)).to_csv());
  CHECK(to_table(run_bound_tightness(cfg, 11, 1, true)).to_csv() ==
        to_table(run_bound_tightness(cfg, 11, 4, true)).to_csv());
  CHECK(to_table(run_oracle_check(cfg, 11, 1)).to_csv() == to_table(run_oracle_check(cfg, 11, 2)).to_csv());
  CHECK(to_table(run_cell_comparison(cfg, 11, 1).rows).to_csv() ==
        to_table(run_cell_comparison(cfg, 11, 3).rows).to_csv());
  CHECK(to_table(run_oracle_check(cfg, 11, 1)).to_csv() != to_table(run_oracle_check(cfg, 12, 1)).to_csv());
}

TEST_CASE("bits per second scaling") {
  ExperimentConfig cfg = small_config();
  cfg.cell_radii_km = {1.0};
  const auto base = run_cell_comparison(cfg, 8, 1).rows;
  cfg.rate_in_bps = true;
  const auto bps = run_cell_comparison(cfg, 8, 1).rows;
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(bps[i].mean_rate == doctest::Approx(200e3 * base[i].mean_rate));
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.cell_objectives = {ObjectiveKind::sum_min};
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.bound_users = {};
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.table_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("spearman helper") {
  CHECK(oracle::spearman({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(oracle::spearman({1, 2, 3}, {1, 5, 9}) == doctest::Approx(1.0));
}
