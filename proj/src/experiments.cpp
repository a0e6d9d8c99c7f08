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

#include "relaysel/experiments.hpp"

#include "relaysel/baselines.hpp"
#include "relaysel/io.hpp"
#include "relaysel/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace relaysel {

namespace {

// Root stream ids, one per experiment.
constexpr std::uint64_t kTableStream = 1;
constexpr std::uint64_t kBoundStream = 2;
constexpr std::uint64_t kOracleStream = 3;
constexpr std::uint64_t kCellStream = 4;

template <typename T>
void require(bool ok, const T& message) {
  if (!ok) throw InvalidInput(message);
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  require(table_samples > 0, "table_samples must be positive");
  require(table_bin_width_km > 0.0, "table_bin_width_km must be positive");
  require(!bound_relays.empty() && !bound_users.empty(), "bound_relays and bound_users must not be empty");
  require(!oracle_relays.empty() && !oracle_users.empty(), "oracle_relays and oracle_users must not be empty");
  for (int v : bound_relays) require(v >= 1, "bound_relays entries must be at least 1");
  for (int v : bound_users) require(v >= 1, "bound_users entries must be at least 1");
  for (int v : oracle_relays) require(v >= 1, "oracle_relays entries must be at least 1");
  for (int v : oracle_users) require(v >= 1, "oracle_users entries must be at least 1");
  require(bound_trials >= 1 && oracle_trials >= 1, "trial counts must be positive");
  require(bound_objective != ObjectiveKind::sum_min, "bound_objective must be sum or max_min");
  require(oracle_tolerance > 0.0, "oracle_tolerance must be positive");
  require(!cell_radii_km.empty(), "cell_radii_km must not be empty");
  for (double r : cell_radii_km) require(r > 0.0, "cell_radii_km entries must be positive");
  require(cell_location_sets >= 1 && cell_fades_per_set >= 1, "cell set and fade counts must be positive");
  require(!cell_objectives.empty(), "cell_objectives must not be empty");
  for (ObjectiveKind o : cell_objectives) require(o != ObjectiveKind::sum_min, "cell_objectives must be sum or max_min");
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(count, 1));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double percentile(std::vector<double>& values, double q) {
  if (values.empty()) return std::nan("");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

std::vector<AssumptionRow> run_assumption_table(const ExperimentConfig& config, std::uint64_t seed, int threads) {
  config.validate();
  const ScenarioConfig& cfg = config.scenario;
  const double radius = cfg.cell_radius_km;
  const int bins = std::max(1, static_cast<int>(std::ceil(radius / config.table_bin_width_km - 1e-9)));
  const std::vector<Point> relays = relay_ring(cfg);
  const int J = cfg.num_relays;

  constexpr std::int64_t kChunk = 4096;
  const std::int64_t samples = config.table_samples;
  const int chunks = static_cast<int>((samples + kChunk - 1) / kChunk);
  std::vector<std::vector<std::int64_t>> total(static_cast<std::size_t>(chunks)), valid(static_cast<std::size_t>(chunks));
  parallel_for(chunks, threads, [&](int chunk) {
    std::vector<std::int64_t> t(static_cast<std::size_t>(bins), 0), v(static_cast<std::size_t>(bins), 0);
    const std::int64_t begin = chunk * kChunk;
    const std::int64_t end = std::min(samples, begin + kChunk);
    for (std::int64_t s = begin; s < end; ++s) {
      Rng rng = make_rng(seed, {kTableStream, static_cast<std::uint64_t>(s)});
      Placement pl{relays, draw_users(1, 0.0, radius, rng)};
      const LargeScale large = draw_large_scale(pl, cfg, rng);
      const SmallScale small = draw_small_scale(J, 1, 1, cfg, rng);
      const ChannelInstance inst = compose_instance(large, small, cfg);
      const double r = std::hypot(pl.users[0].x, pl.users[0].y);
      const int bin = std::min(bins - 1, static_cast<int>(r / config.table_bin_width_km));
      ++t[static_cast<std::size_t>(bin)];
      if (assumption_holds(inst)) ++v[static_cast<std::size_t>(bin)];
    }
    total[static_cast<std::size_t>(chunk)] = std::move(t);
    valid[static_cast<std::size_t>(chunk)] = std::move(v);
  });

  std::vector<AssumptionRow> rows(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    AssumptionRow& row = rows[static_cast<std::size_t>(b)];
    row.inner_m = b * (1e3 * config.table_bin_width_km);
    row.outer_m = std::min(1e3 * radius, (b + 1) * (1e3 * config.table_bin_width_km));
    for (int c = 0; c < chunks; ++c) {
      row.samples += total[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
      row.valid += valid[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
    }
    row.percent_valid = row.samples > 0 ? 100.0 * static_cast<double>(row.valid) / static_cast<double>(row.samples)
                                        : std::nan("");
  }
  return rows;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

bool oracle_fits(int J, int K, std::int64_t limit) {
  std::int64_t total = 1;
  for (int k = 0; k < K; ++k) {
    if (total > limit / J) return false;
    total *= J;
  }
  return true;
}

}  // namespace

std::vector<BoundRow> run_bound_tightness(const ExperimentConfig& config, std::uint64_t seed, int threads,
                                          bool with_oracle) {
  config.validate();
  const double snr = std::pow(10.0, config.bound_snr_dB / 10.0);
  const Objective objective =
      config.bound_objective == ObjectiveKind::max_min ? Objective::max_min() : Objective::sum();
  constexpr std::int64_t kOracleLimit = 1'000'000;
  std::vector<BoundRow> rows;
  for (int J : config.bound_relays)
    for (int K : config.bound_users) {
      const int trials = config.bound_trials;
      std::vector<double> upper(static_cast<std::size_t>(trials)), lower(upper), gap(upper), oracle(upper);
      std::vector<char> certified(static_cast<std::size_t>(trials), 0);
      const bool run_oracle = with_oracle && oracle_fits(J, K, kOracleLimit);
      parallel_for(trials, threads, [&](int t) {
        Rng rng = make_rng(seed, {kBoundStream, static_cast<std::uint64_t>(J), static_cast<std::uint64_t>(K),
                                  static_cast<std::uint64_t>(t)});
        const ChannelInstance inst = draw_synthetic_rayleigh(J, K, snr, rng);
        const BoundPair bp = bound_pair(inst, objective, {}, Codebook::repetition, config.refine_lower_bound);
        const auto i = static_cast<std::size_t>(t);
        upper[i] = bp.upper;
        lower[i] = bp.lower;
        gap[i] = bp.gap;
        certified[i] = bp.relaxed.certified ? 1 : 0;
        if (run_oracle) oracle[i] = exhaustive_optimum(inst, objective, {}, Codebook::repetition, kOracleLimit).value;
      });
      BoundRow row;
      row.relays = J;
      row.users = K;
      row.trials = trials;
      row.mean_upper = mean(upper);
      row.mean_lower = mean(lower);
      row.mean_gap = mean(gap);
      row.median_gap = median(gap);
      row.max_gap = *std::max_element(gap.begin(), gap.end());
      row.certified = static_cast<int>(std::count(certified.begin(), certified.end(), 1));
      row.has_oracle = run_oracle;
      row.mean_oracle = run_oracle ? mean(oracle) : std::nan("");
      rows.push_back(row);
    }
  return rows;
}

std::vector<OracleRow> run_oracle_check(const ExperimentConfig& config, std::uint64_t seed, int threads) {
  config.validate();
  const double snr = std::pow(10.0, config.oracle_snr_dB / 10.0);
  std::vector<OracleRow> rows;
  for (int J : config.oracle_relays)
    for (int K : config.oracle_users) {
      const int trials = config.oracle_trials;
      std::vector<double> upper(static_cast<std::size_t>(trials)), lower(upper), oracle(upper);
      parallel_for(trials, threads, [&](int t) {
        Rng rng = make_rng(seed, {kOracleStream, static_cast<std::uint64_t>(J), static_cast<std::uint64_t>(K),
                                  static_cast<std::uint64_t>(t)});
        const ChannelInstance inst = draw_synthetic_rayleigh(J, K, snr, rng);
        const BoundPair bp =
            bound_pair(inst, Objective::sum(), {}, Codebook::repetition, config.refine_lower_bound);
        const auto i = static_cast<std::size_t>(t);
        upper[i] = bp.upper;
        lower[i] = bp.lower;
        oracle[i] = exhaustive_optimum(inst, Objective::sum()).value;
      });
      OracleRow row;
      row.relays = J;
      row.users = K;
      row.trials = trials;
      row.mean_upper = mean(upper);
      row.mean_oracle = mean(oracle);
      row.mean_lower = mean(lower);
      int within = 0;
      int sandwich = 0;
      for (int t = 0; t < trials; ++t) {
        const auto i = static_cast<std::size_t>(t);
        const double rel = (oracle[i] - lower[i]) / std::max(oracle[i], 1e-12);
        row.max_relative_error = std::max(row.max_relative_error, rel);
        if (rel <= config.oracle_tolerance) ++within;
        const double slack = 1e-6 * std::max(1.0, std::abs(oracle[i]));
        if (lower[i] <= oracle[i] + slack && oracle[i] <= upper[i] + slack) ++sandwich;
      }
      row.fraction_within = static_cast<double>(within) / trials;
      row.fraction_sandwich = static_cast<double>(sandwich) / trials;
      rows.push_back(row);
    }
  return rows;
}

namespace {

std::uint64_t fingerprint(const LargeScale& large) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const double* data, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, data + i, sizeof bits);
      h = (h ^ bits) * 1099511628211ULL;
    }
  };
  mix(large.bs_user.data(), large.bs_user.size());
  mix(large.relay_user.data(), large.relay_user.size());
  mix(large.bs_relay.data(), large.bs_relay.size());
  return h;
}

enum System { kSiso, kMiso, kRelay, kSystems };
const char* const kSystemNames[kSystems] = {"siso", "miso", "relay"};

}  // namespace

CellResult run_cell_comparison(const ExperimentConfig& config, std::uint64_t seed, int threads) {
  config.validate();
  CellResult result;
  const auto objectives = config.cell_objectives;
  const std::size_t n_obj = objectives.size();
  const double unit = config.rate_in_bps ? config.scenario.channel_bandwidth_kHz * 1e3 : 1.0;

  for (std::size_t ri = 0; ri < config.cell_radii_km.size(); ++ri) {
    ScenarioConfig cfg = config.scenario;
    cfg.cell_radius_km = config.cell_radii_km[ri];
    const double radius = cfg.cell_radius_km;
    const int K = users_in_annulus(cfg);
    const int J = cfg.num_relays;
    const std::vector<Point> relays = relay_ring(cfg);
    const double power = cfg.tx_power_mW();
    const double noise = cfg.noise_mW();
    const int sets = config.cell_location_sets;
    const int fades = config.cell_fades_per_set;

    // rates[set][objective * kSystems + system]: per-user rates, fade-major.
    std::vector<std::vector<std::vector<double>>> rates(static_cast<std::size_t>(sets));
    std::vector<std::int64_t> mismatches(static_cast<std::size_t>(sets), 0);
    parallel_for(sets, threads, [&](int s) {
      Rng rng = make_rng(seed, {kCellStream, ri, static_cast<std::uint64_t>(s)});
      const Placement pl{relays, draw_users(K, radius / 2.0, radius, rng)};
      const LargeScale large = draw_large_scale(pl, cfg, rng);
      const std::uint64_t print = fingerprint(large);
      auto& out = rates[static_cast<std::size_t>(s)];
      out.assign(n_obj * kSystems, {});
      for (auto& v : out) v.reserve(static_cast<std::size_t>(fades) * static_cast<std::size_t>(K));

      for (int f = 0; f < fades; ++f) {
        Rng fade_rng = make_rng(seed, {kCellStream, ri, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(f), 1});
        const SmallScale small = draw_small_scale(J, K, J + 1, cfg, fade_rng);
        // Every system reads the same large-scale draw.
        if (fingerprint(large) != print) ++mismatches[static_cast<std::size_t>(s)];
        Eigen::VectorXd siso_gain(K);
        Eigen::MatrixXcd miso_channel(J + 1, K);
        for (int k = 0; k < K; ++k) {
          const double g = large.bs_user(k) / noise;
          siso_gain(k) = g * std::norm(small.bs_user(0, k));
          miso_channel.col(k) = std::sqrt(g) * small.bs_user.col(k);
        }
        const ChannelInstance inst = compose_instance(large, small, cfg);
        for (std::size_t o = 0; o < n_obj; ++o) {
          const DirectObjective direct =
              objectives[o] == ObjectiveKind::sum ? DirectObjective::sum : DirectObjective::equal_rate;
          const RateReport r_siso = siso_rates(siso_gain, power, direct);
          const RateReport r_miso = miso_rates(miso_channel, power, direct);
          const RateReport r_relay = relay_system_rates(inst, objectives[o]);
          const RateReport* reports[kSystems] = {&r_siso, &r_miso, &r_relay};
          for (int y = 0; y < kSystems; ++y) {
            auto& dst = out[o * kSystems + static_cast<std::size_t>(y)];
            for (int k = 0; k < K; ++k) dst.push_back(unit * reports[y]->per_user(k));
          }
        }
      }
    });

    result.audit.location_sets += sets;
    result.audit.fades += static_cast<std::int64_t>(sets) * fades;
    for (std::int64_t m : mismatches) result.audit.mismatches += m;

    for (std::size_t o = 0; o < n_obj; ++o)
      for (int y = 0; y < kSystems; ++y) {
        std::vector<double> pooled;
        pooled.reserve(static_cast<std::size_t>(sets) * static_cast<std::size_t>(fades) * static_cast<std::size_t>(K));
        for (int s = 0; s < sets; ++s) {
          auto& v = rates[static_cast<std::size_t>(s)][o * kSystems + static_cast<std::size_t>(y)];
          pooled.insert(pooled.end(), v.begin(), v.end());
          std::vector<double>().swap(v);
        }
        CellRow row;
        row.radius_km = radius;
        row.objective = objectives[o];
        row.system = kSystemNames[y];
        row.users = K;
        row.samples = static_cast<std::int64_t>(pooled.size());
        row.mean_rate = mean(pooled);
        row.outage10 = percentile(pooled, 10.0);
        row.outage1 = percentile(pooled, 1.0);
        result.rows.push_back(row);
      }
  }
  return result;
}

std::string Table::to_csv() const {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

Table to_table(const std::vector<AssumptionRow>& rows) {
  Table t{{"annulus_inner_m", "annulus_outer_m", "samples", "valid", "percent_valid"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({format_double(r.inner_m), format_double(r.outer_m), std::to_string(r.samples),
                      std::to_string(r.valid), format_double(r.percent_valid)});
  return t;
}

Table to_table(const std::vector<BoundRow>& rows) {
  const bool oracle = std::any_of(rows.begin(), rows.end(), [](const BoundRow& r) { return r.has_oracle; });
  Table t{{"J", "K", "trials", "mean_upper", "mean_lower", "mean_gap", "median_gap", "max_gap", "certified"}, {}};
  if (oracle) t.header.push_back("mean_oracle");
  for (const auto& r : rows) {
    std::vector<std::string> cells{std::to_string(r.relays), std::to_string(r.users), std::to_string(r.trials),
                                   format_double(r.mean_upper), format_double(r.mean_lower),
                                   format_double(r.mean_gap), format_double(r.median_gap),
                                   format_double(r.max_gap), std::to_string(r.certified)};
    if (oracle) cells.push_back(r.has_oracle ? format_double(r.mean_oracle) : "");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

Table to_table(const std::vector<OracleRow>& rows) {
  Table t{{"J", "K", "trials", "mean_upper", "mean_oracle", "mean_lower", "fraction_within_tolerance",
           "fraction_sandwich", "max_relative_error"},
          {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.relays), std::to_string(r.users), std::to_string(r.trials),
                      format_double(r.mean_upper), format_double(r.mean_oracle), format_double(r.mean_lower),
                      format_double(r.fraction_within), format_double(r.fraction_sandwich),
                      format_double(r.max_relative_error)});
  return t;
}

Table to_table(const std::vector<CellRow>& rows) {
  Table t{{"radius_km", "objective", "system", "users", "samples", "mean_rate", "outage10", "outage1"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({format_double(r.radius_km), to_string(r.objective), r.system, std::to_string(r.users),
                      std::to_string(r.samples), format_double(r.mean_rate), format_double(r.outage10),
                      format_double(r.outage1)});
  return t;
}

}  // namespace relaysel
