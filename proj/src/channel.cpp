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

#include "relaysel/channel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace relaysel {

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (stream.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (std::uint64_t id : stream) push(id);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(name) + " must be positive");
  };
  positive(cell_radius_km, "cell_radius_km");
  if (!(relay_ring_fraction > 0.0 && relay_ring_fraction < 1.0))
    throw InvalidInput("relay_ring_fraction must lie in (0, 1)");
  if (num_relays < 1) throw InvalidInput("num_relays must be at least 1");
  positive(bs_height_m, "bs_height_m");
  positive(relay_height_m, "relay_height_m");
  positive(user_height_m, "user_height_m");
  positive(rooftop_height_m, "rooftop_height_m");
  positive(frequency_GHz, "frequency_GHz");
  positive(building_spacing_m, "building_spacing_m");
  positive(street_width_m, "street_width_m");
  positive(channel_bandwidth_kHz, "channel_bandwidth_kHz");
  positive(user_density_per_km2, "user_density_per_km2");
  if (!(road_orientation_deg >= 0.0 && road_orientation_deg <= 90.0))
    throw InvalidInput("road_orientation_deg must lie in [0, 90]");
  if (!(shadowing_sigma_dB >= 0.0) || !(los_shadowing_sigma_dB >= 0.0))
    throw InvalidInput("shadowing standard deviations must be non-negative");
  if (!std::isfinite(rician_K_dB) || !std::isfinite(tx_power_dBm) || !std::isfinite(noise_psd_dBm_per_Hz))
    throw InvalidInput("rician_K_dB, tx_power_dBm and noise_psd_dBm_per_Hz must be finite");
  positive(path_loss_breakpoint_km, "path_loss_breakpoint_km");
  if (!(path_loss_near_slope_dB_per_km >= 0.0) || !(path_loss_far_slope_dB_per_km >= 0.0))
    throw InvalidInput("path-loss slopes must be non-negative");
  if (user_link_extra_loss_dB && !std::isfinite(*user_link_extra_loss_dB))
    throw InvalidInput("user_link_extra_loss_dB must be finite");
  if (rooftop_height_m <= user_height_m && !user_link_extra_loss_dB)
    throw InvalidInput("rooftop_height_m must exceed user_height_m");
}

double ScenarioConfig::noise_dBm() const {
  return noise_power_dBm ? *noise_power_dBm
                         : noise_psd_dBm_per_Hz + 10.0 * std::log10(channel_bandwidth_kHz * 1e3);
}

double ScenarioConfig::intercept_dB() const {
  return path_loss_intercept_dB ? *path_loss_intercept_dB : free_space_loss_dB(1e-3, frequency_GHz);
}

double ScenarioConfig::user_extra_loss_dB() const {
  return user_link_extra_loss_dB ? *user_link_extra_loss_dB : rooftop_to_street_loss_dB(*this);
}

double ScenarioConfig::tx_power_mW() const { return std::pow(10.0, tx_power_dBm / 10.0); }
double ScenarioConfig::noise_mW() const { return std::pow(10.0, noise_dBm() / 10.0); }

double free_space_loss_dB(double distance_km, double frequency_GHz) {
  constexpr double kLight = 299'792'458.0;
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_km * 1e3 * frequency_GHz * 1e9 / kLight);
}

double rooftop_to_street_loss_dB(const ScenarioConfig& cfg) {
  const double phi = cfg.road_orientation_deg;
  double orientation;
  if (phi < 35.0) orientation = -10.0 + 0.354 * phi;
  else if (phi < 55.0) orientation = 2.5 + 0.075 * (phi - 35.0);
  else orientation = 4.0 - 0.114 * (phi - 55.0);
  return -16.9 - 10.0 * std::log10(cfg.street_width_m) + 10.0 * std::log10(cfg.frequency_GHz * 1e3) +
         20.0 * std::log10(cfg.rooftop_height_m - cfg.user_height_m) + orientation;
}

double path_loss_dB(double d, LinkKind, const ScenarioConfig& cfg) {
  if (!(d >= 0.0)) throw InvalidInput("distance must be non-negative");
  const double d0 = cfg.path_loss_breakpoint_km;
  return cfg.intercept_dB() + cfg.path_loss_near_slope_dB_per_km * std::min(d, d0) +
         cfg.path_loss_far_slope_dB_per_km * std::max(0.0, d - d0);
}

double link_loss_dB(double d, LinkKind kind, const ScenarioConfig& cfg) {
  const double extra = kind == LinkKind::bs_relay ? 0.0 : cfg.user_extra_loss_dB();
  return path_loss_dB(d, kind, cfg) + extra;
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<Point> relay_ring(const ScenarioConfig& cfg) {
  const double radius = cfg.relay_ring_fraction * cfg.cell_radius_km;
  std::vector<Point> out;
  for (int j = 0; j < cfg.num_relays; ++j) {
    const double angle = std::numbers::pi / 4.0 + 2.0 * std::numbers::pi * j / cfg.num_relays;
    out.push_back({radius * std::cos(angle), radius * std::sin(angle)});
  }
  return out;
}

std::vector<Point> draw_users(int count, double inner_km, double outer_km, Rng& rng) {
  std::uniform_real_distribution<double> area(inner_km * inner_km, outer_km * outer_km);
  std::uniform_real_distribution<double> turn(0.0, 2.0 * std::numbers::pi);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double r = std::sqrt(area(rng));
    const double a = turn(rng);
    out.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

int users_in_annulus(const ScenarioConfig& cfg) {
  const double r = cfg.cell_radius_km;
  const double area = std::numbers::pi * (r * r - 0.25 * r * r);
  return std::max(1, static_cast<int>(std::lround(cfg.user_density_per_km2 * area)));
}

namespace {

double shadowed(double loss_dB, double sigma_dB, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s = sigma_dB > 0.0 ? sigma_dB * normal(rng) : 0.0;
  return std::pow(10.0, -(loss_dB + s) / 10.0);
}

}  // namespace

LargeScale draw_large_scale(const Placement& pl, const ScenarioConfig& cfg, Rng& rng) {
  const auto J = static_cast<Eigen::Index>(pl.relays.size());
  const auto K = static_cast<Eigen::Index>(pl.users.size());
  const Point bs{};
  LargeScale out;
  out.bs_user.resize(K);
  out.relay_user.resize(J, K);
  out.bs_relay.resize(J);
  for (Eigen::Index k = 0; k < K; ++k)
    out.bs_user(k) = shadowed(link_loss_dB(distance(bs, pl.users[static_cast<std::size_t>(k)]),
                                           LinkKind::bs_user, cfg),
                              cfg.shadowing_sigma_dB, rng);
  for (Eigen::Index j = 0; j < J; ++j)
    out.bs_relay(j) = shadowed(link_loss_dB(distance(bs, pl.relays[static_cast<std::size_t>(j)]),
                                            LinkKind::bs_relay, cfg),
                               cfg.los_shadowing_sigma_dB, rng);
  for (Eigen::Index j = 0; j < J; ++j)
    for (Eigen::Index k = 0; k < K; ++k)
      out.relay_user(j, k) =
          shadowed(link_loss_dB(distance(pl.relays[static_cast<std::size_t>(j)], pl.users[static_cast<std::size_t>(k)]),
                                LinkKind::relay_user, cfg),
                   cfg.shadowing_sigma_dB, rng);
  return out;
}

SmallScale draw_small_scale(int relays, int users, int antennas, const ScenarioConfig& cfg, Rng& rng) {
  SmallScale out;
  out.bs_user.resize(antennas, users);
  out.relay_user.resize(relays, users);
  out.bs_relay.resize(relays);
  if (!cfg.fading) {
    out.bs_user.setConstant(std::complex<double>(1.0, 0.0));
    out.relay_user.setOnes();
    out.bs_relay.setOnes();
    return out;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double half = std::sqrt(0.5);
  for (int k = 0; k < users; ++k)
    for (int a = 0; a < antennas; ++a) {
      const double re = normal(rng);
      const double im = normal(rng);
      out.bs_user(a, k) = std::complex<double>(half * re, half * im);
    }
  const double K = std::pow(10.0, cfg.rician_K_dB / 10.0);
  const double los = std::sqrt(K / (K + 1.0));
  const double scatter = std::sqrt(1.0 / (2.0 * (K + 1.0)));
  for (int j = 0; j < relays; ++j) {
    const double re = los + scatter * normal(rng);
    const double im = scatter * normal(rng);
    out.bs_relay(j) = re * re + im * im;
  }
  for (int j = 0; j < relays; ++j)
    for (int k = 0; k < users; ++k) out.relay_user(j, k) = expo(rng);
  return out;
}

ChannelInstance compose_instance(const LargeScale& large, const SmallScale& small, const ScenarioConfig& cfg) {
  const auto J = large.relay_user.rows();
  const auto K = large.relay_user.cols();
  const double per_noise = cfg.tx_power_mW() / cfg.noise_mW();
  const double bs_share = per_noise / static_cast<double>(std::max<Eigen::Index>(K, 1));
  const double relay_share = per_noise / static_cast<double>(std::max<Eigen::Index>(J, 1));
  Eigen::VectorXd c(K);
  for (Eigen::Index k = 0; k < K; ++k) c(k) = bs_share * large.bs_user(k) * std::norm(small.bs_user(0, k));
  Eigen::MatrixXd p = relay_share * large.relay_user.cwiseProduct(small.relay_user);
  Eigen::VectorXd sr = bs_share * large.bs_relay.cwiseProduct(small.bs_relay);
  return ChannelInstance(std::move(c), std::move(p), std::move(sr));
}

ChannelInstance draw_instance(const Placement& placement, const ScenarioConfig& config, Rng& rng) {
  const LargeScale large = draw_large_scale(placement, config, rng);
  const SmallScale small = draw_small_scale(static_cast<int>(placement.relays.size()),
                                            static_cast<int>(placement.users.size()), 1, config, rng);
  return compose_instance(large, small, config);
}

ChannelInstance draw_synthetic_rayleigh(int relays, int users, double snr_total_linear, Rng& rng) {
  if (relays < 1 || users < 1 || !(snr_total_linear > 0.0))
    throw InvalidInput("synthetic instance needs J, K >= 1 and a positive SNR");
  std::exponential_distribution<double> expo(1.0);
  Eigen::MatrixXd p(relays, users);
  for (int j = 0; j < relays; ++j)
    for (int k = 0; k < users; ++k) p(j, k) = snr_total_linear / relays * expo(rng);
  Eigen::VectorXd c(users);
  for (int k = 0; k < users; ++k) c(k) = snr_total_linear / users * expo(rng);
  return ChannelInstance(std::move(c), std::move(p));
}

}  // namespace relaysel
