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

#include "relaysel/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <vector>

namespace relaysel {

using Rng = std::mt19937_64;

/// Generator seeded from a root seed and a path of stream ids, so every
/// (trial, set, fade, ...) owns an independent, order-free substream.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

struct ScenarioConfig {
  double cell_radius_km = 1.0;
  double relay_ring_fraction = 0.4;
  int num_relays = 4;
  double bs_height_m = 50.0;
  double relay_height_m = 50.0;
  double user_height_m = 1.5;
  double rooftop_height_m = 30.0;
  double frequency_GHz = 1.0;
  double building_spacing_m = 50.0;
  double street_width_m = 12.0;
  double road_orientation_deg = 90.0;
  double tx_power_dBm = 20.0;
  double noise_psd_dBm_per_Hz = -174.0;
  double channel_bandwidth_kHz = 200.0;
  double shadowing_sigma_dB = 8.0;       // links without line of sight
  double los_shadowing_sigma_dB = 3.4;   // BS-relay link
  double rician_K_dB = 10.0;
  double user_density_per_km2 = 30.0 / 3.14159265358979323846;
  std::uint64_t seed = 1;

  std::optional<double> noise_power_dBm;         // overrides PSD * bandwidth
  std::optional<double> path_loss_intercept_dB;  // default: free space at 1 m
  double path_loss_breakpoint_km = 0.657;
  double path_loss_near_slope_dB_per_km = 20.0;
  double path_loss_far_slope_dB_per_km = 38.0;
  std::optional<double> user_link_extra_loss_dB;  // default: rooftop-to-street diffraction
  bool fading = true;                              // false: unit small-scale gains

  void validate() const;

  double noise_dBm() const;
  double intercept_dB() const;
  double user_extra_loss_dB() const;
  double tx_power_mW() const;
  double noise_mW() const;
};

enum class LinkKind { bs_relay, bs_user, relay_user };

/// Free-space loss 20 log10(4 pi d f / c).
double free_space_loss_dB(double distance_km, double frequency_GHz);

/// Rooftop-to-street diffraction loss of the Walfisch-Ikegami model for the
/// configured street width, rooftop and user heights, frequency and road
/// orientation.
double rooftop_to_street_loss_dB(const ScenarioConfig& config);

/// Piecewise-linear distance law PL0 + s1 min(d, d0) + s2 max(0, d - d0),
/// identical for every link kind.
double path_loss_dB(double distance_km, LinkKind kind, const ScenarioConfig& config);

/// Path loss plus the extra loss carried by links that end at a street-level
/// user.
double link_loss_dB(double distance_km, LinkKind kind, const ScenarioConfig& config);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

/// BS at the origin, relays on a ring, users anywhere.
struct Placement {
  std::vector<Point> relays;
  std::vector<Point> users;
};

/// Relay j at angle 45 deg + 360 deg * j / J on the ring of radius
/// relay_ring_fraction * cell_radius_km.
std::vector<Point> relay_ring(const ScenarioConfig& config);

/// Users uniform over the annulus inner_km <= r <= outer_km.
std::vector<Point> draw_users(int count, double inner_km, double outer_km, Rng& rng);

/// Users in the outer half annulus of the cell, density times area rounded.
int users_in_annulus(const ScenarioConfig& config);

/// Path loss and shadowing of every link as linear power gains (no noise,
/// no transmit power).
struct LargeScale {
  Eigen::VectorXd bs_user;     // K
  Eigen::MatrixXd relay_user;  // J x K
  Eigen::VectorXd bs_relay;    // J
};

LargeScale draw_large_scale(const Placement& placement, const ScenarioConfig& config, Rng& rng);

/// Unit-mean small-scale fading. `bs_user` holds complex amplitudes for
/// `antennas` BS antennas; the single-antenna system uses antenna 0.
struct SmallScale {
  Eigen::MatrixXcd bs_user;    // antennas x K
  Eigen::MatrixXd relay_user;  // J x K power gains
  Eigen::VectorXd bs_relay;    // J power gains (Rician)
};

SmallScale draw_small_scale(int relays, int users, int antennas, const ScenarioConfig& config, Rng& rng);

/// SNRs of the relay system: the BS spends P/K on each user in the first
/// slot (direct link and relay links alike), every relay spends P/J in the
/// second slot.
ChannelInstance compose_instance(const LargeScale& large, const SmallScale& small,
                                 const ScenarioConfig& config);

ChannelInstance draw_instance(const Placement& placement, const ScenarioConfig& config, Rng& rng);

/// i.i.d. Rayleigh instance with total SNR split evenly over relays (p) and
/// users (c); no source-relay data.
ChannelInstance draw_synthetic_rayleigh(int relays, int users, double snr_total_linear, Rng& rng);

}  // namespace relaysel
