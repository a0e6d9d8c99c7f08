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

#include "relaysel/channel.hpp"

#include <cmath>
#include <numbers>

using namespace relaysel;

TEST_CASE("path-loss examples") {
  const ScenarioConfig cfg;
  const double pl0 = path_loss_dB(0.0, LinkKind::bs_user, cfg);
  CHECK(pl0 == doctest::Approx(20.0 * std::log10(4.0 * std::numbers::pi * 1.0 * 1e9 / 299792458.0)));
  CHECK(pl0 == doctest::Approx(32.44).epsilon(1e-3));
  CHECK(path_loss_dB(0.657, LinkKind::bs_user, cfg) - pl0 == doctest::Approx(13.14));
  CHECK(path_loss_dB(1.0, LinkKind::bs_user, cfg) - path_loss_dB(0.657, LinkKind::bs_user, cfg) ==
        doctest::Approx(0.343 * 38.0));
  for (LinkKind kind : {LinkKind::bs_relay, LinkKind::relay_user})
    CHECK(path_loss_dB(0.8, kind, cfg) == path_loss_dB(0.8, LinkKind::bs_user, cfg));
  CHECK_THROWS_AS(path_loss_dB(-1.0, LinkKind::bs_user, cfg), InvalidInput);
}

TEST_CASE("path loss is continuous with the configured slopes") {
  const ScenarioConfig cfg;
  const double h = 1e-6;
  double prev = path_loss_dB(0.0, LinkKind::bs_user, cfg);
  for (int i = 1; i <= 3000; ++i) {
    const double d = i * 1e-3;
    const double pl = path_loss_dB(d, LinkKind::bs_user, cfg);
    CHECK(pl >= prev);
    CHECK(pl - prev <= 38.0 * 1e-3 + 1e-9);
    prev = pl;
  }
  for (double d : {0.1, 0.3, 0.6}) {
    const double slope = (path_loss_dB(d + h, LinkKind::bs_user, cfg) - path_loss_dB(d, LinkKind::bs_user, cfg)) / h;
    CHECK(slope == doctest::Approx(20.0).epsilon(1e-5));
  }
  for (double d : {0.7, 1.5, 2.9}) {
    const double slope = (path_loss_dB(d + h, LinkKind::bs_user, cfg) - path_loss_dB(d, LinkKind::bs_user, cfg)) / h;
    CHECK(slope == doctest::Approx(38.0).epsilon(1e-5));
  }
}

TEST_CASE("street-level links carry the rooftop-to-street loss") {
  ScenarioConfig cfg;
  const double extra = rooftop_to_street_loss_dB(cfg);
  CHECK(extra == doctest::Approx(31.42).epsilon(1e-3));
  CHECK(link_loss_dB(0.5, LinkKind::bs_relay, cfg) == path_loss_dB(0.5, LinkKind::bs_relay, cfg));
  CHECK(link_loss_dB(0.5, LinkKind::relay_user, cfg) == doctest::Approx(path_loss_dB(0.5, LinkKind::relay_user, cfg) + extra));
  cfg.user_link_extra_loss_dB = 0.0;
  CHECK(link_loss_dB(0.5, LinkKind::bs_user, cfg) == path_loss_dB(0.5, LinkKind::bs_user, cfg));
}

TEST_CASE("noise and power conversions") {
  ScenarioConfig cfg;
  CHECK(cfg.noise_dBm() == doctest::Approx(-174.0 + 10.0 * std::log10(200e3)));
  CHECK(cfg.noise_dBm() == doctest::Approx(-121.0).epsilon(1e-3));
  cfg.noise_power_dBm = -120.0;
  CHECK(cfg.noise_dBm() == -120.0);
  CHECK(cfg.tx_power_mW() == doctest::Approx(100.0));
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.relay_ring_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.cell_radius_km = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg = {};
  cfg.num_relays = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

TEST_CASE("placement geometry") {
  ScenarioConfig cfg;
  const auto relays = relay_ring(cfg);
  REQUIRE(relays.size() == 4);
  const double a = 0.4 / std::sqrt(2.0);
  CHECK(relays[0].x == doctest::Approx(a));
  CHECK(relays[0].y == doctest::Approx(a));
  CHECK(relays[2].x == doctest::Approx(-a));
  CHECK(relays[2].y == doctest::Approx(-a));
  Rng rng = make_rng(1, {1});
  for (const Point& u : draw_users(2000, 0.5, 1.0, rng)) {
    const double r = std::hypot(u.x, u.y);
    CHECK(r >= 0.5 - 1e-12);
    CHECK(r <= 1.0 + 1e-12);
  }
  for (auto [radius, users] : {std::pair{1.0, 23}, {2.0, 90}, {3.0, 203}}) {
    cfg.cell_radius_km = radius;
    CHECK(users_in_annulus(cfg) == users);
  }
}

TEST_CASE("degenerate fading gives deterministic path gains") {
  ScenarioConfig cfg;
  cfg.shadowing_sigma_dB = 0.0;
  cfg.los_shadowing_sigma_dB = 0.0;
  cfg.fading = false;
  const Placement pl{relay_ring(cfg), {{0.6, 0.0}, {0.0, -0.9}}};
  Rng rng = make_rng(4, {});
  const ChannelInstance inst = draw_instance(pl, cfg, rng);
  const double snr = cfg.tx_power_mW() / cfg.noise_mW();
  CHECK(inst.direct()(0) ==
        doctest::Approx(snr / 2.0 * std::pow(10.0, -link_loss_dB(0.6, LinkKind::bs_user, cfg) / 10.0)));
  const double d = distance(pl.relays[1], pl.users[1]);
  CHECK(inst.relay()(1, 1) ==
        doctest::Approx(snr / 4.0 * std::pow(10.0, -link_loss_dB(d, LinkKind::relay_user, cfg) / 10.0)));
  CHECK((*inst.source_relay())(2) ==
        doctest::Approx(snr / 2.0 * std::pow(10.0, -link_loss_dB(0.4, LinkKind::bs_relay, cfg) / 10.0)));
}

TEST_CASE("draws are reproducible per stream") {
  const ScenarioConfig cfg;
  const Placement pl{relay_ring(cfg), {{0.6, 0.1}, {-0.3, 0.8}, {0.2, -0.7}}};
  Rng a = make_rng(9, {1, 2});
  Rng b = make_rng(9, {1, 2});
  Rng c = make_rng(9, {1, 3});
  const auto x = draw_instance(pl, cfg, a);
  const auto y = draw_instance(pl, cfg, b);
  const auto z = draw_instance(pl, cfg, c);
  CHECK(x.relay() == y.relay());
  CHECK(x.direct() == y.direct());
  CHECK(x.relay() != z.relay());
}

TEST_CASE("small-scale fades have unit mean") {
  const ScenarioConfig cfg;
  Rng rng = make_rng(5, {});
  const int n = 100000;
  const SmallScale s = draw_small_scale(n, 1, 1, cfg, rng);
  CHECK(s.relay_user.mean() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(s.bs_relay.mean() == doctest::Approx(1.0).epsilon(0.01));
  const SmallScale t = draw_small_scale(1, n, 1, cfg, rng);
  CHECK(t.bs_user.cwiseAbs2().mean() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("shadowing and fading are independent across links") {
  const ScenarioConfig cfg;
  const int n = 10000;
  Eigen::VectorXd x(n), y(n), z(n);
  const Placement pl{relay_ring(cfg), {{0.7, 0.0}}};
  for (int i = 0; i < n; ++i) {
    Rng rng = make_rng(6, {static_cast<std::uint64_t>(i)});
    const ChannelInstance inst = draw_instance(pl, cfg, rng);
    x(i) = std::log(inst.relay()(0, 0));
    y(i) = std::log(inst.relay()(1, 0));
    z(i) = std::log(inst.direct()(0));
  }
  auto corr = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::ArrayXd da = a.array() - a.mean(), db = b.array() - b.mean();
    return (da * db).sum() / std::sqrt((da * da).sum() * (db * db).sum());
  };
  CHECK(std::abs(corr(x, y)) < 0.02);
  CHECK(std::abs(corr(x, z)) < 0.02);
}

TEST_CASE("synthetic Rayleigh instances") {
  Rng rng = make_rng(8, {});
  const int J = 4;
  const ChannelInstance inst = draw_synthetic_rayleigh(J, 25000, 1000.0, rng);
  CHECK(inst.relay().mean() == doctest::Approx(1000.0 / J).epsilon(0.02));
  CHECK(inst.direct().mean() == doctest::Approx(1000.0 / 25000).epsilon(0.02));
  CHECK_FALSE(inst.has_source_relay());
  Rng a = make_rng(8, {1}), b = make_rng(8, {1});
  CHECK(draw_synthetic_rayleigh(2, 3, 10.0, a).relay() == draw_synthetic_rayleigh(2, 3, 10.0, b).relay());
  CHECK_THROWS_AS(draw_synthetic_rayleigh(0, 3, 10.0, a), InvalidInput);
}
