/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pacer/trace.hpp"

using namespace pacer;

namespace {

CurrentTrace constant_trace(std::size_t n, double voltage, double current,
                            DeviceState state = DeviceState::Wait) {
  CurrentTrace t;
  t.samples.assign(n, Sample{voltage, current, state});
  return t;
}

CurrentTrace random_trace(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> volt(1.8, 5.0);
  std::uniform_real_distribution<double> cur(-0.001, 0.05);
  std::uniform_int_distribution<int> state(0, 3);
  CurrentTrace t;
  t.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.samples.push_back(
        Sample{volt(eng), cur(eng), static_cast<DeviceState>(state(eng))});
  }
  return t;
}

// Independent oracle: plain summation in extended precision.
double plain_sum_energy(const CurrentTrace& t, std::size_t begin, std::size_t end) {
  long double sum = 0.0L;
  for (std::size_t n = begin; n < end; ++n) {
    const Sample& s = t.samples[n];
    sum += static_cast<long double>(s.voltage_v) * s.current_a * t.sample_period_s;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("instantaneous power is the direct product") {
  CHECK(instantaneous_power_w({3.3, 0.010, DeviceState::Wait}) == doctest::Approx(0.033));
  CHECK(instantaneous_power_w({0.0, 0.5, DeviceState::Idle}) == 0.0);
  CHECK(instantaneous_power_w({1.8, 0.002, DeviceState::Active}) == doctest::Approx(0.0036));
}

TEST_CASE("energy of a constant trace matches the closed form") {
  const CurrentTrace t = constant_trace(1000, 3.3, 0.010);
  CHECK(energy_integrate_j(t) == doctest::Approx(33e-6).epsilon(1e-12));
}

TEST_CASE("empty range integrates to zero, out-of-range throws") {
  const CurrentTrace t = constant_trace(100, 3.3, 0.010);
  CHECK(energy_integrate_j(t, 40, 40) == 0.0);
  CHECK_THROWS_AS(energy_integrate_j(t, 0, 101), std::out_of_range);
  CHECK_THROWS_AS(energy_integrate_j(t, 60, 40), std::out_of_range);
}

TEST_CASE("energy integration agrees with a plain-summation oracle") {
  const CurrentTrace t = random_trace(100000, 7);
  const double expect = plain_sum_energy(t, 0, t.size());
  const double got = energy_integrate_j(t);
  CHECK(std::abs(got - expect) <= 1e-9 * std::abs(expect));
}

TEST_CASE("energy is additive across any split") {
  const CurrentTrace t = random_trace(20000, 11);
  const double whole = energy_integrate_j(t);
  std::mt19937_64 eng(13);
  std::uniform_int_distribution<std::size_t> split(0, t.size());
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = split(eng);
    const double parts = energy_integrate_j(t, 0, k) + energy_integrate_j(t, k, t.size());
    CHECK(std::abs(parts - whole) <= 1e-12 * std::abs(whole));
  }
}

TEST_CASE("scaling every current scales every energy") {
  CurrentTrace t = random_trace(5000, 17);
  const double base = energy_integrate_j(t);
  const double c = 3.7;
  for (Sample& s : t.samples) s.current_a *= c;
  CHECK(std::abs(energy_integrate_j(t) - c * base) <= 1e-12 * std::abs(c * base));
}

TEST_CASE("per-state energies partition the total") {
  SUBCASE("single-state trace") {
    const CurrentTrace t = constant_trace(5000, 3.3, 0.002, DeviceState::Wait);
    const StateEnergy se = energy_by_state(t);
    CHECK(se.wait_j == doctest::Approx(energy_integrate_j(t)).epsilon(1e-12));
    CHECK(se.idle_j == 0.0);
    CHECK(se.active_j == 0.0);
    CHECK(se.verify_j == 0.0);
  }
  SUBCASE("two states split 50/50 at constant power") {
    CurrentTrace t = constant_trace(4000, 3.3, 0.005, DeviceState::Active);
    for (std::size_t n = 2000; n < 4000; ++n) t.samples[n].state = DeviceState::Wait;
    const StateEnergy se = energy_by_state(t);
    CHECK(se.active_j == doctest::Approx(se.total_j / 2).epsilon(1e-12));
    CHECK(se.wait_j == doctest::Approx(se.total_j / 2).epsilon(1e-12));
  }
  SUBCASE("total equals the full integral on random traces") {
    const CurrentTrace t = random_trace(30000, 23);
    const StateEnergy se = energy_by_state(t);
    const double whole = energy_integrate_j(t);
    CHECK(std::abs(se.total_j - whole) <= 1e-12 * std::abs(whole));
    CHECK(se.total_j ==
          doctest::Approx(se.idle_j + se.active_j + se.wait_j + se.verify_j).epsilon(1e-15));
  }
}

TEST_CASE("window-1 filter is the identity") {
  const CurrentTrace t = random_trace(2000, 29);
  const CurrentTrace f = filter_moving_average(t, 1);
  REQUIRE(f.size() == t.size());
  for (std::size_t n = 0; n < t.size(); ++n) {
    CHECK(f.samples[n].current_a == t.samples[n].current_a);
    CHECK(f.samples[n].voltage_v == t.samples[n].voltage_v);
    CHECK(f.samples[n].state == t.samples[n].state);
  }
}

TEST_CASE("constant input passes through any window") {
  const CurrentTrace t = constant_trace(3000, 3.3, 0.0042);
  const CurrentTrace f = filter_moving_average(t, 50);
  for (std::size_t n = 0; n < t.size(); ++n) {
    CHECK(f.samples[n].current_a == doctest::Approx(0.0042).epsilon(1e-12));
  }
}

TEST_CASE("a step settles exactly one window after the edge") {
  CurrentTrace t = constant_trace(500, 3.3, 0.0);
  const std::size_t step = 200;
  for (std::size_t n = step; n < t.size(); ++n) t.samples[n].current_a = 1e-3;
  const CurrentTrace f = filter_moving_average(t, 50);
  std::size_t first = t.size();
  for (std::size_t n = 0; n < t.size(); ++n) {
    if (f.samples[n].current_a >= 0.99e-3) {
      first = n;
      break;
    }
  }
  // 50th sample of the step is the first whose whole window sits above it.
  CHECK(first == step + 49);
}

TEST_CASE("filter output equals the direct windowed mean") {
  const CurrentTrace t = random_trace(4000, 31);
  const std::size_t w = 50;
  const CurrentTrace f = filter_moving_average(t, w);
  for (std::size_t n = 0; n < t.size(); ++n) {
    const std::size_t lo = n + 1 >= w ? n + 1 - w : 0;
    double mean = 0.0;
    for (std::size_t k = lo; k <= n; ++k) mean += t.samples[k].current_a;
    mean /= static_cast<double>(n - lo + 1);
    CHECK(f.samples[n].current_a == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("filtering preserves the mean of long noisy traces") {
  std::mt19937_64 eng(37);
  std::normal_distribution<double> noise(0.0, 0.2e-3);
  CurrentTrace t;
  for (int n = 0; n < 2000; ++n) {
    t.samples.push_back(Sample{3.3, 2e-3 + noise(eng), DeviceState::Wait});
  }
  double raw = 0.0, filt = 0.0;
  const CurrentTrace f = filter_moving_average(t, 50);
  for (std::size_t n = 0; n < t.size(); ++n) {
    raw += t.samples[n].current_a;
    filt += f.samples[n].current_a;
  }
  raw /= static_cast<double>(t.size());
  filt /= static_cast<double>(t.size());
  CHECK(std::abs(filt - raw) <= 0.01 * raw);
}

TEST_CASE("zero filter window is rejected") {
  const CurrentTrace t = constant_trace(10, 3.3, 1e-3);
  CHECK_THROWS_AS(filter_moving_average(t, 0), std::invalid_argument);
  CHECK_THROWS_AS(MovingAverageFilter(0), std::invalid_argument);
}

TEST_CASE("state labels round-trip through their names") {
  for (auto s : {DeviceState::Idle, DeviceState::Active, DeviceState::Wait, DeviceState::Verify}) {
    CHECK(device_state_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(device_state_from_string("busy"), std::invalid_argument);
}
