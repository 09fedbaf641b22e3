#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spinchain/ode.hpp"

using spinchain::ode::first_zero_crossing;
using spinchain::ode::integrate;
using spinchain::ode::integrate_until_sign_change;
using spinchain::ode::Trajectory;

namespace {

using Vec2 = std::array<double, 2>;
using Vec4 = std::array<double, 4>;

void planar_rotation(double, const Vec2& x, Vec2& d) {
  d[0] = -x[1];
  d[1] = x[0];
}

// B(u=0, k): the (x1, x2) plane rotates at unit rate, (x3, x4) at rate k.
struct FreeEvolution {
  double k;
  void operator()(double, const Vec4& x, Vec4& d) const {
    d[0] = -x[1];
    d[1] = x[0];
    d[2] = -k * x[3];
    d[3] = k * x[2];
  }
};

}  // namespace

TEST_CASE("planar rotation reaches quarter turn") {
  const auto traj = integrate(planar_rotation, Vec2{1.0, 0.0}, std::numbers::pi / 2.0, 1e-3);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-15));
  CHECK(std::abs(traj.back()[0] - 0.0) < 1e-9);
  CHECK(std::abs(traj.back()[1] - 1.0) < 1e-9);
}

TEST_CASE("free evolution decouples the leading plane for any k") {
  for (double k : {0.3, 1.0, 3.7}) {
    const auto traj = integrate(FreeEvolution{k}, Vec4{1.0, 0.0, 0.0, 0.0},
                                std::numbers::pi / 2.0, 1e-4);
    CHECK(std::abs(traj.back()[0]) < 1e-9);
    CHECK(std::abs(traj.back()[1] - 1.0) < 1e-9);
    CHECK(traj.back()[2] == 0.0);
    CHECK(traj.back()[3] == 0.0);
  }
}

TEST_CASE("zero-torque pendulum advances linearly") {
  auto field = [](double, const Vec2& x, Vec2& d) {
    d[0] = x[1];
    d[1] = 0.0;
  };
  const auto traj = integrate(field, Vec2{0.0, 1.0}, 1.0, 1e-3);
  CHECK(std::abs(traj.back()[0] - 1.0) < 1e-10);
}

TEST_CASE("fourth-order convergence on a smooth field") {
  auto terminal = [](double step) {
    return integrate(planar_rotation, Vec2{1.0, 0.0}, 1.0, step).back();
  };
  const Vec2 exact{std::cos(1.0), std::sin(1.0)};
  auto err = [&](double step) {
    const Vec2 x = terminal(step);
    return std::hypot(x[0] - exact[0], x[1] - exact[1]);
  };
  const double ratio = err(2e-2) / err(1e-2);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("norm is preserved under a skew generator") {
  const auto traj = integrate(FreeEvolution{2.5}, Vec4{0.5, 0.5, 0.5, 0.5}, 10.0, 1e-4);
  for (const auto& x : traj.states) {
    const double norm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    CHECK(std::abs(norm - 1.0) < 1e-9);
  }
}

TEST_CASE("trajectory times are strictly increasing and land on t_end") {
  const auto traj = integrate(planar_rotation, Vec2{1.0, 0.0}, 0.25 + 1e-5, 1e-3);
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
  CHECK(traj.times.back() == 0.25 + 1e-5);
}

TEST_CASE("integrate validates its arguments") {
  CHECK_THROWS_AS(integrate(planar_rotation, Vec2{1.0, 0.0}, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(integrate(planar_rotation, Vec2{1.0, 0.0}, -1.0, 1e-3), std::domain_error);
}

TEST_CASE("non-finite states are reported with the failure time") {
  auto blowup = [](double, const Vec2& x, Vec2& d) {
    d[0] = x[0] * x[0];
    d[1] = x[1] * x[1];
  };
  try {
    integrate(blowup, Vec2{1.0, 1.0}, 10.0, 1e-3);
    FAIL("expected integration_error");
  } catch (const spinchain::ode::integration_error& e) {
    CHECK(e.time > 0.0);
    CHECK(e.time <= 10.0);
  }
}

TEST_CASE("first zero crossing of a cosine-like component") {
  const auto traj = integrate(planar_rotation, Vec2{1.0, 0.0}, 3.0, 1e-3);
  const auto t = first_zero_crossing(traj, planar_rotation, 0, 1e-9);
  REQUIRE(t.has_value());
  CHECK(std::abs(*t - std::numbers::pi / 2.0) < 1e-9);
}

TEST_CASE("no crossing returns nothing") {
  auto field = [](double, const Vec2& x, Vec2& d) {
    d[0] = 0.0;
    d[1] = x[0];
  };
  const auto traj = integrate(field, Vec2{1.0, 0.0}, 5.0, 1e-2);
  CHECK_FALSE(first_zero_crossing(traj, field, 0, 1e-9).has_value());
}

TEST_CASE("component index is validated") {
  const auto traj = integrate(planar_rotation, Vec2{1.0, 0.0}, 1.0, 1e-3);
  CHECK_THROWS_AS(first_zero_crossing(traj, planar_rotation, 5, 1e-9), std::domain_error);
}

TEST_CASE("zero at t=0 counts only when the component is decreasing") {
  // x0 = (0, 1): component 0 starts at zero and rises.
  auto rising = integrate_until_sign_change(planar_rotation, Vec2{0.0, 1.0}, 0, 8.0, 1e-3, 1e-9);
  REQUIRE(rising.has_value());
  CHECK(rising->time > 1.0);  // the later genuine crossing, not t=0

  // x0 = (0, -1): component 0 starts at zero and falls.
  auto falling = integrate_until_sign_change(planar_rotation, Vec2{0.0, -1.0}, 0, 8.0, 1e-3, 1e-9);
  REQUIRE(falling.has_value());
  CHECK(falling->time == 0.0);
}

TEST_CASE("an exact zero sample is a crossing") {
  auto field = [](double, const Vec2& x, Vec2& d) {
    d[0] = -1.0;
    d[1] = x[1] * 0.0;
  };
  // reaches exactly 0 at t = 1 with step 0.25
  auto hit = integrate_until_sign_change(field, Vec2{1.0, 0.0}, 0, 2.0, 0.25, 1e-12);
  REQUIRE(hit.has_value());
  CHECK(hit->time == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("streaming and stored event search agree") {
  const auto traj = integrate(planar_rotation, Vec2{1.0, 0.0}, 3.0, 1e-3);
  const auto stored = first_zero_crossing(traj, planar_rotation, 0, 1e-10);
  const auto streamed =
      integrate_until_sign_change(planar_rotation, Vec2{1.0, 0.0}, 0, 3.0, 1e-3, 1e-10);
  REQUIRE(stored.has_value());
  REQUIRE(streamed.has_value());
  CHECK(*stored == streamed->time);
}
