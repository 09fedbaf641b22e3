#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "spinchain/geodesic.hpp"
#include "spinchain/ode.hpp"

using namespace spinchain;
namespace gx = geo::idx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

// Independent fixed-step midpoint (RK2) integrator for the pendulum; kept
// deliberately separate from the production RK4 path.
std::array<double, 2> pendulum_midpoint_oracle(double theta0, double theta_dot0, double a,
                                               double t_end, double h) {
  double th = theta0, td = theta_dot0;
  const auto n = static_cast<long>(std::llround(t_end / h));
  for (long i = 0; i < n; ++i) {
    const double th_mid = th + 0.5 * h * td;
    const double td_mid = td + 0.5 * h * a * std::sin(th) * std::cos(th);
    th += h * td_mid;
    td += h * a * std::sin(th_mid) * std::cos(th_mid);
  }
  return {th, td};
}

// Time at which the pendulum flow from (theta0, theta_dot0) first reaches
// theta_target, via the event machinery on a shifted copy of the system.
double pendulum_arrival_time(double theta0, double theta_dot0, double a, double theta_target,
                             double horizon) {
  auto shifted = [a, theta_target](double, const std::array<double, 2>& x,
                                   std::array<double, 2>& d) {
    d[0] = x[1];
    d[1] = a * std::sin(x[0] + theta_target) * std::cos(x[0] + theta_target);
  };
  auto hit = ode::integrate_until_sign_change(shifted,
                                              std::array<double, 2>{theta0 - theta_target,
                                                                    theta_dot0},
                                              0, horizon, 1e-4, 1e-10);
  REQUIRE(hit.has_value());
  return hit->time;
}

double eq5_rate(double k, const geo::JointState& s) {
  return (k * s[gx::r3] * std::cos(s[gx::theta]) + s[gx::r1] * std::sin(s[gx::theta])) /
         s[gx::r2];
}

void check_solution_invariants(const geo::GeodesicSolution& sol) {
  const double a = geo::pendulum_coefficient(sol.k);
  CHECK(geo::max_norm_drift(sol.trajectory) < 1e-9);
  CHECK(geo::max_conserved_drift(sol.trajectory, a) < 1e-8);

  // boundary states
  const auto& first = sol.trajectory.front();
  const auto& last = sol.trajectory.back();
  CHECK(std::abs(first[gx::r1] - std::cos(sol.alpha)) < 1e-12);
  CHECK(std::abs(first[gx::r2] - std::sin(sol.alpha)) < 1e-12);
  CHECK(std::abs(first[gx::r3]) < 1e-12);
  CHECK(std::abs(last[gx::r1]) < 1e-4);
  CHECK(std::abs(last[gx::r2] - std::cos(sol.beta)) < 1e-4);
  CHECK(std::abs(last[gx::r3] - std::sin(sol.beta)) < 1e-4);

  // geodesic speed with flow-evaluated derivatives
  for (const auto& s : sol.trajectory.states) {
    const double r1dot = -std::cos(s[gx::theta]) * s[gx::r2];
    const double r3dot = sol.k * std::sin(s[gx::theta]) * s[gx::r2];
    const double residual = sol.k * sol.k * r1dot * r1dot + r3dot * r3dot -
                            sol.k * sol.k * s[gx::r2] * s[gx::r2];
    CHECK(std::abs(residual) < 1e-7);
  }

  // the geodesic condition proper: theta_dot matches the state-derived rate
  // away from the r2 = 0 endpoints
  for (const auto& s : sol.trajectory.states)
    if (s[gx::r2] > 0.2) CHECK(std::abs(s[gx::theta_dot] - eq5_rate(sol.k, s)) < 1e-7);
}

}  // namespace

TEST_CASE("pendulum with a=0 rotates uniformly") {
  const auto traj = geo::pendulum_flow(0.0, 0.7, 0.0, 2.0, 1e-4);
  for (std::size_t i = 0; i < traj.size(); ++i)
    CHECK(traj.states[i][0] == doctest::Approx(0.7 * traj.times[i]).epsilon(1e-12));
}

TEST_CASE("pendulum fixed point at theta = pi/2") {
  for (double a : {-0.5, 3.0, 99.0}) {
    const auto traj = geo::pendulum_flow(kHalfPi, 0.0, a, 3.0, 1e-3);
    for (const auto& s : traj.states) CHECK(std::abs(s[0] - kHalfPi) < 1e-12);
  }
}

TEST_CASE("pendulum flow against the independent midpoint oracle") {
  const double a = 3.0;
  const auto traj = geo::pendulum_flow(0.0, 2.0, a, 1.0, 1e-4);
  const auto oracle = pendulum_midpoint_oracle(0.0, 2.0, a, 1.0, 1e-6);
  CHECK(traj.back()[0] == doctest::Approx(oracle[0]).epsilon(1e-9));
  CHECK(traj.back()[1] == doctest::Approx(oracle[1]).epsilon(1e-9));
  // conserved constant c = theta_dot^2 + a cos^2 theta = 7
  for (const auto& s : traj.states) {
    const double c = s[1] * s[1] + a * std::cos(s[0]) * std::cos(s[0]);
    CHECK(std::abs(c - 7.0) < 1e-8);
  }
}

TEST_CASE("reduced flow with theta = 0 keeps r3 frozen") {
  const auto theta = geo::pendulum_flow(0.0, 0.0, 5.0, kHalfPi, 1e-4);
  const auto traj = geo::reduced_flow(2.0, 0.0, theta);
  CHECK(std::abs(traj.back()[0]) < 1e-9);
  CHECK(std::abs(traj.back()[1] - 1.0) < 1e-9);
  for (const auto& s : traj.states) CHECK(s[2] == 0.0);
}

TEST_CASE("reduced flow with theta = pi/2 rotates (r2, r3) at rate k") {
  const double k = 3.0;
  const auto theta = geo::pendulum_flow(kHalfPi, 0.0, geo::pendulum_coefficient(k), 1.0, 1e-4);
  const auto traj = geo::reduced_flow(k, kHalfPi, theta);
  CHECK(std::abs(traj.back()[0]) < 1e-12);  // r1 frozen at cos(pi/2)
  CHECK(traj.back()[1] == doctest::Approx(std::cos(k * 1.0)).epsilon(1e-9));
  CHECK(traj.back()[2] == doctest::Approx(std::sin(k * 1.0)).epsilon(1e-9));
}

TEST_CASE("reduced flow preserves the unit norm") {
  const auto theta = geo::pendulum_flow(0.0, 0.6, geo::pendulum_coefficient(1.8), 2.5, 1e-4);
  const auto traj = geo::reduced_flow(1.8, 0.4, theta);
  for (const auto& s : traj.states)
    CHECK(std::abs(std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) - 1.0) < 1e-9);
}

TEST_CASE("elliptic time with a=0 is the angle over the rate") {
  const double c = 1.69;  // rate 1.3
  CHECK(geo::elliptic_time(0.2, 1.0, c, 0.0) == doctest::Approx(0.8 / 1.3).epsilon(1e-12));
  CHECK(geo::elliptic_time(0.5, 0.5, c, 0.0) == 0.0);
}

TEST_CASE("elliptic time matches the pendulum flow on a monotone branch") {
  const double a = 3.0, c = 7.0;  // theta_dot0 = 2 at theta0 = 0
  const double t_ode = pendulum_arrival_time(0.0, 2.0, a, 1.0, 5.0);
  const double t_quad = geo::elliptic_time(0.0, 1.0, c, a);
  CHECK(std::abs(t_quad - t_ode) < 1e-6);
}

TEST_CASE("elliptic time rejects branches with an interior turning point") {
  // a=4, c=2: turning point where cos^2 = 1/2, inside (0.2, 1.4)
  CHECK_THROWS_WITH_AS(geo::elliptic_time(0.2, 1.4, 2.0, 4.0),
                       doctest::Contains("turning point"), std::domain_error);
}

TEST_CASE("equal couplings: the known constant-rate transfer") {
  const auto sol = geo::shoot(1.0, {0.0, kHalfPi});
  CHECK(std::abs(sol.duration - std::sqrt(3.0) * kPi / 2.0) < 1e-6);
  CHECK(sol.duration == doctest::Approx(2.72).epsilon(0.01 / 2.72));
  CHECK(sol.duration / kPi == doctest::Approx(0.866).epsilon(0.005));
  CHECK(sol.theta_dot0 == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(sol.c == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  // for k=1 the pendulum rate stays constant
  for (const auto& s : sol.trajectory.states)
    CHECK(std::abs(s[gx::theta_dot] - sol.theta_dot0) < 1e-7);
  check_solution_invariants(sol);
}

TEST_CASE("beta = 0 is the great-circle quarter turn for any k") {
  for (double k : {1.0, 3.0}) {
    const auto sol = geo::shoot(k, {0.0, 0.0});
    CHECK(std::abs(sol.duration - kHalfPi) < 1e-6);
    for (const auto& s : sol.trajectory.states) CHECK(std::abs(s[gx::theta]) < 1e-9);
  }
}

TEST_CASE("equator start is a plain arc at rate k") {
  const auto sol = geo::shoot(2.0, {kHalfPi, 0.9});
  CHECK(sol.duration == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(sol.theta0 == doctest::Approx(kHalfPi).epsilon(1e-12));
}

TEST_CASE("solution invariants hold across ratios and endpoints") {
  check_solution_invariants(geo::shoot(2.0, {0.0, kHalfPi}));
  check_solution_invariants(geo::shoot(2.5, {0.3, 1.1}));
  check_solution_invariants(geo::shoot(3.6667, {0.6056, kHalfPi}));
  check_solution_invariants(geo::shoot(0.5, {0.0, kHalfPi}));  // mirrored route
}

TEST_CASE("minimal time values and bounds") {
  CHECK(geo::minimal_time(1.0, 0.0, kHalfPi) == doctest::Approx(2.72).epsilon(0.01 / 2.72));
  for (double k : {0.4, 1.0, 2.0, 7.0}) CHECK(geo::minimal_time(k, 0.0, 0.0) ==
                                              doctest::Approx(kHalfPi).epsilon(1e-9));
  for (double k : {1.0, 2.0, 5.0}) {
    const double t = geo::minimal_time(k, 0.0, kHalfPi);
    CHECK(t >= kHalfPi - 1e-6);
    CHECK(t <= kHalfPi + kHalfPi / k + 1e-6);
  }
}

TEST_CASE("memoized minimal time is reproducible") {
  const double first = geo::minimal_time(1.7, 0.2, 1.3);
  const double second = geo::minimal_time(1.7, 0.2, 1.3);
  CHECK(first == second);
}

TEST_CASE("mirrored and direct sub-unit solves agree") {
  const auto direct = geo::shoot_direct(0.5, {0.0, kHalfPi});
  const auto mirrored = geo::shoot(0.5, {0.0, kHalfPi});
  CHECK(std::abs(direct.duration - mirrored.duration) / direct.duration < 1e-5);
  CHECK(std::abs(mirrored.duration - 2.0 * geo::minimal_time(2.0, 0.0, kHalfPi)) < 1e-9);
  check_solution_invariants(mirrored);
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS(geo::shoot(0.0, {0.0, kHalfPi}), std::domain_error);
  CHECK_THROWS_AS(geo::shoot(-2.0, {0.0, kHalfPi}), std::domain_error);
  CHECK_THROWS_AS(geo::shoot(1.0, {0.0, 2.0}), std::domain_error);
  CHECK_THROWS_AS(geo::minimal_time(1.0, -0.1, 1.0), std::domain_error);
}

TEST_CASE("an exhausted bracket reports the scanned range") {
  geo::ShootOptions opts;
  opts.bracket_margin = 0.05;  // far below the admissible rate for k=1
  opts.scan_points = 8;
  try {
    geo::shoot(1.0, {0.0, kHalfPi}, opts);
    FAIL("expected shooting_error");
  } catch (const geo::shooting_error& e) {
    CHECK(e.bracket_lo == 0.0);
    CHECK(e.bracket_hi > 0.0);
    CHECK(std::string(e.what()).find("unreachable") != std::string::npos);
  }
}

TEST_CASE("randomized monotone branches: quadrature vs pendulum flow") {
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> a_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> c_excess(0.5, 5.0);
  std::uniform_real_distribution<double> th0_dist(0.0, 1.0);
  std::uniform_real_distribution<double> dth_dist(0.3, 1.2);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = a_dist(rng);
    const double c = std::max(0.0, a) + c_excess(rng);
    const double theta0 = th0_dist(rng);
    const double theta1 = theta0 + dth_dist(rng);
    const double rate0 = std::sqrt(c - a * std::cos(theta0) * std::cos(theta0));
    const double t_ode = pendulum_arrival_time(theta0, rate0, a, theta1, 20.0);
    const double t_quad = geo::elliptic_time(theta0, theta1, c, a);
    CHECK(std::abs(t_quad - t_ode) < 1e-6);
  }
}
