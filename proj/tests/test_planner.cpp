#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spinchain/chain_model.hpp"
#include "spinchain/geodesic.hpp"
#include "spinchain/planner.hpp"

using namespace spinchain;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

chain::NormalizedChain hncaco(std::size_t ref) {
  return chain::normalize_chain(chain::ChainSpec{{91.0, 15.0, 55.0}}, ref);
}

std::vector<double> basis_start(std::size_t dim) {
  std::vector<double> x(dim, 0.0);
  x[0] = 1.0;
  return x;
}

// State after running only the first `count` schedule segments.
std::vector<double> partial_state(const pulse::PulseSchedule& schedule,
                                  const std::vector<double>& ratios, std::size_t count) {
  pulse::PulseSchedule prefix;
  for (std::size_t i = 0; i < count; ++i) prefix.segments.push_back(schedule.segments[i]);
  prefix.recompute_duration();
  std::vector<double> target(2 * ratios.size(), 0.0);
  target.back() = 1.0;
  return pulse::simulate_schedule(prefix, ratios, basis_start(2 * ratios.size()), target)
      .final_state;
}

}  // namespace

TEST_CASE("segment times") {
  // equal ratios: the canonical equal-coupling transfer
  CHECK(planner::segment_time({1, 0.0, kHalfPi, 1.0, 1.0}) ==
        doctest::Approx(2.72).epsilon(0.01 / 2.72));
  // beta 0 -> 0 degenerates to a great-circle arc at rate k_l
  CHECK(planner::segment_time({1, 0.0, 0.0, 2.0, 7.0}) ==
        doctest::Approx(kHalfPi / 2.0).epsilon(1e-9));
  // rescaling both couplings halves the time
  CHECK(planner::segment_time({1, 0.0, kHalfPi, 2.0, 2.0}) ==
        doctest::Approx(1.36).epsilon(0.005 / 1.36));
  // the rescaling identity holds exactly by construction
  const double lhs = 2.0 * planner::segment_time({1, 0.2, 1.0, 2.0, 5.0});
  const double rhs = planner::segment_time({1, 0.2, 1.0, 1.0, 2.5});
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("segment problems are validated") {
  CHECK_THROWS_AS(planner::segment_time({1, -0.1, 1.0, 1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(planner::segment_time({1, 0.0, 2.0, 1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(planner::segment_time({1, 0.0, 1.0, -1.0, 1.0}), std::domain_error);
}

TEST_CASE("dp_solve validates its inputs") {
  CHECK_THROWS_AS(planner::dp_solve(chain::normalize_chain(chain::ChainSpec{{10.0}}, 0), 17),
                  std::domain_error);
  CHECK_THROWS_AS(planner::dp_solve(hncaco(1), 5), std::domain_error);
}

TEST_CASE("three-spin chains reduce to a single segment") {
  const auto chain = chain::normalize_chain(chain::ChainSpec{{30.0, 60.0}}, 0);
  const auto plan = planner::dp_solve(chain, 17);
  REQUIRE(plan.betas.size() == 2);
  CHECK(plan.betas[0] == 0.0);
  CHECK(plan.betas[1] == kHalfPi);
  REQUIRE(plan.segment_times.size() == 1);
  CHECK(plan.total_time ==
        doctest::Approx(geo::minimal_time(2.0, 0.0, kHalfPi) / 1.0).epsilon(1e-12));
  // assembled schedule is the single reconstructed control
  const auto schedule = planner::assemble_chain_pulse(plan);
  const auto report = planner::simulate_chain(schedule, chain, basis_start(4));
  CHECK(report.fidelity >= 1.0 - 1e-5);
}

TEST_CASE("four-spin plan beats the hard-pulse baseline and verifies") {
  const auto chain = hncaco(1);
  const auto plan = planner::dp_solve(chain, 17);
  const double conventional = planner::conventional_chain_time(chain);
  CHECK(plan.total_time < conventional);
  CHECK(plan.total_time == doctest::Approx(plan.segment_times[0] + plan.segment_times[1])
                               .epsilon(1e-12));
  CHECK(plan.betas.front() == 0.0);
  CHECK(plan.betas.back() == kHalfPi);

  const auto schedule = planner::assemble_chain_pulse(plan);
  const auto report = planner::simulate_chain(schedule, chain, basis_start(6));
  CHECK(report.fidelity >= 1.0 - 1e-5);
  CHECK(std::abs(report.duration - plan.total_time) < 1e-9);
}

TEST_CASE("totals are invariant under the choice of reference coupling") {
  const auto plan_mid = planner::dp_solve(hncaco(1), 33);
  const auto plan_first = planner::dp_solve(hncaco(0), 33);
  const double seconds_mid = chain::dimensionless_to_seconds(plan_mid.total_time, hncaco(1));
  const double seconds_first = chain::dimensionless_to_seconds(plan_first.total_time, hncaco(0));
  CHECK(std::abs(seconds_mid - seconds_first) / seconds_mid < 1e-6);
}

TEST_CASE("doubling the grid leaves the refined total unchanged") {
  const auto coarse = planner::dp_solve(hncaco(1), 17);
  const auto fine = planner::dp_solve(hncaco(1), 33);
  CHECK(std::abs(coarse.total_time - fine.total_time) < 1e-5);
}

TEST_CASE("five-spin chains: stagewise recursion and segment decoupling") {
  const auto chain = chain::normalize_chain(chain::ChainSpec{{40.0, 40.0, 40.0, 40.0}}, 0);
  const auto plan = planner::dp_solve(chain, 9);
  CHECK(plan.betas.size() == 4);
  CHECK(plan.segment_times.size() == 3);
  CHECK(plan.total_time <= planner::conventional_chain_time(chain) + 1e-9);
  CHECK(plan.total_time >= 3.0 * kHalfPi - 1e-6);  // three quarter-turn lower bounds

  const auto schedule = planner::assemble_chain_pulse(plan);
  const auto report = planner::simulate_chain(schedule, chain, basis_start(8));
  CHECK(report.fidelity >= 1.0 - 1e-5);

  // after each segment the state lives entirely on the expected pair
  std::size_t consumed = 0;
  int done_segments = 0;
  std::vector<std::size_t> soft_positions;
  for (std::size_t i = 0; i < schedule.segments.size(); ++i)
    if (std::holds_alternative<pulse::SoftSegment>(schedule.segments[i]))
      soft_positions.push_back(i);
  REQUIRE(soft_positions.size() == 3);
  for (std::size_t seg = 0; seg + 1 < soft_positions.size(); ++seg) {
    consumed = soft_positions[seg] + 1;
    const auto state = partial_state(schedule, chain.ratios, consumed);
    ++done_segments;
    // active support after segment l is the pair (x_{2l+1}, x_{2l+2})
    for (std::size_t j = 0; j < state.size(); ++j) {
      const bool in_support = j == static_cast<std::size_t>(2 * done_segments) ||
                              j == static_cast<std::size_t>(2 * done_segments + 1);
      if (!in_support) CHECK(std::abs(state[j]) < 1e-4);
    }
  }
}

TEST_CASE("conventional chain sequence reaches the end basis state") {
  const auto chain = hncaco(1);
  const auto schedule = planner::conventional_chain_sequence(chain);
  CHECK(schedule.total_duration ==
        doctest::Approx(planner::conventional_chain_time(chain)).epsilon(1e-12));
  const auto report = planner::simulate_chain(schedule, chain, basis_start(6));
  CHECK(report.fidelity >= 1.0 - 1e-9);
}

TEST_CASE("free chain evolution rotates the leading pair at rate k1") {
  const auto chain = chain::normalize_chain(chain::ChainSpec{{20.0, 50.0, 30.0}}, 0);
  pulse::PulseSchedule schedule;
  pulse::SoftSegment wait;
  wait.control_index = 0;
  wait.sample_dt = kHalfPi / chain.ratios[0];
  wait.amplitudes = {0.0, 0.0};
  schedule.segments.emplace_back(wait);
  schedule.recompute_duration();
  std::vector<double> target(6, 0.0);
  target[1] = 1.0;
  const auto report =
      pulse::simulate_schedule(schedule, chain.ratios, basis_start(6), target);
  CHECK(report.fidelity >= 1.0 - 1e-9);
}

TEST_CASE("objective curve around the optimum") {
  const auto chain = hncaco(1);
  CHECK_THROWS_AS(planner::objective_curve(chain::normalize_chain(chain::ChainSpec{{1.0, 1.0}}, 0),
                                           {0.1}),
                  std::domain_error);
  CHECK_THROWS_AS(planner::objective_curve(chain, {2.0}), std::domain_error);

  // gamma = 0 degenerates the first segment to a great-circle arc
  const auto at_zero = planner::objective_curve(chain, {0.0});
  const double expected0 = kHalfPi / chain.ratios[0] +
                           planner::segment_time({2, 0.0, kHalfPi, 1.0, chain.ratios[2]});
  CHECK(at_zero[0].second == doctest::Approx(expected0).epsilon(1e-9));

  // the curve's sampled minimum brackets the refined DP angle
  std::vector<double> gammas;
  for (int i = 0; i <= 16; ++i) gammas.push_back(kHalfPi * i / 16.0);
  const auto curve = planner::objective_curve(chain, gammas);
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].second < curve[best].second) best = i;
  const auto plan = planner::dp_solve(chain, 17);
  const double cell = kHalfPi / 16.0;
  CHECK(std::abs(curve[best].first - plan.betas[1]) <= cell + 1e-12);
  // and the refined value is no worse than the sampled minimum
  CHECK(plan.total_time <= curve[best].second + 1e-9);
}

TEST_CASE("plan JSON carries the documented fields") {
  const auto chain = chain::normalize_chain(chain::ChainSpec{{30.0, 60.0}}, 0);
  const auto plan = planner::dp_solve(chain, 17);
  const std::string json = planner::plan_to_json(plan, chain);
  for (const char* key : {"\"betas\"", "\"segment_times\"", "\"total_time\"", "\"units\"",
                          "\"ref_hz\"", "\"total_seconds\""})
    CHECK(json.find(key) != std::string::npos);
  CHECK(json.find("1/J_ref") != std::string::npos);
}
