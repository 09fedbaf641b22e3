#include "spinchain/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spinchain/numeric.hpp"

namespace spinchain::planner {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kGoldenTol = 1e-6;  // radians, refinement inside a grid cell

void check_angle(double v, const char* name) {
  if (!(v >= 0.0 && v <= kHalfPi))
    throw std::domain_error(std::string("planner: ") + name + " must lie in [0, pi/2]");
}

}  // namespace

void SegmentProblem::validate() const {
  check_angle(beta_in, "beta_in");
  check_angle(beta_out, "beta_out");
  if (!(k_l > 0.0) || !(k_lplus1 > 0.0))
    throw std::domain_error("planner: segment coupling ratios must be positive");
}

double segment_time(const SegmentProblem& p) {
  p.validate();
  return geo::minimal_time(p.k_lplus1 / p.k_l, p.beta_in, p.beta_out) / p.k_l;
}

ChainPlan dp_solve(const chain::NormalizedChain& chain, int grid_points, par::Exec exec) {
  const auto& ks = chain.ratios;
  const int n_spins = static_cast<int>(ks.size()) + 1;
  if (n_spins < 3) throw std::domain_error("dp_solve: need at least 3 spins");
  if (grid_points < 9) throw std::domain_error("dp_solve: grid_points must be >= 9");
  const int n_seg = n_spins - 2;
  const int m = grid_points;

  auto seg_T = [&ks](int l, double b_in, double b_out) {
    try {
      return geo::minimal_time(ks[l] / ks[l - 1], b_in, b_out) / ks[l - 1];
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "dp_solve: segment " << l << " (beta_in=" << b_in << ", beta_out=" << b_out
          << ") failed: " << e.what();
      throw std::runtime_error(msg.str());
    }
  };

  std::vector<double> grid(m);
  for (int j = 0; j < m; ++j)
    grid[j] = kHalfPi * static_cast<double>(j) / static_cast<double>(m - 1);

  // J[l][j]: minimal remaining time from angle grid[j] at stage l. Only the
  // terminal stage can be evaluated exactly at arbitrary angles; inner stages
  // are interpolated from their tables during refinement.
  std::vector<std::vector<double>> J(static_cast<std::size_t>(n_seg) + 1);
  J[n_seg].resize(m);
  par::for_each_index(m, exec, [&](int j) { J[n_seg][j] = seg_T(n_seg, grid[j], kHalfPi); });

  auto continuation = [&](int l, double eta) {
    if (l == n_seg) return seg_T(n_seg, eta, kHalfPi);
    return num::interp_uniform(J[l], kHalfPi, eta);
  };

  // Grid scan followed by golden-section refinement in the bracketing cell.
  auto refine_cell = [&](int l, double beta) {
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      const double v = seg_T(l, beta, grid[j]) + continuation(l + 1, grid[j]);
      if (v < best_v) {
        best_v = v;
        best = j;
      }
    }
    const double lo = grid[std::max(best - 1, 0)];
    const double hi = grid[std::min(best + 1, m - 1)];
    auto f = [&](double eta) { return seg_T(l, beta, eta) + continuation(l + 1, eta); };
    const double eta = num::golden_min(f, lo, hi, kGoldenTol);
    const double v = f(eta);
    return v <= best_v ? std::make_pair(eta, v) : std::make_pair(grid[best], best_v);
  };

  for (int l = n_seg - 1; l >= 2; --l) {
    J[l].resize(m);
    par::for_each_index(m, exec, [&](int j) { J[l][j] = refine_cell(l, grid[j]).second; });
  }

  ChainPlan plan;
  plan.ratios = ks;
  plan.betas.assign(static_cast<std::size_t>(n_seg) + 1, 0.0);
  plan.betas.back() = kHalfPi;
  for (int l = 1; l <= n_seg - 1; ++l)
    plan.betas[l] = refine_cell(l, plan.betas[l - 1]).first;

  plan.segment_times.resize(n_seg);
  plan.solutions.resize(n_seg);
  par::for_each_index(n_seg, exec, [&](int i) {
    const int l = i + 1;
    const double ratio = ks[l] / ks[l - 1];
    try {
      geo::GeodesicSolution sol = geo::shoot(ratio, {plan.betas[i], plan.betas[i + 1]});
      plan.segment_times[i] = sol.duration / ks[l - 1];
      plan.solutions[i] = std::move(sol);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "dp_solve: segment " << l << " (beta_in=" << plan.betas[i]
          << ", beta_out=" << plan.betas[i + 1] << ") failed: " << e.what();
      throw std::runtime_error(msg.str());
    }
  });
  plan.total_time = std::accumulate(plan.segment_times.begin(), plan.segment_times.end(), 0.0);
  return plan;
}

std::vector<std::pair<double, double>> objective_curve(const chain::NormalizedChain& chain,
                                                       const std::vector<double>& gammas,
                                                       par::Exec exec) {
  if (chain.n_spins() != 4)
    throw std::domain_error("objective_curve: defined for 4-spin chains only");
  for (double g : gammas) check_angle(g, "gamma");
  const auto& ks = chain.ratios;
  std::vector<std::pair<double, double>> curve(gammas.size());
  par::for_each_index(static_cast<int>(gammas.size()), exec, [&](int i) {
    const double g = gammas[static_cast<std::size_t>(i)];
    const double value = geo::minimal_time(ks[1] / ks[0], 0.0, g) / ks[0] +
                         geo::minimal_time(ks[2] / ks[1], g, kHalfPi) / ks[1];
    curve[static_cast<std::size_t>(i)] = {g, value};
  });
  return curve;
}

pulse::PulseSchedule assemble_chain_pulse(const ChainPlan& plan) {
  if (plan.solutions.size() != plan.segment_times.size())
    throw std::domain_error("assemble_chain_pulse: plan is missing segment solutions");
  pulse::PulseSchedule schedule;
  for (std::size_t i = 0; i < plan.solutions.size(); ++i) {
    const int l = static_cast<int>(i) + 1;
    const double k_scale = plan.ratios[i];  // segment-local time unit is 1/k_l
    pulse::PulseSchedule seg = pulse::reconstruct_control(plan.solutions[i], l);
    for (auto& segment : seg.segments) {
      if (auto* soft = std::get_if<pulse::SoftSegment>(&segment)) {
        soft->sample_dt /= k_scale;
        for (double& u : soft->amplitudes) u *= k_scale;
      }
      schedule.segments.emplace_back(std::move(segment));  // rotations are dimensionless
    }
  }
  schedule.recompute_duration();
  return schedule;
}

pulse::PulseSchedule conventional_chain_sequence(const chain::NormalizedChain& chain) {
  const auto& ks = chain.ratios;
  const int n_controls = static_cast<int>(ks.size()) - 1;
  pulse::PulseSchedule schedule;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    pulse::SoftSegment wait;
    wait.control_index = 0;
    wait.sample_dt = kHalfPi / ks[j];
    wait.amplitudes = {0.0, 0.0};
    schedule.segments.emplace_back(wait);
    const int l = static_cast<int>(j) + 1;
    if (l <= n_controls)
      schedule.segments.emplace_back(pulse::HardRotation{l, kHalfPi, l + 1, 'y'});
  }
  schedule.recompute_duration();
  return schedule;
}

double conventional_chain_time(const chain::NormalizedChain& chain) {
  double total = 0.0;
  for (double k : chain.ratios) total += kHalfPi / k;
  return total;
}

pulse::TransferReport simulate_chain(const pulse::PulseSchedule& schedule,
                                     const chain::NormalizedChain& chain,
                                     const std::vector<double>& x0,
                                     const pulse::SimulateOptions& opts) {
  const std::size_t dim = 2 * chain.ratios.size();
  if (x0.size() != dim)
    throw std::domain_error("simulate_chain: state dimension must be " + std::to_string(dim));
  std::vector<double> target(dim, 0.0);
  target.back() = 1.0;
  return pulse::simulate_schedule(schedule, chain.ratios, x0, target, opts);
}

std::string plan_to_json(const ChainPlan& plan, const chain::NormalizedChain& chain) {
  nlohmann::ordered_json doc;
  doc["betas"] = plan.betas;
  doc["segment_times"] = plan.segment_times;
  doc["total_time"] = plan.total_time;
  doc["units"] = "1/J_ref";
  doc["ref_hz"] = chain.ref_hz;
  doc["ref_index"] = chain.ref_index;
  doc["total_seconds"] = chain::dimensionless_to_seconds(plan.total_time, chain);
  return doc.dump(2) + "\n";
}

}  // namespace spinchain::planner
