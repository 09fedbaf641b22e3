#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/geodesic.hpp"
#include "spinchain/parallel.hpp"
#include "spinchain/pulse.hpp"

// n-spin chain planning: the transfer is broken into sequential segments
// beta_1 -> beta_2 -> ... -> beta_{n-1} (beta_1 = 0, beta_{n-1} = pi/2), one
// active control at a time, and the intermediate angles are chosen by a
// backward dynamic program over a uniform angle grid with golden-section
// refinement.

namespace spinchain::planner {

struct SegmentProblem {
  int l = 1;  // 1-based segment index
  double beta_in = 0.0;
  double beta_out = 0.0;
  double k_l = 1.0;
  double k_lplus1 = 1.0;

  void validate() const;
};

// Minimal segment time in chain reference units, via the rescaling
// k_l T(b, b', k_l, k_{l+1}) = T(b, b', 1, k_{l+1}/k_l).
double segment_time(const SegmentProblem& p);

struct ChainPlan {
  std::vector<double> ratios;                    // chain ratios the plan was built for
  std::vector<double> betas;                     // n-1 boundary angles
  std::vector<double> segment_times;             // n-2, chain reference units
  double total_time = 0.0;
  std::vector<geo::GeodesicSolution> solutions;  // per segment, segment-normalized units
};

ChainPlan dp_solve(const chain::NormalizedChain& chain, int grid_points = 129,
                   par::Exec exec = par::Exec::parallel);

// Two-segment objective J(gamma) for 4-spin chains.
std::vector<std::pair<double, double>> objective_curve(const chain::NormalizedChain& chain,
                                                       const std::vector<double>& gammas,
                                                       par::Exec exec = par::Exec::parallel);

// Concatenate the per-segment reconstructed controls, rescaled into chain
// units; during segment l only u_l is non-zero.
pulse::PulseSchedule assemble_chain_pulse(const ChainPlan& plan);

// Hard-pulse baseline for the chain: waits of pi/(2 k_l) separated by hard
// pi/2 rotations. Total time sum_l pi/(2 k_l).
pulse::PulseSchedule conventional_chain_sequence(const chain::NormalizedChain& chain);
double conventional_chain_time(const chain::NormalizedChain& chain);

// Integrate the full 2(n-1)-dimensional system; fidelity against (0,...,0,1).
pulse::TransferReport simulate_chain(const pulse::PulseSchedule& schedule,
                                     const chain::NormalizedChain& chain,
                                     const std::vector<double>& x0,
                                     const pulse::SimulateOptions& opts = {});

// {"betas": [...], "segment_times": [...], "total_time": _, "units":
//  "1/J_ref", "ref_hz": _, "ref_index": _, "total_seconds": _}
std::string plan_to_json(const ChainPlan& plan, const chain::NormalizedChain& chain);

}  // namespace spinchain::planner
