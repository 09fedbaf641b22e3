#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "spinchain/geodesic.hpp"

// Physical control schedules for the bilinear transfer system
//
//   dX/dt = B X,  B skew tridiagonal with rates (k1, u1, k2, u2, k3, ...),
//
// their reconstruction from geodesic solutions, the hard-pulse baseline, and
// forward-simulation verification.

namespace spinchain::pulse {

// Amplitude samples at uniform spacing over one segment. control_index is
// 1-based (u_l couples x_{2l} and x_{2l+1}); 0 means free evolution and the
// amplitudes must be zero.
struct SoftSegment {
  double sample_dt = 0.0;
  std::vector<double> amplitudes;  // first sample at segment start, last at segment end
  int control_index = 0;

  double duration() const {
    return amplitudes.size() < 2 ? 0.0
                                 : sample_dt * static_cast<double>(amplitudes.size() - 1);
  }
  double amplitude_at(double local_t) const;  // linear interpolation
};

// Instantaneous rotation in the plane of one control generator. spin/axis
// label the hard pulse it implements; control_index 0 marks a local rotation
// outside the tracked coordinates (bookkeeping only, not simulated).
struct HardRotation {
  int control_index = 0;
  double angle = 0.0;
  int spin = 0;  // 1-based
  char axis = 'y';
};

using Segment = std::variant<SoftSegment, HardRotation>;

struct PulseSchedule {
  std::vector<Segment> segments;
  double total_duration = 0.0;  // sum of soft-segment durations

  void recompute_duration();
};

struct TransferReport {
  std::vector<double> initial_state;
  std::vector<double> final_state;
  std::vector<double> target_state;
  double fidelity = 0.0;  // dot(final, target)
  double duration = 0.0;
};

// The amplitude that makes the full system track the geodesic: u = 2 theta_dot,
// resampled on a uniform grid over the solution's duration. The last sample is
// extrapolated from the previous two.
PulseSchedule reconstruct_control(const geo::GeodesicSolution& sol, int control_index = 1);

// Hard-pulse baseline: free evolution for pi/2, hard pi/2 rotation on the
// middle spin, free evolution for pi/(2k). With n_qubit_form the trailing
// local x rotations that finish the spin-order transfer are appended as
// markers; they do not move the tracked coordinates.
PulseSchedule conventional_sequence(double k, bool n_qubit_form = false);

struct SimulateOptions {
  double step = 1e-4;
};

// Integrate the 2(n-1)-dimensional chain system for ratio vector
// (k1, ..., k_{n-1}) under a schedule; hard rotations are applied as exact
// plane rotations between segments.
TransferReport simulate_schedule(const PulseSchedule& schedule, const std::vector<double>& ratios,
                                 const std::vector<double>& x0, const std::vector<double>& target,
                                 const SimulateOptions& opts = {});

// Single-segment 4-dimensional system, ratios (1, k).
TransferReport simulate_full(const PulseSchedule& schedule, double k,
                             const std::array<double, 4>& x0, const std::array<double, 4>& target,
                             const SimulateOptions& opts = {});

// CSV export: header "t,u,control_index", 17 significant digits, one row per
// sample; "# segment"/"# hard" directives carry the segment structure. Soft
// segments longer than max_points are resampled to max_points for export.
void write_pulse_csv(const PulseSchedule& schedule, std::ostream& out,
                     std::size_t max_points = 1000);
void write_pulse_csv_file(const PulseSchedule& schedule, const std::string& path,
                          std::size_t max_points = 1000);
PulseSchedule read_pulse_csv(std::istream& in);
PulseSchedule read_pulse_csv_file(const std::string& path);

// {"duration": _, "fidelity": _, "target": [...], "final": [...]}
std::string report_to_json(const TransferReport& report);

}  // namespace spinchain::pulse
