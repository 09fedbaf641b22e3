#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "spinchain/chain_model.hpp"
#include "spinchain/ode.hpp"

// Time-optimal transfer on the reduced sphere. The control angle theta obeys
// the pendulum equation  theta'' = (a/2) sin 2*theta  with a = k^2 - 1 and
// conserved constant  c = theta_dot^2 + a cos^2 theta;  the sphere coordinates
// (r1, r2, r3) are driven by theta:
//
//   r1' = -cos(theta) r2,   r2' = cos(theta) r1 - k sin(theta) r3,
//   r3' =  k sin(theta) r2.
//
// A transfer (cos a, sin a, 0) -> (0, cos b, sin b) is pinned down by shooting
// on the unknown initial pendulum data.

namespace spinchain::geo {

using PendulumState = std::array<double, 2>;  // {theta, theta_dot}
using ReducedState = std::array<double, 3>;   // {r1, r2, r3}
using JointState = std::array<double, 5>;     // {theta, theta_dot, r1, r2, r3}

namespace idx {
inline constexpr std::size_t theta = 0;
inline constexpr std::size_t theta_dot = 1;
inline constexpr std::size_t r1 = 2;
inline constexpr std::size_t r2 = 3;
inline constexpr std::size_t r3 = 4;
}  // namespace idx

// First integral of the pendulum flow.
struct PendulumParams {
  double a = 0.0;  // k^2 - 1
  double c = 0.0;  // theta_dot^2 + a cos^2 theta, constant along the flow

  static PendulumParams from_initial(double k, double theta0, double theta_dot0);
};

inline double pendulum_coefficient(double k) { return k * k - 1.0; }

struct ShootOptions {
  double step = 1e-4;           // integration step (dimensionless time)
  double scan_step = 1e-3;      // coarser step used only to locate brackets
  int scan_points = 64;         // uniform samples over the search bracket
  double bracket_margin = 1.1;  // expansion of the admissible bracket
  double event_tol = 1e-9;      // tolerance on the r1 zero-crossing time
  double search_tol = 1e-8;     // bisection tolerance on the scanned unknown
};

struct GeodesicSolution {
  double k = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double theta0 = 0.0;
  double theta_dot0 = 0.0;
  double c = 0.0;        // conserved pendulum constant
  double duration = 0.0; // minimal transfer time, units of 1/J_ref
  ode::Trajectory<JointState> trajectory;
};

// Raised when the scanned bracket contains no admissible boundary match.
struct shooting_error : std::runtime_error {
  double bracket_lo, bracket_hi;     // scanned range of the unknown
  double residual_lo, residual_hi;   // r2(s) - cos(beta) at the bracket ends
  shooting_error(const std::string& what, double lo, double hi, double f_lo, double f_hi);
};

// Pendulum flow theta'' = (a/2) sin 2*theta from (theta0, theta_dot0).
ode::Trajectory<PendulumState> pendulum_flow(double theta0, double theta_dot0, double a,
                                             double t_end, double step);

// Sphere flow driven by a sampled theta trajectory (cubic-Hermite interpolated),
// starting from (cos alpha, sin alpha, 0).
ode::Trajectory<ReducedState> reduced_flow(double k, double alpha,
                                           const ode::Trajectory<PendulumState>& theta_traj);

// Elapsed time along a monotone pendulum branch from theta0 to theta1:
// integral of dsigma / sqrt(c - a cos^2 sigma), evaluated by quadrature.
double elliptic_time(double theta0, double theta1, double c, double a);

// Solve the boundary-value problem. For k < 1 the mirrored problem with ratio
// 1/k and endpoints (pi/2 - beta, pi/2 - alpha) is solved and mapped back
// through the time-reversal/scaling symmetry T(1/k) = k T(k).
GeodesicSolution shoot(double k, const chain::TransferEndpoints& endpoints,
                       const ShootOptions& opts = {});

// The raw shooting search without the k < 1 reduction; used to cross-check
// the symmetry with independent solves.
GeodesicSolution shoot_direct(double k, const chain::TransferEndpoints& endpoints,
                              const ShootOptions& opts = {});

// Duration-only solve, memoized on (k, alpha, beta) rounded to 1e-12.
double minimal_time(double k, double alpha, double beta);

// theta_dot(0) of the k=1, alpha=0, beta=pi/2 solution; upper end of the
// shooting bracket for k >= 1. Computed once and cached.
double k1_rate();

// Residual diagnostics used by the validation suites.
double max_norm_drift(const ode::Trajectory<JointState>& traj);
double max_conserved_drift(const ode::Trajectory<JointState>& traj, double a);

}  // namespace spinchain::geo
