#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Fixed-step classical RK4 with dense output and zero-crossing location.
// Deterministic: the same inputs always produce bitwise-identical
// trajectories, which the regression suite relies on.
//
// A Field is any callable  void(double t, const State& x, State& dxdt);
// State is an indexable container of doubles (std::array or std::vector).

namespace spinchain::ode {

struct integration_error : std::runtime_error {
  double time;
  integration_error(const std::string& what, double t)
      : std::runtime_error(what + " at t=" + std::to_string(t)), time(t) {}
};

template <class State>
struct Trajectory {
  std::vector<double> times;   // strictly increasing, times[0] = start
  std::vector<State> states;   // one state per time
  double step = 0.0;           // nominal step size

  std::size_t size() const { return times.size(); }
  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
  const State& front() const { return states.front(); }
  const State& back() const { return states.back(); }
};

namespace detail {

template <class State>
inline bool all_finite(const State& x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace detail

// One classical RK4 step of size h from (t, x).
template <class State, class Field>
State rk4_step(Field&& field, double t, const State& x, double h) {
  State k1 = x, k2 = x, k3 = x, k4 = x, y = x;
  field(t, x, k1);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + 0.5 * h * k1[i];
  field(t + 0.5 * h, y, k2);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + 0.5 * h * k2[i];
  field(t + 0.5 * h, y, k3);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + h * k3[i];
  field(t + h, y, k4);
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  return y;
}

// Integrate from t=0 to t_end with fixed step; the final partial step is
// shortened to land exactly on t_end. Dense output at every node.
template <class State, class Field>
Trajectory<State> integrate(Field&& field, const State& x0, double t_end, double step) {
  if (!(step > 0.0)) throw std::domain_error("integrate: step must be positive");
  if (t_end < 0.0) throw std::domain_error("integrate: t_end must be non-negative");

  Trajectory<State> traj;
  traj.step = step;
  const auto n_full = static_cast<std::size_t>(std::floor(t_end / step));
  traj.times.reserve(n_full + 2);
  traj.states.reserve(n_full + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  State x = x0;
  double t = 0.0;
  for (std::size_t i = 1; i <= n_full; ++i) {
    const double ti = static_cast<double>(i) * step;
    x = rk4_step(field, t, x, ti - t);
    if (!detail::all_finite(x)) throw integration_error("integrate: non-finite state", ti);
    t = ti;
    traj.times.push_back(ti);
    traj.states.push_back(x);
  }
  if (t < t_end) {
    x = rk4_step(field, t, x, t_end - t);
    if (!detail::all_finite(x)) throw integration_error("integrate: non-finite state", t_end);
    traj.times.push_back(t_end);
    traj.states.push_back(x);
  }
  return traj;
}

template <class State>
struct ZeroCrossing {
  double time = 0.0;
  State state{};        // state at the crossing
  double node_time = 0.0;
  State node_state{};   // last node at or before the crossing
};

namespace detail {

// Bisect a sign change of proj(state) inside one step starting at
// (t_node, x_node); the bracket is [lo, hi] in step offsets, sign(lo) != sign(hi).
template <class State, class Field, class Proj>
ZeroCrossing<State> refine_crossing(Field& field, Proj& proj, double t_node, const State& x_node,
                                    double lo, double hi, int sign_lo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const State xm = rk4_step(field, t_node, x_node, mid);
    const int sm = sign_of(proj(xm));
    if (sm == 0) {
      lo = hi = mid;
      break;
    }
    if (sm == sign_lo)
      lo = mid;
    else
      hi = mid;
  }
  const double dt = 0.5 * (lo + hi);
  ZeroCrossing<State> hit;
  hit.time = t_node + dt;
  hit.state = dt > 0.0 ? rk4_step(field, t_node, x_node, dt) : x_node;
  hit.node_time = t_node;
  hit.node_state = x_node;
  return hit;
}

}  // namespace detail

// Integrate until the scalar proj(state) changes sign or touches zero; the
// crossing is refined by bisection on re-integration from the last pre-event
// node. An exact zero sample counts as a crossing; a zero at t=0 counts only
// if proj is initially decreasing. direction restricts the crossing sense:
// -1 accepts only falling (+ to -) crossings, +1 only rising, 0 any.
// Returns nothing if no accepted crossing occurs before t_end.
template <class State, class Field, class Proj>
std::optional<ZeroCrossing<State>> integrate_until_sign_change_of(Field&& field, Proj&& proj,
                                                                  const State& x0, double t_end,
                                                                  double step, double tol,
                                                                  int direction = 0) {
  if (!(step > 0.0)) throw std::domain_error("integrate_until_sign_change: step must be positive");
  if (!(tol > 0.0)) throw std::domain_error("integrate_until_sign_change: tol must be positive");

  auto accepts = [direction](int from, int to) {
    if (from == to || from == 0) return false;
    if (direction > 0) return from < 0 && to >= 0;
    if (direction < 0) return from > 0 && to <= 0;
    return true;
  };

  int prev_sign = detail::sign_of(proj(x0));
  if (prev_sign == 0) {
    // sign of the initial derivative of proj along the flow, via a probe step
    const State probe = rk4_step(field, 0.0, x0, 0.25 * step);
    const int probe_sign = detail::sign_of(proj(probe));
    if (probe_sign < 0 && direction <= 0) {
      ZeroCrossing<State> hit;
      hit.time = 0.0;
      hit.state = x0;
      hit.node_time = 0.0;
      hit.node_state = x0;
      return hit;
    }
    prev_sign = probe_sign >= 0 ? 1 : -1;
  }

  State x = x0;
  double t = 0.0;
  const auto n_full = static_cast<std::size_t>(std::floor(t_end / step));
  for (std::size_t i = 1;; ++i) {
    double ti;
    if (i <= n_full)
      ti = static_cast<double>(i) * step;
    else if (t < t_end)
      ti = t_end;
    else
      return std::nullopt;

    const State x_next = rk4_step(field, t, x, ti - t);
    if (!detail::all_finite(x_next))
      throw integration_error("integrate_until_sign_change: non-finite state", ti);
    const int s = detail::sign_of(proj(x_next));
    if (accepts(prev_sign, s)) {
      if (s == 0) {
        ZeroCrossing<State> hit;
        hit.time = ti;
        hit.state = x_next;
        hit.node_time = t;
        hit.node_state = x;
        return hit;
      }
      return detail::refine_crossing(field, proj, t, x, 0.0, ti - t, prev_sign, tol);
    }
    if (s != 0) prev_sign = s;
    x = x_next;
    t = ti;
  }
}

template <class State, class Field>
std::optional<ZeroCrossing<State>> integrate_until_sign_change(Field&& field, const State& x0,
                                                               std::size_t component, double t_end,
                                                               double step, double tol) {
  if (component >= x0.size())
    throw std::domain_error("integrate_until_sign_change: component index out of range");
  return integrate_until_sign_change_of(
      field, [component](const State& s) { return s[component]; }, x0, t_end, step, tol);
}

// Locate the first zero crossing of `component` in a stored trajectory.
// The bracketing step is re-integrated with `field` (the field that produced
// the trajectory) so the event is found at integrator accuracy.
template <class State, class Field>
std::optional<double> first_zero_crossing(const Trajectory<State>& traj, Field&& field,
                                          std::size_t component, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("first_zero_crossing: tol must be positive");
  if (traj.states.empty()) return std::nullopt;
  if (component >= traj.states.front().size())
    throw std::domain_error("first_zero_crossing: component index out of range");

  auto proj = [component](const State& s) { return s[component]; };
  int prev_sign = detail::sign_of(traj.states.front()[component]);
  if (prev_sign == 0) {
    const double h = traj.size() > 1 ? 0.25 * (traj.times[1] - traj.times[0])
                                     : (traj.step > 0.0 ? 0.25 * traj.step : 1e-6);
    const State probe = rk4_step(field, traj.times.front(), traj.states.front(), h);
    if (probe[component] < 0.0) return traj.times.front();
    prev_sign = 1;
  }
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const int s = detail::sign_of(traj.states[i][component]);
    if (s == 0) return traj.times[i];
    if (s != prev_sign) {
      const double t_node = traj.times[i - 1];
      auto hit = detail::refine_crossing(field, proj, t_node, traj.states[i - 1], 0.0,
                                         traj.times[i] - t_node, prev_sign, tol);
      return hit.time;
    }
  }
  return std::nullopt;
}

}  // namespace spinchain::ode
