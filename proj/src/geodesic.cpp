#include "spinchain/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>


namespace spinchain::geo {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kAlphaPole = 1e-12;      // alpha this close to pi/2 is the equator fixed point
constexpr double kAlphaZero = 1e-9;       // alpha this close to 0 uses the theta_dot0 scan
constexpr double kResidualRoot = 1e-12;    // a scan sample with |residual| below this is a root
constexpr double kResidualAccept = 1e-4;   // max boundary miss accepted for a solution
constexpr double kPolishCosBeta = 1e-2;    // below this, the r1 crossing is near-tangential
constexpr double kPolishWindow = 1e-2;     // half-width of the nearest-approach refinement

struct JointField {
  double k, a;
  void operator()(double, const JointState& x, JointState& d) const {
    const double st = std::sin(x[idx::theta]);
    const double ct = std::cos(x[idx::theta]);
    d[idx::theta] = x[idx::theta_dot];
    d[idx::theta_dot] = a * st * ct;  // (a/2) sin 2theta
    d[idx::r1] = -ct * x[idx::r2];
    d[idx::r2] = ct * x[idx::r1] - k * st * x[idx::r3];
    d[idx::r3] = k * st * x[idx::r2];
  }
};

struct Candidate {
  bool valid = false;
  double duration = 0.0;
  double residual = 0.0;  // r2 at the crossing minus cos(beta)
  JointState state{};
};

struct ShootCore {
  double theta0 = 0.0;
  double theta_dot0 = 0.0;
  double c = 0.0;
  double duration = 0.0;
  JointState final_state{};
};

// How the scanned unknown x maps onto the free initial data.
enum class ScanMode {
  rate,      // alpha = 0: x is theta_dot(0), theta(0) = 0
  angle,     // alpha > 0: x is theta(0), theta_dot(0) = sin(theta(0)) cot(alpha)
  subunit,   // k < 1, alpha = 0, beta = pi/2: x in [0,1] maps log-wise onto the
             // pendulum constant c = theta_dot(0)^2 - (1 - k^2), which spans many
             // decades just above the separatrix where the solution lives
};

// One shooting target: given the scanned unknown x, integrate the joint flow
// to the terminal event and report the boundary residual there. The standard
// event is the first r1 zero with residual r2 - cos(beta); in subunit mode
// theta crossing pi/2 is the event (transversal, since supercritical theta is
// monotone) and r1 is the residual.
struct CoreProblem {
  double k = 1.0;
  double a = 0.0;
  double alpha = 0.0;
  double cos_beta = 0.0;
  double sin_beta = 1.0;
  double horizon = 0.0;
  ScanMode mode = ScanMode::rate;
  double cot_alpha = 0.0;
  double c_lo = 0.0, c_hi = 0.0;  // subunit scan range of the pendulum constant
  ShootOptions opts;

  void initial_data(double x, double& theta0, double& theta_dot0) const {
    switch (mode) {
      case ScanMode::rate:
        theta0 = 0.0;
        theta_dot0 = x;
        break;
      case ScanMode::angle:
        theta0 = x;
        theta_dot0 = std::sin(x) * cot_alpha;
        break;
      case ScanMode::subunit:
        theta0 = 0.0;
        theta_dot0 = std::sqrt(-a + c_lo * std::pow(c_hi / c_lo, x));
        break;
    }
  }

  JointState initial_state(double x) const {
    double theta0 = 0.0, theta_dot0 = 0.0;
    initial_data(x, theta0, theta_dot0);
    return {theta0, theta_dot0, std::cos(alpha), std::sin(alpha), 0.0};
  }

  Candidate evaluate(double x, double step) const {
    const JointField field{k, a};
    std::optional<ode::ZeroCrossing<JointState>> hit;
    if (mode == ScanMode::subunit) {
      hit = ode::integrate_until_sign_change_of(
          field, [](const JointState& s) { return s[idx::theta] - kHalfPi; }, initial_state(x),
          horizon, step, opts.event_tol, +1);
    } else {
      hit = ode::integrate_until_sign_change(field, initial_state(x), idx::r1, horizon, step,
                                             opts.event_tol);
    }
    if (!hit) return {};
    Candidate cand;
    cand.valid = true;
    cand.duration = hit->time;
    cand.state = hit->state;
    cand.residual = mode == ScanMode::subunit ? cand.state[idx::r1]
                                              : cand.state[idx::r2] - cos_beta;
    return cand;
  }
  Candidate evaluate(double x) const { return evaluate(x, opts.step); }

  // Near beta = pi/2 the r1 crossing is tangential at the target
  // (r1' = -cos(theta) r2 and both factors vanish there), so the event time
  // carries a cube-root noise floor even though the bisected unknown itself
  // is accurate. Re-anchor the accepted root on the nearest approach to the
  // target: the rising zero of d/dt |r - target|^2, which is transversal.
  Candidate polished(double x, Candidate cand) const {
    if (!cand.valid || cos_beta >= kPolishCosBeta) return cand;
    const JointField field{k, a};
    const double t_lo = std::max(0.0, cand.duration - kPolishWindow);
    JointState base = initial_state(x);
    if (t_lo > 0.0) base = ode::integrate(field, base, t_lo, opts.step).back();
    const double cb = cos_beta, sb = sin_beta, kk = k;
    auto approach_rate = [cb, sb, kk](const JointState& s) {
      const double st = std::sin(s[idx::theta]), ct = std::cos(s[idx::theta]);
      const double d1 = -ct * s[idx::r2];
      const double d2 = ct * s[idx::r1] - kk * st * s[idx::r3];
      const double d3 = kk * st * s[idx::r2];
      return s[idx::r1] * d1 + (s[idx::r2] - cb) * d2 + (s[idx::r3] - sb) * d3;
    };
    auto hit = ode::integrate_until_sign_change_of(field, approach_rate, base,
                                                   2.0 * kPolishWindow, opts.step,
                                                   opts.event_tol, +1);
    if (!hit) return cand;
    cand.duration = t_lo + hit->time;
    cand.state = hit->state;
    cand.residual = cand.state[idx::r2] - cos_beta;
    return cand;
  }

  // Full boundary miss of a candidate solution.
  double target_distance(const Candidate& cand) const {
    const double d1 = cand.state[idx::r1];
    const double d2 = cand.state[idx::r2] - cos_beta;
    const double d3 = cand.state[idx::r3] - sin_beta;
    return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
  }
};

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Bisect the boundary residual inside a scan cell with a sign change. The
// residual slope grows exponentially with the ratio (roots sit a hair above
// an unstable pendulum equilibrium), so the loop runs until the residual is
// driven small or the bracket reaches the floating-point floor, whichever
// comes first, and keeps the best candidate seen.
std::optional<std::pair<double, Candidate>> bisect_cell(const CoreProblem& prob, double x_lo,
                                                        double x_hi, int sign_lo) {
  constexpr double kStopDistance = 1e-7;
  // Narrow at the coarse scan step first; finish at full resolution once the
  // boundary miss is small.
  double step = prob.opts.scan_step;
  std::optional<std::pair<double, Candidate>> best;
  double best_dist = std::numeric_limits<double>::infinity();
  while (true) {
    const double xm = 0.5 * (x_lo + x_hi);
    if (!(xm > x_lo && xm < x_hi)) break;  // bracket at machine resolution
    const Candidate cm = prob.evaluate(xm, step);
    if (!cm.valid) break;  // crossing vanished inside the cell
    const double dist = prob.target_distance(cm);
    if (step == prob.opts.step && dist < best_dist) {
      best_dist = dist;
      best = std::make_pair(xm, cm);
    }
    if (dist <= 1e-3 && step != prob.opts.step) {
      step = prob.opts.step;
      continue;  // re-evaluate the same midpoint at full resolution
    }
    if (dist <= kStopDistance) break;
    const int sm = sign_of(cm.residual);
    if (sm == 0) break;
    if (sm == sign_lo)
      x_lo = xm;
    else
      x_hi = xm;
  }
  return best;
}

ShootCore make_core(const CoreProblem& prob, double x, const Candidate& cand) {
  ShootCore core;
  prob.initial_data(x, core.theta0, core.theta_dot0);
  core.c = core.theta_dot0 * core.theta_dot0 +
           prob.a * std::cos(core.theta0) * std::cos(core.theta0);
  core.duration = cand.duration;
  core.final_state = cand.state;
  return core;
}

// Raw shooting search for one ratio k and endpoints (alpha, beta); the k < 1
// reduction is applied by the callers.
ShootCore solve_core(double k, double alpha, double beta, const ShootOptions& opts,
                     double rate_hi) {
  const double a = pendulum_coefficient(k);

  if (alpha >= kHalfPi - kAlphaPole) {
    // Equator start: theta = pi/2 is a pendulum fixed point and (r2, r3)
    // rotates at rate k, so the transfer is a plain arc of angle beta.
    ShootCore core;
    core.theta0 = kHalfPi;
    core.theta_dot0 = 0.0;
    core.c = a * std::cos(kHalfPi) * std::cos(kHalfPi);
    core.duration = beta / k;
    core.final_state = {kHalfPi, 0.0, 0.0, std::cos(beta), std::sin(beta)};
    return core;
  }

  CoreProblem prob;
  prob.k = k;
  prob.a = a;
  prob.alpha = alpha;
  prob.cos_beta = std::cos(beta);
  prob.sin_beta = std::sin(beta);
  prob.horizon = kHalfPi + kHalfPi / k + 0.5;
  prob.opts = opts;

  double x_lo = 0.0;
  double x_hi;
  if (alpha >= kAlphaZero) {
    prob.mode = ScanMode::angle;
    prob.cot_alpha = std::cos(alpha) / std::sin(alpha);
    x_hi = kHalfPi;
  } else if (k >= 1.0 || rate_hi > 0.0) {
    prob.mode = ScanMode::rate;
    prob.alpha = 0.0;
    // The admissible bracket for theta_dot(0) shrinks with k; the k = 1
    // constant rate bounds it from above.
    x_hi = rate_hi > 0.0 ? rate_hi : opts.bracket_margin * k1_rate();
  } else {
    // k < 1: the solution sits just above the pendulum separatrix, with
    // c = theta_dot(0)^2 - (1 - k^2) = (k theta_dot'(0))^2 of the mirrored
    // problem -- possibly many orders of magnitude below theta_dot(0)
    // itself. A log-spaced scan in c resolves it; theta is then monotone and
    // the terminal event theta = pi/2 is transversal. Only the canonical
    // endpoints are supported on this path.
    if (beta < kHalfPi - 1e-9)
      throw std::domain_error(
          "shoot_direct: ratios below 1 are only solved directly for alpha=0, beta=pi/2; "
          "use shoot() for general endpoints");
    prob.mode = ScanMode::subunit;
    prob.alpha = 0.0;
    const double c1 = k1_rate();
    prob.c_hi = opts.bracket_margin * opts.bracket_margin * k * k * c1 * c1;
    // c can sit a dozen decades below its bracket top (the mirrored problem's
    // theta_dot(0) shrinks exponentially with 1/k); the near-separatrix time
    // penalty is only logarithmic in c, so scan deep.
    prob.c_lo = std::max(1e-15, 1e-14 * prob.c_hi);
    prob.horizon = kHalfPi + kHalfPi / k + 25.0;
    x_hi = 1.0;
  }

  const int n_uniform = std::max(opts.scan_points, 3);
  std::vector<double> xs;
  xs.reserve(n_uniform + 33);
  for (int i = 0; i < n_uniform; ++i)
    xs.push_back(x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(n_uniform - 1));
  if (prob.mode != ScanMode::subunit) {
    // The optimal theta_dot(0) (or theta(0)) shrinks exponentially with the
    // ratio -- the geodesic hugs the equator before swinging up -- so a
    // uniform scan alone can miss the bracketing cell. Add log-spaced samples.
    constexpr int n_log = 32;
    const double lo_log = x_hi * 1e-12;
    for (int i = 0; i < n_log; ++i)
      xs.push_back(lo_log * std::pow(x_hi / lo_log, static_cast<double>(i) / n_log));
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  }
  const int n = static_cast<int>(xs.size());
  std::vector<Candidate> cands(n);
  for (int i = 0; i < n; ++i) cands[i] = prob.evaluate(xs[i], opts.scan_step);

  std::vector<std::pair<double, Candidate>> roots;  // (x, candidate)
  auto consider = [&](double x, const Candidate& fine) {
    const Candidate cand = prob.polished(x, fine);
    // A sign change of the residual alone can also mark a discontinuity of
    // the first-crossing time or an arrival on the wrong hemisphere; accept
    // only candidates that actually reach the target.
    if (prob.target_distance(cand) > kResidualAccept) return;
    roots.emplace_back(x, cand);
  };
  for (int i = 0; i < n; ++i) {
    if (!cands[i].valid || std::abs(cands[i].residual) > kResidualRoot) continue;
    const Candidate fine = prob.evaluate(xs[i]);  // scan ran at the coarse step
    if (fine.valid) consider(xs[i], fine);
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (!cands[i].valid || !cands[i + 1].valid) continue;
    const int s0 = sign_of(cands[i].residual);
    const int s1 = sign_of(cands[i + 1].residual);
    if (s0 == 0 || s1 == 0 || s0 == s1) continue;
    if (auto root = bisect_cell(prob, xs[i], xs[i + 1], s0)) consider(root->first, root->second);
  }

  if (roots.empty()) {
    int first_valid = -1, last_valid = -1;
    for (int i = 0; i < n; ++i)
      if (cands[i].valid) {
        if (first_valid < 0) first_valid = i;
        last_valid = i;
      }
    std::ostringstream msg;
    msg << "shoot: target unreachable within bracket (k=" << k << ", alpha=" << alpha
        << ", beta=" << beta << "); scanned [" << x_lo << ", " << x_hi << "]";
    double f_lo = std::numeric_limits<double>::quiet_NaN();
    double f_hi = f_lo;
    if (first_valid >= 0) {
      f_lo = cands[first_valid].residual;
      f_hi = cands[last_valid].residual;
      msg << ", boundary residual " << f_lo << " .. " << f_hi;
    } else {
      msg << ", no r1 crossing before t=" << prob.horizon;
    }
    throw shooting_error(msg.str(), x_lo, x_hi, f_lo, f_hi);
  }

  const auto best = std::min_element(roots.begin(), roots.end(), [](const auto& u, const auto& v) {
    return u.second.duration < v.second.duration;
  });
  return make_core(prob, best->first, best->second);
}

ShootCore solve_core_any(double k, double alpha, double beta, const ShootOptions& opts) {
  if (k >= 1.0) return solve_core(k, alpha, beta, opts, 0.0);
  // Mirror: reverse the state order and run time backwards, which maps the
  // problem to ratio 1/k with endpoints (pi/2 - beta, pi/2 - alpha) and
  // scales the duration by k.
  ShootCore m = solve_core(1.0 / k, kHalfPi - beta, kHalfPi - alpha, opts, 0.0);
  ShootCore core;
  core.theta0 = kHalfPi - m.final_state[idx::theta];
  core.theta_dot0 = k * m.final_state[idx::theta_dot];
  core.c = core.theta_dot0 * core.theta_dot0 +
           pendulum_coefficient(k) * std::cos(core.theta0) * std::cos(core.theta0);
  core.duration = m.duration / k;
  core.final_state = {kHalfPi - m.theta0, k * m.theta_dot0, 0.0, std::cos(beta), std::sin(beta)};
  return core;
}

struct MemoKey {
  long long k, alpha, beta;
  bool operator==(const MemoKey&) const = default;
};

struct MemoHash {
  std::size_t operator()(const MemoKey& m) const {
    std::size_t h = std::hash<long long>()(m.k);
    h ^= std::hash<long long>()(m.alpha) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<long long>()(m.beta) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

std::mutex g_memo_mutex;
std::unordered_map<MemoKey, double, MemoHash> g_memo;

long long quantize(double v) { return std::llround(v * 1e12); }

}  // namespace

shooting_error::shooting_error(const std::string& what, double lo, double hi, double f_lo,
                               double f_hi)
    : std::runtime_error(what),
      bracket_lo(lo),
      bracket_hi(hi),
      residual_lo(f_lo),
      residual_hi(f_hi) {}

PendulumParams PendulumParams::from_initial(double k, double theta0, double theta_dot0) {
  PendulumParams p;
  p.a = pendulum_coefficient(k);
  p.c = theta_dot0 * theta_dot0 + p.a * std::cos(theta0) * std::cos(theta0);
  return p;
}

ode::Trajectory<PendulumState> pendulum_flow(double theta0, double theta_dot0, double a,
                                             double t_end, double step) {
  auto field = [a](double, const PendulumState& x, PendulumState& d) {
    d[0] = x[1];
    d[1] = a * std::sin(x[0]) * std::cos(x[0]);
  };
  return ode::integrate(field, PendulumState{theta0, theta_dot0}, t_end, step);
}

namespace {

// Cubic Hermite evaluation of theta(t) from a sampled pendulum trajectory.
struct ThetaInterpolant {
  const ode::Trajectory<PendulumState>& traj;
  mutable std::size_t hint = 0;

  double operator()(double t) const {
    const auto& ts = traj.times;
    if (ts.size() == 1) return traj.states[0][0];
    if (t <= ts.front()) return traj.states.front()[0];
    if (t >= ts.back()) return traj.states.back()[0];
    while (hint + 2 < ts.size() && ts[hint + 1] < t) ++hint;
    while (hint > 0 && ts[hint] > t) --hint;
    const double t0 = ts[hint], t1 = ts[hint + 1];
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double y0 = traj.states[hint][0], d0 = traj.states[hint][1];
    const double y1 = traj.states[hint + 1][0], d1 = traj.states[hint + 1][1];
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s2 * (3.0 - 2.0 * s);
    const double h11 = s2 * (s - 1.0);
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  }
};

}  // namespace

ode::Trajectory<ReducedState> reduced_flow(double k, double alpha,
                                           const ode::Trajectory<PendulumState>& theta_traj) {
  if (!(k > 0.0)) throw std::domain_error("reduced_flow: k must be positive");
  if (theta_traj.times.empty()) throw std::domain_error("reduced_flow: empty theta trajectory");
  const ThetaInterpolant theta{theta_traj};
  auto field = [k, &theta](double t, const ReducedState& r, ReducedState& d) {
    const double th = theta(t);
    const double ct = std::cos(th);
    const double st = std::sin(th);
    d[0] = -ct * r[1];
    d[1] = ct * r[0] - k * st * r[2];
    d[2] = k * st * r[1];
  };
  const ReducedState r0{std::cos(alpha), std::sin(alpha), 0.0};
  const double t_end = theta_traj.duration();
  const double step = theta_traj.step > 0.0 ? theta_traj.step : 1e-4;
  return ode::integrate(field, r0, t_end, step);
}

namespace {

// 15-point Gauss-Legendre panel.
constexpr std::array<double, 8> kGl15X = {0.0,
                                          0.2011940939974345,
                                          0.3941513470775634,
                                          0.5709721726085388,
                                          0.7244177313601700,
                                          0.8482065834104272,
                                          0.9372733924007060,
                                          0.9879925180204854};
constexpr std::array<double, 8> kGl15W = {0.2025782419255613, 0.1984314853271116,
                                          0.1861610000155622, 0.1662692058169939,
                                          0.1395706779261543, 0.1071592204671719,
                                          0.0703660474881081, 0.0307532419961173};

template <class F>
double gl15(F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = kGl15W[0] * f(mid);
  for (std::size_t j = 1; j < kGl15X.size(); ++j) {
    const double dx = half * kGl15X[j];
    sum += kGl15W[j] * (f(mid - dx) + f(mid + dx));
  }
  return half * sum;
}

template <class F>
double adaptive_gl(F& f, double a, double b, double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl15(f, a, mid);
  const double right = gl15(f, mid, b);
  if (std::abs(left + right - whole) <= tol || depth >= 40) return left + right;
  return adaptive_gl(f, a, mid, left, 0.5 * tol, depth + 1) +
         adaptive_gl(f, mid, b, right, 0.5 * tol, depth + 1);
}

}  // namespace

double elliptic_time(double theta0, double theta1, double c, double a) {
  const double lo = std::min(theta0, theta1);
  const double hi = std::max(theta0, theta1);
  if (lo == hi) return 0.0;

  // Minimum of c - a cos^2(sigma) over [lo, hi]: the extreme cos^2 values are
  // attained at the endpoints or at multiples of pi/2 inside the interval.
  double cos2_min = std::min(std::cos(lo) * std::cos(lo), std::cos(hi) * std::cos(hi));
  double cos2_max = std::max(std::cos(lo) * std::cos(lo), std::cos(hi) * std::cos(hi));
  const long long m_lo = static_cast<long long>(std::ceil(lo / kHalfPi - 1e-12));
  const long long m_hi = static_cast<long long>(std::floor(hi / kHalfPi + 1e-12));
  for (long long m = m_lo; m <= m_hi; ++m) {
    if (m % 2 == 0)
      cos2_max = 1.0;
    else
      cos2_min = 0.0;
  }
  const double g_min = a >= 0.0 ? c - a * cos2_max : c - a * cos2_min;
  if (!(g_min > 0.0))
    throw std::domain_error("elliptic_time: turning point inside branch (c - a cos^2 <= 0)");

  auto integrand = [c, a](double sigma) {
    const double cs = std::cos(sigma);
    return 1.0 / std::sqrt(c - a * cs * cs);
  };
  const double whole = gl15(integrand, lo, hi);
  return adaptive_gl(integrand, lo, hi, whole, 1e-12 * std::max(1.0, std::abs(whole)), 0);
}

GeodesicSolution shoot_direct(double k, const chain::TransferEndpoints& endpoints,
                              const ShootOptions& opts) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error("shoot: k must be positive");
  endpoints.validate();
  const ShootCore core = solve_core(k, endpoints.alpha, endpoints.beta, opts, 0.0);
  GeodesicSolution sol;
  sol.k = k;
  sol.alpha = endpoints.alpha;
  sol.beta = endpoints.beta;
  sol.theta0 = core.theta0;
  sol.theta_dot0 = core.theta_dot0;
  sol.c = core.c;
  sol.duration = core.duration;
  const JointField field{k, pendulum_coefficient(k)};
  const JointState x0{core.theta0, core.theta_dot0, std::cos(sol.alpha), std::sin(sol.alpha), 0.0};
  sol.trajectory = ode::integrate(field, x0, core.duration, opts.step);
  return sol;
}

GeodesicSolution shoot(double k, const chain::TransferEndpoints& endpoints,
                       const ShootOptions& opts) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error("shoot: k must be positive");
  endpoints.validate();
  if (k >= 1.0) return shoot_direct(k, endpoints, opts);

  const chain::TransferEndpoints mirrored{kHalfPi - endpoints.beta, kHalfPi - endpoints.alpha};
  const GeodesicSolution m = shoot_direct(1.0 / k, mirrored, opts);

  GeodesicSolution sol;
  sol.k = k;
  sol.alpha = endpoints.alpha;
  sol.beta = endpoints.beta;
  sol.duration = m.duration / k;
  const double a = pendulum_coefficient(k);
  // state map: theta = pi/2 - theta', theta_dot = k theta_dot', r = (r3', r2', r1')
  // at mirrored time tau = T' - k t.
  const auto& mt = m.trajectory;
  sol.theta0 = kHalfPi - mt.back()[idx::theta];
  sol.theta_dot0 = k * mt.back()[idx::theta_dot];
  sol.c = sol.theta_dot0 * sol.theta_dot0 + a * std::cos(sol.theta0) * std::cos(sol.theta0);
  sol.trajectory.step = mt.step / k;
  const double t_last = mt.times.back();
  sol.trajectory.times.reserve(mt.size());
  sol.trajectory.states.reserve(mt.size());
  for (std::size_t j = mt.size(); j-- > 0;) {
    const auto& s = mt.states[j];
    sol.trajectory.times.push_back((t_last - mt.times[j]) / k);
    sol.trajectory.states.push_back(JointState{kHalfPi - s[idx::theta], k * s[idx::theta_dot],
                                               s[idx::r3], s[idx::r2], s[idx::r1]});
  }
  return sol;
}

double minimal_time(double k, double alpha, double beta) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::domain_error("minimal_time: k must be positive");
  chain::TransferEndpoints{alpha, beta}.validate();
  const MemoKey key{quantize(k), quantize(alpha), quantize(beta)};
  {
    std::lock_guard lock(g_memo_mutex);
    if (auto it = g_memo.find(key); it != g_memo.end()) return it->second;
  }
  const ShootOptions opts;
  const double t = solve_core_any(k, alpha, beta, opts).duration;
  {
    std::lock_guard lock(g_memo_mutex);
    g_memo.emplace(key, t);
  }
  return t;
}

double k1_rate() {
  static const double rate = [] {
    const ShootOptions opts;
    return solve_core(1.0, 0.0, kHalfPi, opts, 2.0).theta_dot0;
  }();
  return rate;
}

double max_norm_drift(const ode::Trajectory<JointState>& traj) {
  if (traj.states.empty()) return 0.0;
  const auto norm = [](const JointState& s) {
    return std::sqrt(s[idx::r1] * s[idx::r1] + s[idx::r2] * s[idx::r2] + s[idx::r3] * s[idx::r3]);
  };
  const double n0 = norm(traj.states.front());
  double worst = 0.0;
  for (const auto& s : traj.states) worst = std::max(worst, std::abs(norm(s) - n0));
  return worst;
}

double max_conserved_drift(const ode::Trajectory<JointState>& traj, double a) {
  if (traj.states.empty()) return 0.0;
  const auto cons = [a](const JointState& s) {
    const double ct = std::cos(s[idx::theta]);
    return s[idx::theta_dot] * s[idx::theta_dot] + a * ct * ct;
  };
  const double c0 = cons(traj.states.front());
  double worst = 0.0;
  for (const auto& s : traj.states) worst = std::max(worst, std::abs(cons(s) - c0));
  return worst;
}

}  // namespace spinchain::geo
