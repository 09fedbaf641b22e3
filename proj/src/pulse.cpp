#include "spinchain/pulse.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spinchain::pulse {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Cubic Hermite resampling of theta_dot from a joint trajectory; the node
// derivative is the pendulum acceleration a sin(theta) cos(theta).
struct RateInterpolant {
  const ode::Trajectory<geo::JointState>& traj;
  double a;
  mutable std::size_t hint = 0;

  double operator()(double t) const {
    const auto& ts = traj.times;
    if (ts.size() == 1) return traj.states[0][geo::idx::theta_dot];
    if (t <= ts.front()) return traj.states.front()[geo::idx::theta_dot];
    if (t >= ts.back()) return traj.states.back()[geo::idx::theta_dot];
    while (hint + 2 < ts.size() && ts[hint + 1] < t) ++hint;
    while (hint > 0 && ts[hint] > t) --hint;
    const double t0 = ts[hint], t1 = ts[hint + 1];
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const auto accel = [this](std::size_t i) {
      const double th = traj.states[i][geo::idx::theta];
      return a * std::sin(th) * std::cos(th);
    };
    const double y0 = traj.states[hint][geo::idx::theta_dot], d0 = accel(hint);
    const double y1 = traj.states[hint + 1][geo::idx::theta_dot], d1 = accel(hint + 1);
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s2 * (3.0 - 2.0 * s);
    const double h11 = s2 * (s - 1.0);
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  }
};

SoftSegment resample(const SoftSegment& seg, std::size_t points) {
  if (seg.amplitudes.size() <= points || points < 2) return seg;
  SoftSegment out;
  out.control_index = seg.control_index;
  const double T = seg.duration();
  out.sample_dt = T / static_cast<double>(points - 1);
  out.amplitudes.reserve(points);
  for (std::size_t j = 0; j < points; ++j)
    out.amplitudes.push_back(seg.amplitude_at(static_cast<double>(j) * out.sample_dt));
  return out;
}

}  // namespace

double SoftSegment::amplitude_at(double local_t) const {
  if (amplitudes.empty()) return 0.0;
  if (amplitudes.size() == 1 || local_t <= 0.0) return amplitudes.front();
  const double T = duration();
  if (local_t >= T) return amplitudes.back();
  const double pos = local_t / sample_dt;
  auto i = static_cast<std::size_t>(pos);
  if (i > amplitudes.size() - 2) i = amplitudes.size() - 2;
  const double frac = pos - static_cast<double>(i);
  return amplitudes[i] * (1.0 - frac) + amplitudes[i + 1] * frac;
}

void PulseSchedule::recompute_duration() {
  total_duration = 0.0;
  for (const auto& seg : segments)
    if (const auto* soft = std::get_if<SoftSegment>(&seg)) total_duration += soft->duration();
}

PulseSchedule reconstruct_control(const geo::GeodesicSolution& sol, int control_index) {
  const double a = geo::pendulum_coefficient(sol.k);
  const double drift = geo::max_conserved_drift(sol.trajectory, a);
  if (drift > 1e-6) {
    std::ostringstream msg;
    msg << "reconstruct_control: conserved-constant drift " << drift
        << " exceeds 1e-6; trajectory does not follow the pendulum flow";
    throw std::runtime_error(msg.str());
  }

  PulseSchedule schedule;
  const int spin = control_index + 1;

  // The physical start state has its (x_{2l}, x_{2l+1}) angle at 0 while the
  // geodesic begins at theta(0); the mismatch is removed by an instantaneous
  // rotation, as is the terminal alignment onto angle pi/2. Both vanish for
  // the canonical alpha=0, beta=pi/2 transfer.
  if (std::abs(sol.theta0) > 1e-12)
    schedule.segments.emplace_back(HardRotation{control_index, sol.theta0, spin, 'y'});

  const auto& traj = sol.trajectory;
  SoftSegment seg;
  seg.control_index = control_index;
  if (traj.size() < 2) {
    seg.sample_dt = 0.0;
    seg.amplitudes = {2.0 * sol.theta_dot0};
  } else {
    const RateInterpolant rate{traj, a};
    const std::size_t n = traj.size();
    const double T = traj.duration();
    seg.sample_dt = T / static_cast<double>(n - 1);
    seg.amplitudes.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      seg.amplitudes.push_back(2.0 * rate(static_cast<double>(i) * seg.sample_dt));
    // The endpoint sample sits where r2 = 0 makes the raw data least
    // trustworthy; extrapolate it from the previous two samples.
    if (n >= 3)
      seg.amplitudes[n - 1] = 2.0 * seg.amplitudes[n - 2] - seg.amplitudes[n - 3];
  }
  schedule.segments.emplace_back(seg);

  const double theta_end =
      traj.states.empty() ? sol.theta0 : traj.back()[geo::idx::theta];
  if (std::abs(kHalfPi - theta_end) > 1e-12)
    schedule.segments.emplace_back(HardRotation{control_index, kHalfPi - theta_end, spin, 'y'});

  schedule.recompute_duration();
  return schedule;
}

PulseSchedule conventional_sequence(double k, bool n_qubit_form) {
  if (!(k > 0.0)) throw std::domain_error("conventional_sequence: k must be positive");
  PulseSchedule schedule;
  SoftSegment wait1;
  wait1.control_index = 0;
  wait1.sample_dt = kHalfPi;
  wait1.amplitudes = {0.0, 0.0};
  schedule.segments.emplace_back(wait1);
  schedule.segments.emplace_back(HardRotation{1, kHalfPi, 2, 'y'});
  SoftSegment wait2;
  wait2.control_index = 0;
  wait2.sample_dt = kHalfPi / k;
  wait2.amplitudes = {0.0, 0.0};
  schedule.segments.emplace_back(wait2);
  if (n_qubit_form) {
    schedule.segments.emplace_back(HardRotation{0, kHalfPi, 1, 'x'});
    schedule.segments.emplace_back(HardRotation{0, kHalfPi, 2, 'x'});
  }
  schedule.recompute_duration();
  return schedule;
}

TransferReport simulate_schedule(const PulseSchedule& schedule, const std::vector<double>& ratios,
                                 const std::vector<double>& x0, const std::vector<double>& target,
                                 const SimulateOptions& opts) {
  if (ratios.empty()) throw std::domain_error("simulate_schedule: empty ratio vector");
  const std::size_t dim = 2 * ratios.size();
  if (x0.size() != dim || target.size() != dim)
    throw std::domain_error("simulate_schedule: state dimension must be " + std::to_string(dim));
  const int n_controls = static_cast<int>(ratios.size()) - 1;

  TransferReport report;
  report.initial_state = x0;
  report.target_state = target;

  std::vector<double> x = x0;
  double elapsed = 0.0;
  for (const auto& segment : schedule.segments) {
    if (const auto* hard = std::get_if<HardRotation>(&segment)) {
      if (hard->control_index == 0) continue;  // local marker
      if (hard->control_index < 0 || hard->control_index > n_controls)
        throw std::domain_error("simulate_schedule: hard rotation control index " +
                                std::to_string(hard->control_index) + " invalid for " +
                                std::to_string(n_controls) + " controls");
      const std::size_t i = 2 * static_cast<std::size_t>(hard->control_index) - 1;
      const double ca = std::cos(hard->angle), sa = std::sin(hard->angle);
      const double xa = x[i], xb = x[i + 1];
      x[i] = ca * xa - sa * xb;
      x[i + 1] = sa * xa + ca * xb;
      continue;
    }
    const auto& soft = std::get<SoftSegment>(segment);
    if (soft.control_index < 0 || soft.control_index > n_controls)
      throw std::domain_error("simulate_schedule: control index " +
                              std::to_string(soft.control_index) + " invalid for " +
                              std::to_string(n_controls) + " controls");
    const double T = soft.duration();
    if (T <= 0.0) continue;
    const std::size_t u_rate = soft.control_index > 0
                                   ? 2 * static_cast<std::size_t>(soft.control_index) - 1
                                   : static_cast<std::size_t>(-1);
    auto field = [&](double t, const std::vector<double>& s, std::vector<double>& d) {
      const double u = soft.control_index > 0 ? soft.amplitude_at(t) : 0.0;
      auto rate = [&](std::size_t j) {
        return (j % 2 == 0) ? ratios[j / 2] : (j == u_rate ? u : 0.0);
      };
      for (std::size_t i = 0; i < dim; ++i) {
        double v = 0.0;
        if (i > 0) v += rate(i - 1) * s[i - 1];
        if (i + 1 < dim) v -= rate(i) * s[i + 1];
        d[i] = v;
      }
    };
    const auto traj = ode::integrate(field, x, T, opts.step);
    x = traj.back();
    elapsed += T;
  }

  report.final_state = x;
  report.duration = elapsed;
  report.fidelity = 0.0;
  for (std::size_t i = 0; i < dim; ++i) report.fidelity += x[i] * target[i];
  return report;
}

TransferReport simulate_full(const PulseSchedule& schedule, double k,
                             const std::array<double, 4>& x0, const std::array<double, 4>& target,
                             const SimulateOptions& opts) {
  if (!(k > 0.0)) throw std::domain_error("simulate_full: k must be positive");
  return simulate_schedule(schedule, {1.0, k}, {x0.begin(), x0.end()},
                           {target.begin(), target.end()}, opts);
}

void write_pulse_csv(const PulseSchedule& schedule, std::ostream& out, std::size_t max_points) {
  out << "t,u,control_index\n";
  double t0 = 0.0;
  for (const auto& segment : schedule.segments) {
    if (const auto* hard = std::get_if<HardRotation>(&segment)) {
      out << "# hard control=" << hard->control_index << " angle=" << fmt17(hard->angle)
          << " spin=" << hard->spin << " axis=" << hard->axis << " t=" << fmt17(t0) << "\n";
      continue;
    }
    const auto soft = resample(std::get<SoftSegment>(segment), max_points);
    out << "# segment control=" << soft.control_index << " dt=" << fmt17(soft.sample_dt)
        << " n=" << soft.amplitudes.size() << "\n";
    for (std::size_t i = 0; i < soft.amplitudes.size(); ++i)
      out << fmt17(t0 + static_cast<double>(i) * soft.sample_dt) << "," << fmt17(soft.amplitudes[i])
          << "," << soft.control_index << "\n";
    t0 += soft.duration();
  }
}

void write_pulse_csv_file(const PulseSchedule& schedule, const std::string& path,
                          std::size_t max_points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("pulse csv: cannot open " + path + " for writing");
  write_pulse_csv(schedule, out, max_points);
}

namespace {

std::string directive_value(const std::string& line, const std::string& key, int line_no) {
  const std::string token = key + "=";
  const auto pos = line.find(token);
  if (pos == std::string::npos)
    throw std::runtime_error("pulse csv: line " + std::to_string(line_no) + ": missing '" + key +
                             "='");
  const auto start = pos + token.size();
  auto end = line.find(' ', start);
  if (end == std::string::npos) end = line.size();
  return line.substr(start, end - start);
}

double parse_double(const std::string& text, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("pulse csv: line " + std::to_string(line_no) + ": bad number '" +
                             text + "'");
  }
}

}  // namespace

PulseSchedule read_pulse_csv(std::istream& in) {
  PulseSchedule schedule;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  SoftSegment pending;
  bool pending_open = false;
  std::size_t expected = 0;
  int opened_at = 0;

  auto flush = [&] {
    if (!pending_open) return;
    if (pending.amplitudes.size() != expected)
      throw std::runtime_error("pulse csv: segment opened at line " + std::to_string(opened_at) +
                               " declared " + std::to_string(expected) + " samples but has " +
                               std::to_string(pending.amplitudes.size()));
    if (pending.control_index == 0)
      for (double u : pending.amplitudes)
        if (u != 0.0)
          throw std::runtime_error("pulse csv: free-evolution segment opened at line " +
                                   std::to_string(opened_at) + " has non-zero amplitude");
    schedule.segments.emplace_back(pending);
    pending = SoftSegment{};
    pending_open = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "t,u,control_index")
        throw std::runtime_error("pulse csv: line " + std::to_string(line_no) +
                                 ": expected header 't,u,control_index'");
      header_seen = true;
      continue;
    }
    if (line.rfind("# hard", 0) == 0) {
      flush();
      HardRotation hard;
      hard.control_index =
          static_cast<int>(parse_double(directive_value(line, "control", line_no), line_no));
      hard.angle = parse_double(directive_value(line, "angle", line_no), line_no);
      hard.spin = static_cast<int>(parse_double(directive_value(line, "spin", line_no), line_no));
      const std::string axis = directive_value(line, "axis", line_no);
      hard.axis = axis.empty() ? 'y' : axis[0];
      schedule.segments.emplace_back(hard);
      continue;
    }
    if (line.rfind("# segment", 0) == 0) {
      flush();
      pending = SoftSegment{};
      pending.control_index =
          static_cast<int>(parse_double(directive_value(line, "control", line_no), line_no));
      pending.sample_dt = parse_double(directive_value(line, "dt", line_no), line_no);
      expected =
          static_cast<std::size_t>(parse_double(directive_value(line, "n", line_no), line_no));
      if (expected == 0)
        throw std::runtime_error("pulse csv: line " + std::to_string(line_no) +
                                 ": segment declares zero samples");
      pending.amplitudes.reserve(expected);
      pending_open = true;
      opened_at = line_no;
      continue;
    }
    if (line[0] == '#') continue;  // other comments

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw std::runtime_error("pulse csv: line " + std::to_string(line_no) +
                               ": expected 't,u,control_index'");
    if (!pending_open)
      throw std::runtime_error("pulse csv: line " + std::to_string(line_no) +
                               ": sample row outside of a '# segment' block");
    const double u = parse_double(line.substr(c1 + 1, c2 - c1 - 1), line_no);
    pending.amplitudes.push_back(u);
    if (pending.amplitudes.size() > expected)
      throw std::runtime_error("pulse csv: line " + std::to_string(line_no) +
                               ": more samples than declared in segment header");
  }
  if (!header_seen) throw std::runtime_error("pulse csv: empty file");
  flush();
  schedule.recompute_duration();
  return schedule;
}

PulseSchedule read_pulse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("pulse csv: cannot open " + path);
  return read_pulse_csv(in);
}

std::string report_to_json(const TransferReport& report) {
  nlohmann::ordered_json doc;
  doc["duration"] = report.duration;
  doc["fidelity"] = report.fidelity;
  doc["target"] = report.target_state;
  doc["final"] = report.final_state;
  return doc.dump(2) + "\n";
}

}  // namespace spinchain::pulse
