// Command-line surface: single solves, figure-data sweeps, chain planning,
// schedule validation, and baseline export.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "spinchain/chain_model.hpp"
#include "spinchain/geodesic.hpp"
#include "spinchain/planner.hpp"
#include "spinchain/pulse.hpp"
#include "spinchain/sweep.hpp"

namespace {

namespace sc = spinchain;
constexpr double kHalfPi = std::numbers::pi / 2.0;

// Angles accept deg/rad/pi suffixes: "90deg", "1.57rad", "0.5pi", "1.57".
double parse_angle(const std::string& text) {
  std::string body = text;
  double scale = 1.0;
  if (body.size() >= 3 && body.ends_with("deg")) {
    scale = std::numbers::pi / 180.0;
    body = body.substr(0, body.size() - 3);
  } else if (body.size() >= 3 && body.ends_with("rad")) {
    body = body.substr(0, body.size() - 3);
  } else if (body.size() >= 2 && body.ends_with("pi")) {
    scale = std::numbers::pi;
    body = body.substr(0, body.size() - 2);
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(body, &used);
  } catch (const std::exception&) {
    throw CLI::ValidationError("angle", "cannot parse angle '" + text + "'");
  }
  if (used != body.size())
    throw CLI::ValidationError("angle", "cannot parse angle '" + text + "'");
  return value * scale;
}

std::vector<double> angle_grid(const std::vector<std::string>& values,
                               const std::vector<std::string>& range) {
  std::vector<double> grid;
  for (const auto& v : values) grid.push_back(parse_angle(v));
  if (!range.empty()) {
    if (range.size() != 3)
      throw CLI::ValidationError("range", "expected: <min> <max> <count>");
    const double lo = parse_angle(range[0]);
    const double hi = parse_angle(range[1]);
    const int count = std::stoi(range[2]);
    if (count < 2) throw CLI::ValidationError("range", "count must be >= 2");
    for (int i = 0; i < count; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

std::vector<double> value_grid(const std::vector<double>& values, const std::vector<double>& range) {
  std::vector<double> grid = values;
  if (!range.empty()) {
    if (range.size() != 3)
      throw CLI::ValidationError("range", "expected: <min> <max> <count>");
    const int count = static_cast<int>(range[2]);
    if (count < 2) throw CLI::ValidationError("range", "count must be >= 2");
    for (int i = 0; i < count; ++i)
      grid.push_back(range[0] +
                     (range[1] - range[0]) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

std::string solution_json(const sc::geo::GeodesicSolution& sol) {
  nlohmann::ordered_json doc;
  doc["k"] = sol.k;
  doc["alpha"] = sol.alpha;
  doc["beta"] = sol.beta;
  doc["theta0"] = sol.theta0;
  doc["theta_dot0"] = sol.theta_dot0;
  doc["c"] = sol.c;
  doc["duration"] = sol.duration;
  return doc.dump(2) + "\n";
}

int run_solve(double k, const std::string& alpha_str, const std::string& beta_str,
              const std::string& out_dir, double threshold, std::size_t csv_points) {
  const double alpha = parse_angle(alpha_str);
  const double beta = parse_angle(beta_str);
  const auto sol = sc::geo::shoot(k, {alpha, beta});
  const auto schedule = sc::pulse::reconstruct_control(sol);
  const std::array<double, 4> x0{std::cos(alpha), std::sin(alpha), 0.0, 0.0};
  const std::array<double, 4> target{0.0, 0.0, std::cos(beta), std::sin(beta)};
  const auto report = sc::pulse::simulate_full(schedule, k, x0, target);

  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/solution.json", solution_json(sol));
  sc::pulse::write_pulse_csv_file(schedule, out_dir + "/pulse.csv", csv_points);
  write_text_file(out_dir + "/report.json", sc::pulse::report_to_json(report));

  std::printf("k=%g alpha=%g beta=%g\n", k, alpha, beta);
  std::printf("duration   %.9f (units 1/J_ref)\n", sol.duration);
  std::printf("theta_dot0 %.9f  c %.9f\n", sol.theta_dot0, sol.c);
  std::printf("fidelity   %.12f\n", report.fidelity);
  std::printf("wrote %s/{solution.json,pulse.csv,report.json}\n", out_dir.c_str());
  if (report.fidelity < 1.0 - threshold) {
    std::fprintf(stderr, "verification failed: fidelity %.12f below %.12f\n", report.fidelity,
                 1.0 - threshold);
    return 1;
  }
  return 0;
}

int run_plan(const std::string& chain_path, std::size_t ref_index, int grid_points,
             const std::string& out_dir, double threshold, std::size_t csv_points,
             const std::string& curve_path, int gamma_count, sc::par::Exec exec) {
  const auto spec = sc::chain::load_chain_spec(chain_path);
  const auto chain = sc::chain::normalize_chain(spec, ref_index);
  std::filesystem::create_directories(out_dir);

  if (chain.n_spins() == 2) {
    // Single coupling: the transfer is one quarter period of free evolution.
    sc::pulse::PulseSchedule schedule;
    sc::pulse::SoftSegment wait;
    wait.control_index = 0;
    wait.sample_dt = kHalfPi / chain.ratios[0];
    wait.amplitudes = {0.0, 0.0};
    schedule.segments.emplace_back(wait);
    schedule.recompute_duration();
    const auto report = sc::planner::simulate_chain(schedule, chain, {1.0, 0.0});
    nlohmann::ordered_json doc;
    doc["betas"] = std::vector<double>{};
    doc["segment_times"] = std::vector<double>{schedule.total_duration};
    doc["total_time"] = schedule.total_duration;
    doc["units"] = "1/J_ref";
    doc["ref_hz"] = chain.ref_hz;
    doc["ref_index"] = chain.ref_index;
    doc["total_seconds"] = sc::chain::dimensionless_to_seconds(schedule.total_duration, chain);
    write_text_file(out_dir + "/plan.json", doc.dump(2) + "\n");
    sc::pulse::write_pulse_csv_file(schedule, out_dir + "/pulse.csv", csv_points);
    write_text_file(out_dir + "/report.json", sc::pulse::report_to_json(report));
    std::printf("2-spin chain: total %.9f (units 1/J_ref), fidelity %.12f\n",
                schedule.total_duration, report.fidelity);
    return report.fidelity >= 1.0 - threshold ? 0 : 1;
  }

  const auto plan = sc::planner::dp_solve(chain, grid_points, exec);
  const auto schedule = sc::planner::assemble_chain_pulse(plan);
  std::vector<double> x0(2 * chain.ratios.size(), 0.0);
  x0[0] = 1.0;
  const auto report = sc::planner::simulate_chain(schedule, chain, x0);

  write_text_file(out_dir + "/plan.json", sc::planner::plan_to_json(plan, chain));
  sc::pulse::write_pulse_csv_file(schedule, out_dir + "/pulse.csv", csv_points);
  write_text_file(out_dir + "/report.json", sc::pulse::report_to_json(report));

  const double conventional = sc::planner::conventional_chain_time(chain);
  std::printf("chain: %zu spins, ref J/(2pi) = %g Hz (index %zu)\n", chain.n_spins(),
              chain.ref_hz, chain.ref_index);
  std::printf("total      %.9f (units 1/J_ref) = %.6g s\n", plan.total_time,
              sc::chain::dimensionless_to_seconds(plan.total_time, chain));
  std::printf("conventional %.9f  (%.2f%% longer)\n", conventional,
              100.0 * (conventional - plan.total_time) / plan.total_time);
  std::printf("betas      ");
  for (double b : plan.betas) std::printf("%.9f ", b);
  std::printf("\nfidelity   %.12f\n", report.fidelity);
  std::printf("wrote %s/{plan.json,pulse.csv,report.json}\n", out_dir.c_str());

  if (!curve_path.empty()) {
    if (chain.n_spins() != 4) {
      std::fprintf(stderr, "--objective-curve needs a 4-spin chain\n");
      return 2;
    }
    std::vector<double> gammas;
    for (int i = 0; i < gamma_count; ++i)
      gammas.push_back(kHalfPi * static_cast<double>(i) / static_cast<double>(gamma_count - 1));
    const auto curve = sc::planner::objective_curve(chain, gammas, exec);
    std::ofstream out(curve_path);
    if (!out) throw std::runtime_error("cannot open " + curve_path + " for writing");
    out << "gamma,J\n";
    char buf[80];
    for (const auto& [g, j] : curve) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", g, j);
      out << buf;
    }
    std::printf("wrote %s (%zu points)\n", curve_path.c_str(), curve.size());
  }

  if (report.fidelity < 1.0 - threshold) {
    std::fprintf(stderr, "verification failed: fidelity %.12f below %.12f\n", report.fidelity,
                 1.0 - threshold);
    return 1;
  }
  return 0;
}

int run_validate(const std::string& pulse_path, const std::string& chain_path,
                 std::optional<double> k, const std::string& alpha_str,
                 const std::string& beta_str, std::size_t ref_index, double threshold,
                 const std::string& report_path) {
  const auto schedule = sc::pulse::read_pulse_csv_file(pulse_path);
  sc::pulse::TransferReport report;
  if (!chain_path.empty()) {
    const auto chain = sc::chain::normalize_chain(sc::chain::load_chain_spec(chain_path), ref_index);
    std::vector<double> x0(2 * chain.ratios.size(), 0.0);
    x0[0] = 1.0;
    report = sc::planner::simulate_chain(schedule, chain, x0);
  } else if (k) {
    const double alpha = parse_angle(alpha_str);
    const double beta = parse_angle(beta_str);
    report = sc::pulse::simulate_full(schedule, *k, {std::cos(alpha), std::sin(alpha), 0.0, 0.0},
                                      {0.0, 0.0, std::cos(beta), std::sin(beta)});
  } else {
    std::fprintf(stderr, "validate: need --chain or --k\n");
    return 2;
  }
  const std::string json = sc::pulse::report_to_json(report);
  if (!report_path.empty()) write_text_file(report_path, json);
  std::fputs(json.c_str(), stdout);
  return report.fidelity >= 1.0 - threshold ? 0 : 1;
}

int run_export(const std::string& kind, std::optional<double> k, const std::string& chain_path,
               std::size_t ref_index, bool n_qubit_form, const std::string& output) {
  sc::pulse::PulseSchedule schedule;
  if (kind == "conventional") {
    if (!k) {
      std::fprintf(stderr, "export conventional: need --k\n");
      return 2;
    }
    schedule = sc::pulse::conventional_sequence(*k, n_qubit_form);
  } else if (kind == "conventional-chain") {
    if (chain_path.empty()) {
      std::fprintf(stderr, "export conventional-chain: need --chain\n");
      return 2;
    }
    const auto chain = sc::chain::normalize_chain(sc::chain::load_chain_spec(chain_path), ref_index);
    schedule = sc::planner::conventional_chain_sequence(chain);
  } else {
    std::fprintf(stderr, "export: unknown kind '%s'\n", kind.c_str());
    return 2;
  }
  sc::pulse::write_pulse_csv_file(schedule, output);
  std::printf("wrote %s (total duration %.9f)\n", output.c_str(), schedule.total_duration);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal pulse synthesis for Ising spin chains with unequal couplings"};
  app.require_subcommand(1);

  int threads = 0;
  bool serial = false;
  app.add_option("--threads", threads, "worker thread count (0 = default)");
  app.add_flag("--serial", serial, "force the serial reference kernels");

  // --- solve ---------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "solve one transfer and export the pulse");
  double solve_k = 1.0;
  std::string solve_alpha = "0", solve_beta = "90deg", solve_out = "out";
  double solve_threshold = 1e-6;
  std::size_t solve_points = 1000;
  solve->add_option("--k", solve_k, "coupling ratio")->required();
  solve->add_option("--alpha", solve_alpha, "initial angle (deg/rad/pi suffix)");
  solve->add_option("--beta", solve_beta, "target angle (deg/rad/pi suffix)");
  solve->add_option("--out-dir", solve_out, "output directory");
  solve->add_option("--threshold", solve_threshold, "max accepted infidelity");
  solve->add_option("--csv-points", solve_points, "max samples per exported segment");

  // --- sweep ---------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "generate a dataset over a parameter grid");
  std::string sweep_kind;
  std::vector<double> sweep_k, sweep_k_range;
  std::vector<std::string> sweep_alpha, sweep_alpha_range;
  std::vector<std::string> sweep_beta, sweep_beta_range;
  std::vector<std::string> sweep_gamma, sweep_gamma_range;
  double sweep_fixed_k = 2.0;
  std::string sweep_chain, sweep_output;
  std::size_t sweep_ref_index = 0;
  sweep_cmd
      ->add_option("--kind", sweep_kind,
                   "time_vs_k | ratio_vs_k | time_vs_k_beta | time_vs_alpha_beta | "
                   "objective_vs_gamma")
      ->required();
  sweep_cmd->add_option("--k", sweep_k, "k grid values");
  sweep_cmd->add_option("--k-range", sweep_k_range, "k grid: <min> <max> <count>")->expected(3);
  sweep_cmd->add_option("--alpha", sweep_alpha, "alpha grid values");
  sweep_cmd->add_option("--alpha-range", sweep_alpha_range, "alpha grid: <min> <max> <count>")
      ->expected(3);
  sweep_cmd->add_option("--beta", sweep_beta, "beta grid values");
  sweep_cmd->add_option("--beta-range", sweep_beta_range, "beta grid: <min> <max> <count>")
      ->expected(3);
  sweep_cmd->add_option("--gamma", sweep_gamma, "gamma grid values");
  sweep_cmd->add_option("--gamma-range", sweep_gamma_range, "gamma grid: <min> <max> <count>")
      ->expected(3);
  sweep_cmd->add_option("--fixed-k", sweep_fixed_k, "k for time_vs_alpha_beta");
  sweep_cmd->add_option("--chain", sweep_chain, "chain JSON for objective_vs_gamma");
  sweep_cmd->add_option("--ref-index", sweep_ref_index, "reference coupling index");
  sweep_cmd->add_option("--output", sweep_output, "output CSV path")->required();

  // --- plan ----------------------------------------------------------------
  auto* plan_cmd = app.add_subcommand("plan", "plan a chain transfer by dynamic programming");
  std::string plan_chain, plan_out = "out", plan_curve;
  std::size_t plan_ref_index = 0;
  int plan_grid = 129, plan_gamma_count = 65;
  double plan_threshold = 1e-5;
  std::size_t plan_points = 1000;
  plan_cmd->add_option("--chain", plan_chain, "chain JSON file")->required();
  plan_cmd->add_option("--ref-index", plan_ref_index, "reference coupling index");
  plan_cmd->add_option("--grid-points", plan_grid, "DP angle grid size");
  plan_cmd->add_option("--out-dir", plan_out, "output directory");
  plan_cmd->add_option("--threshold", plan_threshold, "max accepted infidelity");
  plan_cmd->add_option("--csv-points", plan_points, "max samples per exported segment");
  plan_cmd->add_option("--objective-curve", plan_curve, "also write J(gamma) CSV (4-spin)");
  plan_cmd->add_option("--gamma-count", plan_gamma_count, "points for --objective-curve");

  // --- validate --------------------------------------------------------------
  auto* val_cmd = app.add_subcommand("validate", "re-simulate an exported pulse CSV");
  std::string val_pulse, val_chain, val_alpha = "0", val_beta = "90deg", val_report;
  std::optional<double> val_k;
  double val_threshold = 1e-5;
  std::size_t val_ref_index = 0;
  val_cmd->add_option("--pulse", val_pulse, "pulse CSV file")->required();
  val_cmd->add_option("--chain", val_chain, "chain JSON file");
  val_cmd->add_option("--k", val_k, "coupling ratio for a single-segment pulse");
  val_cmd->add_option("--alpha", val_alpha, "initial angle (with --k)");
  val_cmd->add_option("--beta", val_beta, "target angle (with --k)");
  val_cmd->add_option("--ref-index", val_ref_index, "reference coupling index");
  val_cmd->add_option("--threshold", val_threshold, "max accepted infidelity");
  val_cmd->add_option("--report", val_report, "also write the report JSON here");

  // --- export ----------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("export", "export a baseline schedule");
  std::string exp_kind = "conventional", exp_chain, exp_output;
  std::optional<double> exp_k;
  std::size_t exp_ref_index = 0;
  bool exp_nqf = false;
  exp_cmd->add_option("--kind", exp_kind, "conventional | conventional-chain");
  exp_cmd->add_option("--k", exp_k, "coupling ratio (conventional)");
  exp_cmd->add_option("--chain", exp_chain, "chain JSON (conventional-chain)");
  exp_cmd->add_option("--ref-index", exp_ref_index, "reference coupling index");
  exp_cmd->add_flag("--n-qubit-form", exp_nqf, "append the trailing local-rotation markers");
  exp_cmd->add_option("--output", exp_output, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  const sc::par::Exec exec = serial ? sc::par::Exec::serial : sc::par::Exec::parallel;

  try {
    if (*solve) return run_solve(solve_k, solve_alpha, solve_beta, solve_out, solve_threshold,
                                 solve_points);
    if (*sweep_cmd) {
      sc::sweep::Request req;
      req.kind = sc::sweep::kind_from_name(sweep_kind);
      req.k_values = value_grid(sweep_k, sweep_k_range);
      req.alpha_values = angle_grid(sweep_alpha, sweep_alpha_range);
      req.beta_values = angle_grid(sweep_beta, sweep_beta_range);
      req.gamma_values = angle_grid(sweep_gamma, sweep_gamma_range);
      req.fixed_k = sweep_fixed_k;
      if (!sweep_chain.empty())
        req.chain = sc::chain::normalize_chain(sc::chain::load_chain_spec(sweep_chain),
                                               sweep_ref_index);
      const auto table = sc::sweep::run(req, exec);
      sc::sweep::write_csv_file(table, sweep_output);
      std::printf("wrote %s (%zu rows)\n", sweep_output.c_str(), table.rows.size());
      if (table.any_error()) {
        std::fprintf(stderr, "sweep finished with per-row errors\n");
        return 1;
      }
      return 0;
    }
    if (*plan_cmd)
      return run_plan(plan_chain, plan_ref_index, plan_grid, plan_out, plan_threshold, plan_points,
                      plan_curve, plan_gamma_count, exec);
    if (*val_cmd)
      return run_validate(val_pulse, val_chain, val_k, val_alpha, val_beta, val_ref_index,
                          val_threshold, val_report);
    if (*exp_cmd) return run_export(exp_kind, exp_k, exp_chain, exp_ref_index, exp_nqf, exp_output);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
