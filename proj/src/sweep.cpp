#include "spinchain/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spinchain/geodesic.hpp"
#include "spinchain/planner.hpp"

namespace spinchain::sweep {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_positive(const std::vector<double>& values, const char* name) {
  if (values.empty()) throw std::domain_error(std::string("sweep: empty ") + name + " grid");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::domain_error(std::string("sweep: ") + name + " grid values must be positive");
}

void check_angles(const std::vector<double>& values, const char* name) {
  if (values.empty()) throw std::domain_error(std::string("sweep: empty ") + name + " grid");
  for (double v : values)
    if (!(v >= 0.0 && v <= kHalfPi))
      throw std::domain_error(std::string("sweep: ") + name + " grid values must lie in [0, pi/2]");
}

}  // namespace

void Request::validate() const {
  switch (kind) {
    case Kind::time_vs_k:
    case Kind::ratio_vs_k:
      check_positive(k_values, "k");
      break;
    case Kind::time_vs_k_beta:
      check_positive(k_values, "k");
      check_angles(beta_values, "beta");
      break;
    case Kind::time_vs_alpha_beta:
      if (!(fixed_k > 0.0)) throw std::domain_error("sweep: fixed k must be positive");
      check_angles(alpha_values, "alpha");
      check_angles(beta_values, "beta");
      break;
    case Kind::objective_vs_gamma:
      check_angles(gamma_values, "gamma");
      if (!chain) throw std::domain_error("sweep: objective_vs_gamma needs a chain");
      if (chain->n_spins() != 4)
        throw std::domain_error("sweep: objective_vs_gamma needs a 4-spin chain");
      break;
  }
}

bool Table::any_error() const {
  for (const auto& e : errors)
    if (!e.empty()) return true;
  return false;
}

Table run(const Request& req, par::Exec exec) {
  req.validate();

  Table table;
  int n_rows = 0;
  switch (req.kind) {
    case Kind::time_vs_k:
      table.columns = {"k", "T"};
      n_rows = static_cast<int>(req.k_values.size());
      break;
    case Kind::ratio_vs_k:
      table.columns = {"k", "T", "conventional", "eta"};
      n_rows = static_cast<int>(req.k_values.size());
      break;
    case Kind::time_vs_k_beta:
      table.columns = {"k", "beta", "T"};
      n_rows = static_cast<int>(req.k_values.size() * req.beta_values.size());
      break;
    case Kind::time_vs_alpha_beta:
      table.columns = {"k", "alpha", "beta", "T"};
      n_rows = static_cast<int>(req.alpha_values.size() * req.beta_values.size());
      break;
    case Kind::objective_vs_gamma:
      table.columns = {"gamma", "J"};
      n_rows = static_cast<int>(req.gamma_values.size());
      break;
  }
  table.rows.assign(n_rows, {});
  table.errors.assign(n_rows, "");

  auto evaluate = [&](int i) {
    auto& row = table.rows[static_cast<std::size_t>(i)];
    try {
      switch (req.kind) {
        case Kind::time_vs_k: {
          const double k = req.k_values[static_cast<std::size_t>(i)];
          row = {k, geo::minimal_time(k, 0.0, kHalfPi)};
          break;
        }
        case Kind::ratio_vs_k: {
          const double k = req.k_values[static_cast<std::size_t>(i)];
          const double t = geo::minimal_time(k, 0.0, kHalfPi);
          const double conventional = kHalfPi + kHalfPi / k;
          row = {k, t, conventional, t / conventional};
          break;
        }
        case Kind::time_vs_k_beta: {
          const auto nb = req.beta_values.size();
          const double k = req.k_values[static_cast<std::size_t>(i) / nb];
          const double beta = req.beta_values[static_cast<std::size_t>(i) % nb];
          row = {k, beta, geo::minimal_time(k, 0.0, beta)};
          break;
        }
        case Kind::time_vs_alpha_beta: {
          const auto nb = req.beta_values.size();
          const double alpha = req.alpha_values[static_cast<std::size_t>(i) / nb];
          const double beta = req.beta_values[static_cast<std::size_t>(i) % nb];
          row = {req.fixed_k, alpha, beta, geo::minimal_time(req.fixed_k, alpha, beta)};
          break;
        }
        case Kind::objective_vs_gamma: {
          const double gamma = req.gamma_values[static_cast<std::size_t>(i)];
          const auto& ks = req.chain->ratios;
          const double value = geo::minimal_time(ks[1] / ks[0], 0.0, gamma) / ks[0] +
                               geo::minimal_time(ks[2] / ks[1], gamma, kHalfPi) / ks[1];
          row = {gamma, value};
          break;
        }
      }
    } catch (const std::exception& e) {
      row.assign(table.columns.size(), std::nan(""));
      table.errors[static_cast<std::size_t>(i)] = e.what();
    }
  };
  par::for_each_index(n_rows, exec, evaluate);
  return table;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << table.columns[c] << ",";
  out << "error\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (double v : table.rows[r]) out << fmt17(v) << ",";
    out << table.errors[r] << "\n";
  }
}

void write_csv_file(const Table& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("sweep: cannot open " + path + " for writing");
  write_csv(table, out);
}

Kind kind_from_name(const std::string& name) {
  if (name == "time_vs_k") return Kind::time_vs_k;
  if (name == "ratio_vs_k") return Kind::ratio_vs_k;
  if (name == "time_vs_k_beta") return Kind::time_vs_k_beta;
  if (name == "time_vs_alpha_beta") return Kind::time_vs_alpha_beta;
  if (name == "objective_vs_gamma") return Kind::objective_vs_gamma;
  throw std::domain_error("sweep: unknown kind '" + name + "'");
}

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::time_vs_k: return "time_vs_k";
    case Kind::ratio_vs_k: return "ratio_vs_k";
    case Kind::time_vs_k_beta: return "time_vs_k_beta";
    case Kind::time_vs_alpha_beta: return "time_vs_alpha_beta";
    case Kind::objective_vs_gamma: return "objective_vs_gamma";
  }
  return "unknown";
}

}  // namespace spinchain::sweep
