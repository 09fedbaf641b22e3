#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spinchain/chain_model.hpp"
#include "spinchain/parallel.hpp"

// Dataset generation over parameter grids. Rows are evaluated independently
// (serial reference or OpenMP) and always assembled in lexicographic grid
// order, so identical requests produce byte-identical CSV output.

namespace spinchain::sweep {

enum class Kind {
  time_vs_k,         // T(k) for alpha=0, beta=pi/2
  ratio_vs_k,        // T(k) and eta(k) = T / (pi/2 + pi/(2k))
  time_vs_k_beta,    // T(k, beta) for alpha=0
  time_vs_alpha_beta,  // T(alpha, beta) at fixed k
  objective_vs_gamma   // two-segment chain objective J(gamma)
};

struct Request {
  Kind kind = Kind::time_vs_k;
  std::vector<double> k_values;
  std::vector<double> alpha_values;
  std::vector<double> beta_values;
  std::vector<double> gamma_values;
  double fixed_k = 2.0;                          // time_vs_alpha_beta
  std::optional<chain::NormalizedChain> chain;   // objective_vs_gamma

  void validate() const;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // one entry per grid point, grid order
  std::vector<std::string> errors;        // per-row error message, empty if ok

  bool any_error() const;
};

Table run(const Request& req, par::Exec exec = par::Exec::parallel);

// 17-significant-digit CSV with a trailing "error" column.
void write_csv(const Table& table, std::ostream& out);
void write_csv_file(const Table& table, const std::string& path);

Kind kind_from_name(const std::string& name);
std::string kind_name(Kind kind);

}  // namespace spinchain::sweep
