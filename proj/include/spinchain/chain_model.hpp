#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Spin chains and transfer endpoints. Couplings are quoted in Hz (J/2pi);
// everything downstream works in dimensionless time, so the unit conversions
// live here and nowhere else.

namespace spinchain::chain {

// Nearest-neighbour Ising couplings J_{l,l+1}/(2*pi) in Hz for an n-spin
// chain (n-1 entries, n >= 2).
struct ChainSpec {
  std::vector<double> couplings_hz;

  std::size_t n_spins() const { return couplings_hz.size() + 1; }
  void validate() const;
};

// Dimensionless coupling ratios k_l relative to a reference coupling;
// ratios[ref_index] == 1 exactly.
struct NormalizedChain {
  std::vector<double> ratios;
  std::size_t ref_index = 0;
  double ref_hz = 0.0;

  std::size_t n_spins() const { return ratios.size() + 1; }
};

// Boundary angles on the reduced sphere, both in [0, pi/2].
struct TransferEndpoints {
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const;
};

NormalizedChain normalize_chain(const ChainSpec& spec, std::size_t ref_index);
ChainSpec denormalize_chain(const NormalizedChain& chain);

// tau in units of 1/J_ref  <->  seconds, with J_ref = 2*pi*ref_hz.
double dimensionless_to_seconds(double tau, const NormalizedChain& chain);
double seconds_to_dimensionless(double seconds, const NormalizedChain& chain);

// Chain input file: JSON object {"couplings_hz": [91.0, 15.0, 55.0]}.
ChainSpec load_chain_spec(const std::string& path);
ChainSpec parse_chain_spec(const std::string& json_text);

}  // namespace spinchain::chain
