#include "spinchain/chain_model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spinchain::chain {

void ChainSpec::validate() const {
  if (couplings_hz.empty())
    throw std::domain_error("chain: need at least one coupling (n >= 2 spins)");
  for (std::size_t i = 0; i < couplings_hz.size(); ++i) {
    const double j = couplings_hz[i];
    if (!(j > 0.0) || !std::isfinite(j))
      throw std::domain_error("chain: coupling " + std::to_string(i) +
                              " must be a positive finite number, got " + std::to_string(j));
  }
}

void TransferEndpoints::validate() const {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(alpha >= 0.0 && alpha <= half_pi) || !std::isfinite(alpha))
    throw std::domain_error("endpoints: alpha must lie in [0, pi/2]");
  if (!(beta >= 0.0 && beta <= half_pi) || !std::isfinite(beta))
    throw std::domain_error("endpoints: beta must lie in [0, pi/2]");
}

NormalizedChain normalize_chain(const ChainSpec& spec, std::size_t ref_index) {
  spec.validate();
  if (ref_index >= spec.couplings_hz.size())
    throw std::domain_error("normalize_chain: ref_index " + std::to_string(ref_index) +
                            " out of range for " + std::to_string(spec.couplings_hz.size()) +
                            " couplings");
  NormalizedChain chain;
  chain.ref_index = ref_index;
  chain.ref_hz = spec.couplings_hz[ref_index];
  chain.ratios.reserve(spec.couplings_hz.size());
  for (double j : spec.couplings_hz) chain.ratios.push_back(j / chain.ref_hz);
  chain.ratios[ref_index] = 1.0;
  return chain;
}

ChainSpec denormalize_chain(const NormalizedChain& chain) {
  ChainSpec spec;
  spec.couplings_hz.reserve(chain.ratios.size());
  for (double k : chain.ratios) spec.couplings_hz.push_back(k * chain.ref_hz);
  return spec;
}

double dimensionless_to_seconds(double tau, const NormalizedChain& chain) {
  if (tau < 0.0) throw std::domain_error("dimensionless_to_seconds: tau must be non-negative");
  return tau / (2.0 * std::numbers::pi * chain.ref_hz);
}

double seconds_to_dimensionless(double seconds, const NormalizedChain& chain) {
  if (seconds < 0.0) throw std::domain_error("seconds_to_dimensionless: negative duration");
  return seconds * 2.0 * std::numbers::pi * chain.ref_hz;
}

ChainSpec parse_chain_spec(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("chain file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("couplings_hz") || !doc["couplings_hz"].is_array())
    throw std::runtime_error("chain file: expected {\"couplings_hz\": [..]}");
  ChainSpec spec;
  for (const auto& v : doc["couplings_hz"]) {
    if (!v.is_number()) throw std::runtime_error("chain file: couplings_hz must be numbers");
    spec.couplings_hz.push_back(v.get<double>());
  }
  spec.validate();
  return spec;
}

ChainSpec load_chain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("chain file: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chain_spec(buf.str());
}

}  // namespace spinchain::chain
