#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace dunkl {

struct VerifyConfig {
  double sigma = 0.5;
  double s = 1.0;
  std::size_t K = 40;
  std::size_t N = 0;  // 0: default node count
  double grid_extent_factor = 1.5;
  std::uint64_t seed = 42;
  std::size_t trials = 200;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "embeddings", "decay", "halfline"};
  return names;
}

/// Runs one suite ("algebra", "embeddings", "decay", "halfline") or "all".
/// The report lists every invariant as {"name", "pass", "value", "tolerance"}
/// plus any empirical constants, and a top-level "pass". Deterministic for a
/// fixed config.
nlohmann::json run_suite(const std::string& suite, const VerifyConfig& cfg);

}  // namespace dunkl
