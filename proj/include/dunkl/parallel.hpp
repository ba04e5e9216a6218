#pragma once

#include <cstddef>
#include <functional>

namespace dunkl {

/// Worker count: hardware concurrency, capped by DUNKL_SPECTRAL_THREADS when set.
std::size_t thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. Each index
/// is processed exactly once; callers write results into per-index slots so
/// the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dunkl
