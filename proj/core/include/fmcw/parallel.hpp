#pragma once

#include <cstddef>
#include <functional>

namespace fmcw {

/// Worker count: hardware concurrency capped by FMCW_DOA_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Iterations must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fmcw
