#pragma once

#include <cstddef>
#include <functional>

namespace topomatch {

// Worker cap from TOPO_MATCH_THREADS, else hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Iterations must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace topomatch
