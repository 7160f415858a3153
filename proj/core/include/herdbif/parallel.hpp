#pragma once

#include <cstddef>
#include <functional>

namespace herdbif {

/// Worker count resolution: explicit value, else the HERDBIF_JOBS environment
/// variable, else hardware concurrency.
unsigned resolve_jobs(unsigned requested);

/// Runs body(i) for i in [0, n). jobs = 0 selects resolve_jobs(0); jobs = 1
/// runs inline. The first exception thrown by any worker is rethrown after
/// all workers joined. Callers write results by index, so output order does
/// not depend on scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace herdbif
