#pragma once

#include <functional>

namespace mcporo {

/// Worker count from the MCPORO_WORKERS environment variable, or `fallback`
/// when unset. Values below 1 are clamped to 1.
int worker_count_from_env(int fallback = 1);

/// Runs fn(0) ... fn(n - 1) on up to `workers` threads. Tasks must write only
/// to their own outputs. If tasks throw, the exception of the lowest index is
/// rethrown after all threads finish, so failures do not depend on timing.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace mcporo
