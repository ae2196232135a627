#pragma once

#include <cstddef>
#include <functional>

namespace patchxfer {

/// Worker count used by parallel_for. Defaults to the hardware concurrency,
/// capped by the PATCHXFER_THREADS environment variable when set.
std::size_t thread_count();

/// Overrides the worker count for this process; 0 restores the default.
void set_thread_count(std::size_t n);

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited exactly once, so results do not depend on the chunking as long as
/// body writes only to outputs owned by its indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace patchxfer
