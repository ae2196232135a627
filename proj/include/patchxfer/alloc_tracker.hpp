#pragma once

#include <cstddef>

namespace patchxfer::alloc {

// Byte counters fed by the replacement operator new/delete in
// alloc_hooks.cpp. Executables that do not link the hooks see
// tracking_enabled() == false and zero counts.

bool tracking_enabled() noexcept;
std::size_t current_bytes() noexcept;
std::size_t peak_bytes() noexcept;

/// Sets the peak to the current live byte count.
void reset_peak() noexcept;

namespace detail {
void enable() noexcept;
void on_allocate(std::size_t bytes) noexcept;
void on_release(std::size_t bytes) noexcept;
}  // namespace detail

}  // namespace patchxfer::alloc
