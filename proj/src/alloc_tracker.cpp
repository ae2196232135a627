#include "patchxfer/alloc_tracker.hpp"

#include <atomic>

namespace patchxfer::alloc {

namespace {
std::atomic<bool> g_enabled{false};
std::atomic<std::size_t> g_current{0};
std::atomic<std::size_t> g_peak{0};
}  // namespace

bool tracking_enabled() noexcept { return g_enabled.load(std::memory_order_relaxed); }
std::size_t current_bytes() noexcept { return g_current.load(std::memory_order_relaxed); }
std::size_t peak_bytes() noexcept { return g_peak.load(std::memory_order_relaxed); }

void reset_peak() noexcept { g_peak.store(g_current.load(std::memory_order_relaxed)); }

namespace detail {

void enable() noexcept { g_enabled.store(true); }

void on_allocate(std::size_t bytes) noexcept {
  const std::size_t now = g_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  std::size_t peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak && !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}

void on_release(std::size_t bytes) noexcept {
  g_current.fetch_sub(bytes, std::memory_order_relaxed);
}

}  // namespace detail

}  // namespace patchxfer::alloc
