// Global operator new/delete replacements that report live heap bytes to
// patchxfer::alloc. Linked only into executables that measure allocations.

#include <cstdlib>
#include <new>

#include "patchxfer/alloc_tracker.hpp"

namespace {

// Size header in front of every block; keeps max_align_t alignment.
constexpr std::size_t kHeader = alignof(std::max_align_t);

void* tracked_alloc(std::size_t n) noexcept {
  void* base = std::malloc(n + kHeader);
  if (!base) return nullptr;
  *static_cast<std::size_t*>(base) = n;
  patchxfer::alloc::detail::on_allocate(n);
  return static_cast<char*>(base) + kHeader;
}

void tracked_free(void* p) noexcept {
  if (!p) return;
  void* base = static_cast<char*>(p) - kHeader;
  patchxfer::alloc::detail::on_release(*static_cast<std::size_t*>(base));
  std::free(base);
}

const bool kRegistered = [] {
  patchxfer::alloc::detail::enable();
  return true;
}();

}  // namespace

void* operator new(std::size_t n) {
  if (void* p = tracked_alloc(n)) return p;
  throw std::bad_alloc();
}
void* operator new[](std::size_t n) {
  if (void* p = tracked_alloc(n)) return p;
  throw std::bad_alloc();
}
void* operator new(std::size_t n, const std::nothrow_t&) noexcept { return tracked_alloc(n); }
void* operator new[](std::size_t n, const std::nothrow_t&) noexcept { return tracked_alloc(n); }
void operator delete(void* p) noexcept { tracked_free(p); }
void operator delete[](void* p) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete(void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept { tracked_free(p); }
