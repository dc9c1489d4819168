#pragma once

#include <atomic>
#include <exception>
#include <mutex>

namespace cutfem::detail {

// Exceptions may not leave an OpenMP region; loop bodies run through the
// guard, which captures the first exception and rethrows it after the join.
class ParallelGuard {
 public:
  template <typename F>
  void run(F&& body) noexcept {
    if (failed_.load(std::memory_order_relaxed)) return;
    try {
      body();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!exception_) {
        exception_ = std::current_exception();
        failed_.store(true, std::memory_order_relaxed);
      }
    }
  }

  void rethrow() const {
    if (exception_) std::rethrow_exception(exception_);
  }

 private:
  std::mutex mutex_;
  std::atomic<bool> failed_{false};
  std::exception_ptr exception_;
};

}  // namespace cutfem::detail
