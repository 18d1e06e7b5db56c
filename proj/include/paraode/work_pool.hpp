#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace paraode {

// A fixed-width pool of worker threads with a single entry point,
// parallel_for, that runs body(0) ... body(count-1) with the calling thread
// participating.  Item-to-thread assignment is dynamic, so callers must
// write results only to disjoint slots; under that discipline every result
// is bitwise independent of the pool width.  Width 1 runs everything inline
// on the caller and spawns no threads.
class WorkPool {
 public:
  // width == 0 picks the hardware concurrency.
  explicit WorkPool(unsigned width = 0);
  ~WorkPool();

  WorkPool(const WorkPool&) = delete;
  WorkPool& operator=(const WorkPool&) = delete;

  unsigned width() const { return width_; }

  // Blocks until all items have run.  The first exception thrown by any
  // item is rethrown on the calling thread; remaining items are skipped.
  // Not reentrant: body must not call parallel_for on the same pool.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

 private:
  void worker_loop();
  void run_items();

  unsigned width_ = 1;
  std::vector<std::thread> threads_;

  std::mutex mutex_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t count_ = 0;
  std::atomic<std::size_t> next_{0};
  unsigned active_ = 0;
  std::uint64_t epoch_ = 0;
  bool stopping_ = false;
  std::exception_ptr first_error_;
};

// Convenience for code paths that run with or without a pool.
inline void parallel_map(WorkPool* pool, std::size_t count,
                         const std::function<void(std::size_t)>& body) {
  if (pool != nullptr) {
    pool->parallel_for(count, body);
  } else {
    for (std::size_t i = 0; i < count; ++i) body(i);
  }
}

}  // namespace paraode
