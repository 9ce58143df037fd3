#pragma once

#include <cstddef>
#include <functional>

namespace tamed {

/// Runs independent indexed tasks. Implementations may run them in any
/// order and on any thread; callers make results order-independent.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual std::size_t concurrency() const = 0;
  virtual void for_each(std::size_t count, const std::function<void(std::size_t)>& task) = 0;
};

class SerialExecutor final : public Executor {
 public:
  std::size_t concurrency() const override { return 1; }
  void for_each(std::size_t count, const std::function<void(std::size_t)>& task) override;
};

/// Spawns `workers` threads per call which claim task indices from a shared
/// counter. The first exception thrown by a task is rethrown to the caller.
class ThreadPoolExecutor final : public Executor {
 public:
  explicit ThreadPoolExecutor(std::size_t workers = 0);  // 0 = hardware concurrency
  std::size_t concurrency() const override { return workers_; }
  void for_each(std::size_t count, const std::function<void(std::size_t)>& task) override;

 private:
  std::size_t workers_;
};

}  // namespace tamed
