#pragma once

#include <condition_variable>
#include <cstddef>
#include <mutex>

namespace kaping {

// Counting gate bounding in-flight requests. Tracks the peak number of
// concurrent holders so tests can observe the bound.
class ConcurrencyGate {
 public:
  explicit ConcurrencyGate(std::size_t limit) : limit_(limit ? limit : 1) {}

  ConcurrencyGate(const ConcurrencyGate&) = delete;
  ConcurrencyGate& operator=(const ConcurrencyGate&) = delete;

  class Slot {
   public:
    explicit Slot(ConcurrencyGate& gate) : gate_(&gate) { gate_->acquire(); }
    ~Slot() { gate_->release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    ConcurrencyGate* gate_;
  };

  std::size_t limit() const { return limit_; }

  std::size_t in_flight() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return in_flight_;
  }

  std::size_t peak() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return peak_;
  }

 private:
  void acquire() {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_.wait(lock, [this] { return in_flight_ < limit_; });
    ++in_flight_;
    if (in_flight_ > peak_) peak_ = in_flight_;
  }

  void release() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      --in_flight_;
    }
    cv_.notify_one();
  }

  const std::size_t limit_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t peak_ = 0;
};

}  // namespace kaping
