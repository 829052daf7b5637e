#pragma once

#include <chrono>
#include <stdexcept>

namespace rearrange {

/// Thrown by long-running search loops once their deadline has passed.
class TimeoutError : public std::runtime_error {
 public:
  TimeoutError() : std::runtime_error("time budget exhausted") {}
};

/// Wall-clock cutoff polled cooperatively by the planners.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  /// Never expires.
  Deadline() = default;

  static Deadline after(double seconds) {
    Deadline d;
    d.limited_ = true;
    d.end_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(seconds));
    return d;
  }

  bool expired() const { return limited_ && Clock::now() >= end_; }

  void check() const {
    if (expired()) throw TimeoutError();
  }

 private:
  bool limited_ = false;
  Clock::time_point end_{};
};

}  // namespace rearrange
