#pragma once

#include <chrono>
#include <optional>

#include "hodgekit/errors.hpp"

namespace hodgekit::budget {

// Wall-clock budget for long computations. A Scope installs a deadline for
// the current thread; checkpoint() throws ResourceLimit once it has passed.

namespace detail {
inline thread_local std::optional<std::chrono::steady_clock::time_point> deadline;
}

class Scope {
 public:
  explicit Scope(std::optional<double> seconds) : previous_(detail::deadline) {
    if (seconds) {
      auto ms = std::chrono::milliseconds(static_cast<long long>(*seconds * 1000.0));
      detail::deadline = std::chrono::steady_clock::now() + ms;
    }
  }
  ~Scope() { detail::deadline = previous_; }

  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  std::optional<std::chrono::steady_clock::time_point> previous_;
};

inline void checkpoint() {
  if (detail::deadline && std::chrono::steady_clock::now() > *detail::deadline) {
    throw ResourceLimit("time budget exhausted");
  }
}

}  // namespace hodgekit::budget
