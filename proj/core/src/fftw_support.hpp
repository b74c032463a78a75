#pragma once

#include <cmath>
#include <mutex>

namespace mhdlab::detail {

// FFTW planning is not thread-safe.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Symbol of the 4th-order central first difference: D e^{i theta n} = i s(theta)/h e^{i theta n}.
inline double difference_symbol(double theta) { return (8.0 * std::sin(theta) - std::sin(2.0 * theta)) / 6.0; }

}  // namespace mhdlab::detail
