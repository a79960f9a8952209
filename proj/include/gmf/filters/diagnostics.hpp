#pragma once

#include <string>
#include <vector>

namespace gmf {

/// Collects recoverable events (weight collapse, degenerate covariances).
/// Not thread-safe; filters only emit outside their parallel loops.
struct Diagnostics {
  std::vector<std::string> events;

  void emit(std::string message) { events.push_back(std::move(message)); }
  [[nodiscard]] bool empty() const noexcept { return events.empty(); }
};

/// Emits into `sink` when it is non-null.
inline void emit(Diagnostics* sink, std::string message) {
  if (sink != nullptr) {
    sink->emit(std::move(message));
  }
}

}  // namespace gmf
