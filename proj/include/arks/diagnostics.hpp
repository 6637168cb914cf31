#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <utility>

namespace arks::diagnostics {

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline WarningHandler& handler() {
  static WarningHandler h = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}
}  // namespace detail

// Returns the previous handler so callers can restore it.
inline WarningHandler set_warning_handler(WarningHandler h) {
  return std::exchange(detail::handler(), std::move(h));
}

inline void warn(const std::string& msg) {
  if (detail::handler()) detail::handler()(msg);
}

}  // namespace arks::diagnostics
