#pragma once

#include <stdexcept>
#include <string>

namespace combnet {

// Bad user-supplied parameters (CLI maps these to exit code 2).
struct parameter_error : std::invalid_argument {
  explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// Configuration that cannot work as requested (e.g. field too small).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariant; indicates a bug, not bad input.
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace combnet
