#pragma once

#include <stdexcept>
#include <string>

namespace sof {

// Raised when an instance admits no feasible forest (CLI exit code 2).
struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised on malformed input or violated preconditions (CLI exit code 3).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sof
