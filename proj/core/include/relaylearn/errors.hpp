#pragma once

#include <stdexcept>
#include <string>

namespace relay {

// Raised when an internal invariant that should hold by construction is
// observed to fail (a bug, as opposed to bad user input). The CLI maps this
// to exit code 2; plain std::invalid_argument / std::domain_error map to 1.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace relay
