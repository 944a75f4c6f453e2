#pragma once

#include <stdexcept>
#include <string>

namespace snm {

// Bad caller input: malformed files, out-of-domain arguments, inconsistent
// configuration. Maps to exit code 2 in the CLI.
class invalid_input : public std::runtime_error {
 public:
  explicit invalid_input(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failure: divergent trajectories, factorization
// breakdown. Maps to exit code 3 in the CLI.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace snm
