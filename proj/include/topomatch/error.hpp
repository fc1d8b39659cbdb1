#pragma once

#include <stdexcept>
#include <string>

namespace topomatch {

// Malformed or out-of-contract input: bad files, bad dimensions, bad parameters.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A result violated one of its own invariants. Indicates a bug or a corrupted
// feature, never bad user input.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace topomatch
