#pragma once

#include <stdexcept>
#include <string>

namespace sphsep {

// Violated mathematical or interface precondition (bad degree/order pair,
// non-unit direction, malformed configuration, ...).
class precondition_error : public std::invalid_argument {
 public:
  explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

// Grid too coarse to resolve a requested spatial scale.
class under_resolution_error : public std::runtime_error {
 public:
  explicit under_resolution_error(const std::string& what) : std::runtime_error(what) {}
};

// File or format problem while reading/writing datasets.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sphsep
