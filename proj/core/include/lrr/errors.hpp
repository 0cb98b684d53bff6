#pragma once

#include <stdexcept>
#include <string>

namespace lrr {

// A decomposition or iteration produced unusable numbers.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// File access or parse failure.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lrr
