#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridlay {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing input: files, formats, arguments, preconditions.
class InputError : public Error {
public:
  using Error::Error;
};

/// Numeric failure inside an optimizer or eigen-solver.
class SolverError : public Error {
public:
  SolverError(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

private:
  std::size_t iteration_;
};

/// A layout does not fit the grid or window it must be placed in.
class OverflowError : public Error {
public:
  OverflowError(const std::string& what, int required_width, int required_height)
      : Error(what), required_width_(required_width), required_height_(required_height) {}

  int required_width() const noexcept { return required_width_; }
  int required_height() const noexcept { return required_height_; }

private:
  int required_width_;
  int required_height_;
};

} // namespace gridlay
