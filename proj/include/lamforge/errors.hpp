#pragma once

#include <stdexcept>
#include <string>

namespace lamforge {

// Bad arguments or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Failure while running (solver breakdown, grid too coarse, ...). CLI exit code 3.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

class SvdConvergenceError : public RuntimeError {
 public:
  SvdConvergenceError(const std::string& what, double residual)
      : RuntimeError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ResolutionExhaustedError : public RuntimeError {
 public:
  ResolutionExhaustedError(const std::string& what, int depth)
      : RuntimeError(what), depth_(depth) {}
  int depth() const noexcept { return depth_; }

 private:
  int depth_;
};

}  // namespace lamforge
