#pragma once

#include <stdexcept>
#include <string>

namespace urt {

/// Failure categories. The CLI maps the first group to exit code 2 and
/// `numerical` to exit code 3.
enum class ErrorKind {
  configuration,  // invalid construction parameters
  usage,          // operation applied to the wrong kind of input
  degenerate,     // zero-norm or otherwise empty input
  truncation,     // tails too heavy for the periodic domain
  resolution,     // grid too coarse for the requested quantity
  untracked_peak,
  insufficient_fringes,
  proximity,      // charge too close to a conductor
  singular,       // evaluation on a source panel
  invalid_ensemble,
  io,
  numerical,      // a result violated a mathematical bound
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying the originating module and a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(std::string module, ErrorKind kind, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)), kind_(kind) {}

  const std::string& module() const noexcept { return module_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string module_;
  ErrorKind kind_;
};

}  // namespace urt
