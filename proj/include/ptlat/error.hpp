#pragma once

#include <stdexcept>
#include <string>

namespace ptlat {

enum class ErrorKind {
  InvalidSpec,
  InvalidPlacement,
  UnsupportedBoundary,
  IndexOutOfRange,
  NonFinite,
  NoConvergence,
  UnconvergedSpectrum,
  NoBreakingFound,
  DegenerateInput,
  AllDivergent,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can map it
// onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Input problems (bad geometry, placement, indices) as opposed to numerical
  // failures.
  bool is_usage_error() const noexcept {
    return kind_ == ErrorKind::InvalidSpec || kind_ == ErrorKind::InvalidPlacement ||
           kind_ == ErrorKind::UnsupportedBoundary || kind_ == ErrorKind::IndexOutOfRange ||
           kind_ == ErrorKind::DegenerateInput;
  }

 private:
  ErrorKind kind_;
};

}  // namespace ptlat
