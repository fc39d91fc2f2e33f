#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsekit {

/// Error classes raised by the toolkit. The CLI maps `config` and `usage`
/// to exit code 2 and everything else to exit code 1.
enum class ErrorKind {
  parse,
  structural,
  unsupported_geometry,
  unsupported_format,
  out_of_bounds,
  nodata,
  empty_input,
  empty_intersection,
  degenerate_series,
  insufficient_data,
  incomplete_data,
  underdetermined,
  integrity,
  format,
  insufficient_subsets,
  io,
  config,
  usage,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wsekit
