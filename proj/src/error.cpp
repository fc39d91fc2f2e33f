#include "wsekit/error.hpp"

namespace wsekit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::structural: return "structural error";
    case ErrorKind::unsupported_geometry: return "unsupported geometry";
    case ErrorKind::unsupported_format: return "unsupported format";
    case ErrorKind::out_of_bounds: return "out of bounds";
    case ErrorKind::nodata: return "nodata";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::empty_intersection: return "empty intersection";
    case ErrorKind::degenerate_series: return "degenerate series";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::incomplete_data: return "incomplete data";
    case ErrorKind::underdetermined: return "underdetermined";
    case ErrorKind::integrity: return "integrity error";
    case ErrorKind::format: return "format error";
    case ErrorKind::insufficient_subsets: return "insufficient subsets";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::config: return "config error";
    case ErrorKind::usage: return "usage error";
  }
  return "error";
}

}  // namespace wsekit
