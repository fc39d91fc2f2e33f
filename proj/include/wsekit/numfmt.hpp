#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace wsekit {

/// Significant digits used for every number the toolkit writes to reports.
inline constexpr int kOutputDigits = 9;

/// Locale-independent formatting with `digits` significant digits (%g style).
std::string format_sig(double value, int digits = kOutputDigits);

/// Shortest text that parses back to exactly `value`.
std::string format_exact(double value);

/// Rounds to `digits` significant digits through the decimal text form.
double round_sig(double value, int digits = kOutputDigits);

/// Locale-independent decimal parse of the whole field (surrounding blanks
/// allowed). Returns nullopt if anything is left over.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

}  // namespace wsekit
