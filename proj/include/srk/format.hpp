#pragma once

#include <string>

namespace srk {

/// Shortest decimal rendering that parses back to the same double (at most
/// 17 significant digits).
std::string format_double(double value);

/// Strict parse of a whole string as a double; throws ParameterError.
double parse_double(const std::string& text);

}  // namespace srk
