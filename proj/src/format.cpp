#include "srk/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "srk/errors.hpp"

namespace srk {

std::string format_double(double value) {
  if (value == 0.0) return "0";
  std::array<char, 32> buffer{};
  const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) throw ParameterError("format_double: conversion failed");
  return std::string(buffer.data(), end);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || end != last || text.empty()) {
    throw ParameterError("not a number: '" + text + "'");
  }
  return value;
}

}  // namespace srk
