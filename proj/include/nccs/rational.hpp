#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nccs/errors.hpp"

namespace nccs {

/// An angle read either as an exact fraction "p/q" or as a decimal.
struct Angle {
  double value = 0.0;
  std::optional<std::pair<std::int64_t, std::int64_t>> fraction;
};

inline Angle parse_angle(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto whole = [&](std::string_view s, auto& out) {
    s = trim(s);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t p = 0, q = 0;
    if (!whole(text.substr(0, slash), p) || !whole(text.substr(slash + 1), q))
      throw StructuralError("malformed fraction '" + std::string(text) + "'");
    if (q == 0) throw StructuralError("fraction with zero denominator '" + std::string(text) + "'");
    return Angle{static_cast<double>(p) / static_cast<double>(q), std::make_pair(p, q)};
  }
  double v = 0.0;
  if (!whole(text, v) || !std::isfinite(v))
    throw StructuralError("malformed angle '" + std::string(text) + "'");
  return Angle{v, std::nullopt};
}

}  // namespace nccs
