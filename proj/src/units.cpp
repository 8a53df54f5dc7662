#include "sradiag/units.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "sradiag/error.hpp"

namespace sradiag {

double parse_duration_ns(std::string_view text) {
  struct Unit {
    std::string_view suffix;
    double factor;
  };
  // Longest suffixes first so "ms" is not read as "s".
  static constexpr Unit kUnits[] = {{"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}, {"s", 1e9}};
  double factor = 1.0;
  std::string_view number = text;
  for (const auto& u : kUnits) {
    if (text.size() > u.suffix.size() && text.ends_with(u.suffix)) {
      factor = u.factor;
      number = text.substr(0, text.size() - u.suffix.size());
      break;
    }
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
  if (ec != std::errc{} || ptr != number.data() + number.size() || !std::isfinite(v) || v < 0.0) {
    throw Error(ErrorKind::config, "bad duration '" + std::string(text) + "'");
  }
  return v * factor;
}

}  // namespace sradiag
