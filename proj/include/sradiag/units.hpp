#pragma once

#include <string_view>

namespace sradiag {

/// Duration text with an optional unit suffix (ns, us, ms, s) to nanoseconds.
/// A bare number is taken as nanoseconds. Throws Error(config) on bad input.
double parse_duration_ns(std::string_view text);

}  // namespace sradiag
