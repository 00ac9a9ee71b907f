#pragma once

#include <string>

namespace pubsim {

/// Shortest decimal text that round-trips to the same double. Independent of
/// the global locale.
std::string format_number(double value);

}  // namespace pubsim
