#pragma once

#include <string>

namespace mrjsim {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace mrjsim
