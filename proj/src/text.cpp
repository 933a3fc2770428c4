#include "mrjsim/text.hpp"

#include <array>
#include <charconv>

namespace mrjsim {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), res.ptr};
}

}  // namespace mrjsim
