#include "hidsense/common.hpp"

namespace hidsense {

std::string hex_byte(std::uint8_t b) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  return {kDigits[b >> 4], kDigits[b & 0x0F]};
}

std::string hex_bytes(const Bytes& bytes, char sep) {
  std::string out;
  out.reserve(bytes.size() * 3);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i != 0) out.push_back(sep);
    out += hex_byte(bytes[i]);
  }
  return out;
}

}  // namespace hidsense
