#include "fairaudit/hash.hpp"

#include <fstream>
#include <sstream>

#include "fairaudit/errors.hpp"

namespace fairaudit {

std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string fingerprint(std::string_view bytes) {
  return "fnv1a64:" + to_hex(fnv1a64(bytes));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fingerprint_file(const std::filesystem::path& path) {
  return fingerprint(read_file(path));
}

}  // namespace fairaudit
