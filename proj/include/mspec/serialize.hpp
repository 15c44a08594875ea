#ifndef MSPEC_SERIALIZE_HPP
#define MSPEC_SERIALIZE_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace mspec {

// All file formats are little-endian.

inline std::uint64_t bswap64(std::uint64_t v) {
  return __builtin_bswap64(v);
}

inline void write_u64_le(std::ostream& os, std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = bswap64(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}

inline std::uint64_t read_u64_le(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  if constexpr (std::endian::native == std::endian::big) v = bswap64(v);
  return v;
}

inline void write_f64_le(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  write_u64_le(os, v);
}

inline double read_f64_le(std::istream& is) {
  std::uint64_t v = read_u64_le(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace mspec

#endif
