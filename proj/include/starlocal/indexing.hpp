#pragma once

#include <cstddef>
#include <vector>

#include "starlocal/errors.hpp"

namespace starlocal {

// Mixed-radix index helpers.  Throughout the library a composite index
// runs over subsystem (or party) digits with the FIRST subsystem most
// significant, i.e. index = ((d0*r1 + d1)*r2 + d2)*... for radices r_i.

inline std::size_t radix_product(const std::vector<std::size_t>& radices) {
  std::size_t p = 1;
  for (std::size_t r : radices) {
    if (r == 0) throw ArgumentError("radix_product: zero radix");
    if (p > static_cast<std::size_t>(-1) / r)
      throw SizeError("radix_product: overflow");
    p *= r;
  }
  return p;
}

inline void digits_of(std::size_t index, const std::vector<std::size_t>& radices,
                      std::vector<std::size_t>& out) {
  out.resize(radices.size());
  for (std::size_t i = radices.size(); i-- > 0;) {
    out[i] = index % radices[i];
    index /= radices[i];
  }
}

inline std::size_t index_of(const std::vector<std::size_t>& digits,
                            const std::vector<std::size_t>& radices) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < radices.size(); ++i) idx = idx * radices[i] + digits[i];
  return idx;
}

}  // namespace starlocal
