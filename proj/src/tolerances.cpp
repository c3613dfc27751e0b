#include "starlocal/tolerances.hpp"

namespace starlocal {

Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

}  // namespace starlocal
