#include "gridbesov/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gb {

int worker_count() {
  int hw = 1;
#ifdef _OPENMP
  hw = omp_get_max_threads();
#endif
  if (const char* cap = std::getenv("GRIDBESOV_THREADS")) {
    try {
      int n = std::stoi(cap);
      if (n >= 1 && n < hw) hw = n;
    } catch (...) {
      // ignore malformed values, keep hardware default
    }
  }
  return hw < 1 ? 1 : hw;
}

}  // namespace gb
