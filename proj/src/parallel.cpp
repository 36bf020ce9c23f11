#include "monofact/parallel.hpp"

#include <omp.h>

namespace monofact {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace monofact
