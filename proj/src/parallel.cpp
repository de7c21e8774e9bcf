#include "sts/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sts {

static int read_budget() {
#ifdef _OPENMP
  int hw = omp_get_max_threads();
#else
  int hw = 1;
#endif
  const char* env = std::getenv("STS_THREADS");
  if (env == nullptr) return hw;
  long v = std::strtol(env, nullptr, 10);
  if (v <= 0) return hw;
  return v < hw ? static_cast<int>(v) : hw;
}

int thread_budget() {
  static int budget = read_budget();
  return budget;
}

}  // namespace sts
