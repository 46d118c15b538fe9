#include "pbtlab/tensor_core.hpp"

#include <cstdlib>
#include <limits>

namespace pbtlab {

namespace {
constexpr std::int64_t kDefaultDimensionCap = 4096;
}

std::int64_t dimension_cap() {
  const char* env = std::getenv("PBTLAB_DIM_CAP");
  if (env == nullptr || *env == '\0') return kDefaultDimensionCap;
  char* end = nullptr;
  const long long value = std::strtoll(env, &end, 10);
  if (end == env || *end != '\0' || value < 2)
    throw ValidationError(std::string("PBTLAB_DIM_CAP must be an integer >= 2, got '") + env + "'");
  return value;
}

void check_dimension_cap(std::int64_t requested, const std::string& what) {
  const std::int64_t cap = dimension_cap();
  if (requested > cap) throw DimensionCapError(requested, cap, what);
}

std::int64_t checked_pow(std::int64_t base, int exponent) {
  std::int64_t out = 1;
  for (int k = 0; k < exponent; ++k) {
    if (out > std::numeric_limits<std::int64_t>::max() / base) return std::numeric_limits<std::int64_t>::max();
    out *= base;
  }
  return out;
}

}  // namespace pbtlab
