#include "formkie/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace formkie::simd {

namespace {

const KernelTable kScalar{Level::Scalar, &scalar::dot, &scalar::distances,
                          &scalar::reprojection_errors};
#if defined(FORMKIE_HAVE_AVX2)
const KernelTable kAvx2{Level::Avx2, &avx2::dot, &avx2::distances, &avx2::reprojection_errors};
#endif

const KernelTable& select() {
  if (const char* env = std::getenv("FORMKIE_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return kScalar;
  }
  return table(Level::Avx2);
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
  }
  return "unknown";
}

bool cpu_supports(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#if defined(FORMKIE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Level level) {
#if defined(FORMKIE_HAVE_AVX2)
  if (level == Level::Avx2 && cpu_supports(Level::Avx2)) return kAvx2;
#endif
  (void)level;
  return kScalar;
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace formkie::simd
