// Compiled with -mavx2 only; callers reach these through the dispatch table
// after a runtime CPU check. No FMA: element-wise kernels round identically
// to the scalar reference.

#include "formkie/simd/kernels.hpp"

#include <immintrin.h>

#include <cassert>
#include <cmath>
#include <limits>

namespace formkie::simd::avx2 {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                                             _mm256_loadu_pd(b.data() + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i + 4),
                                             _mm256_loadu_pd(b.data() + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i),
                                             _mm256_loadu_pd(b.data() + i)));
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void distances(double px, double py, std::span<const double> xs, std::span<const double> ys,
               std::span<double> out) {
  assert(xs.size() == ys.size() && out.size() == xs.size());
  const std::size_t n = xs.size();
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ddx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + i), vx);
    const __m256d ddy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + i), vy);
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(ddx, ddx), _mm256_mul_pd(ddy, ddy));
    _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(sq));
  }
  for (; i < n; ++i) {
    const double ddx = xs[i] - px;
    const double ddy = ys[i] - py;
    out[i] = std::sqrt(ddx * ddx + ddy * ddy);
  }
}

void reprojection_errors(const std::array<double, 9>& h, std::span<const double> sx,
                         std::span<const double> sy, std::span<const double> dx,
                         std::span<const double> dy, std::span<double> out) {
  assert(sx.size() == sy.size() && sx.size() == dx.size() && sx.size() == dy.size() &&
         sx.size() == out.size());
  const std::size_t n = sx.size();
  __m256d hv[9];
  for (int k = 0; k < 9; ++k) hv[k] = _mm256_set1_pd(h[static_cast<std::size_t>(k)]);
  const __m256d min_w = _mm256_set1_pd(1e-9);
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(sx.data() + i);
    const __m256d y = _mm256_loadu_pd(sy.data() + i);
    const __m256d w = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(hv[6], x), _mm256_mul_pd(hv[7], y)), hv[8]);
    const __m256d u = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(hv[0], x), _mm256_mul_pd(hv[1], y)), hv[2]);
    const __m256d v = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(hv[3], x), _mm256_mul_pd(hv[4], y)), hv[5]);
    const __m256d ex = _mm256_sub_pd(_mm256_div_pd(u, w), _mm256_loadu_pd(dx.data() + i));
    const __m256d ey = _mm256_sub_pd(_mm256_div_pd(v, w), _mm256_loadu_pd(dy.data() + i));
    const __m256d err = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
    const __m256d degenerate = _mm256_cmp_pd(_mm256_and_pd(w, abs_mask), min_w, _CMP_LE_OQ);
    _mm256_storeu_pd(out.data() + i, _mm256_blendv_pd(err, inf, degenerate));
  }
  if (i < n) {
    scalar::reprojection_errors(h, sx.subspan(i), sy.subspan(i), dx.subspan(i), dy.subspan(i),
                                out.subspan(i));
  }
}

}  // namespace formkie::simd::avx2
