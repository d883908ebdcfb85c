#include "formkie/simd/kernels.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace formkie::simd::scalar {

namespace {
constexpr double kMinW = 1e-9;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void distances(double px, double py, std::span<const double> xs, std::span<const double> ys,
               std::span<double> out) {
  assert(xs.size() == ys.size() && out.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
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
  for (std::size_t i = 0; i < sx.size(); ++i) {
    const double w = h[6] * sx[i] + h[7] * sy[i] + h[8];
    if (std::fabs(w) <= kMinW) {
      out[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double px = (h[0] * sx[i] + h[1] * sy[i] + h[2]) / w;
    const double py = (h[3] * sx[i] + h[4] * sy[i] + h[5]) / w;
    const double ex = px - dx[i];
    const double ey = py - dy[i];
    out[i] = std::sqrt(ex * ex + ey * ey);
  }
}

}  // namespace formkie::simd::scalar
