#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// where the target supports it, a vector version with the same contract.
// `active()` picks the best variant once, at first use.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace formkie::simd {

enum class Level { Scalar, Avx2 };

std::string_view to_string(Level level);

struct KernelTable {
  Level level;
  /// sum(a[i] * b[i]); spans must have equal length.
  double (*dot)(std::span<const double> a, std::span<const double> b);
  /// out[i] = sqrt((xs[i]-px)^2 + (ys[i]-py)^2)
  void (*distances)(double px, double py, std::span<const double> xs,
                    std::span<const double> ys, std::span<double> out);
  /// out[i] = euclidean distance between H*(sx[i],sy[i]) and (dx[i],dy[i]);
  /// +inf where the projected w is ~0.
  void (*reprojection_errors)(const std::array<double, 9>& h, std::span<const double> sx,
                              std::span<const double> sy, std::span<const double> dx,
                              std::span<const double> dy, std::span<double> out);
};

bool cpu_supports(Level level);

/// Table for a specific level. Requesting an unsupported level returns the scalar table.
const KernelTable& table(Level level);

/// Best supported table; FORMKIE_SIMD=scalar in the environment forces the reference path.
const KernelTable& active();

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void distances(double px, double py, std::span<const double> xs, std::span<const double> ys,
               std::span<double> out);
void reprojection_errors(const std::array<double, 9>& h, std::span<const double> sx,
                         std::span<const double> sy, std::span<const double> dx,
                         std::span<const double> dy, std::span<double> out);
}  // namespace scalar

#if defined(FORMKIE_HAVE_AVX2)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void distances(double px, double py, std::span<const double> xs, std::span<const double> ys,
               std::span<double> out);
void reprojection_errors(const std::array<double, 9>& h, std::span<const double> sx,
                         std::span<const double> sy, std::span<const double> dx,
                         std::span<const double> dy, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace formkie::simd
