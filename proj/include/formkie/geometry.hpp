#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace formkie {

// Pixel coordinates, origin top-left, y grows downward.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  bool contains(const BBox& other) const {
    return x_min <= other.x_min && y_min <= other.y_min && x_max >= other.x_max &&
           y_max >= other.y_max;
  }
  bool intersects(const BBox& other) const {
    return x_min <= other.x_max && other.x_min <= x_max && y_min <= other.y_max &&
           other.y_min <= y_max;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Row-major 3x3 projective transform.
class Homography {
 public:
  Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}
  explicit Homography(const std::array<double, 9>& m) : m_(m) {}

  static Homography identity() { return Homography(); }
  static Homography translation(double tx, double ty) {
    return Homography({1, 0, tx, 0, 1, ty, 0, 0, 1});
  }
  /// Rotation by `radians` about `center`, with isotropic `scale`.
  static Homography similarity(double radians, double scale, Point center);

  double operator()(int row, int col) const { return m_[static_cast<std::size_t>(row * 3 + col)]; }
  const std::array<double, 9>& data() const { return m_; }

  double determinant() const;
  Homography inverse() const;
  Homography operator*(const Homography& rhs) const;
  /// Largest absolute entry difference.
  double max_abs_diff(const Homography& other) const;

 private:
  std::array<double, 9> m_;
};

using PointPair = std::pair<Point, Point>;  // (src, dst)

inline Point top_left(const BBox& b) { return {b.x_min, b.y_min}; }
BBox merge(const BBox& a, const BBox& b);
double manhattan(Point a, Point b);
double euclidean(Point a, Point b);

/// Throws DegenerateProjection when the projected w is ~0.
Point apply_homography(const Homography& h, Point p);
/// Maps the four corners and returns their axis-aligned hull.
BBox apply_homography(const Homography& h, const BBox& b);

/// Normalized DLT least squares over all pairs.
Homography estimate_homography(std::span<const PointPair> pairs);

/// Closed-form least-squares rotation + isotropic scale + translation (>= 2 pairs).
Homography estimate_similarity(std::span<const PointPair> pairs);

struct RansacParams {
  double inlier_tol = 5.0;
  int iterations = 2000;
  std::uint64_t seed = 0;
};

struct RansacResult {
  Homography transform;
  std::vector<bool> inlier_mask;
  std::size_t inlier_count = 0;
};

RansacResult ransac_homography(std::span<const PointPair> pairs, const RansacParams& params);

}  // namespace formkie
