#include "formkie/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "formkie/errors.hpp"
#include "formkie/simd/kernels.hpp"

namespace formkie {

namespace {

constexpr double kMinW = 1e-9;
constexpr double kMinDet = 1e-12;

struct Normalizer {
  double scale = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  Point apply(Point p) const { return {scale * (p.x - cx), scale * (p.y - cy)}; }
  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d t;
    t << scale, 0, -scale * cx, 0, scale, -scale * cy, 0, 0, 1;
    return t;
  }
  Eigen::Matrix3d inverse_matrix() const {
    Eigen::Matrix3d t;
    t << 1.0 / scale, 0, cx, 0, 1.0 / scale, cy, 0, 0, 1;
    return t;
  }
};

// Centroid to origin, mean distance sqrt(2).
template <class Get>
Normalizer hartley(std::span<const PointPair> pairs, Get get) {
  Normalizer n;
  for (const auto& pr : pairs) {
    n.cx += get(pr).x;
    n.cy += get(pr).y;
  }
  n.cx /= static_cast<double>(pairs.size());
  n.cy /= static_cast<double>(pairs.size());
  double mean_dist = 0.0;
  for (const auto& pr : pairs) {
    mean_dist += std::hypot(get(pr).x - n.cx, get(pr).y - n.cy);
  }
  mean_dist /= static_cast<double>(pairs.size());
  if (!(mean_dist > 0.0)) throw DegenerateConfiguration("all points coincide");
  n.scale = std::sqrt(2.0) / mean_dist;
  return n;
}

// Ratio of the small to the large eigenvalue of the point scatter; ~0 when collinear.
template <class Get>
double spread_ratio(std::span<const PointPair> pairs, const Normalizer& norm, Get get) {
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& pr : pairs) {
    const Point p = norm.apply(get(pr));
    sxx += p.x * p.x;
    syy += p.y * p.y;
    sxy += p.x * p.y;
  }
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double hi = tr / 2.0 + disc;
  const double lo = tr / 2.0 - disc;
  return hi > 0.0 ? lo / hi : 0.0;
}

template <class Get>
std::size_t distinct_count(std::span<const PointPair> pairs, Get get) {
  std::vector<Point> pts;
  pts.reserve(pairs.size());
  for (const auto& pr : pairs) pts.push_back(get(pr));
  std::sort(pts.begin(), pts.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return static_cast<std::size_t>(std::unique(pts.begin(), pts.end()) - pts.begin());
}

bool nearly_collinear(Point a, Point b, Point c) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double acx = c.x - a.x, acy = c.y - a.y;
  const double cross = abx * acy - aby * acx;
  return std::fabs(cross) <= 1e-3 * std::hypot(abx, aby) * std::hypot(acx, acy);
}

bool degenerate_sample(const std::array<PointPair, 4>& s) {
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : kTriples) {
    if (nearly_collinear(s[t[0]].first, s[t[1]].first, s[t[2]].first)) return true;
    if (nearly_collinear(s[t[0]].second, s[t[1]].second, s[t[2]].second)) return true;
  }
  return false;
}

Homography from_eigen(const Eigen::Matrix3d& m) {
  std::array<double, 9> a{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[static_cast<std::size_t>(r * 3 + c)] = m(r, c);
  return Homography(a);
}

constexpr auto kSrc = [](const PointPair& p) { return p.first; };
constexpr auto kDst = [](const PointPair& p) { return p.second; };

}  // namespace

Homography Homography::similarity(double radians, double scale, Point center) {
  const double c = scale * std::cos(radians);
  const double s = scale * std::sin(radians);
  // p' = sR(p - center) + center
  return Homography({c, -s, center.x - c * center.x + s * center.y,  //
                     s, c, center.y - s * center.x - c * center.y,   //
                     0, 0, 1});
}

double Homography::determinant() const {
  const auto& m = m_;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
  const double det = determinant();
  if (std::fabs(det) <= kMinDet) throw DegenerateConfiguration("singular homography");
  const auto& m = m_;
  std::array<double, 9> inv{
      (m[4] * m[8] - m[5] * m[7]) / det, (m[2] * m[7] - m[1] * m[8]) / det,
      (m[1] * m[5] - m[2] * m[4]) / det, (m[5] * m[6] - m[3] * m[8]) / det,
      (m[0] * m[8] - m[2] * m[6]) / det, (m[2] * m[3] - m[0] * m[5]) / det,
      (m[3] * m[7] - m[4] * m[6]) / det, (m[1] * m[6] - m[0] * m[7]) / det,
      (m[0] * m[4] - m[1] * m[3]) / det};
  if (std::fabs(inv[8]) > kMinDet) {
    const double s = inv[8];
    for (auto& v : inv) v /= s;
  }
  return Homography(inv);
}

Homography Homography::operator*(const Homography& rhs) const {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) sum += (*this)(r, k) * rhs(k, c);
      out[static_cast<std::size_t>(r * 3 + c)] = sum;
    }
  return Homography(out);
}

double Homography::max_abs_diff(const Homography& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < 9; ++i) d = std::max(d, std::fabs(m_[i] - other.m_[i]));
  return d;
}

BBox merge(const BBox& a, const BBox& b) {
  return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min), std::max(a.x_max, b.x_max),
          std::max(a.y_max, b.y_max)};
}

double manhattan(Point a, Point b) { return std::fabs(a.x - b.x) + std::fabs(a.y - b.y); }

double euclidean(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point apply_homography(const Homography& h, Point p) {
  const double w = h(2, 0) * p.x + h(2, 1) * p.y + h(2, 2);
  if (std::fabs(w) <= kMinW) throw DegenerateProjection("projected point at infinity");
  return {(h(0, 0) * p.x + h(0, 1) * p.y + h(0, 2)) / w,
          (h(1, 0) * p.x + h(1, 1) * p.y + h(1, 2)) / w};
}

BBox apply_homography(const Homography& h, const BBox& b) {
  const Point corners[4] = {apply_homography(h, Point{b.x_min, b.y_min}),
                            apply_homography(h, Point{b.x_max, b.y_min}),
                            apply_homography(h, Point{b.x_min, b.y_max}),
                            apply_homography(h, Point{b.x_max, b.y_max})};
  BBox out{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
  for (const auto& c : corners) out = merge(out, BBox{c.x, c.y, c.x, c.y});
  return out;
}

Homography estimate_homography(std::span<const PointPair> pairs) {
  if (pairs.size() < 4) throw InsufficientPairs("homography needs at least 4 pairs");
  if (distinct_count(pairs, kSrc) < 4 || distinct_count(pairs, kDst) < 4) {
    throw DegenerateConfiguration("fewer than 4 distinct points");
  }
  const Normalizer ns = hartley(pairs, kSrc);
  const Normalizer nd = hartley(pairs, kDst);
  if (spread_ratio(pairs, ns, kSrc) < 1e-10 || spread_ratio(pairs, nd, kDst) < 1e-10) {
    throw DegenerateConfiguration("points are collinear");
  }

  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point s = ns.apply(pairs[static_cast<std::size_t>(i)].first);
    const Point d = nd.apply(pairs[static_cast<std::size_t>(i)].second);
    a.row(2 * i) << 0, 0, 0, -s.x, -s.y, -1, d.y * s.x, d.y * s.y, d.y;
    a.row(2 * i + 1) << s.x, s.y, 1, 0, 0, 0, -d.x * s.x, -d.x * s.y, -d.x;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Eigen::Matrix3d full = nd.inverse_matrix() * hn * ns.matrix();
  if (std::fabs(full(2, 2)) <= kMinDet) throw DegenerateConfiguration("homography maps origin to infinity");
  full /= full(2, 2);
  Homography out = from_eigen(full);
  if (std::fabs(out.determinant()) <= kMinDet) throw DegenerateConfiguration("singular homography");
  return out;
}

Homography estimate_similarity(std::span<const PointPair> pairs) {
  if (pairs.size() < 2) throw InsufficientPairs("similarity needs at least 2 pairs");
  Point cs, cd;
  for (const auto& [s, d] : pairs) {
    cs.x += s.x;
    cs.y += s.y;
    cd.x += d.x;
    cd.y += d.y;
  }
  const auto n = static_cast<double>(pairs.size());
  cs = {cs.x / n, cs.y / n};
  cd = {cd.x / n, cd.y / n};
  double var = 0.0, sdot = 0.0, scross = 0.0;
  for (const auto& [s, d] : pairs) {
    const double ax = s.x - cs.x, ay = s.y - cs.y;
    const double bx = d.x - cd.x, by = d.y - cd.y;
    var += ax * ax + ay * ay;
    sdot += ax * bx + ay * by;
    scross += ax * by - ay * bx;
  }
  if (var <= 1e-12) throw DegenerateConfiguration("source points coincide");
  const double a = sdot / var;  // s*cos
  const double b = scross / var;  // s*sin
  if (a * a + b * b <= 1e-24) throw DegenerateConfiguration("zero scale");
  return Homography({a, -b, cd.x - (a * cs.x - b * cs.y),  //
                     b, a, cd.y - (b * cs.x + a * cs.y),   //
                     0, 0, 1});
}

RansacResult ransac_homography(std::span<const PointPair> pairs, const RansacParams& params) {
  const std::size_t n = pairs.size();
  if (n < 4) throw InsufficientPairs("RANSAC needs at least 4 pairs");

  std::vector<double> sx(n), sy(n), dx(n), dy(n), err(n);
  for (std::size_t i = 0; i < n; ++i) {
    sx[i] = pairs[i].first.x;
    sy[i] = pairs[i].first.y;
    dx[i] = pairs[i].second.x;
    dy[i] = pairs[i].second.y;
  }
  const auto& k = simd::active();
  auto score = [&](const Homography& h, std::size_t& count, double& total) {
    k.reprojection_errors(h.data(), sx, sy, dx, dy, err);
    count = 0;
    total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (err[i] <= params.inlier_tol) {
        ++count;
        total += err[i];
      }
    }
  };

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t best_count = 0;
  double best_total = std::numeric_limits<double>::infinity();
  Homography best;

  for (int it = 0; it < params.iterations; ++it) {
    std::array<std::size_t, 4> idx{};
    for (std::size_t s = 0; s < 4; ++s) {
      std::size_t candidate = 0;
      do {
        candidate = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s), candidate) !=
               idx.begin() + static_cast<std::ptrdiff_t>(s));
      idx[s] = candidate;
    }
    std::array<PointPair, 4> sample{pairs[idx[0]], pairs[idx[1]], pairs[idx[2]], pairs[idx[3]]};
    if (degenerate_sample(sample)) continue;
    Homography h;
    try {
      h = estimate_homography(sample);
    } catch (const Error&) {
      continue;
    }
    std::size_t count = 0;
    double total = 0.0;
    score(h, count, total);
    if (count > best_count || (count == best_count && count > 0 && total < best_total)) {
      best_count = count;
      best_total = total;
      best = h;
      if (best_count == n) break;
    }
  }
  if (best_count < 4) throw NoConsensus("fewer than 4 inliers in best consensus set");

  auto mask_of = [&](const Homography& h) {
    k.reprojection_errors(h.data(), sx, sy, dx, dy, err);
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = err[i] <= params.inlier_tol;
    return mask;
  };

  RansacResult result{best, mask_of(best), best_count};
  // Refit on the consensus set until it stops changing.
  for (int round = 0; round < 5; ++round) {
    std::vector<PointPair> inliers;
    for (std::size_t i = 0; i < n; ++i)
      if (result.inlier_mask[i]) inliers.push_back(pairs[i]);
    Homography refit;
    try {
      refit = estimate_homography(inliers);
    } catch (const Error&) {
      break;
    }
    auto mask = mask_of(refit);
    const auto count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    if (count < result.inlier_count) break;
    const bool unchanged = mask == result.inlier_mask;
    result = {refit, std::move(mask), count};
    if (unchanged) break;
  }
  return result;
}

}  // namespace formkie
