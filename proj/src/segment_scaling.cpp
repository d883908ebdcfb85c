#include "formkie/segment_scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace formkie {

namespace {

// Cell index along one axis; a coordinate on an interior edge belongs to the lower cell.
std::size_t axis_cell(double coord, double extent, std::size_t count) {
  const double step = extent / static_cast<double>(count);
  const double k = std::ceil(coord / step) - 1.0;
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(count - 1)));
}

}  // namespace

SegmentGrid::SegmentGrid(double page_w, double page_h, std::size_t rows, std::size_t cols)
    : page_w_(page_w), page_h_(page_h), rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("segment grid needs rows, cols >= 1");
  if (!(page_w > 0.0) || !(page_h > 0.0)) throw std::invalid_argument("page dimensions must be positive");
  cells_.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      cells_.push_back({static_cast<double>(c) * page_w / static_cast<double>(cols),
                        static_cast<double>(r) * page_h / static_cast<double>(rows),
                        static_cast<double>(c + 1) * page_w / static_cast<double>(cols),
                        static_cast<double>(r + 1) * page_h / static_cast<double>(rows)});
    }
  }
}

std::pair<std::size_t, std::size_t> SegmentGrid::locate(Point p) const {
  return {axis_cell(p.y, page_h_, rows_), axis_cell(p.x, page_w_, cols_)};
}

std::size_t SegmentGrid::index_of(Point p) const {
  const auto [r, c] = locate(p);
  return r * cols_ + c;
}

SegmentGrid build_grid(double page_w, double page_h, std::size_t rows, std::size_t cols) {
  return SegmentGrid(page_w, page_h, rows, cols);
}

std::vector<SegmentCorrection> compute_corrections(const SegmentGrid& grid,
                                                   const std::vector<AnchorMatch>& anchors) {
  std::vector<SegmentCorrection> cells(grid.size());
  double gx = 0.0, gy = 0.0;
  for (const auto& a : anchors) {
    auto& c = cells[grid.index_of(a.src)];
    const double ox = a.dst.x - a.src.x;
    const double oy = a.dst.y - a.src.y;
    c.dx += ox;
    c.dy += oy;
    ++c.support;
    gx += ox;
    gy += oy;
  }
  if (!anchors.empty()) {
    gx /= static_cast<double>(anchors.size());
    gy /= static_cast<double>(anchors.size());
  }
  for (auto& c : cells) {
    if (c.support > 0) {
      c.dx /= static_cast<double>(c.support);
      c.dy /= static_cast<double>(c.support);
    } else {
      c.dx = gx;
      c.dy = gy;
    }
  }
  return cells;
}

std::vector<Entity> scale_entities(const std::vector<Entity>& entities, const SegmentGrid& grid,
                                   const std::vector<SegmentCorrection>& corrections) {
  if (corrections.size() != grid.size()) {
    throw std::invalid_argument("corrections were computed for a different grid");
  }
  std::vector<Entity> out = entities;
  for (auto& e : out) {
    const auto& c = corrections[grid.index_of(e.anchor)];
    e.bbox = {e.bbox.x_min + c.dx, e.bbox.y_min + c.dy, e.bbox.x_max + c.dx, e.bbox.y_max + c.dy};
    e.anchor = top_left(e.bbox);
  }
  return out;
}

}  // namespace formkie
