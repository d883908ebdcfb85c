#pragma once

#include <vector>

#include "formkie/alignment.hpp"
#include "formkie/geometry.hpp"
#include "formkie/ocr.hpp"

namespace formkie {

/// Uniform rows x cols tiling of the page. Cells are stored row-major.
class SegmentGrid {
 public:
  SegmentGrid(double page_w, double page_h, std::size_t rows = 5, std::size_t cols = 4);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }
  const BBox& cell(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col]; }
  const std::vector<BBox>& cells() const { return cells_; }

  /// (row, col) of the cell holding `p`. Points on a shared edge go to the
  /// lower-index cell; points off the page clamp to the nearest cell.
  std::pair<std::size_t, std::size_t> locate(Point p) const;
  std::size_t index_of(Point p) const;

 private:
  double page_w_;
  double page_h_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<BBox> cells_;
};

SegmentGrid build_grid(double page_w, double page_h, std::size_t rows = 5, std::size_t cols = 4);

struct SegmentCorrection {
  double dx = 0.0;
  double dy = 0.0;
  std::size_t support = 0;
};

/// Mean (dst - src) offset per cell; cells without anchors take the page mean.
std::vector<SegmentCorrection> compute_corrections(const SegmentGrid& grid,
                                                   const std::vector<AnchorMatch>& anchors);

/// Translates each entity by the correction of the cell holding its anchor.
std::vector<Entity> scale_entities(const std::vector<Entity>& entities, const SegmentGrid& grid,
                                   const std::vector<SegmentCorrection>& corrections);

}  // namespace formkie
