#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "formkie/alignment.hpp"
#include "formkie/geometry.hpp"
#include "formkie/ocr.hpp"

namespace formkie {

/// Cost of a prohibited (row, column) pair. Exceeds any feasible total by construction.
inline constexpr double kForbiddenCost = 1e9;

struct TemplateEntry {
  std::string key;
  Point key_point;
  BBox value_bbox;
};

struct KieTemplate {
  std::string class_label;
  std::vector<TemplateEntry> entries;

  std::vector<TemplateKey> keys() const;
};

/// Pairs are (template row i, entity index j).
struct ConstraintSet {
  std::set<std::pair<std::size_t, std::size_t>> forbidden;
  std::set<std::pair<std::size_t, std::size_t>> forced;

  /// Throws std::invalid_argument when forbidden and forced overlap or forced
  /// pairs reuse a row or column.
  void validate() const;
};

/// n rows x (m entity columns + n dummy columns), row-major.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t entity_cols, double fill = 0.0);

  /// Plain matrix without dummy columns (rows <= cols).
  static CostMatrix dense(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t entity_cols() const { return entity_cols_; }
  bool is_dummy(std::size_t col) const { return col >= entity_cols_; }

  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

 private:
  CostMatrix() = default;
  std::size_t rows_ = 0;
  std::size_t entity_cols_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct KieConfig {
  double reject_cost = 150.0;
  double hard_radius = 400.0;
};

CostMatrix build_cost_matrix(const KieTemplate& tmpl, const std::vector<Entity>& entities,
                             const ConstraintSet& constraints, double reject_cost);

/// Anchor entities are printed key text and may not be values; pairs farther
/// than `hard_radius` are pruned.
ConstraintSet build_constraints(const KieTemplate& tmpl, const std::vector<Entity>& entities,
                                const std::vector<AnchorMatch>& anchors, double hard_radius = 400.0);

struct AssignedPair {
  std::size_t row = 0;
  std::size_t col = 0;  // entity index, never a dummy
  double cost = 0.0;

  friend bool operator==(const AssignedPair&, const AssignedPair&) = default;
};

struct AssignmentSolution {
  std::vector<AssignedPair> pairs;  // ascending row
  std::vector<std::size_t> nulls;   // rows left on their dummy, ascending
  double objective = 0.0;
};

/// Exact minimum-cost assignment of every row to a distinct column
/// (shortest augmenting paths with potentials, O(n^2 m)).
AssignmentSolution solve_assignment(const CostMatrix& c);

/// Exhaustive search over injective row -> column maps, for n <= 8.
AssignmentSolution brute_force_assignment(const CostMatrix& c);

struct ExtractedField {
  std::string key;
  std::optional<std::string> value;
  std::optional<BBox> bbox;
  std::optional<double> cost;
  std::optional<std::size_t> entity_index;
};

/// One record per template entry, in template order; unfilled entries carry no value.
std::vector<ExtractedField> extract_key_values(const KieTemplate& tmpl, const std::vector<Entity>& entities,
                                               const AssignmentSolution& sol);

}  // namespace formkie
