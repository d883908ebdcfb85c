#include "formkie/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "formkie/errors.hpp"
#include "formkie/simd/kernels.hpp"

namespace formkie {

std::vector<TemplateKey> KieTemplate::keys() const {
  std::vector<TemplateKey> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({e.key, e.key_point});
  return out;
}

void ConstraintSet::validate() const {
  std::set<std::size_t> rows, cols;
  for (const auto& p : forced) {
    if (forbidden.count(p)) throw std::invalid_argument("pair is both forced and forbidden");
    if (!rows.insert(p.first).second || !cols.insert(p.second).second) {
      throw std::invalid_argument("forced pairs must form a partial matching");
    }
  }
}

CostMatrix::CostMatrix(std::size_t rows, std::size_t entity_cols, double fill)
    : rows_(rows), entity_cols_(entity_cols), cols_(entity_cols + rows), values_(rows * cols_, fill) {}

CostMatrix CostMatrix::dense(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) throw std::invalid_argument("cost values do not match shape");
  if (rows > cols) throw std::invalid_argument("dense cost matrix needs rows <= cols");
  CostMatrix c;
  c.rows_ = rows;
  c.entity_cols_ = cols;
  c.cols_ = cols;
  c.values_ = std::move(values);
  return c;
}

CostMatrix build_cost_matrix(const KieTemplate& tmpl, const std::vector<Entity>& entities,
                             const ConstraintSet& constraints, double reject_cost) {
  constraints.validate();
  const std::size_t n = tmpl.entries.size();
  const std::size_t m = entities.size();
  CostMatrix c(n, m, kForbiddenCost);

  std::vector<double> xs(m), ys(m);
  for (std::size_t j = 0; j < m; ++j) {
    xs[j] = entities[j].anchor.x;
    ys[j] = entities[j].anchor.y;
  }
  const auto& k = simd::active();
  for (std::size_t i = 0; i < n; ++i) {
    const Point t = top_left(tmpl.entries[i].value_bbox);
    k.distances(t.x, t.y, xs, ys, c.row(i).first(m));
    c.at(i, m + i) = reject_cost;
  }
  for (const auto& [i, j] : constraints.forbidden) {
    if (i < n && j < m) c.at(i, j) = kForbiddenCost;
  }
  for (const auto& [i, j] : constraints.forced) {
    if (i >= n || j >= m) continue;
    const double keep = c.at(i, j);
    for (std::size_t col = 0; col < c.cols(); ++col) c.at(i, col) = kForbiddenCost;
    for (std::size_t row = 0; row < n; ++row) c.at(row, j) = kForbiddenCost;
    c.at(i, j) = keep;
  }
  return c;
}

ConstraintSet build_constraints(const KieTemplate& tmpl, const std::vector<Entity>& entities,
                                const std::vector<AnchorMatch>& anchors, double hard_radius) {
  ConstraintSet cs;
  const std::size_t n = tmpl.entries.size();
  for (const auto& a : anchors) {
    for (std::size_t i = 0; i < n; ++i) cs.forbidden.emplace(i, a.entity_index);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point t = top_left(tmpl.entries[i].value_bbox);
    for (std::size_t j = 0; j < entities.size(); ++j) {
      if (euclidean(t, entities[j].anchor) > hard_radius) cs.forbidden.emplace(i, j);
    }
  }
  return cs;
}

namespace {

AssignmentSolution make_solution(const CostMatrix& c, const std::vector<std::size_t>& col_of_row) {
  AssignmentSolution sol;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const std::size_t j = col_of_row[i];
    const double cost = c.at(i, j);
    sol.objective += cost;
    if (c.is_dummy(j)) {
      sol.nulls.push_back(i);
    } else {
      sol.pairs.push_back({i, j, cost});
    }
  }
  return sol;
}

}  // namespace

AssignmentSolution solve_assignment(const CostMatrix& c) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  if (n == 0) return {};
  if (n > m) throw Infeasible("more rows than columns");

  // 1-based potentials formulation; column 0 is the virtual root.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<bool> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = c.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw Infeasible("no augmenting path");
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> col_of_row(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
  }
  auto sol = make_solution(c, col_of_row);
  for (std::size_t i = 0; i < n; ++i) {
    if (c.at(i, col_of_row[i]) >= kForbiddenCost) {
      throw Infeasible("optimal assignment uses a forbidden pair; constraints admit no feasible solution");
    }
  }
  return sol;
}

AssignmentSolution brute_force_assignment(const CostMatrix& c) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  if (n > 8) throw SizeLimit("brute force assignment is limited to 8 rows");
  if (n == 0) return {};
  if (n > m) throw Infeasible("more rows than columns");

  bool nonnegative = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) nonnegative = nonnegative && c.at(i, j) >= 0.0;

  std::vector<std::size_t> cur(n), best;
  std::vector<bool> taken(m, false);
  double best_cost = std::numeric_limits<double>::infinity();

  // skip_forbidden: a map avoiding forbidden cells always beats one that uses
  // them, so those cells only need visiting when no such map exists.
  auto search = [&](auto&& self, std::size_t row, double partial, bool skip_forbidden) -> void {
    if (nonnegative && partial >= best_cost) return;
    if (row == n) {
      best_cost = partial;
      best = cur;
      return;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (taken[j]) continue;
      const double cost = c.at(row, j);
      if (skip_forbidden && cost >= kForbiddenCost) continue;
      taken[j] = true;
      cur[row] = j;
      self(self, row + 1, partial + cost, skip_forbidden);
      taken[j] = false;
    }
  };
  search(search, 0, 0.0, true);
  if (best.empty()) search(search, 0, 0.0, false);

  // Sum in row order, as solve_assignment does.
  return make_solution(c, best);
}

std::vector<ExtractedField> extract_key_values(const KieTemplate& tmpl, const std::vector<Entity>& entities,
                                               const AssignmentSolution& sol) {
  std::vector<ExtractedField> out;
  out.reserve(tmpl.entries.size());
  for (const auto& e : tmpl.entries) out.push_back({e.key, std::nullopt, std::nullopt, std::nullopt, std::nullopt});
  for (const auto& p : sol.pairs) {
    if (p.row >= out.size() || p.col >= entities.size()) {
      throw std::out_of_range("assignment does not match the template/entity sets");
    }
    auto& f = out[p.row];
    f.value = entities[p.col].text;
    f.bbox = entities[p.col].bbox;
    f.cost = p.cost;
    f.entity_index = p.col;
  }
  return out;
}

}  // namespace formkie
