#include "formkie/pipeline.hpp"

#include <stdexcept>

namespace formkie {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("config: ") + what);
}

}  // namespace

void PipelineConfig::validate() const {
  require(consolidation.vertical_tol > 0.0, "consolidation.vertical_tol must be > 0");
  require(consolidation.intra_word_gap > 0.0, "consolidation.intra_word_gap must be > 0");
  require(fuzzy.min_similarity > 0.0 && fuzzy.min_similarity <= 1.0, "fuzzy.min_similarity must lie in (0,1]");
  require(fuzzy.max_anchor_distance > 0.0, "fuzzy.max_anchor_distance must be > 0");
  require(align_search_radius > 0.0, "alignment.search_radius must be > 0");
  require(grid.rows >= 1 && grid.cols >= 1, "grid.rows and grid.cols must be >= 1");
  require(kie.reject_cost > 0.0, "kie.reject_cost must be > 0");
  require(kie.hard_radius > 0.0, "kie.hard_radius must be > 0");
  require(ransac.inlier_tol > 0.0, "ransac.inlier_tol must be > 0");
  require(ransac.iterations >= 1, "ransac.iterations must be >= 1");
  require(classify.alpha >= 0.0 && classify.alpha <= 1.0, "classify.alpha must lie in [0,1]");
  require(classify.grid >= 1, "classify.grid must be >= 1");
  // Forbidden cells must cost more than any all-dummy solution.
  require(kie.reject_cost < kForbiddenCost / 1e3, "kie.reject_cost is too large");
}

ExtractionResult run_extraction(const KieTemplate& tmpl, const OcrDocument& doc, const PipelineConfig& cfg) {
  ExtractionResult out;
  out.source_id = doc.source_id;
  out.class_label = tmpl.class_label;
  out.diagnostics.stages = cfg.stages;
  out.diagnostics.grid = cfg.grid;

  const std::vector<Entity> original = consolidate(doc, cfg.consolidation);
  std::vector<Entity> entities = original;
  out.diagnostics.entity_count = entities.size();
  const auto keys = tmpl.keys();

  // Key-text entities, matched loosely; they seed alignment and are never values.
  const FuzzyConfig wide{cfg.fuzzy.min_similarity, cfg.align_search_radius};
  const auto key_entities = match_anchors(keys, entities, wide);

  if (cfg.stages.align) {
    AlignmentResult aligned = align_document(entities, key_entities, cfg.ransac);
    entities = std::move(aligned.entities);
    aligned.entities.clear();
    out.diagnostics.alignment = std::move(aligned);
  } else {
    out.diagnostics.alignment.anchors_found = key_entities.size();
  }

  if (cfg.stages.scale) {
    const auto anchors = match_anchors(keys, entities, cfg.fuzzy);
    const SegmentGrid grid(doc.page_width, doc.page_height, cfg.grid.rows, cfg.grid.cols);
    out.diagnostics.corrections = compute_corrections(grid, anchors);
    out.diagnostics.scaling_anchors = anchors.size();
    entities = scale_entities(entities, grid, out.diagnostics.corrections);
  }

  const ConstraintSet constraints = build_constraints(tmpl, entities, key_entities, cfg.kie.hard_radius);
  const CostMatrix costs = build_cost_matrix(tmpl, entities, constraints, cfg.kie.reject_cost);
  const AssignmentSolution sol = solve_assignment(costs);
  out.fields = extract_key_values(tmpl, entities, sol);
  // Report values where they sit on the submitted page.
  for (auto& f : out.fields) {
    if (f.entity_index) f.bbox = original[*f.entity_index].bbox;
  }
  return out;
}

}  // namespace formkie
