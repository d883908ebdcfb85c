#pragma once

#include <string>
#include <vector>

#include "formkie/alignment.hpp"
#include "formkie/assignment.hpp"
#include "formkie/classification.hpp"
#include "formkie/ocr.hpp"
#include "formkie/segment_scaling.hpp"

namespace formkie {

struct GridConfig {
  std::size_t rows = 5;
  std::size_t cols = 4;
};

struct StageToggles {
  bool align = true;
  bool scale = true;
};

struct RunOptions {
  std::size_t jobs = 1;
  bool diagnostics = false;
};

struct PipelineConfig {
  ConsolidationConfig consolidation;
  FuzzyConfig fuzzy;
  /// Manhattan search radius for alignment anchors; RANSAC rejects bad matches.
  double align_search_radius = 600.0;
  GridConfig grid;
  KieConfig kie;
  RansacParams ransac;
  ClassifierConfig classify;
  StageToggles stages;
  RunOptions run;

  /// Throws std::invalid_argument naming the first out-of-range value.
  void validate() const;
};

struct ExtractionDiagnostics {
  StageToggles stages;
  AlignmentResult alignment;  // entities left empty
  GridConfig grid;
  std::vector<SegmentCorrection> corrections;
  std::size_t scaling_anchors = 0;
  std::size_t entity_count = 0;
};

struct ExtractionResult {
  std::string source_id;
  std::string class_label;
  std::vector<ExtractedField> fields;
  ExtractionDiagnostics diagnostics;
};

/// consolidate -> align -> scale -> constraints -> solve -> extract.
ExtractionResult run_extraction(const KieTemplate& tmpl, const OcrDocument& doc, const PipelineConfig& cfg);

}  // namespace formkie
