#pragma once

#include <map>
#include <string>
#include <vector>

#include "formkie/assignment.hpp"
#include "formkie/pipeline.hpp"
#include "formkie/synth.hpp"

namespace formkie {

struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  Metrics& operator+=(const Metrics& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

/// A correct value is a TP. A wrong value on a filled entry counts as both FP
/// and FN; any value on an unfilled entry is an FP; a missing value on a filled
/// entry is an FN. Throws TemplateMismatch when the keys differ.
Metrics score_extraction(const synth::GroundTruth& truth, const std::vector<ExtractedField>& fields);

enum class Variant { Full, NoAlign, NoScale };

std::string_view to_string(Variant v);
/// Throws std::invalid_argument for unknown names.
Variant parse_variant(std::string_view name);
PipelineConfig apply_variant(PipelineConfig cfg, Variant v);

struct MetricsTable {
  std::vector<std::string> labels;           // class order of first appearance
  std::map<std::string, Metrics> per_class;
  /// Counts pooled over every document; the table's mean row.
  Metrics pooled() const;
};

struct EvalItem {
  const KieTemplate* kie = nullptr;
  const OcrDocument* document = nullptr;
  const synth::GroundTruth* truth = nullptr;
};

/// Scores every item under `cfg`. Documents run on `jobs` threads; the
/// aggregation order is the input order.
MetricsTable evaluate(const std::vector<EvalItem>& items, const PipelineConfig& cfg, std::size_t jobs = 1);

struct AblationRow {
  Variant variant;
  MetricsTable table;
};

std::vector<AblationRow> run_ablation(const std::vector<EvalItem>& items, const PipelineConfig& cfg,
                                      const std::vector<Variant>& variants, std::size_t jobs = 1);

/// Aligned text table: one row per class plus a pooled mean row.
std::string format_table(const MetricsTable& table, const std::string& title = {});

}  // namespace formkie
