#include <gtest/gtest.h>

#include "formkie/metrics.hpp"
#include "formkie/pipeline.hpp"
#include "formkie/synth.hpp"

using namespace formkie;

namespace {

synth::Dataset small_dataset(const synth::NoiseModel& noise, std::size_t count) {
  auto spec = synth::default_dataset_spec();
  spec.noise = noise;
  return synth::generate_dataset(spec, count, 21);
}

std::vector<EvalItem> items_of(const synth::Dataset& d) {
  std::vector<EvalItem> items;
  for (std::size_t k = 0; k < d.forms.size(); ++k) {
    items.push_back({&d.templates[k % d.templates.size()].kie, &d.forms[k].document, &d.forms[k].truth});
  }
  return items;
}

}  // namespace

TEST(Pipeline, NoiselessFormExtractsEverything) {
  const auto d = small_dataset(synth::NoiseModel::noiseless(), 6);
  for (std::size_t k = 0; k < d.forms.size(); ++k) {
    const auto r = run_extraction(d.templates[k].kie, d.forms[k].document, {});
    const auto m = score_extraction(d.forms[k].truth, r.fields);
    EXPECT_EQ(m.fp, 0u);
    EXPECT_EQ(m.fn, 0u);
  }
}

TEST(Pipeline, EmptyDocumentGivesNulls) {
  const auto d = small_dataset(synth::NoiseModel::noiseless(), 1);
  OcrDocument empty{"empty", 1700, 2200, {}, {}};
  const auto r = run_extraction(d.templates[0].kie, empty, {});
  ASSERT_EQ(r.fields.size(), d.templates[0].kie.entries.size());
  for (const auto& f : r.fields) EXPECT_FALSE(f.value);
  EXPECT_TRUE(r.diagnostics.alignment.skipped);
}

TEST(Pipeline, StageTogglesRecorded) {
  const auto d = small_dataset(synth::NoiseModel::noiseless(), 1);
  PipelineConfig cfg;
  cfg.stages = {false, false};
  const auto r = run_extraction(d.templates[0].kie, d.forms[0].document, cfg);
  EXPECT_FALSE(r.diagnostics.stages.align);
  EXPECT_FALSE(r.diagnostics.stages.scale);
  EXPECT_TRUE(r.diagnostics.corrections.empty());
}

TEST(Pipeline, ConfigValidation) {
  PipelineConfig cfg;
  cfg.fuzzy.min_similarity = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.grid.rows = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_NO_THROW(PipelineConfig{}.validate());
}

TEST(Evaluate, NoiselessAllVariantsPerfect) {
  const auto d = small_dataset(synth::NoiseModel::noiseless(), 12);
  const auto rows = run_ablation(items_of(d), {}, {Variant::Full, Variant::NoAlign, Variant::NoScale});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.table.pooled().f1(), 1.0) << to_string(r.variant);
  }
}

TEST(Evaluate, ParallelMatchesSerial) {
  synth::NoiseModel noise;
  const auto d = small_dataset(noise, 18);
  const auto serial = evaluate(items_of(d), {}, 1);
  const auto parallel = evaluate(items_of(d), {}, 4);
  EXPECT_EQ(serial.labels, parallel.labels);
  for (const auto& l : serial.labels) {
    EXPECT_EQ(serial.per_class.at(l).tp, parallel.per_class.at(l).tp);
    EXPECT_EQ(serial.per_class.at(l).fp, parallel.per_class.at(l).fp);
    EXPECT_EQ(serial.per_class.at(l).fn, parallel.per_class.at(l).fn);
  }
}
