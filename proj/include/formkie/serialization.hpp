#pragma once

// JSON file formats. Readers throw SchemaError on malformed input.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "formkie/classification.hpp"
#include "formkie/metrics.hpp"
#include "formkie/pipeline.hpp"
#include "formkie/synth.hpp"

namespace formkie::io {

using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

KieTemplate parse_kie_template(std::string_view json);
ojson to_json(const KieTemplate& t);

std::vector<BankClass> parse_bank(std::string_view json);
ojson bank_to_json(const std::vector<BankClass>& classes);

synth::GroundTruth parse_ground_truth(std::string_view json);
ojson to_json(const synth::GroundTruth& truth);

ojson classification_report(const std::string& source_id, const Classification& c,
                            const std::vector<std::string>& labels);
ojson alignment_report(const AlignmentResult& a);
ojson scaling_report(const std::vector<SegmentCorrection>& corrections, const GridConfig& grid);
ojson extraction_report(const ExtractionResult& r, bool diagnostics);

ojson to_json(const PipelineConfig& cfg);
/// Overlays the keys present in `json` onto `base`; unknown keys are errors.
PipelineConfig parse_config(std::string_view json, PipelineConfig base = {});

ojson to_json(const synth::NoiseModel& n);
ojson to_json(const synth::LayoutSpec& s);
ojson to_json(const synth::DatasetSpec& d);
synth::DatasetSpec parse_dataset_spec(std::string_view json);

ojson to_json(const Metrics& m);
ojson to_json(const MetricsTable& t);

struct ManifestRecord {
  std::string form;      // OCR JSON path, relative to the manifest
  std::string label;
  std::string template_path;
  std::string truth;
};

std::vector<ManifestRecord> parse_manifest(std::string_view jsonl);
std::string manifest_line(const ManifestRecord& r);

}  // namespace formkie::io
