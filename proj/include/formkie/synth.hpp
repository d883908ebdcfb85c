#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "formkie/assignment.hpp"
#include "formkie/ocr.hpp"

namespace formkie::synth {

inline constexpr double kCharWidth = 14.0;
inline constexpr double kTextHeight = 28.0;

enum class Placement { Right, Below };

struct LayoutSpec {
  std::string label;
  std::string title;
  std::vector<std::string> static_text;  // printed lines under the title
  std::vector<std::string> footer;
  std::vector<std::string> keys;
  std::size_t columns = 2;
  Placement placement = Placement::Right;
  double row_pitch = 180.0;
  double page_width = 1700.0;
  double page_height = 2200.0;
};

struct GeneratedTemplate {
  KieTemplate kie;
  OcrDocument blank;  // printed text of the empty form
};

/// Deterministic template layout. Throws SpecError for empty key lists and
/// layouts that overlap or overflow the page.
GeneratedTemplate generate_template(const LayoutSpec& spec, std::uint64_t seed);

/// Scan distortion and fill-in model. `translate_px` and `slip_px` extend the
/// rotation/scale model: a global shift, and a lateral slip of the page below
/// a random line (a non-linear distortion a single homography cannot undo).
struct NoiseModel {
  double rotation_deg = 3.0;  // uniform in [-rotation_deg, rotation_deg]
  double scale_min = 0.95;
  double scale_max = 1.05;
  double jitter_px = 2.0;     // std-dev of value placement noise
  double token_split_prob = 0.15;
  double fill_prob = 0.8;
  std::size_t distractor_count = 5;
  double translate_px = 150.0;  // uniform per axis in [-translate_px, translate_px]
  double slip_px = 190.0;      // slip magnitude uniform in [0.6, 1.0] * slip_px
  std::uint64_t seed = 0;

  static NoiseModel noiseless();
  /// Throws SpecError when a probability or range is invalid.
  void validate() const;
};

struct TruthEntry {
  std::string key;
  bool filled = false;
  std::string value;
  std::vector<std::size_t> token_indices;
};

struct GroundTruth {
  std::string source_id;
  std::string class_label;
  std::vector<TruthEntry> entries;
};

struct GeneratedForm {
  OcrDocument document;
  GroundTruth truth;
};

GeneratedForm generate_filled_form(const GeneratedTemplate& t, const NoiseModel& noise,
                                   const std::string& source_id = "form");

struct DatasetSpec {
  std::vector<LayoutSpec> templates;
  NoiseModel noise;
};

/// Six claim-style templates, several sharing most of their keys.
DatasetSpec default_dataset_spec();

struct Dataset {
  std::vector<GeneratedTemplate> templates;
  std::vector<GeneratedForm> forms;  // form k uses template k % templates.size()
};

Dataset generate_dataset(const DatasetSpec& spec, std::size_t count, std::uint64_t seed);

}  // namespace formkie::synth
