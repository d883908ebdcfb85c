#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "formkie/geometry.hpp"

namespace formkie {

struct Token {
  std::string text;
  BBox bbox;
  double confidence = 1.0;
};

struct OcrDocument {
  std::string source_id;
  double page_width = 0.0;
  double page_height = 0.0;
  std::vector<Token> tokens;
  /// Optional precomputed text embedding for the external-vector classification path.
  std::vector<double> embedding;
};

/// Consolidated text string. `anchor` is always top_left(bbox).
struct Entity {
  std::string text;
  BBox bbox;
  Point anchor;
  std::size_t member_count = 1;
  double confidence = 1.0;
  /// Indices into the source document's token list.
  std::vector<std::size_t> members;

  static Entity from_box(std::string text, const BBox& bbox) {
    return Entity{std::move(text), bbox, top_left(bbox), 1, 1.0, {}};
  }
};

struct ConsolidationConfig {
  double vertical_tol = 15.0;
  double intra_word_gap = 60.0;
};

enum class OcrWarning { EmptyDocument };

struct ParsedOcr {
  OcrDocument document;
  std::vector<OcrWarning> warnings;
};

/// Parses the OCR JSON interchange format. Throws SchemaError / GeometryError.
/// Zero tokens is reported as a warning, not an error.
ParsedOcr parse_ocr_json(std::string_view json);
std::string to_ocr_json(const OcrDocument& doc);

/// Reading order: rows of tokens whose y_min lies within `vertical_tol` of the
/// row's first token, rows top to bottom, x_min ascending within a row. Stable.
std::vector<Token> sort_reading_order(std::vector<Token> tokens, double vertical_tol = 15.0);

/// Greedy left-to-right merge of fragments that sit on the same line.
std::vector<Entity> consolidate(const OcrDocument& doc, const ConsolidationConfig& cfg = {});
std::vector<Entity> consolidate(const std::vector<Token>& tokens, const ConsolidationConfig& cfg = {});

/// Space-joined entity texts, used as the document text for classification.
std::string document_text(const std::vector<Entity>& entities);

}  // namespace formkie
