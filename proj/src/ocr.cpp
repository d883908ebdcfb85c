#include "formkie/ocr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <json.hpp>

#include "formkie/errors.hpp"

namespace formkie {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string at(std::size_t index) { return "token " + std::to_string(index) + ": "; }

std::array<double, 4> read_box(const json& j, const char* name, std::size_t index) {
  if (!j.is_array() || j.size() != 4) {
    throw SchemaError(at(index) + "'" + name + "' must be an array of 4 numbers");
  }
  std::array<double, 4> v{};
  for (std::size_t k = 0; k < 4; ++k) {
    if (!j[k].is_number()) throw SchemaError(at(index) + "'" + name + "' must hold numbers");
    v[k] = j[k].get<double>();
    if (!std::isfinite(v[k])) throw SchemaError(at(index) + "non-finite coordinate");
  }
  return v;
}

// Order of `boxes` indices under the row-bucketing reading order.
std::vector<std::size_t> reading_order(const std::vector<BBox>& boxes, double vertical_tol) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return boxes[a].y_min < boxes[b].y_min; });
  std::vector<std::size_t> row_of(boxes.size());
  std::size_t row = 0;
  double row_start = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double y = boxes[order[k]].y_min;
    if (k == 0) {
      row_start = y;
    } else if (y - row_start > vertical_tol) {
      ++row;
      row_start = y;
    }
    row_of[order[k]] = row;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (row_of[a] != row_of[b]) return row_of[a] < row_of[b];
    return boxes[a].x_min < boxes[b].x_min;
  });
  return order;
}

struct Fragment {
  std::string text;
  BBox bbox;
  double last_start = 0.0;  // x_min of the most recently appended piece
  double confidence = 1.0;
  std::vector<std::size_t> members;
};

// One greedy pass. Returns true when anything merged.
bool merge_pass(std::vector<Fragment>& items, const ConsolidationConfig& cfg) {
  std::vector<BBox> boxes;
  boxes.reserve(items.size());
  for (auto& f : items) {
    f.last_start = f.bbox.x_min;
    boxes.push_back(f.bbox);
  }
  const auto order = reading_order(boxes, cfg.vertical_tol);

  std::vector<bool> used(items.size(), false);
  std::vector<Fragment> out;
  bool merged_any = false;
  for (const std::size_t src : order) {
    if (used[src]) continue;
    used[src] = true;
    Fragment cur = std::move(items[src]);
    for (;;) {
      std::optional<std::size_t> best;
      for (const std::size_t j : order) {
        if (used[j]) continue;
        const BBox& c = items[j].bbox;
        if (std::fabs(cur.bbox.y_min - c.y_min) > cfg.vertical_tol ||
            std::fabs(cur.bbox.y_max - c.y_max) > cfg.vertical_tol) {
          continue;
        }
        if (c.x_min < cur.last_start) continue;
        if (c.x_min - cur.bbox.x_max > cfg.intra_word_gap) continue;
        if (!best || c.x_min < items[*best].bbox.x_min) best = j;
      }
      if (!best) break;
      Fragment& cand = items[*best];
      used[*best] = true;
      const double gap = cand.bbox.x_min - cur.bbox.x_max;
      const double start_to_start = cand.bbox.x_min - cur.last_start;
      const bool space = gap >= 0.0 && start_to_start >= cfg.intra_word_gap;
      cur.text += space ? " " : "";
      cur.text += cand.text;
      cur.bbox = merge(cur.bbox, cand.bbox);
      cur.last_start = cand.bbox.x_min;
      cur.confidence = std::min(cur.confidence, cand.confidence);
      cur.members.insert(cur.members.end(), cand.members.begin(), cand.members.end());
      merged_any = true;
    }
    out.push_back(std::move(cur));
  }
  items = std::move(out);
  return merged_any;
}

}  // namespace

ParsedOcr parse_ocr_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("OCR document must be a JSON object");

  ParsedOcr parsed;
  OcrDocument& doc = parsed.document;
  if (!j.contains("source_id") || !j["source_id"].is_string()) {
    throw SchemaError("missing string field 'source_id'");
  }
  doc.source_id = j["source_id"].get<std::string>();

  if (!j.contains("page") || !j["page"].is_object()) throw SchemaError("missing object 'page'");
  const json& page = j["page"];
  if (!page.contains("width") || !page["width"].is_number() || !page.contains("height") ||
      !page["height"].is_number()) {
    throw SchemaError("'page' needs numeric 'width' and 'height'");
  }
  doc.page_width = page["width"].get<double>();
  doc.page_height = page["height"].get<double>();
  if (!(doc.page_width > 0.0) || !(doc.page_height > 0.0)) {
    throw GeometryError("page dimensions must be positive");
  }
  const BBox page_box{0.0, 0.0, doc.page_width, doc.page_height};

  if (!j.contains("tokens") || !j["tokens"].is_array()) throw SchemaError("missing array 'tokens'");
  const json& tokens = j["tokens"];
  doc.tokens.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const json& t = tokens[i];
    if (!t.is_object()) throw SchemaError(at(i) + "must be an object");
    if (!t.contains("text") || !t["text"].is_string()) throw SchemaError(at(i) + "missing string 'text'");
    Token tok;
    tok.text = trim(t["text"].get<std::string>());
    if (tok.text.empty()) throw SchemaError(at(i) + "empty text");

    const bool has_px = t.contains("bbox");
    const bool has_norm = t.contains("nbbox");
    if (has_px == has_norm) throw SchemaError(at(i) + "exactly one of 'bbox' or 'nbbox' is required");
    std::array<double, 4> v{};
    if (has_px) {
      v = read_box(t["bbox"], "bbox", i);
    } else {
      v = read_box(t["nbbox"], "nbbox", i);
      for (double c : v) {
        if (c < 0.0 || c > 1.0) throw SchemaError(at(i) + "'nbbox' values must lie in [0,1]");
      }
      v = {v[0] * doc.page_width, v[1] * doc.page_height, v[2] * doc.page_width,
           v[3] * doc.page_height};
    }
    tok.bbox = {v[0], v[1], v[2], v[3]};
    if (!tok.bbox.valid()) throw GeometryError(at(i) + "inverted bounding box");
    if (!tok.bbox.intersects(page_box)) throw GeometryError(at(i) + "box lies outside the page");

    if (t.contains("confidence")) {
      if (!t["confidence"].is_number()) throw SchemaError(at(i) + "'confidence' must be a number");
      tok.confidence = t["confidence"].get<double>();
      if (tok.confidence < 0.0 || tok.confidence > 1.0) {
        throw SchemaError(at(i) + "'confidence' must lie in [0,1]");
      }
    }
    doc.tokens.push_back(std::move(tok));
  }

  if (j.contains("embedding")) {
    const json& e = j["embedding"];
    if (!e.is_array()) throw SchemaError("'embedding' must be an array of numbers");
    for (const auto& x : e) {
      if (!x.is_number()) throw SchemaError("'embedding' must be an array of numbers");
      doc.embedding.push_back(x.get<double>());
    }
  }

  if (doc.tokens.empty()) parsed.warnings.push_back(OcrWarning::EmptyDocument);
  return parsed;
}

std::string to_ocr_json(const OcrDocument& doc) {
  nlohmann::ordered_json j;
  j["source_id"] = doc.source_id;
  j["page"] = {{"width", doc.page_width}, {"height", doc.page_height}};
  j["tokens"] = nlohmann::ordered_json::array();
  for (const auto& t : doc.tokens) {
    nlohmann::ordered_json tj;
    tj["text"] = t.text;
    tj["bbox"] = {t.bbox.x_min, t.bbox.y_min, t.bbox.x_max, t.bbox.y_max};
    if (t.confidence != 1.0) tj["confidence"] = t.confidence;
    j["tokens"].push_back(std::move(tj));
  }
  if (!doc.embedding.empty()) j["embedding"] = doc.embedding;
  return j.dump();
}

std::vector<Token> sort_reading_order(std::vector<Token> tokens, double vertical_tol) {
  std::vector<BBox> boxes;
  boxes.reserve(tokens.size());
  for (const auto& t : tokens) boxes.push_back(t.bbox);
  const auto order = reading_order(boxes, vertical_tol);
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (std::size_t i : order) out.push_back(std::move(tokens[i]));
  return out;
}

std::vector<Entity> consolidate(const std::vector<Token>& tokens, const ConsolidationConfig& cfg) {
  std::vector<Fragment> items;
  items.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    items.push_back({tokens[i].text, tokens[i].bbox, tokens[i].bbox.x_min, tokens[i].confidence, {i}});
  }
  // Iterate to a fixed point so that consolidating the output is a no-op.
  while (merge_pass(items, cfg)) {
  }

  std::vector<Entity> out;
  out.reserve(items.size());
  for (auto& f : items) {
    std::sort(f.members.begin(), f.members.end());
    Entity e;
    e.text = std::move(f.text);
    e.bbox = f.bbox;
    e.anchor = top_left(f.bbox);
    e.member_count = f.members.size();
    e.confidence = f.confidence;
    e.members = std::move(f.members);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Entity> consolidate(const OcrDocument& doc, const ConsolidationConfig& cfg) {
  return consolidate(doc.tokens, cfg);
}

std::string document_text(const std::vector<Entity>& entities) {
  std::string out;
  for (const auto& e : entities) {
    if (!out.empty()) out += ' ';
    out += e.text;
  }
  return out;
}

}  // namespace formkie
