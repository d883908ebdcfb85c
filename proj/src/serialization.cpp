#include "formkie/serialization.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "formkie/errors.hpp"

namespace formkie::io {

namespace {

using json = nlohmann::json;

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

const json& field(const json& j, const char* name, const std::string& ctx) {
  if (!j.is_object() || !j.contains(name)) throw SchemaError(ctx + ": missing field '" + name + "'");
  return j.at(name);
}

std::string get_string(const json& j, const char* name, const std::string& ctx) {
  const json& v = field(j, name, ctx);
  if (!v.is_string()) throw SchemaError(ctx + ": '" + name + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json& v, const std::string& ctx, std::size_t expected = 0) {
  if (!v.is_array()) throw SchemaError(ctx + ": expected an array of numbers");
  if (expected != 0 && v.size() != expected) {
    throw SchemaError(ctx + ": expected " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw SchemaError(ctx + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

ojson box_json(const BBox& b) {
  return ojson::array({std::lround(b.x_min), std::lround(b.y_min), std::lround(b.x_max), std::lround(b.y_max)});
}

// Typed overlay of one config section.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      obj_ = &root.at(name);
      if (!obj_->is_object()) throw SchemaError(std::string("config: '") + name + "' must be an object");
    }
  }
  template <class T>
  Section& opt(const char* key, T& target) {
    seen_.push_back(key);
    if (!obj_ || !obj_->contains(key)) return *this;
    const json& v = obj_->at(key);
    const std::string where = std::string("config: ") + name_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw SchemaError(where + " must be a boolean");
      target = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
        throw SchemaError(where + " must be a non-negative integer");
      }
      target = v.get<T>();
    } else {
      if (!v.is_number()) throw SchemaError(where + " must be a number");
      target = v.get<T>();
    }
    return *this;
  }
  void done() const {
    if (!obj_) return;
    for (const auto& [key, _] : obj_->items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw SchemaError(std::string("config: unknown key '") + name_ + "." + key + "'");
      }
    }
  }

 private:
  const char* name_;
  const json* obj_ = nullptr;
  std::vector<std::string> seen_;
};

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
}

KieTemplate parse_kie_template(std::string_view text) {
  const json j = parse(text, "KIE template");
  KieTemplate t;
  t.class_label = get_string(j, "class_label", "KIE template");
  const json& entries = field(j, "entries", "KIE template");
  if (!entries.is_array() || entries.empty()) throw SchemaError("KIE template: 'entries' must be a non-empty array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string ctx = "KIE template entry " + std::to_string(i);
    TemplateEntry e;
    e.key = get_string(entries[i], "key", ctx);
    if (e.key.empty()) throw SchemaError(ctx + ": empty key");
    const auto kp = get_numbers(field(entries[i], "key_point", ctx), ctx + " key_point", 2);
    e.key_point = {kp[0], kp[1]};
    const auto vb = get_numbers(field(entries[i], "value_bbox", ctx), ctx + " value_bbox", 4);
    e.value_bbox = {vb[0], vb[1], vb[2], vb[3]};
    if (!e.value_bbox.valid()) throw GeometryError(ctx + ": inverted value box");
    t.entries.push_back(std::move(e));
  }
  return t;
}

ojson to_json(const KieTemplate& t) {
  ojson j;
  j["class_label"] = t.class_label;
  j["entries"] = ojson::array();
  for (const auto& e : t.entries) {
    j["entries"].push_back({{"key", e.key},
                            {"key_point", {std::lround(e.key_point.x), std::lround(e.key_point.y)}},
                            {"value_bbox", box_json(e.value_bbox)}});
  }
  return j;
}

std::vector<BankClass> parse_bank(std::string_view text) {
  const json j = parse(text, "template bank");
  const json& classes = field(j, "classes", "template bank");
  if (!classes.is_array() || classes.empty()) throw SchemaError("template bank: 'classes' must be a non-empty array");
  std::vector<BankClass> out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string ctx = "template bank class " + std::to_string(i);
    BankClass c;
    c.label = get_string(classes[i], "label", ctx);
    if (classes[i].contains("text")) c.text = get_string(classes[i], "text", ctx);
    if (classes[i].contains("vector")) c.vector = get_numbers(classes[i]["vector"], ctx + " vector");
    if (classes[i].contains("layout")) c.layout = get_numbers(classes[i]["layout"], ctx + " layout");
    if (c.text.empty() && c.vector.empty()) throw SchemaError(ctx + ": needs 'text' or 'vector'");
    out.push_back(std::move(c));
  }
  return out;
}

ojson bank_to_json(const std::vector<BankClass>& classes) {
  ojson j;
  j["classes"] = ojson::array();
  for (const auto& c : classes) {
    ojson cj;
    cj["label"] = c.label;
    cj["text"] = c.text;
    if (!c.vector.empty()) cj["vector"] = c.vector;
    if (!c.layout.empty()) cj["layout"] = c.layout;
    j["classes"].push_back(std::move(cj));
  }
  return j;
}

synth::GroundTruth parse_ground_truth(std::string_view text) {
  const json j = parse(text, "ground truth");
  synth::GroundTruth g;
  g.source_id = get_string(j, "source_id", "ground truth");
  g.class_label = get_string(j, "class_label", "ground truth");
  const json& entries = field(j, "entries", "ground truth");
  if (!entries.is_array()) throw SchemaError("ground truth: 'entries' must be an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string ctx = "ground truth entry " + std::to_string(i);
    synth::TruthEntry e;
    e.key = get_string(entries[i], "key", ctx);
    const json& filled = field(entries[i], "filled", ctx);
    if (!filled.is_boolean()) throw SchemaError(ctx + ": 'filled' must be a boolean");
    e.filled = filled.get<bool>();
    const json& value = field(entries[i], "value", ctx);
    if (e.filled) {
      if (!value.is_string()) throw SchemaError(ctx + ": filled entries need a string value");
      e.value = value.get<std::string>();
    }
    if (entries[i].contains("token_indices")) {
      for (double v : get_numbers(entries[i]["token_indices"], ctx + " token_indices")) {
        e.token_indices.push_back(static_cast<std::size_t>(v));
      }
    }
    g.entries.push_back(std::move(e));
  }
  return g;
}

ojson to_json(const synth::GroundTruth& truth) {
  ojson j;
  j["source_id"] = truth.source_id;
  j["class_label"] = truth.class_label;
  j["entries"] = ojson::array();
  for (const auto& e : truth.entries) {
    ojson ej;
    ej["key"] = e.key;
    ej["filled"] = e.filled;
    ej["value"] = e.filled ? ojson(e.value) : ojson(nullptr);
    ej["token_indices"] = e.token_indices;
    j["entries"].push_back(std::move(ej));
  }
  return j;
}

ojson classification_report(const std::string& source_id, const Classification& c,
                            const std::vector<std::string>& labels) {
  ojson j;
  j["source_id"] = source_id;
  j["label"] = c.label;
  ojson scores = ojson::object();
  for (std::size_t i = 0; i < labels.size() && i < c.scores.size(); ++i) scores[labels[i]] = c.scores[i];
  j["scores"] = std::move(scores);
  return j;
}

ojson alignment_report(const AlignmentResult& a) {
  ojson j;
  j["anchors_found"] = a.anchors_found;
  j["inliers"] = a.inliers;
  j["transform"] = a.transform.data();
  j["skipped"] = a.skipped;
  j["method"] = std::string(to_string(a.method));
  return j;
}

ojson scaling_report(const std::vector<SegmentCorrection>& corrections, const GridConfig& grid) {
  ojson j;
  j["rows"] = grid.rows;
  j["cols"] = grid.cols;
  j["cells"] = ojson::array();
  for (const auto& c : corrections) j["cells"].push_back({{"support", c.support}, {"dx", c.dx}, {"dy", c.dy}});
  return j;
}

ojson extraction_report(const ExtractionResult& r, bool diagnostics) {
  ojson j;
  j["source_id"] = r.source_id;
  j["class_label"] = r.class_label;
  j["fields"] = ojson::array();
  for (const auto& f : r.fields) {
    ojson fj;
    fj["key"] = f.key;
    fj["value"] = f.value ? ojson(*f.value) : ojson(nullptr);
    fj["bbox"] = f.bbox ? box_json(*f.bbox) : ojson(nullptr);
    fj["cost"] = f.cost ? ojson(*f.cost) : ojson(nullptr);
    j["fields"].push_back(std::move(fj));
  }
  if (diagnostics) {
    const auto& d = r.diagnostics;
    ojson dj;
    dj["stages"] = {{"align", d.stages.align}, {"scale", d.stages.scale}};
    dj["entities"] = d.entity_count;
    dj["alignment"] = d.stages.align ? alignment_report(d.alignment) : ojson(nullptr);
    if (d.stages.scale) {
      ojson sj = scaling_report(d.corrections, d.grid);
      sj["anchors"] = d.scaling_anchors;
      dj["scaling"] = std::move(sj);
    } else {
      dj["scaling"] = nullptr;
    }
    j["diagnostics"] = std::move(dj);
  }
  return j;
}

ojson to_json(const PipelineConfig& c) {
  ojson j;
  j["consolidation"] = {{"vertical_tol", c.consolidation.vertical_tol},
                        {"intra_word_gap", c.consolidation.intra_word_gap}};
  j["fuzzy"] = {{"min_similarity", c.fuzzy.min_similarity}, {"max_anchor_distance", c.fuzzy.max_anchor_distance}};
  j["alignment"] = {{"search_radius", c.align_search_radius}};
  j["grid"] = {{"rows", c.grid.rows}, {"cols", c.grid.cols}};
  j["kie"] = {{"reject_cost", c.kie.reject_cost}, {"hard_radius", c.kie.hard_radius}};
  j["ransac"] = {{"inlier_tol", c.ransac.inlier_tol}, {"iterations", c.ransac.iterations}, {"seed", c.ransac.seed}};
  j["classify"] = {{"alpha", c.classify.alpha}, {"grid", c.classify.grid}};
  j["stages"] = {{"align", c.stages.align}, {"scale", c.stages.scale}};
  j["run"] = {{"jobs", c.run.jobs}, {"diagnostics", c.run.diagnostics}};
  return j;
}

PipelineConfig parse_config(std::string_view text, PipelineConfig c) {
  const json j = parse(text, "config");
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  static const char* kSections[] = {"consolidation", "fuzzy", "alignment", "grid", "kie",
                                    "ransac", "classify", "stages", "run"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(kSections), std::end(kSections), [&](const char* s) { return key == s; }) ==
        std::end(kSections)) {
      throw SchemaError("config: unknown section '" + key + "'");
    }
  }
  Section(j, "consolidation").opt("vertical_tol", c.consolidation.vertical_tol)
      .opt("intra_word_gap", c.consolidation.intra_word_gap).done();
  Section(j, "fuzzy").opt("min_similarity", c.fuzzy.min_similarity)
      .opt("max_anchor_distance", c.fuzzy.max_anchor_distance).done();
  Section(j, "alignment").opt("search_radius", c.align_search_radius).done();
  Section(j, "grid").opt("rows", c.grid.rows).opt("cols", c.grid.cols).done();
  Section(j, "kie").opt("reject_cost", c.kie.reject_cost).opt("hard_radius", c.kie.hard_radius).done();
  Section(j, "ransac").opt("inlier_tol", c.ransac.inlier_tol).opt("iterations", c.ransac.iterations)
      .opt("seed", c.ransac.seed).done();
  Section(j, "classify").opt("alpha", c.classify.alpha).opt("grid", c.classify.grid).done();
  Section(j, "stages").opt("align", c.stages.align).opt("scale", c.stages.scale).done();
  Section(j, "run").opt("jobs", c.run.jobs).opt("diagnostics", c.run.diagnostics).done();
  c.classify.consolidation = c.consolidation;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return c;
}

ojson to_json(const synth::NoiseModel& n) {
  ojson j;
  j["rotation_deg"] = n.rotation_deg;
  j["scale"] = {n.scale_min, n.scale_max};
  j["jitter_px"] = n.jitter_px;
  j["token_split_prob"] = n.token_split_prob;
  j["fill_prob"] = n.fill_prob;
  j["distractor_count"] = n.distractor_count;
  j["translate_px"] = n.translate_px;
  j["slip_px"] = n.slip_px;
  j["seed"] = n.seed;
  return j;
}

ojson to_json(const synth::LayoutSpec& s) {
  ojson j;
  j["label"] = s.label;
  j["title"] = s.title;
  j["static_text"] = s.static_text;
  j["footer"] = s.footer;
  j["keys"] = s.keys;
  j["columns"] = s.columns;
  j["placement"] = s.placement == synth::Placement::Right ? "right" : "below";
  j["row_pitch"] = s.row_pitch;
  j["page"] = {{"width", s.page_width}, {"height", s.page_height}};
  return j;
}

ojson to_json(const synth::DatasetSpec& d) {
  ojson j;
  j["noise"] = to_json(d.noise);
  j["templates"] = ojson::array();
  for (const auto& t : d.templates) j["templates"].push_back(to_json(t));
  return j;
}

synth::DatasetSpec parse_dataset_spec(std::string_view text) {
  json j;
  try {
    j = parse(text, "dataset spec");
  } catch (const SchemaError& e) {
    throw SpecError(e.what());
  }
  if (!j.is_object()) throw SpecError("dataset spec must be a JSON object");
  synth::DatasetSpec d;
  try {
    if (j.contains("noise")) {
      const json& n = j["noise"];
      auto& m = d.noise;
      if (!n.is_object()) throw SpecError("dataset spec: 'noise' must be an object");
      m.rotation_deg = n.value("rotation_deg", m.rotation_deg);
      if (n.contains("scale")) {
        const auto s = get_numbers(n["scale"], "noise scale", 2);
        m.scale_min = s[0];
        m.scale_max = s[1];
      }
      m.jitter_px = n.value("jitter_px", m.jitter_px);
      m.token_split_prob = n.value("token_split_prob", m.token_split_prob);
      m.fill_prob = n.value("fill_prob", m.fill_prob);
      m.distractor_count = n.value("distractor_count", m.distractor_count);
      m.translate_px = n.value("translate_px", m.translate_px);
      m.slip_px = n.value("slip_px", m.slip_px);
      m.seed = n.value("seed", m.seed);
    }
    if (!j.contains("templates")) {
      d.templates = synth::default_dataset_spec().templates;
    } else {
      const json& ts = j["templates"];
      if (!ts.is_array() || ts.empty()) throw SpecError("dataset spec: 'templates' must be a non-empty array");
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string ctx = "dataset spec template " + std::to_string(i);
        synth::LayoutSpec s;
        s.label = get_string(ts[i], "label", ctx);
        s.title = ts[i].value("title", std::string{});
        s.static_text = ts[i].value("static_text", std::vector<std::string>{});
        s.footer = ts[i].value("footer", std::vector<std::string>{});
        s.keys = ts[i].value("keys", std::vector<std::string>{});
        s.columns = ts[i].value("columns", s.columns);
        const std::string placement = ts[i].value("placement", std::string("right"));
        if (placement == "right") {
          s.placement = synth::Placement::Right;
        } else if (placement == "below") {
          s.placement = synth::Placement::Below;
        } else {
          throw SpecError(ctx + ": placement must be 'right' or 'below'");
        }
        s.row_pitch = ts[i].value("row_pitch", s.row_pitch);
        if (ts[i].contains("page")) {
          s.page_width = ts[i]["page"].value("width", s.page_width);
          s.page_height = ts[i]["page"].value("height", s.page_height);
        }
        d.templates.push_back(std::move(s));
      }
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("dataset spec: ") + e.what());
  } catch (const SchemaError& e) {
    throw SpecError(e.what());
  }
  d.noise.validate();
  return d;
}

ojson to_json(const Metrics& m) {
  ojson j;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["precision"] = m.precision();
  j["recall"] = m.recall();
  j["f1"] = m.f1();
  return j;
}

ojson to_json(const MetricsTable& t) {
  ojson j;
  j["classes"] = ojson::array();
  for (const auto& l : t.labels) {
    ojson row = to_json(t.per_class.at(l));
    row["label"] = l;
    j["classes"].push_back(std::move(row));
  }
  j["mean"] = to_json(t.pooled());
  return j;
}

std::vector<ManifestRecord> parse_manifest(std::string_view text) {
  std::vector<ManifestRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string ctx = "manifest line " + std::to_string(line_no);
    const json j = parse(line, ctx.c_str());
    out.push_back({get_string(j, "form", ctx), get_string(j, "label", ctx), get_string(j, "template", ctx),
                   get_string(j, "truth", ctx)});
  }
  return out;
}

std::string manifest_line(const ManifestRecord& r) {
  ojson j;
  j["form"] = r.form;
  j["label"] = r.label;
  j["template"] = r.template_path;
  j["truth"] = r.truth;
  return j.dump();
}

}  // namespace formkie::io
