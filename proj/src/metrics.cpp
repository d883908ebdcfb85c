#include "formkie/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <stdexcept>
#include <thread>

#include "formkie/errors.hpp"

namespace formkie {

double Metrics::precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }

double Metrics::recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }

double Metrics::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Metrics score_extraction(const synth::GroundTruth& truth, const std::vector<ExtractedField>& fields) {
  if (truth.entries.size() != fields.size()) {
    throw TemplateMismatch("ground truth has " + std::to_string(truth.entries.size()) + " entries, extraction has " +
                           std::to_string(fields.size()));
  }
  Metrics m;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& t = truth.entries[i];
    const auto& f = fields[i];
    if (t.key != f.key) throw TemplateMismatch("entry " + std::to_string(i) + ": key '" + f.key + "' vs '" + t.key + "'");
    if (t.filled) {
      if (f.value && *f.value == t.value) {
        ++m.tp;
      } else {
        ++m.fn;
        if (f.value) ++m.fp;
      }
    } else if (f.value) {
      ++m.fp;
    }
  }
  return m;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoAlign: return "no_align";
    case Variant::NoScale: return "no_scale";
  }
  return "full";
}

Variant parse_variant(std::string_view name) {
  if (name == "full") return Variant::Full;
  if (name == "no_align") return Variant::NoAlign;
  if (name == "no_scale") return Variant::NoScale;
  throw std::invalid_argument("unknown ablation variant '" + std::string(name) + "'");
}

PipelineConfig apply_variant(PipelineConfig cfg, Variant v) {
  if (v == Variant::NoAlign) cfg.stages.align = false;
  if (v == Variant::NoScale) cfg.stages.scale = false;
  return cfg;
}

Metrics MetricsTable::pooled() const {
  Metrics total;
  for (const auto& [label, m] : per_class) total += m;
  return total;
}

MetricsTable evaluate(const std::vector<EvalItem>& items, const PipelineConfig& cfg, std::size_t jobs) {
  std::vector<Metrics> scores(items.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < items.size(); i += step) {
      const auto& it = items[i];
      const auto result = run_extraction(*it.kie, *it.document, cfg);
      scores[i] = score_extraction(*it.truth, result.fields);
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, items.size()));
  if (jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::future<void>> running;
    for (std::size_t j = 0; j < jobs; ++j) running.push_back(std::async(std::launch::async, work, j, jobs));
    for (auto& f : running) f.get();
  }

  MetricsTable table;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& label = items[i].kie->class_label;
    if (!table.per_class.count(label)) table.labels.push_back(label);
    table.per_class[label] += scores[i];
  }
  return table;
}

std::vector<AblationRow> run_ablation(const std::vector<EvalItem>& items, const PipelineConfig& cfg,
                                      const std::vector<Variant>& variants, std::size_t jobs) {
  std::vector<AblationRow> rows;
  for (const Variant v : variants) rows.push_back({v, evaluate(items, apply_variant(cfg, v), jobs)});
  return rows;
}

std::string format_table(const MetricsTable& table, const std::string& title) {
  std::size_t width = 8;
  for (const auto& l : table.labels) width = std::max(width, l.size());
  std::string out;
  char buf[256];
  if (!title.empty()) out += title + "\n";
  std::snprintf(buf, sizeof(buf), "%-*s  %-22s  %-22s  %s\n", static_cast<int>(width), "Document", "Precision",
                "Recall", "F1");
  out += buf;
  auto row = [&](const std::string& name, const Metrics& m) {
    char p[64], r[64];
    std::snprintf(p, sizeof(p), "%.3f (%zu/%zu)", m.precision(), m.tp, m.tp + m.fp);
    std::snprintf(r, sizeof(r), "%.3f (%zu/%zu)", m.recall(), m.tp, m.tp + m.fn);
    std::snprintf(buf, sizeof(buf), "%-*s  %-22s  %-22s  %.3f\n", static_cast<int>(width), name.c_str(), p, r, m.f1());
    out += buf;
  };
  for (const auto& l : table.labels) row(l, table.per_class.at(l));
  row("Mean", table.pooled());
  return out;
}

}  // namespace formkie
