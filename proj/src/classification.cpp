#include "formkie/classification.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "formkie/errors.hpp"
#include "formkie/simd/kernels.hpp"

namespace formkie {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

double norm(std::span<const double> v) { return std::sqrt(simd::active().dot(v, v)); }

}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

TfidfModel TfidfModel::fit(std::span<const std::string> corpus) {
  if (corpus.empty()) throw EmptyCorpus("TF-IDF needs at least one document");
  std::map<std::string, std::size_t, std::less<>> df;
  bool any_terms = false;
  for (const auto& doc : corpus) {
    const auto words = tokenize_words(doc);
    const std::set<std::string> unique(words.begin(), words.end());
    for (const auto& w : unique) ++df[w];
    any_terms = any_terms || !unique.empty();
  }
  if (!any_terms) throw EmptyCorpus("corpus has no terms");

  TfidfModel m;
  const auto n_docs = static_cast<double>(corpus.size());
  std::size_t index = 0;
  for (const auto& [term, count] : df) {  // alphabetical column order
    m.vocabulary_.emplace(term, index++);
    m.idf_.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return m;
}

std::vector<double> TfidfModel::transform(std::string_view text) const {
  std::vector<double> v(idf_.size(), 0.0);
  for (const auto& w : tokenize_words(text)) {
    if (auto it = vocabulary_.find(w); it != vocabulary_.end()) v[it->second] += 1.0;
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= idf_[i];
  l2_normalize(v);
  return v;
}

double TfidfModel::idf(std::string_view term) const {
  auto it = vocabulary_.find(term);
  return it == vocabulary_.end() ? 0.0 : idf_[it->second];
}

void l2_normalize(std::vector<double>& v) {
  const double n = norm(v);
  if (n > 0.0) {
    for (auto& x : v) x /= n;
  }
}

std::vector<double> layout_vector(const std::vector<Entity>& entities, double page_w, double page_h,
                                  std::size_t grid) {
  std::vector<double> v(grid * grid, 0.0);
  if (grid == 0 || !(page_w > 0.0) || !(page_h > 0.0)) return v;
  const auto g = static_cast<double>(grid);
  auto bin = [&](double coord, double extent) {
    const double b = std::floor(coord / extent * g);
    return static_cast<std::size_t>(std::clamp(b, 0.0, g - 1.0));
  };
  for (const auto& e : entities) {
    v[bin(e.anchor.y, page_h) * grid + bin(e.anchor.x, page_w)] += 1.0;
  }
  l2_normalize(v);
  return v;
}

DocVector build_doc_vector(std::vector<double> text_vec, std::vector<double> layout_vec, double alpha) {
  alpha = std::clamp(alpha, 0.0, 1.0);
  l2_normalize(text_vec);
  l2_normalize(layout_vec);
  const double wt = std::sqrt(2.0 * alpha);
  const double wl = std::sqrt(2.0 * (1.0 - alpha));
  DocVector d;
  d.combined.reserve(text_vec.size() + layout_vec.size());
  for (double x : text_vec) d.combined.push_back(wt * x);
  for (double x : layout_vec) d.combined.push_back(wl * x);
  d.text_part = std::move(text_vec);
  d.layout_part = std::move(layout_vec);
  return d;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine similarity of vectors with lengths " + std::to_string(u.size()) +
                            " and " + std::to_string(v.size()));
  }
  const auto& k = simd::active();
  const double nu = std::sqrt(k.dot(u, u));
  const double nv = std::sqrt(k.dot(v, v));
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(k.dot(u, v) / (nu * nv), -1.0, 1.0);
}

void TemplateMatrix::add(std::string label, std::vector<double> row) {
  if (labels_.empty()) {
    dimension_ = row.size();
  } else if (row.size() != dimension_) {
    throw DimensionMismatch("template row for '" + label + "' has length " + std::to_string(row.size()) +
                            ", bank uses " + std::to_string(dimension_));
  }
  if (std::find(labels_.begin(), labels_.end(), label) != labels_.end()) {
    throw SchemaError("duplicate template label '" + label + "'");
  }
  labels_.push_back(std::move(label));
  rows_.insert(rows_.end(), row.begin(), row.end());
}

Classification classify(const TemplateMatrix& bank, std::span<const double> v) {
  if (bank.size() == 0) throw DimensionMismatch("empty template bank");
  if (v.size() != bank.dimension()) {
    throw DimensionMismatch("document vector has length " + std::to_string(v.size()) + ", bank uses " +
                            std::to_string(bank.dimension()));
  }
  Classification c;
  c.scores.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    c.scores.push_back(cosine_similarity(bank.row(i), v));
    if (c.scores[i] > c.scores[c.index]) c.index = i;
  }
  c.label = bank.labels()[c.index];
  return c;
}

Classifier::Classifier(std::vector<BankClass> classes, ClassifierConfig cfg) : cfg_(cfg) {
  if (classes.empty()) throw EmptyCorpus("template bank has no classes");
  const auto with_vector = std::count_if(classes.begin(), classes.end(),
                                         [](const BankClass& c) { return !c.vector.empty(); });
  external_ = static_cast<std::size_t>(with_vector) == classes.size();
  if (external_) {
    text_dim_ = classes.front().vector.size();
  } else {
    std::vector<std::string> corpus;
    corpus.reserve(classes.size());
    for (const auto& c : classes) corpus.push_back(c.text);
    tfidf_ = TfidfModel::fit(corpus);
    text_dim_ = tfidf_.size();
  }

  const std::size_t layout_dim = cfg_.grid * cfg_.grid;
  for (auto& c : classes) {
    std::vector<double> text = c.vector.empty() ? tfidf_.transform(c.text) : c.vector;
    if (text.size() != text_dim_) {
      throw DimensionMismatch("class '" + c.label + "' text vector has length " +
                              std::to_string(text.size()) + ", expected " + std::to_string(text_dim_));
    }
    std::vector<double> layout = c.layout.empty() ? std::vector<double>(layout_dim, 0.0) : c.layout;
    if (layout.size() != layout_dim) {
      throw DimensionMismatch("class '" + c.label + "' layout vector has length " +
                              std::to_string(layout.size()) + ", expected " + std::to_string(layout_dim));
    }
    bank_.add(c.label, build_doc_vector(std::move(text), std::move(layout), cfg_.alpha).combined);
  }
}

DocVector Classifier::represent(const OcrDocument& doc) const {
  const auto entities = consolidate(doc, cfg_.consolidation);
  std::vector<double> text;
  if (external_) {
    if (doc.embedding.empty()) {
      throw SchemaError("document '" + doc.source_id + "' has no 'embedding' but the bank uses external vectors");
    }
    if (doc.embedding.size() != text_dim_) {
      throw DimensionMismatch("document embedding has length " + std::to_string(doc.embedding.size()) +
                              ", bank uses " + std::to_string(text_dim_));
    }
    text = doc.embedding;
  } else {
    text = tfidf_.transform(document_text(entities));
  }
  return build_doc_vector(std::move(text),
                          layout_vector(entities, doc.page_width, doc.page_height, cfg_.grid), cfg_.alpha);
}

Classification Classifier::classify(const OcrDocument& doc) const {
  return formkie::classify(bank_, represent(doc).combined);
}

}  // namespace formkie
