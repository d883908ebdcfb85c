#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "formkie/ocr.hpp"

namespace formkie {

/// Lowercased runs of alphanumeric characters (bytes >= 0x80 count as word characters).
std::vector<std::string> tokenize_words(std::string_view text);

/// Smoothed TF-IDF with L2-normalized output.
class TfidfModel {
 public:
  static TfidfModel fit(std::span<const std::string> corpus);

  std::vector<double> transform(std::string_view text) const;

  std::size_t size() const { return idf_.size(); }
  const std::map<std::string, std::size_t, std::less<>>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  double idf(std::string_view term) const;

 private:
  std::map<std::string, std::size_t, std::less<>> vocabulary_;
  std::vector<double> idf_;
};

/// G x G histogram of entity anchors over the page, L2-normalized.
std::vector<double> layout_vector(const std::vector<Entity>& entities, double page_w, double page_h,
                                  std::size_t grid = 8);

/// Scales `v` to unit L2 norm in place; leaves zero vectors alone.
void l2_normalize(std::vector<double>& v);

struct DocVector {
  std::vector<double> text_part;
  std::vector<double> layout_part;
  std::vector<double> combined;
};

/// Normalizes both parts and concatenates them with weights sqrt(2a) and
/// sqrt(2(1-a)), so a = 0.5 is a plain concatenation.
DocVector build_doc_vector(std::vector<double> text_vec, std::vector<double> layout_vec,
                           double alpha = 0.5);

/// u.v / (|u||v|), 0 when either norm is 0. Throws DimensionMismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

class TemplateMatrix {
 public:
  TemplateMatrix() = default;
  void add(std::string label, std::vector<double> row);

  std::size_t size() const { return labels_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const double> row(std::size_t i) const {
    return {rows_.data() + i * dimension_, dimension_};
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> rows_;
  std::size_t dimension_ = 0;
};

struct Classification {
  std::string label;
  std::size_t index = 0;
  std::vector<double> scores;
};

/// Argmax of cosine scores; the lowest row index wins exact ties.
Classification classify(const TemplateMatrix& bank, std::span<const double> v);

struct ClassifierConfig {
  double alpha = 0.5;
  std::size_t grid = 8;
  ConsolidationConfig consolidation;
};

/// One class of a template bank file.
struct BankClass {
  std::string label;
  std::string text;
  std::vector<double> vector;  // optional external text vector
  std::vector<double> layout;  // optional layout vector
};

/// Template bank: fitted TF-IDF (or external vectors) plus the class matrix.
class Classifier {
 public:
  Classifier(std::vector<BankClass> classes, ClassifierConfig cfg = {});

  DocVector represent(const OcrDocument& doc) const;
  Classification classify(const OcrDocument& doc) const;

  const TemplateMatrix& bank() const { return bank_; }
  bool external_vectors() const { return external_; }
  const ClassifierConfig& config() const { return cfg_; }

 private:
  ClassifierConfig cfg_;
  TfidfModel tfidf_;
  TemplateMatrix bank_;
  bool external_ = false;
  std::size_t text_dim_ = 0;
};

}  // namespace formkie
