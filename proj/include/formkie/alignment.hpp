#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "formkie/geometry.hpp"
#include "formkie/ocr.hpp"

namespace formkie {

/// 1 - levenshtein(lower a, lower b) / max(len a, len b); two empty strings score 1.
double fuzzy_similarity(std::string_view a, std::string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

struct FuzzyConfig {
  double min_similarity = 0.9;
  double max_anchor_distance = 200.0;  // manhattan, pixels
};

struct TemplateKey {
  std::string text;
  Point point;
};

struct AnchorMatch {
  std::size_t template_key_index = 0;
  std::size_t entity_index = 0;
  double similarity = 0.0;
  Point src;  // entity anchor
  Point dst;  // template key top-left
};

/// Greedy one-to-one matching by descending similarity, nearest first on ties.
std::vector<AnchorMatch> match_anchors(const std::vector<TemplateKey>& keys,
                                       const std::vector<Entity>& entities, const FuzzyConfig& cfg);

enum class AlignMethod { Homography, Similarity, Identity };

struct AlignmentResult {
  std::vector<Entity> entities;
  Homography transform;
  AlignMethod method = AlignMethod::Identity;
  std::size_t anchors_found = 0;
  std::size_t inliers = 0;
  bool skipped = true;
};

std::string_view to_string(AlignMethod m);

/// Maps entities into the template frame: RANSAC homography with >= 4 anchors;
/// otherwise (2-3 anchors, collinear anchors, no consensus) a similarity fitted
/// to the largest consistent anchor subset; identity when neither works.
AlignmentResult align_document(const std::vector<Entity>& entities,
                               const std::vector<AnchorMatch>& anchors, const RansacParams& ransac);

/// Applies `h` to every entity box (corner hull) and resets anchors.
std::vector<Entity> transform_entities(const std::vector<Entity>& entities, const Homography& h);

}  // namespace formkie
