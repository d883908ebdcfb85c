#include "formkie/alignment.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "formkie/errors.hpp"

namespace formkie {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double fuzzy_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const auto d = levenshtein(lower(a), lower(b));
  return 1.0 - static_cast<double>(d) / static_cast<double>(longest);
}

std::vector<AnchorMatch> match_anchors(const std::vector<TemplateKey>& keys,
                                       const std::vector<Entity>& entities, const FuzzyConfig& cfg) {
  struct Candidate {
    AnchorMatch match;
    double distance;
  };
  std::vector<Candidate> candidates;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    for (std::size_t e = 0; e < entities.size(); ++e) {
      const double dist = manhattan(entities[e].anchor, keys[k].point);
      if (dist > cfg.max_anchor_distance) continue;
      const double sim = fuzzy_similarity(keys[k].text, entities[e].text);
      if (sim < cfg.min_similarity) continue;
      candidates.push_back({{k, e, sim, entities[e].anchor, keys[k].point}, dist});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.match.similarity != b.match.similarity) return a.match.similarity > b.match.similarity;
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.match.template_key_index != b.match.template_key_index) {
      return a.match.template_key_index < b.match.template_key_index;
    }
    return a.match.entity_index < b.match.entity_index;
  });

  std::vector<bool> key_used(keys.size(), false), entity_used(entities.size(), false);
  std::vector<AnchorMatch> out;
  for (const auto& c : candidates) {
    if (key_used[c.match.template_key_index] || entity_used[c.match.entity_index]) continue;
    key_used[c.match.template_key_index] = true;
    entity_used[c.match.entity_index] = true;
    out.push_back(c.match);
  }
  std::sort(out.begin(), out.end(), [](const AnchorMatch& a, const AnchorMatch& b) {
    return a.template_key_index < b.template_key_index;
  });
  return out;
}

std::string_view to_string(AlignMethod m) {
  switch (m) {
    case AlignMethod::Homography: return "homography";
    case AlignMethod::Similarity: return "similarity";
    case AlignMethod::Identity: return "identity";
  }
  return "identity";
}

std::vector<Entity> transform_entities(const std::vector<Entity>& entities, const Homography& h) {
  std::vector<Entity> out = entities;
  for (auto& e : out) {
    e.bbox = apply_homography(h, e.bbox);
    e.anchor = top_left(e.bbox);
  }
  return out;
}

namespace {

// Similarity consensus over every anchor pair; anchors are few, so this is
// exhaustive and needs no RNG. Throws NoConsensus below two inliers.
std::pair<Homography, std::size_t> consensus_similarity(const std::vector<PointPair>& pairs, double tol) {
  std::vector<bool> best_mask;
  std::size_t best_count = 0;
  double best_err = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if (euclidean(pairs[i].first, pairs[j].first) < 1.0) continue;
      const std::array<PointPair, 2> sample{pairs[i], pairs[j]};
      const Homography h = estimate_similarity(sample);
      std::vector<bool> mask(pairs.size());
      std::size_t count = 0;
      double err = 0.0;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double e = euclidean(apply_homography(h, pairs[k].first), pairs[k].second);
        mask[k] = e <= tol;
        if (mask[k]) {
          ++count;
          err += e;
        }
      }
      if (count > best_count || (count == best_count && err < best_err)) {
        best_mask = std::move(mask);
        best_count = count;
        best_err = err;
      }
    }
  }
  if (best_count < 2) throw NoConsensus("no similarity consensus among anchors");
  std::vector<PointPair> inliers;
  for (std::size_t k = 0; k < pairs.size(); ++k)
    if (best_mask[k]) inliers.push_back(pairs[k]);
  return {estimate_similarity(inliers), best_count};
}

}  // namespace

AlignmentResult align_document(const std::vector<Entity>& entities,
                               const std::vector<AnchorMatch>& anchors, const RansacParams& ransac) {
  AlignmentResult r;
  r.anchors_found = anchors.size();
  std::vector<PointPair> pairs;
  pairs.reserve(anchors.size());
  for (const auto& a : anchors) pairs.emplace_back(a.src, a.dst);

  if (pairs.size() >= 4) {
    try {
      const auto fit = ransac_homography(pairs, ransac);
      r.transform = fit.transform;
      r.inliers = fit.inlier_count;
      r.method = AlignMethod::Homography;
      r.skipped = false;
    } catch (const Error&) {
      // Collinear anchors (a single column of keys) or no consensus: step down.
    }
  }
  if (r.skipped && pairs.size() >= 2) {
    try {
      const auto [h, count] = consensus_similarity(pairs, ransac.inlier_tol);
      r.transform = h;
      r.inliers = count;
      r.method = AlignMethod::Similarity;
      r.skipped = false;
    } catch (const Error&) {
    }
  }

  if (r.skipped) {
    r.entities = entities;
    return r;
  }
  try {
    r.entities = transform_entities(entities, r.transform);
  } catch (const DegenerateProjection&) {
    r.transform = Homography::identity();
    r.method = AlignMethod::Identity;
    r.inliers = 0;
    r.skipped = true;
    r.entities = entities;
  }
  return r;
}

}  // namespace formkie
