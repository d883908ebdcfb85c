#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "formkie/alignment.hpp"
#include "formkie/segment_scaling.hpp"

using namespace formkie;

namespace {

Entity at(std::string text, double x, double y) { return Entity::from_box(std::move(text), {x, y, x + 120, y + 28}); }

// Plain dynamic-programming edit distance used as an oracle.
std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

std::vector<AnchorMatch> anchors_for(const std::vector<Entity>& moved, const std::vector<Point>& original) {
  std::vector<AnchorMatch> out;
  for (std::size_t i = 0; i < moved.size(); ++i) out.push_back({i, i, 1.0, moved[i].anchor, original[i]});
  return out;
}

}  // namespace

TEST(Fuzzy, Similarity) {
  EXPECT_DOUBLE_EQ(fuzzy_similarity("Name", "Name"), 1.0);
  EXPECT_DOUBLE_EQ(fuzzy_similarity("Name", "Nane"), 0.75);
  EXPECT_DOUBLE_EQ(fuzzy_similarity("", "x"), 0.0);
  EXPECT_DOUBLE_EQ(fuzzy_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(fuzzy_similarity("NAME", "name"), 1.0);
  EXPECT_NEAR(fuzzy_similarity("Lost Nome", "Last Name"), 1.0 - 2.0 / 9.0, 1e-12);
}

TEST(Fuzzy, LevenshteinMatchesOracle) {
  const std::vector<std::string> words{"", "a", "kitten", "sitting", "Policy Number", "Polcy Numbr", "abcabc", "cab"};
  for (const auto& a : words)
    for (const auto& b : words) EXPECT_EQ(levenshtein(a, b), edit_distance(a, b)) << a << " / " << b;
}

TEST(MatchAnchors, Rules) {
  const std::vector<TemplateKey> keys{{"Last Name", {100, 300}}};
  const FuzzyConfig cfg{};
  auto m = match_anchors(keys, {at("Last Name", 104, 306)}, cfg);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m[0].similarity, 1.0);
  EXPECT_EQ(m[0].src, (Point{104, 306}));
  EXPECT_EQ(m[0].dst, (Point{100, 300}));

  EXPECT_TRUE(match_anchors(keys, {at("Lost Nome", 100, 300)}, cfg).empty());

  const std::vector<TemplateKey> date{{"Date", {100, 310}}};
  m = match_anchors(date, {at("Date", 100, 1800), at("Date", 100, 300)}, cfg);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].entity_index, 1u);
}

TEST(MatchAnchors, OneToOne) {
  const std::vector<TemplateKey> keys{{"Date", {100, 300}}, {"Date", {100, 400}}};
  const auto m = match_anchors(keys, {at("Date", 100, 390), at("Date", 100, 305)}, {0.9, 200});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].entity_index, 1u);  // nearest first
  EXPECT_EQ(m[1].entity_index, 0u);
}

TEST(AlignDocument, FixedPointIsIdentity) {
  std::vector<Entity> e;
  std::vector<Point> pts;
  for (const Point p : {Point{100, 100}, Point{1500, 120}, Point{120, 2000}, Point{1400, 1900}, Point{800, 900}}) {
    e.push_back(at("k", p.x, p.y));
    pts.push_back(p);
  }
  const auto r = align_document(e, anchors_for(e, pts), {});
  EXPECT_EQ(r.method, AlignMethod::Homography);
  EXPECT_FALSE(r.skipped);
  EXPECT_LT(r.transform.max_abs_diff(Homography::identity()), 1e-3);
}

TEST(AlignDocument, UndoesRotation) {
  const Homography rot = Homography::similarity(3.0 * std::numbers::pi / 180.0, 1.0, {850, 1100});
  std::vector<Point> original;
  for (int i = 0; i < 10; ++i) original.push_back({150.0 + 140 * i, 200.0 + 170 * ((i * 7) % 10)});
  std::vector<Entity> moved;
  for (const Point p : original) {
    const Point q = apply_homography(rot, p);
    moved.push_back(Entity::from_box("k", {q.x, q.y, q.x, q.y}));
  }
  const auto r = align_document(moved, anchors_for(moved, original), {});
  double sq = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const Point a = r.entities[i].anchor;
    sq += std::pow(a.x - original[i].x, 2) + std::pow(a.y - original[i].y, 2);
  }
  EXPECT_LT(std::sqrt(sq / original.size()), 2.0);
}

TEST(AlignDocument, FallbackLadder) {
  std::vector<Entity> e{at("a", 100, 100), at("b", 900, 1500), at("c", 300, 700)};
  const auto none = align_document(e, {}, {});
  EXPECT_TRUE(none.skipped);
  EXPECT_EQ(none.method, AlignMethod::Identity);
  EXPECT_EQ(none.anchors_found, 0u);
  EXPECT_EQ(none.entities[1].anchor, e[1].anchor);

  const std::vector<Point> shifted{{110, 95}, {910, 1495}, {310, 695}};
  const auto sim = align_document(e, anchors_for(e, shifted), {});
  EXPECT_EQ(sim.method, AlignMethod::Similarity);
  EXPECT_NEAR(sim.entities[2].anchor.x, 310, 1e-6);
  EXPECT_NEAR(sim.entities[2].anchor.y, 695, 1e-6);
}

TEST(SegmentGrid, Cells) {
  const auto g = build_grid(1700, 2200, 5, 4);
  EXPECT_EQ(g.size(), 20u);
  for (const auto& c : g.cells()) {
    EXPECT_DOUBLE_EQ(c.width(), 425.0);
    EXPECT_DOUBLE_EQ(c.height(), 440.0);
  }
  const auto one = build_grid(100, 100, 1, 1);
  EXPECT_EQ(one.cell(0, 0), (BBox{0, 0, 100, 100}));
  EXPECT_EQ(g.locate({0, 0}), std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(g.locate({1699, 2199}), std::make_pair(std::size_t{4}, std::size_t{3}));
  EXPECT_EQ(g.locate({425, 440}), std::make_pair(std::size_t{0}, std::size_t{0}));  // shared edge -> lower index
  EXPECT_EQ(g.locate({425.5, 440.5}), std::make_pair(std::size_t{1}, std::size_t{1}));
  EXPECT_EQ(g.locate({-30, 5000}), std::make_pair(std::size_t{4}, std::size_t{0}));
}

TEST(Corrections, Means) {
  const auto g = build_grid(1700, 2200);
  const auto one = compute_corrections(g, {{0, 0, 1, {50, 50}, {60, 46}}});
  for (const auto& c : one) {
    EXPECT_DOUBLE_EQ(c.dx, 10);
    EXPECT_DOUBLE_EQ(c.dy, -4);
  }
  EXPECT_EQ(one[0].support, 1u);
  EXPECT_EQ(one[1].support, 0u);

  const auto two = compute_corrections(g, {{0, 0, 1, {50, 50}, {54, 50}}, {1, 1, 1, {70, 90}, {76, 90}}});
  EXPECT_DOUBLE_EQ(two[0].dx, 5);
  EXPECT_DOUBLE_EQ(two[0].dy, 0);

  for (const auto& c : compute_corrections(g, {})) {
    EXPECT_EQ(c.dx, 0);
    EXPECT_EQ(c.dy, 0);
  }
}

TEST(ScaleEntities, TranslatesByCell) {
  const auto g = build_grid(1700, 2200);
  std::vector<SegmentCorrection> corr(g.size());
  corr[0] = {10, -4, 1};
  const auto out = scale_entities({at("v", 100, 100), at("w", 1000, 1000)}, g, corr);
  EXPECT_EQ(out[0].anchor, (Point{110, 96}));
  EXPECT_EQ(out[0].bbox, (BBox{110, 96, 230, 124}));
  EXPECT_EQ(out[1].anchor, (Point{1000, 1000}));

  const std::vector<SegmentCorrection> zero(g.size());
  const std::vector<Entity> in{at("v", 100, 100)};
  EXPECT_EQ(scale_entities(in, g, zero)[0].bbox, in[0].bbox);
}

TEST(ScaleEntities, RemovesUniformShift) {
  const auto g = build_grid(1700, 2200);
  // Keys and values inside cell (1,1); the whole segment drifted +12 px in x.
  std::vector<AnchorMatch> anchors;
  for (int k = 0; k < 3; ++k) {
    const Point tmpl{460.0, 470.0 + 100 * k};
    anchors.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>(k), 1.0, {tmpl.x + 12, tmpl.y}, tmpl});
  }
  std::vector<Entity> values;
  std::vector<double> truth_x;
  for (int k = 0; k < 3; ++k) {
    truth_x.push_back(650.0 + 10 * k);
    values.push_back(at("val", truth_x.back() + 12, 480.0 + 100 * k));
  }
  const auto out = scale_entities(values, g, compute_corrections(g, anchors));
  double resid = 0;
  for (std::size_t k = 0; k < 3; ++k) resid += std::fabs(out[k].anchor.x - truth_x[k]);
  EXPECT_LT(resid / 3, 2.0);
}

TEST(AlignDocument, CollinearAnchorsFallBackToSimilarity) {
  // One column of keys: every 4-point sample is degenerate for a homography.
  const Homography truth = Homography::translation(-40, 25) * Homography::similarity(0.03, 1.02, {850, 1100});
  std::vector<Point> original;
  std::vector<Entity> moved;
  for (int k = 0; k < 7; ++k) {
    original.push_back({150, 300.0 + 220 * k});
    const Point q = apply_homography(truth.inverse(), original.back());
    moved.push_back(Entity::from_box("k", {q.x, q.y, q.x, q.y}));
  }
  auto anchors = anchors_for(moved, original);
  anchors[3].dst.x += 250;  // one bad match
  const auto r = align_document(moved, anchors, {});
  EXPECT_EQ(r.method, AlignMethod::Similarity);
  EXPECT_EQ(r.inliers, 6u);
  for (std::size_t k = 0; k < original.size(); ++k) {
    if (k == 3) continue;
    EXPECT_NEAR(r.entities[k].anchor.x, original[k].x, 1e-6);
    EXPECT_NEAR(r.entities[k].anchor.y, original[k].y, 1e-6);
  }
}
