#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "formkie/errors.hpp"
#include "formkie/ocr.hpp"

using namespace formkie;

namespace {

Token tok(std::string text, double x0, double y0, double x1, double y1) { return {std::move(text), {x0, y0, x1, y1}}; }

std::string one_token_doc(const std::string& token_json) {
  return R"({"source_id":"d","page":{"width":1700,"height":2200},"tokens":[)" + token_json + "]}";
}

}  // namespace

TEST(ParseOcr, NormalizedBoxRescaled) {
  const auto p = parse_ocr_json(one_token_doc(R"({"text":"Name","nbbox":[0.1,0.1,0.2,0.12]})"));
  ASSERT_EQ(p.document.tokens.size(), 1u);
  const BBox b = p.document.tokens[0].bbox;
  EXPECT_NEAR(b.x_min, 170, 1e-9);
  EXPECT_NEAR(b.y_min, 220, 1e-9);
  EXPECT_NEAR(b.x_max, 340, 1e-9);
  EXPECT_NEAR(b.y_max, 264, 1e-9);
  EXPECT_TRUE(p.warnings.empty());
}

TEST(ParseOcr, Errors) {
  EXPECT_THROW(parse_ocr_json(one_token_doc(R"({"text":"a","bbox":[50,0,10,10]})")), GeometryError);
  EXPECT_THROW(parse_ocr_json(one_token_doc(R"({"text":"a","bbox":[5000,0,5010,10]})")), GeometryError);
  EXPECT_THROW(parse_ocr_json(one_token_doc(R"({"text":"  ","bbox":[0,0,10,10]})")), SchemaError);
  EXPECT_THROW(parse_ocr_json(one_token_doc(R"({"text":"a"})")), SchemaError);
  EXPECT_THROW(parse_ocr_json(one_token_doc(R"({"text":"a","bbox":[0,0,1,1],"nbbox":[0,0,0.1,0.1]})")),
               SchemaError);
  EXPECT_THROW(parse_ocr_json(one_token_doc(R"({"text":"a","nbbox":[0,0,1.5,0.1]})")), SchemaError);
  EXPECT_THROW(parse_ocr_json(one_token_doc(R"({"text":"a","bbox":[0,0,1,1],"confidence":2})")), SchemaError);
  EXPECT_THROW(parse_ocr_json(R"({"page":{"width":1,"height":1},"tokens":[]})"), SchemaError);
  EXPECT_THROW(parse_ocr_json(R"({"source_id":"x","page":{"width":0,"height":1},"tokens":[]})"), GeometryError);
  EXPECT_THROW(parse_ocr_json("not json"), SchemaError);
}

TEST(ParseOcr, EmptyDocumentWarns) {
  const auto p = parse_ocr_json(one_token_doc(""));
  EXPECT_TRUE(p.document.tokens.empty());
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_EQ(p.warnings[0], OcrWarning::EmptyDocument);
}

TEST(ParseOcr, RoundTrip) {
  OcrDocument d{"r", 1700, 2200, {tok("Hello", 1, 2, 3, 4), {"World", {10, 20, 30, 40}, 0.5}}, {0.25, -1}};
  const auto back = parse_ocr_json(to_ocr_json(d)).document;
  ASSERT_EQ(back.tokens.size(), 2u);
  EXPECT_EQ(back.tokens[1].text, "World");
  EXPECT_EQ(back.tokens[1].bbox, (BBox{10, 20, 30, 40}));
  EXPECT_DOUBLE_EQ(back.tokens[1].confidence, 0.5);
  EXPECT_EQ(back.embedding, d.embedding);
}

TEST(ReadingOrder, Rules) {
  auto xs = sort_reading_order({tok("b", 200, 100, 220, 120), tok("a", 50, 100, 70, 120)});
  EXPECT_EQ(xs[0].text, "a");
  auto ys = sort_reading_order({tok("low", 0, 300, 10, 320), tok("high", 500, 100, 510, 120)});
  EXPECT_EQ(ys[0].text, "high");
  // y=110 is within 15 of y=100, so both share a row and x decides.
  auto row = sort_reading_order({tok("first-y", 300, 100, 310, 120), tok("second-y", 40, 110, 50, 130)}, 15);
  EXPECT_EQ(row[0].text, "second-y");
}

TEST(Consolidate, JoinsCloseFragmentsWithoutSpace) {
  const auto e = consolidate({tok("J", 100, 200, 115, 220), tok("ohn", 120, 202, 160, 221)});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].text, "John");
  EXPECT_EQ(e[0].bbox, (BBox{100, 200, 160, 221}));
  EXPECT_EQ(e[0].anchor, (Point{100, 200}));
  EXPECT_EQ(e[0].member_count, 2u);
}

TEST(Consolidate, TwoThresholdRuleInsertsSpace) {
  // gap 200 - 142 = 58 (joins); start-to-start 100 (word break).
  const auto e = consolidate({tok("123", 100, 200, 142, 220), tok("Main St", 200, 203, 298, 222)});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].text, "123 Main St");
}

TEST(Consolidate, StartToStartBoundary) {
  // Exactly 60 apart: word break. 59 apart: same word.
  EXPECT_EQ(consolidate({tok("ab", 100, 0, 128, 20), tok("cd", 160, 0, 188, 20)})[0].text, "ab cd");
  EXPECT_EQ(consolidate({tok("ab", 100, 0, 128, 20), tok("cd", 159, 0, 187, 20)})[0].text, "abcd");
}

TEST(Consolidate, GapBoundary) {
  EXPECT_EQ(consolidate({tok("a", 0, 0, 40, 20), tok("b", 100, 0, 140, 20)}).size(), 1u);  // gap 60
  EXPECT_EQ(consolidate({tok("a", 0, 0, 40, 20), tok("b", 101, 0, 141, 20)}).size(), 2u);  // gap 61
}

TEST(Consolidate, VerticalTolerance) {
  EXPECT_EQ(consolidate({tok("a", 0, 0, 40, 20), tok("b", 45, 15, 80, 35)}).size(), 1u);
  EXPECT_EQ(consolidate({tok("a", 0, 0, 40, 20), tok("b", 45, 16, 80, 36)}).size(), 2u);
  EXPECT_EQ(consolidate({tok("a", 100, 200, 140, 220), tok("b", 100, 400, 140, 420)}).size(), 2u);
}

TEST(Consolidate, ChainsMergeTransitively) {
  const auto e = consolidate({tok("c", 100, 0, 130, 20), tok("a", 0, 0, 30, 20), tok("b", 50, 0, 80, 20)});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].text, "abc");
  EXPECT_EQ(e[0].members, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Consolidate, DoesNotMergeLeftward) {
  // The second fragment starts left of the first; it reads first and then
  // absorbs the other, never the reverse.
  const auto e = consolidate({tok("world", 100, 0, 170, 20), tok("hello", 20, 0, 90, 20)});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].text, "hello world");
}

TEST(Consolidate, OverlappingFragmentsJoinWithoutSpace) {
  const auto e = consolidate({tok("ab", 0, 0, 100, 20), tok("cd", 90, 0, 130, 20)});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].text, "abcd");
}

TEST(Consolidate, ConfidenceIsMinimum) {
  std::vector<Token> t{{"a", {0, 0, 10, 10}, 0.9}, {"b", {12, 0, 20, 10}, 0.4}};
  EXPECT_DOUBLE_EQ(consolidate(t)[0].confidence, 0.4);
}

TEST(Consolidate, EmptyInput) { EXPECT_TRUE(consolidate(std::vector<Token>{}).empty()); }

TEST(ConsolidateFuzz, PartitionContainmentIdempotence) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(0, 40), len(1, 6), xd(0, 600), yd(0, 12), wd(5, 90), hd(10, 30);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Token> tokens;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const double x = xd(rng), y = yd(rng) * 20.0 + std::uniform_real_distribution<double>(0, 8)(rng);
      tokens.push_back(tok(std::string(static_cast<std::size_t>(len(rng)), static_cast<char>('a' + i % 26)), x, y,
                           x + wd(rng), y + hd(rng)));
    }
    const auto entities = consolidate(tokens);

    std::vector<std::size_t> seen;
    for (const auto& e : entities) {
      BBox hull = tokens[e.members.at(0)].bbox;
      for (std::size_t m : e.members) {
        EXPECT_TRUE(e.bbox.contains(tokens[m].bbox));
        hull = merge(hull, tokens[m].bbox);
        seen.push_back(m);
      }
      EXPECT_EQ(e.bbox, hull);
      EXPECT_EQ(e.anchor, top_left(e.bbox));
      EXPECT_EQ(e.member_count, e.members.size());
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::size_t> all(tokens.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    EXPECT_EQ(seen, all) << "trial " << trial;

    std::vector<Token> again;
    for (const auto& e : entities) again.push_back(tok(e.text, e.bbox.x_min, e.bbox.y_min, e.bbox.x_max, e.bbox.y_max));
    const auto twice = consolidate(again);
    ASSERT_EQ(twice.size(), entities.size()) << "trial " << trial;
    for (std::size_t i = 0; i < twice.size(); ++i) {
      EXPECT_EQ(twice[i].text, entities[i].text);
      EXPECT_EQ(twice[i].bbox, entities[i].bbox);
    }
  }
}

TEST(DocumentText, SpaceJoined) {
  EXPECT_EQ(document_text({Entity::from_box("a b", {}), Entity::from_box("c", {})}), "a b c");
  EXPECT_EQ(document_text({}), "");
}
