#include <gtest/gtest.h>

#include "formkie/errors.hpp"
#include "formkie/serialization.hpp"

using namespace formkie;

TEST(Config, DumpParseRoundTrip) {
  PipelineConfig c;
  c.kie.reject_cost = 123;
  c.stages.scale = false;
  c.ransac.seed = 9;
  const auto back = io::parse_config(io::to_json(c).dump());
  EXPECT_EQ(io::to_json(back).dump(), io::to_json(c).dump());
}

TEST(Config, OverlayAndErrors) {
  const auto c = io::parse_config(R"({"fuzzy":{"min_similarity":0.8}})");
  EXPECT_DOUBLE_EQ(c.fuzzy.min_similarity, 0.8);
  EXPECT_DOUBLE_EQ(c.fuzzy.max_anchor_distance, 200.0);
  EXPECT_THROW(io::parse_config(R"({"fuzy":{}})"), SchemaError);
  EXPECT_THROW(io::parse_config(R"({"fuzzy":{"min_sim":0.8}})"), SchemaError);
  EXPECT_THROW(io::parse_config(R"({"fuzzy":{"min_similarity":"high"}})"), SchemaError);
  EXPECT_THROW(io::parse_config(R"({"grid":{"rows":0}})"), SchemaError);
  EXPECT_THROW(io::parse_config("[1]"), SchemaError);
}

TEST(Template, RoundTripAndErrors) {
  const KieTemplate t{"c", {{"Name", {100, 200}, {300, 200, 600, 240}}}};
  const auto back = io::parse_kie_template(io::to_json(t).dump());
  ASSERT_EQ(back.entries.size(), 1u);
  EXPECT_EQ(back.entries[0].key_point, (Point{100, 200}));
  EXPECT_EQ(back.entries[0].value_bbox, (BBox{300, 200, 600, 240}));
  EXPECT_THROW(io::parse_kie_template(R"({"class_label":"c","entries":[]})"), SchemaError);
  EXPECT_THROW(io::parse_kie_template(R"({"class_label":"c","entries":[{"key":"k","key_point":[0,0],"value_bbox":[5,0,1,1]}]})"),
               GeometryError);
}

TEST(GroundTruth, RoundTrip) {
  synth::GroundTruth g{"f", "c", {{"A", true, "x", {3, 4}}, {"B", false, "", {}}}};
  const auto back = io::parse_ground_truth(io::to_json(g).dump());
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[0].value, "x");
  EXPECT_EQ(back.entries[0].token_indices, (std::vector<std::size_t>{3, 4}));
  EXPECT_FALSE(back.entries[1].filled);
}

TEST(Bank, Errors) {
  EXPECT_THROW(io::parse_bank(R"({"classes":[]})"), SchemaError);
  EXPECT_THROW(io::parse_bank(R"({"classes":[{"label":"x"}]})"), SchemaError);
  const auto b = io::parse_bank(R"({"classes":[{"label":"x","vector":[1,0]}]})");
  EXPECT_EQ(b[0].vector, (std::vector<double>{1, 0}));
}

TEST(DatasetSpec, RoundTripAndErrors) {
  const auto d = synth::default_dataset_spec();
  const auto back = io::parse_dataset_spec(io::to_json(d).dump());
  EXPECT_EQ(io::to_json(back).dump(), io::to_json(d).dump());
  EXPECT_THROW(io::parse_dataset_spec(R"({"noise":{"fill_prob":2}})"), SpecError);
  EXPECT_THROW(io::parse_dataset_spec(R"({"templates":[{"label":"x","placement":"left"}]})"), SpecError);
  EXPECT_THROW(io::parse_dataset_spec("{"), SpecError);
  EXPECT_EQ(io::parse_dataset_spec("{}").templates.size(), 6u);
}

TEST(Manifest, ParseLines) {
  const std::string text = io::manifest_line({"forms/a.json", "c", "templates/c.kie.json", "truth/a.json"}) + "\n\n" +
                           io::manifest_line({"forms/b.json", "c", "templates/c.kie.json", "truth/b.json"}) + "\n";
  const auto r = io::parse_manifest(text);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].form, "forms/b.json");
  EXPECT_THROW(io::parse_manifest(R"({"form":"x"})"), SchemaError);
}

TEST(Reports, ExtractionNulls) {
  ExtractionResult r;
  r.source_id = "s";
  r.class_label = "c";
  r.fields.push_back({"A", std::string("x"), BBox{1, 2, 3, 4}, 5.0, 0});
  r.fields.push_back({"B", {}, {}, {}, {}});
  const auto j = io::extraction_report(r, false);
  EXPECT_EQ(j["fields"][0]["value"], "x");
  EXPECT_TRUE(j["fields"][1]["value"].is_null());
  EXPECT_TRUE(j["fields"][1]["bbox"].is_null());
  EXPECT_FALSE(j.contains("diagnostics"));
  EXPECT_TRUE(io::extraction_report(r, true).contains("diagnostics"));
}
