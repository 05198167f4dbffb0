/*
 * Copyright 2026 The Chronoforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "chronoforge/error.hpp"
#include "chronoforge/metadata.hpp"
#include "fixtures.hpp"

namespace chronoforge {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Metadata, RetailTinyShape) {
  const MetadataDocument md = testing::retail_tiny_metadata();
  EXPECT_EQ(md.entityset_name, "retail_tiny");
  EXPECT_EQ(md.entities.size(), 4u);
  EXPECT_EQ(md.relationships.size(), 3u);
  ASSERT_NE(md.find("orders"), nullptr);
  EXPECT_EQ(md.find("orders")->time_index, "Timestamp");
  EXPECT_FALSE(md.find("products")->time_index);
}

TEST(Metadata, EmitMatchesGolden) {
  const MetadataDocument md = testing::retail_tiny_metadata();
  EXPECT_EQ(emit_metadata(md), slurp(std::filesystem::path(CHRONOFORGE_TEST_DIR) / "golden/retail_tiny_metadata.json"));
  EXPECT_EQ(emit_metadata(md), emit_metadata(md));
}

TEST(Metadata, ParseEmitRoundTrip) {
  const MetadataDocument md = testing::retail_tiny_metadata();
  EXPECT_EQ(parse_metadata(emit_metadata(md)), md);
}

TEST(Metadata, RandomDocumentsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto fx = testing::random_fixture(seed);
    const MetadataDocument back = parse_metadata(emit_metadata(fx.metadata));
    EXPECT_EQ(back, fx.metadata) << "seed " << seed;
  }
}

TEST(Metadata, EmptyEntityListIsKept) {
  MetadataDocument md;
  md.entityset_name = "empty";
  EXPECT_NE(emit_metadata(md).find("\"entities\": []"), std::string::npos);
}

TEST(Metadata, UndeclaredRelationshipEntity) {
  Json j = metadata_to_json(testing::retail_tiny_metadata());
  j["relationships"][0]["child_entity"] = "payments";
  try {
    parse_metadata(j.dump());
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer(), "/relationships/0/child_entity");
  }
}

TEST(Metadata, UnknownKeysPreserved) {
  Json j = metadata_to_json(testing::retail_tiny_metadata());
  j["owner"] = "analytics";
  j["entities"][1]["comment"] = "one row per order";
  const MetadataDocument md = parse_metadata(j.dump());
  const std::string text = emit_metadata(md);
  EXPECT_NE(text.find("\"owner\": \"analytics\""), std::string::npos);
  EXPECT_NE(text.find("\"comment\": \"one row per order\""), std::string::npos);
}

TEST(Metadata, StructuralViolations) {
  const Json base = metadata_to_json(testing::retail_tiny_metadata());
  {
    Json j = base;
    j["entities"][0]["variables"][2]["semantic_type"] = "money";
    EXPECT_THROW(parse_metadata(j.dump()), SchemaError);
  }
  {
    Json j = base;
    j["entities"][1]["time_index"] = "Nope";
    EXPECT_THROW(parse_metadata(j.dump()), SchemaError);
  }
  {
    Json j = base;
    j["entities"][0]["name"] = "bad.name";
    EXPECT_THROW(parse_metadata(j.dump()), SchemaError);
  }
  EXPECT_THROW(parse_metadata("{not json"), Error);
}

TEST(Metadata, IdentifierRules) {
  EXPECT_TRUE(is_valid_identifier("Order Id"));
  EXPECT_FALSE(is_valid_identifier(""));
  EXPECT_FALSE(is_valid_identifier("a.b"));
  EXPECT_FALSE(is_valid_identifier("f(x)"));
}

}  // namespace
}  // namespace chronoforge
