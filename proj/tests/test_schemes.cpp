#include <doctest.h>

#include <algorithm>

#include "arganno/errors.hpp"
#include "arganno/rng.hpp"
#include "arganno/schemes.hpp"

using namespace arganno;

TEST_CASE("registry holds the three scheme families") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  CHECK(arrow.tags == std::vector<std::string>{"I1", "I2", "E1", "E2", "O", "C", "T"});
  CHECK(arrow.hierarchy == std::vector<std::string>{"I2", "O", "E1", "E2", "T"});
  CHECK(arrow.num_labels() == 8);
  CHECK(arrow.unit == SpanUnit::sentence);

  const TagSet& persuade = tag_set(SchemeId::PERSUADE);
  CHECK(persuade.tags == std::vector<std::string>{"L", "P", "C1", "C2", "R", "E", "C3"});
  CHECK(persuade.hierarchy.empty());
  CHECK(persuade.num_labels() == 8);

  CHECK(tag_set(SchemeId::AAE_BIO).num_labels() == 3);
  CHECK(tag_set(SchemeId::AAE_COMPONENT).num_labels() == 3);
  CHECK(tag_set(SchemeId::AAE_RELATION).num_labels() == 2);
  CHECK(tag_set(SchemeId::AAE_STANCE).num_labels() == 2);
}

TEST_CASE("scheme name round-trip") {
  for (SchemeId id : {SchemeId::ARROW, SchemeId::PERSUADE, SchemeId::AAE_BIO,
                      SchemeId::AAE_COMPONENT, SchemeId::AAE_RELATION, SchemeId::AAE_STANCE})
    CHECK(scheme_from_string(scheme_to_string(id)) == id);
  CHECK_THROWS_AS(scheme_from_string("NOPE"), UsageError);
}

TEST_CASE("resolve_pair follows the hierarchy") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  CHECK(resolve_pair("E1", "I2", arrow) == "I2");
  CHECK(resolve_pair("E2", "E2", arrow) == "E2");
  CHECK(resolve_pair("I1", "C", arrow) == "I1");  // extended ordering
  CHECK(resolve_pair("C", "None", arrow) == "C");
  CHECK(resolve_pair("T", "E1", arrow) == "E1");
  CHECK_THROWS_AS(resolve_pair("E1", "XX", arrow), UsageError);
  CHECK_THROWS_AS(resolve_pair("L", "P", tag_set(SchemeId::PERSUADE)), UsageError);
}

TEST_CASE("resolve_pair is idempotent, commutative, associative") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  std::vector<std::string> all = arrow.tags;
  all.push_back("None");
  for (const auto& a : all) {
    CHECK(resolve_pair(a, a, arrow) == a);
    for (const auto& b : all) {
      CHECK(resolve_pair(a, b, arrow) == resolve_pair(b, a, arrow));
      for (const auto& c : all) {
        CHECK(resolve_pair(resolve_pair(a, b, arrow), c, arrow) ==
              resolve_pair(a, resolve_pair(b, c, arrow), arrow));
      }
    }
  }
}

// resolve is a projection: folding a multiset through resolve_pair gives the
// same result no matter the order, so neither rater's marginal is privileged.
TEST_CASE("resolve_pair fold is order independent") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  Rng rng(11);
  std::vector<std::string> all = arrow.tags;
  all.push_back("None");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> tags;
    int n = 2 + rng.below(5);
    for (int i = 0; i < n; ++i) tags.push_back(all[static_cast<size_t>(rng.below(8))]);
    std::string folded = tags[0];
    for (size_t i = 1; i < tags.size(); ++i) folded = resolve_pair(folded, tags[i], arrow);
    rng.shuffle(tags);
    std::string refolded = tags[0];
    for (size_t i = 1; i < tags.size(); ++i) refolded = resolve_pair(refolded, tags[i], arrow);
    CHECK(folded == refolded);
  }
}

TEST_CASE("resolve_votes picks the unique mode") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  CHECK(resolve_votes({"E2", "E2", "E1", "I2", "C"}, arrow) == "E2");
  CHECK(resolve_votes({"C"}, arrow) == "C");
  CHECK_THROWS_AS(resolve_votes({}, arrow), UsageError);
}

TEST_CASE("resolve_votes breaks ties by hierarchy") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  CHECK(resolve_votes({"E1", "E1", "E2", "E2", "T"}, arrow) == "E1");
  CHECK(resolve_votes({"T", "E2", "E2", "E1", "E1"}, arrow) == "E1");
  CHECK(resolve_votes({"I1", "C"}, arrow) == "I1");
  CHECK(resolve_votes({"None", "C"}, arrow) == "C");
  // schemes without a hierarchy break ties by declaration order
  const TagSet& comp = tag_set(SchemeId::AAE_COMPONENT);
  CHECK(resolve_votes({"Cl", "MC"}, comp) == "MC");
  CHECK(resolve_votes({"Pr", "Cl"}, comp) == "Cl");
}

TEST_CASE("resolve_votes is permutation invariant and unanimity preserving") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  std::vector<std::string> all = arrow.tags;
  all.push_back("None");
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> votes;
    int n = 1 + rng.below(7);
    for (int i = 0; i < n; ++i) votes.push_back(all[static_cast<size_t>(rng.below(8))]);
    std::string first = resolve_votes(votes, arrow);
    auto shuffled = votes;
    rng.shuffle(shuffled);
    CHECK(resolve_votes(shuffled, arrow) == first);
  }
  for (const std::string& tag : all) {
    CHECK(resolve_votes({tag, tag, tag, tag, tag}, arrow) == tag);
  }
}

TEST_CASE("validate_annotation flags structural problems") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  AnnotatedDocument doc;
  doc.text = "One. Two.";
  doc.paragraphs = split_paragraphs(doc.text);
  doc.sentences = split_document_sentences(doc);
  doc.words = split_words(doc.text);

  SUBCASE("two tags on one sentence") {
    doc.spans.push_back({"a", "I1", SpanUnit::sentence, {0, 1}, {}, {}});
    doc.spans.push_back({"b", "E2", SpanUnit::sentence, {0, 1}, {}, {}});
    auto v = validate_annotation(doc, arrow);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "overlap");
  }
  SUBCASE("unknown tag") {
    doc.spans.push_back({"a", "ZZ", SpanUnit::sentence, {0, 1}, {}, {}});
    auto v = validate_annotation(doc, arrow);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "unknown-tag");
  }
  SUBCASE("orphan I in BIO word tags") {
    doc.spans.push_back({"a", "I", SpanUnit::word_range, {0, 2}, {}, {}});
    auto v = validate_annotation(doc, tag_set(SchemeId::AAE_BIO));
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == "orphan-i");
  }
  SUBCASE("clean document") {
    doc.spans.push_back({"a", "I1", SpanUnit::sentence, {0, 1}, {}, {}});
    doc.spans.push_back({"b", "E2", SpanUnit::sentence, {1, 2}, {}, {}});
    CHECK(validate_annotation(doc, arrow).empty());
  }
}

TEST_CASE("scheme file round-trip") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  TagSet loaded = load_tag_set(save_tag_set(arrow));
  CHECK(loaded.name == arrow.name);
  CHECK(loaded.tags == arrow.tags);
  CHECK(loaded.hierarchy == arrow.hierarchy);
  CHECK(loaded.extended_hierarchy == arrow.extended_hierarchy);
  CHECK(*loaded.none_tag == "None");
  CHECK(loaded.unit == SpanUnit::sentence);
  CHECK_THROWS_AS(load_tag_set("{\"name\":\"x\",\"tags\":[\"A\"],\"hierarchy\":[\"B\"]}"),
                  ParseError);
}
