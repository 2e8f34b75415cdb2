#include <doctest.h>

#include "arganno/codecs.hpp"
#include "arganno/correspondence.hpp"
#include "arganno/errors.hpp"
#include "test_support.hpp"

using namespace arganno;
using namespace arganno::testsupport;

TEST_CASE("collapse_to_words copies sentence tags to every word") {
  AnnotatedDocument doc;
  doc.text = "one two three four five.";
  doc.paragraphs = split_paragraphs(doc.text);
  doc.sentences = split_document_sentences(doc);
  doc.words = split_words(doc.text);
  REQUIRE(doc.sentences.size() == 1);
  doc.spans.push_back({"s", "E1", SpanUnit::sentence, {0, 1}, {}, {}});
  auto tags = collapse_to_words(doc, tag_set(SchemeId::ARROW));
  CHECK(tags == std::vector<std::string>(5, "E1"));
}

TEST_CASE("collapse_to_words leaves untagged words as None") {
  AnnotatedDocument doc;
  doc.text = "alpha beta gamma";
  doc.paragraphs = split_paragraphs(doc.text);
  doc.sentences = split_document_sentences(doc);
  doc.words = split_words(doc.text);
  doc.spans.push_back({"w", "L", SpanUnit::word_range, {1, 2}, {}, {}});
  auto tags = collapse_to_words(doc, tag_set(SchemeId::PERSUADE));
  CHECK(tags == std::vector<std::string>{"None", "L", "None"});
}

TEST_CASE("collapse_to_words projects char spans by first character") {
  AnnotatedDocument doc;
  doc.text = "alpha beta gamma";
  doc.words = split_words(doc.text);
  doc.paragraphs = split_paragraphs(doc.text);
  // span covers "pha bet": first chars of no word except beta's 'b'? beta
  // begins at 6 and the span covers [2, 9) -> contains 6
  doc.spans.push_back({"c", "MC", SpanUnit::char_range, {2, 9}, {}, {}});
  auto tags = collapse_to_words(doc, tag_set(SchemeId::AAE_COMPONENT));
  CHECK(tags == std::vector<std::string>{"None", "MC", "None"});
}

TEST_CASE("overlapping spans resolve in reading order") {
  AnnotatedDocument doc;
  doc.text = "a b c d";
  doc.words = split_words(doc.text);
  doc.paragraphs = split_paragraphs(doc.text);
  doc.spans.push_back({"late", "P", SpanUnit::word_range, {1, 4}, {}, {}});
  doc.spans.push_back({"early", "L", SpanUnit::word_range, {0, 2}, {}, {}});
  auto tags = collapse_to_words(doc, tag_set(SchemeId::PERSUADE));
  // the span starting at word 0 wins word 1
  CHECK(tags == std::vector<std::string>{"L", "L", "P", "P"});
}

TEST_CASE("collapse word counts match across schemes and random fixtures") {
  Rng rng(61);
  for (int i = 0; i < 50; ++i) {
    AnnotatedDocument arrow = make_arrow_doc(rng, "x" + std::to_string(i));
    auto tags = collapse_to_words(arrow, tag_set(SchemeId::ARROW));
    CHECK(tags.size() == arrow.words.size());
    CHECK(tags.size() == split_words(arrow.text).size());
  }
}

TEST_CASE("collapse is idempotent on word-level tags") {
  Rng rng(67);
  AnnotatedDocument doc = make_persuade_doc(rng, "p");
  auto once = collapse_to_words(doc, tag_set(SchemeId::PERSUADE));
  AnnotatedDocument relabeled =
      doc_with_word_tags(doc, once, {Rater::Kind::resolved, -1});
  auto twice = collapse_to_words(relabeled, tag_set(SchemeId::PERSUADE));
  CHECK(once == twice);
}

TEST_CASE("cross_tabulate identity on matching schemes") {
  const TagSet& scheme = tag_set(SchemeId::ARROW);
  std::vector<std::string> tags = {"I1", "E2", "E2", "C", "None", "T"};
  CorrespondenceMatrix m = cross_tabulate(tags, tags, scheme, scheme);
  for (size_t r = 0; r < m.row_tags.size(); ++r) {
    if (m.row_support[r] == 0) continue;
    for (size_t c = 0; c < m.col_tags.size(); ++c)
      CHECK(m.cells[r][c] == (m.row_tags[r] == m.col_tags[c] ? 100.0 : 0.0));
  }
}

TEST_CASE("cross_tabulate hand-counted split") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  const TagSet& persuade = tag_set(SchemeId::PERSUADE);
  // human all E1; synthetic half E, half E2? E2 is not a PERSUADE tag: use C2
  std::vector<std::string> human(10, "E1");
  std::vector<std::string> synth;
  for (int i = 0; i < 10; ++i) synth.push_back(i < 5 ? "E" : "C2");
  CorrespondenceMatrix m = cross_tabulate(human, synth, arrow, persuade);
  size_t e1_row = 2;  // I1, I2, E1...
  REQUIRE(m.row_tags[e1_row] == "E1");
  for (size_t c = 0; c < m.col_tags.size(); ++c) {
    double expect = (m.col_tags[c] == "E" || m.col_tags[c] == "C2") ? 50.0 : 0.0;
    CHECK(m.cells[e1_row][c] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(m.row_marginals[e1_row] == 100.0);
}

TEST_CASE("populated rows sum to one hundred percent") {
  Rng rng(71);
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  const TagSet& persuade = tag_set(SchemeId::PERSUADE);
  std::vector<std::string> human, synth;
  for (int i = 0; i < 500; ++i) {
    human.push_back(rng.below(5) == 0 ? "None" : arrow.tags[size_t(rng.below(7))]);
    synth.push_back(rng.below(5) == 0 ? "None" : persuade.tags[size_t(rng.below(7))]);
  }
  CorrespondenceMatrix m = cross_tabulate(human, synth, arrow, persuade);
  for (size_t r = 0; r < m.row_tags.size(); ++r) {
    if (m.row_support[r] == 0) continue;
    double sum = 0.0;
    for (double cell : m.cells[r]) sum += cell;
    CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
  }
  // column marginals sum to 100 over all words
  double col_sum = 0.0;
  for (double c : m.col_marginals) col_sum += c;
  CHECK(col_sum == doctest::Approx(100.0).epsilon(1e-9));
  CHECK_THROWS_AS(cross_tabulate(human, {"L"}, arrow, persuade), UsageError);
}

TEST_CASE("render_correspondence places rows and marginals") {
  const TagSet& arrow = tag_set(SchemeId::ARROW);
  const TagSet& comp = tag_set(SchemeId::AAE_COMPONENT);
  std::vector<std::string> human = {"I1", "I1", "E2", "C"};
  std::vector<std::string> synth = {"MC", "Cl", "Pr", "MC"};
  CorrespondenceMatrix m = cross_tabulate(human, synth, arrow, comp);
  std::string table = render_correspondence({m});
  CHECK(table.find("AAE_COMPONENT") != std::string::npos);
  for (const std::string& tag : arrow.tags) CHECK(table.find(tag) != std::string::npos);
  // two blocks side by side share the row labels
  std::string two = render_correspondence({m, m});
  CHECK(two.find("MC") != std::string::npos);
  CHECK(std::count(two.begin(), two.end(), '\n') ==
        std::count(table.begin(), table.end(), '\n'));
}
