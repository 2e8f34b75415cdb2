#include <doctest.h>

#include <set>

#include "arganno/codecs.hpp"
#include "arganno/errors.hpp"
#include "arganno/tape.hpp"
#include "test_support.hpp"

using namespace arganno;
using namespace arganno::testsupport;

namespace {

AnnotatedDocument doc_from_text(const std::string& text) {
  AnnotatedDocument doc;
  doc.text = text;
  doc.paragraphs = split_paragraphs(text);
  doc.sentences = split_document_sentences(doc);
  doc.words = split_words(text);
  return doc;
}

void check_example_invariants(const EncodedExample& ex) {
  REQUIRE(ex.input_ids.size() == ex.target_ids.size());
  std::set<int> labeled(ex.labeled_positions.begin(), ex.labeled_positions.end());
  for (size_t i = 0; i < ex.target_ids.size(); ++i) {
    if (labeled.count(static_cast<int>(i)))
      CHECK(ex.target_ids[i] != kIgnoreTarget);
    else
      CHECK(ex.target_ids[i] == kIgnoreTarget);
  }
}

}  // namespace

TEST_CASE("encode_arrow lays out masks, separators, and the tail") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("first claim. second claim.\n\nthird claim.");
  REQUIRE(doc.sentences.size() == 3);
  doc.source_scheme = "ARROW";
  doc.spans.push_back({"a", "I1", SpanUnit::sentence, {0, 1}, {}, {}});
  doc.spans.push_back({"b", "I2", SpanUnit::sentence, {1, 2}, {}, {}});
  doc.spans.push_back({"c", "C", SpanUnit::sentence, {2, 3}, {}, {}});

  EncodedExample ex = encode_arrow(doc, vocab);
  check_example_invariants(ex);
  REQUIRE(ex.labeled_positions.size() == 3);
  // masks carry the sentence tags in order
  const TagSet& scheme = tag_set(SchemeId::ARROW);
  CHECK(ex.input_ids[static_cast<size_t>(ex.labeled_positions[0])] == Vocab::mask_id);
  CHECK(ex.target_ids[static_cast<size_t>(ex.labeled_positions[0])] == scheme.label_index("I1"));
  CHECK(ex.target_ids[static_cast<size_t>(ex.labeled_positions[1])] == scheme.label_index("I2"));
  CHECK(ex.target_ids[static_cast<size_t>(ex.labeled_positions[2])] == scheme.label_index("C"));
  // exactly one separator between the paragraphs plus the sep+cls tail
  long seps = 0;
  for (int id : ex.input_ids) seps += id == Vocab::sep_id ? 1 : 0;
  CHECK(seps == 2);
  size_t n = ex.input_ids.size();
  CHECK(ex.input_ids[n - 2] == Vocab::sep_id);
  CHECK(ex.input_ids[n - 1] == Vocab::cls_id);
}

TEST_CASE("encode_arrow on an empty document") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc;
  doc.source_scheme = "ARROW";
  EncodedExample ex = encode_arrow(doc, vocab);
  CHECK(ex.input_ids == std::vector<int>{Vocab::sep_id, Vocab::cls_id});
  CHECK(ex.labeled_positions.empty());
}

TEST_CASE("encode_arrow untagged sentences become the explicit None label") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("first claim. second claim.");
  doc.source_scheme = "ARROW";
  doc.spans.push_back({"a", "E2", SpanUnit::sentence, {0, 1}, {}, {}});
  EncodedExample ex = encode_arrow(doc, vocab);
  const TagSet& scheme = tag_set(SchemeId::ARROW);
  REQUIRE(ex.labeled_positions.size() == 2);
  CHECK(ex.target_ids[static_cast<size_t>(ex.labeled_positions[1])] ==
        scheme.label_index("None"));
}

TEST_CASE("encode_arrow labeled positions equal sentence counts on random fixtures") {
  Vocab vocab = make_test_vocab();
  Rng rng(41);
  for (int i = 0; i < 50; ++i) {
    AnnotatedDocument doc = make_arrow_doc(rng, "d" + std::to_string(i));
    EncodedExample ex = encode_arrow(doc, vocab);
    check_example_invariants(ex);
    // independent recount through the sentence splitter
    size_t sentences = 0;
    for (const TextRange& p : doc.paragraphs)
      sentences += split_sentences(doc.slice(p)).size();
    CHECK(ex.labeled_positions.size() == sentences);
  }
}

TEST_CASE("encode_persuade labels the first subword of every word") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("students should learning");
  doc.source_scheme = "PERSUADE";
  doc.spans.push_back({"a", "L", SpanUnit::word_range, {0, 2}, {}, {}});
  EncodedExample ex = encode_persuade(doc, vocab);
  check_example_invariants(ex);
  const TagSet& scheme = tag_set(SchemeId::PERSUADE);
  REQUIRE(ex.labeled_positions.size() == 3);  // every word labeled
  CHECK(ex.target_ids[static_cast<size_t>(ex.labeled_positions[0])] == scheme.label_index("L"));
  CHECK(ex.target_ids[static_cast<size_t>(ex.labeled_positions[1])] == scheme.label_index("L"));
  CHECK(ex.target_ids[static_cast<size_t>(ex.labeled_positions[2])] ==
        scheme.label_index("None"));
}

TEST_CASE("multi-subword words contribute one labeled and several ignored positions") {
  // character-level vocab so every word splits into many subwords
  Vocab vocab = train_vocab({"a b c d e f g h i j k l m n o p q r s t u v w x y z"}, 40);
  AnnotatedDocument doc = doc_from_text("abcd");
  doc.source_scheme = "PERSUADE";
  doc.spans.push_back({"a", "E", SpanUnit::word_range, {0, 1}, {}, {}});
  EncodedExample ex = encode_persuade(doc, vocab);
  // layout: [subwords of "abcd"] + sep + cls; at least 4 subword tokens
  REQUIRE(ex.labeled_positions.size() == 1);
  long ignored_subwords = 0;
  for (size_t i = 0; i + 2 < ex.input_ids.size(); ++i)
    if (ex.target_ids[i] == kIgnoreTarget) ++ignored_subwords;
  CHECK(ignored_subwords >= 3);
}

TEST_CASE("encode_persuade labeled positions equal word counts on random fixtures") {
  Vocab vocab = make_test_vocab();
  Rng rng(43);
  for (int i = 0; i < 30; ++i) {
    AnnotatedDocument doc = make_persuade_doc(rng, "p" + std::to_string(i));
    EncodedExample ex = encode_persuade(doc, vocab);
    check_example_invariants(ex);
    CHECK(ex.labeled_positions.size() == split_words(doc.text).size());
  }
}

TEST_CASE("encode_aae_bio projects char spans to B/I/O") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("students should ban phones every day");
  doc.source_scheme = "AAE_COMPONENT";
  // 3-word component "students should ban"
  doc.spans.push_back({"T1", "Cl", SpanUnit::char_range,
                       {doc.words[0].begin, doc.words[2].end}, {}, {}});
  EncodedExample ex = encode_aae_bio(doc, vocab);
  check_example_invariants(ex);
  const TagSet& scheme = tag_set(SchemeId::AAE_BIO);
  REQUIRE(ex.labeled_positions.size() == 6);
  std::vector<std::string> got;
  for (int p : ex.labeled_positions)
    got.push_back(scheme.label_name(ex.target_ids[static_cast<size_t>(p)]));
  CHECK(got == std::vector<std::string>{"B", "I", "I", "O", "O", "O"});
}

TEST_CASE("adjacent components keep the I,B transition through decode_bio") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("one two three four");
  doc.source_scheme = "AAE_COMPONENT";
  doc.spans.push_back({"T1", "Cl", SpanUnit::char_range,
                       {doc.words[0].begin, doc.words[1].end}, {}, {}});
  doc.spans.push_back({"T2", "Pr", SpanUnit::char_range,
                       {doc.words[2].begin, doc.words[3].end}, {}, {}});
  EncodedExample ex = encode_aae_bio(doc, vocab);
  const TagSet& scheme = tag_set(SchemeId::AAE_BIO);
  std::vector<std::string> labels;
  for (int p : ex.labeled_positions)
    labels.push_back(scheme.label_name(ex.target_ids[static_cast<size_t>(p)]));
  CHECK(labels == std::vector<std::string>{"B", "I", "B", "I"});
  auto spans = decode_bio(labels);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == TextRange{0, 2});
  CHECK(spans[1] == TextRange{2, 4});
}

TEST_CASE("decode_bio handles orphans and empty input") {
  CHECK(decode_bio({"B", "I", "I", "O", "B", "I"}) ==
        std::vector<TextRange>{{0, 3}, {4, 6}});
  std::vector<std::string> warnings;
  CHECK(decode_bio({"I", "I", "O"}, &warnings) == std::vector<TextRange>{{0, 2}});
  CHECK(warnings.size() == 1);
  CHECK(decode_bio({"O", "O"}).empty());
  CHECK(decode_bio({}).empty());
}

TEST_CASE("decode_bio round-trips disjoint non-empty span sets") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    int words = 3 + rng.below(20);
    std::vector<TextRange> spans;
    int w = 0;
    while (w < words) {
      int len = 1 + rng.below(4);
      len = std::min(len, words - w);
      if (rng.below(2) == 0) spans.push_back({w, w + len});
      w += len + rng.below(2);
    }
    std::vector<std::string> labels(static_cast<size_t>(words), "O");
    for (const TextRange& s : spans) {
      for (int i = s.begin; i < s.end && i < words; ++i)
        labels[static_cast<size_t>(i)] = i == s.begin ? "B" : "I";
    }
    // clamp spans that ran past the word count the same way the labels did
    for (TextRange& s : spans) s.end = std::min(s.end, words);
    CHECK(decode_bio(labels) == spans);
  }
}

TEST_CASE("encode_aae_component carries block-majority machinery") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("students should ban phones today");
  doc.source_scheme = "AAE_COMPONENT";
  std::vector<ComponentSpan> comps = {{{0, 4}, "Pr"}};
  EncodedExample ex = encode_aae_component(doc, comps, vocab);
  REQUIRE(ex.labeled_positions.size() == 4);
  REQUIRE(ex.block_ids.size() == 4);
  const TagSet& scheme = tag_set(SchemeId::AAE_COMPONENT);
  for (int p : ex.labeled_positions)
    CHECK(scheme.label_name(ex.target_ids[static_cast<size_t>(p)]) == "Pr");

  SUBCASE("majority decode picks the block mode") {
    std::vector<int> pred = {scheme.label_index("Pr"), scheme.label_index("Pr"),
                             scheme.label_index("Cl"), scheme.label_index("Pr")};
    CHECK(decode_component_blocks(ex, pred) == std::vector<std::string>{"Pr"});
  }
  SUBCASE("ties break MC over Cl over Pr") {
    AnnotatedDocument two = doc_from_text("one two");
    EncodedExample ex2 = encode_aae_component(two, {{{0, 2}, "Cl"}}, vocab);
    std::vector<int> pred = {scheme.label_index("MC"), scheme.label_index("Cl")};
    CHECK(decode_component_blocks(ex2, pred) == std::vector<std::string>{"MC"});
  }
}

TEST_CASE("encode_aae_relation wraps source and target with markers") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("first claim here because second reason there");
  doc.source_scheme = "AAE_COMPONENT";
  ComponentSpan source{{0, 2}, ""};
  ComponentSpan target{{4, 6}, ""};
  EncodedExample ex = encode_aae_relation(doc, 0, source, target, vocab, 0);
  REQUIRE(ex.labeled_positions.size() == 1);
  // layout: ... <sep><Source>: ... <sep> ... <sep><Target>: ... <sep> ... <cls><sep>
  std::vector<int>& in = ex.input_ids;
  size_t n = in.size();
  CHECK(in[n - 2] == Vocab::cls_id);
  CHECK(in[n - 1] == Vocab::sep_id);
  CHECK(ex.labeled_positions[0] == static_cast<int>(n) - 2);
  auto find = [&](int id) {
    for (size_t i = 0; i < in.size(); ++i)
      if (in[i] == id) return static_cast<long>(i);
    return -1L;
  };
  long src = find(Vocab::source_id);
  long tgt = find(Vocab::target_id);
  REQUIRE(src >= 1);
  REQUIRE(tgt > src);
  CHECK(in[static_cast<size_t>(src) - 1] == Vocab::sep_id);
  CHECK(in[static_cast<size_t>(tgt) - 1] == Vocab::sep_id);
  CHECK(in[static_cast<size_t>(src) + 1] == vocab.piece_id(":"));
  CHECK(in[static_cast<size_t>(tgt) + 1] == vocab.piece_id(":"));

  CHECK_THROWS_AS(encode_aae_relation(doc, 0, ComponentSpan{{0, 3}, ""},
                                      ComponentSpan{{2, 5}, ""}, vocab, 0),
                  UsageError);
}

TEST_CASE("relation candidates follow the ordered-pair count") {
  Rng rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    AnnotatedDocument doc = make_aae_doc(rng, "r" + std::to_string(trial));
    auto candidates = enumerate_relation_candidates(doc);
    // oracle: sum over paragraphs of n_p(n_p - 1)
    long expected = 0;
    for (const TextRange& p : doc.paragraphs) {
      long n = 0;
      for (const AnnotationSpan& s : doc.spans)
        if (s.unit == SpanUnit::char_range && p.contains(s.range.begin)) ++n;
      expected += n * (n - 1);
    }
    CHECK(static_cast<long>(candidates.size()) == expected);
  }
}

TEST_CASE("single-component paragraphs produce no candidates") {
  AnnotatedDocument doc = doc_from_text("only one component here");
  doc.spans.push_back({"T1", "Cl", SpanUnit::char_range,
                       {doc.words[0].begin, doc.words[1].end}, {}, {}});
  CHECK(enumerate_relation_candidates(doc).empty());
}

TEST_CASE("three components make six ordered pairs") {
  AnnotatedDocument doc = doc_from_text("one two three four five six");
  for (int c = 0; c < 3; ++c)
    doc.spans.push_back({"T" + std::to_string(c), "Pr", SpanUnit::char_range,
                         {doc.words[static_cast<size_t>(2 * c)].begin,
                          doc.words[static_cast<size_t>(2 * c + 1)].end},
                         {}, {}});
  CHECK(enumerate_relation_candidates(doc).size() == 6);
}

TEST_CASE("stance claim input spans the claim and major-claim paragraphs") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("the major claim sits here.\n\nthe second claim follows now.");
  doc.source_scheme = "AAE_COMPONENT";
  // MC in paragraph 1, claim in paragraph 2
  doc.spans.push_back({"T1", "MC", SpanUnit::char_range,
                       {doc.words[1].begin, doc.words[2].end}, {}, {}});
  doc.spans.push_back({"T2", "Cl", SpanUnit::char_range,
                       {doc.words[6].begin, doc.words[7].end}, {}, {}});

  auto ex = encode_aae_stance_claim(doc, doc.spans[1], vocab, 0);
  REQUIRE(ex.has_value());
  long sources = 0, targets = 0;
  for (int id : ex->input_ids) {
    sources += id == Vocab::source_id ? 1 : 0;
    targets += id == Vocab::target_id ? 1 : 0;
  }
  CHECK(sources == 1);
  CHECK(targets == 1);
  // both paragraphs' words appear in the input
  std::string decoded = decode(ex->input_ids, vocab);
  CHECK(decoded.find("major") != std::string::npos);
  CHECK(decoded.find("second") != std::string::npos);

  SUBCASE("claim without a major claim is skipped with a warning") {
    AnnotatedDocument no_mc = doc;
    no_mc.spans.erase(no_mc.spans.begin());
    std::vector<std::string> warnings;
    auto skipped = encode_aae_stance_claim(no_mc, no_mc.spans[0], vocab, 0, &warnings);
    CHECK(!skipped.has_value());
    CHECK(warnings.size() == 1);
  }
}

TEST_CASE("build_task_dataset covers all six tasks on AAE fixtures") {
  Vocab vocab = make_test_vocab();
  Rng rng(59);
  std::vector<AnnotatedDocument> corpus;
  for (int i = 0; i < 5; ++i) corpus.push_back(make_aae_doc(rng, "c" + std::to_string(i)));

  auto bio = build_task_dataset(corpus, Task::aae_bio, vocab);
  CHECK(bio.size() == corpus.size());
  auto comp = build_task_dataset(corpus, Task::aae_component, vocab);
  CHECK(comp.size() == corpus.size());
  auto rel = build_task_dataset(corpus, Task::aae_relation, vocab);
  long expected = 0;
  for (const auto& doc : corpus)
    expected += static_cast<long>(enumerate_relation_candidates(doc).size());
  CHECK(static_cast<long>(rel.size()) == expected);
  for (const auto& ex : rel) check_example_invariants(ex);
  auto stance = build_task_dataset(corpus, Task::aae_stance, vocab);
  long stance_items = 0;
  for (const auto& doc : corpus)
    for (const ArgRelation& r : doc.relations)
      if (r.stance != StanceLabel::none) ++stance_items;
  CHECK(static_cast<long>(stance.size()) <= stance_items);
  CHECK(!stance.empty());
}

TEST_CASE("sequence task stance totals reflect relation stances") {
  // AAE-style stance label distribution: every linked relation plus claim
  // stances contribute one binary example each.
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("major claim one here. premise two there.");
  doc.source_scheme = "AAE_COMPONENT";
  doc.spans.push_back({"T1", "MC", SpanUnit::char_range,
                       {doc.words[0].begin, doc.words[3].end}, {}, {}});
  doc.spans.push_back({"T2", "Pr", SpanUnit::char_range,
                       {doc.words[4].begin, doc.words[6].end}, {}, {}});
  doc.relations.push_back({"T2", "T1", true, StanceLabel::attack});
  auto stance = build_task_dataset({doc}, Task::aae_stance, vocab);
  REQUIRE(stance.size() == 1);
  REQUIRE(stance[0].labeled_positions.size() == 1);
  const TagSet& scheme = tag_set(SchemeId::AAE_STANCE);
  int label = stance[0].target_ids[static_cast<size_t>(stance[0].labeled_positions[0])];
  CHECK(label == scheme.label_index("attack"));
}

TEST_CASE("doc_with_word_tags builds contiguous runs and skips None") {
  AnnotatedDocument doc = doc_from_text("a b c d e");
  auto tagged = doc_with_word_tags(doc, {"L", "L", "None", "E", "E"},
                                   {Rater::Kind::model, 2});
  REQUIRE(tagged.spans.size() == 2);
  CHECK(tagged.spans[0].range == TextRange{0, 2});
  CHECK(tagged.spans[1].range == TextRange{3, 5});
  CHECK(rater_to_string(tagged.spans[0].rater) == "model(2)");
  CHECK_THROWS_AS(doc_with_word_tags(doc, {"L"}, {}), UsageError);
}

TEST_CASE("render_example aligns three rows") {
  Vocab vocab = make_test_vocab();
  AnnotatedDocument doc = doc_from_text("tiny claim.");
  doc.source_scheme = "ARROW";
  doc.spans.push_back({"s", "I2", SpanUnit::sentence, {0, 1}, {}, {}});
  std::string rendered = render_example(encode_arrow(doc, vocab), vocab);
  auto first_nl = rendered.find('\n');
  auto second_nl = rendered.find('\n', first_nl + 1);
  auto third_nl = rendered.find('\n', second_nl + 1);
  REQUIRE(first_nl != std::string::npos);
  REQUIRE(third_nl != std::string::npos);
  CHECK(first_nl == second_nl - first_nl - 1);  // equal row widths
  CHECK(rendered.find("<mask>") != std::string::npos);
  CHECK(rendered.find("I2") != std::string::npos);
  CHECK(rendered.find("<->") != std::string::npos);
}
