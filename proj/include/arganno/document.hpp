#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace arganno {

// Half-open [begin, end) range. Char-unit ranges are byte offsets into the
// document's UTF-8 text; word/sentence-unit ranges index into words/sentences.
struct TextRange {
  int begin = 0;
  int end = 0;

  bool operator==(const TextRange&) const = default;
  int length() const { return end - begin; }
  bool contains(int pos) const { return pos >= begin && pos < end; }
};

enum class SpanUnit { sentence, word_range, char_range };

struct Rater {
  enum class Kind { human1, human2, resolved, model };
  Kind kind = Kind::human1;
  int model_index = -1;  // only meaningful for Kind::model

  bool operator==(const Rater&) const = default;
};

std::string rater_to_string(const Rater& r);
Rater rater_from_string(const std::string& s);

struct AnnotationSpan {
  std::string span_id;
  std::string tag;
  SpanUnit unit = SpanUnit::char_range;
  TextRange range;
  Rater rater;
  std::vector<std::string> votes;  // raw ensemble votes when rater == resolved

  bool operator==(const AnnotationSpan&) const = default;
};

enum class StanceLabel { none, support, attack };

struct ArgRelation {
  std::string source;  // span_id
  std::string target;  // span_id; empty for claim-vs-major-claim stances
  bool linked = false;
  StanceLabel stance = StanceLabel::none;

  bool operator==(const ArgRelation&) const = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::string text;
  std::string source_scheme;
  std::vector<TextRange> paragraphs;
  std::vector<TextRange> sentences;
  std::vector<TextRange> words;
  std::vector<AnnotationSpan> spans;
  std::vector<ArgRelation> relations;
  std::vector<std::string> warnings;

  bool operator==(const AnnotatedDocument&) const = default;

  std::string_view slice(const TextRange& r) const {
    return std::string_view(text).substr(static_cast<size_t>(r.begin),
                                         static_cast<size_t>(r.length()));
  }
};

// Words are maximal runs of non-whitespace bytes.
std::vector<TextRange> split_words(std::string_view text);

// Paragraphs are runs of text between newline sequences, trimmed of
// surrounding whitespace. Empty paragraphs are dropped.
std::vector<TextRange> split_paragraphs(std::string_view text);

// Sentence segmentation inside one paragraph: a sentence ends at terminal
// punctuation (. ! ?) with trailing closing quotes/brackets absorbed, or at
// the paragraph end. A fixed abbreviation list suppresses false splits.
std::vector<TextRange> split_sentences(std::string_view paragraph);

// Derives sentence ranges for every paragraph of `doc` (offsets are document
// byte offsets, not paragraph-relative).
std::vector<TextRange> split_document_sentences(const AnnotatedDocument& doc);

// Structural invariant check; returns human-readable violation messages.
std::vector<std::string> check_document(const AnnotatedDocument& doc);

// Word-index range [first, last+1) covered by a char-range span under
// majority character overlap. A span boundary falling inside a word assigns
// the word by majority and logs a violation into `warnings` when provided.
TextRange project_char_span_to_words(const AnnotatedDocument& doc, const TextRange& span,
                                     std::vector<std::string>* warnings = nullptr);

// UTF-8 helpers. Codepoint offsets are what brat standoff files count.
int codepoint_to_byte_offset(std::string_view text, int codepoint_offset);
int byte_to_codepoint_offset(std::string_view text, int byte_offset);
bool is_valid_utf8(std::string_view text);

}  // namespace arganno
