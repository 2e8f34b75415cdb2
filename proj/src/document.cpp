#include "arganno/document.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "arganno/errors.hpp"

namespace arganno {

namespace {

inline bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quotes/brackets absorbed into a sentence after terminal punctuation.
// Multi-byte entries are UTF-8 for the curly quotes and guillemet.
const std::array<std::string_view, 8> kClosers = {
    "\"", "'", ")", "]", "}", "\xe2\x80\x9d", "\xe2\x80\x99", "\xc2\xbb"};

// Tokens whose trailing period does not end a sentence.
const std::unordered_set<std::string>& abbrev_list() {
  static const std::unordered_set<std::string> set = {
      "mr",  "mrs", "ms",  "dr",   "prof", "sr",   "jr",  "st",
      "vs",  "cf",  "fig", "al",   "e.g",  "i.e",  "u.s", "u.k",
      "dept", "est", "approx", "inc", "ltd", "co", "ca", "misc"};
  return set;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// True if the period at `dot` belongs to a number or a listed abbreviation.
bool period_is_internal(std::string_view text, size_t dot) {
  if (dot > 0 && dot + 1 < text.size() &&
      std::isdigit(static_cast<unsigned char>(text[dot - 1])) &&
      std::isdigit(static_cast<unsigned char>(text[dot + 1]))) {
    return true;  // decimal like 3.14
  }
  // Scan the token preceding the period (letters and internal periods).
  size_t w = dot;
  while (w > 0) {
    char c = text[w - 1];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '.') {
      --w;
    } else {
      break;
    }
  }
  if (w == dot) return false;
  std::string token = lower(text.substr(w, dot - w));
  while (!token.empty() && token.front() == '.') token.erase(token.begin());
  if (token.empty()) return false;
  return abbrev_list().count(token) > 0;
}

// Absorbs a run of terminal punctuation plus closing quotes/brackets starting
// at `pos` (which must point at terminal punctuation). Returns one past the
// last absorbed byte.
size_t absorb_sentence_end(std::string_view text, size_t pos) {
  size_t k = pos;
  while (k < text.size() && is_terminal(text[k])) ++k;
  bool matched = true;
  while (matched && k < text.size()) {
    matched = false;
    for (std::string_view closer : kClosers) {
      if (text.substr(k).starts_with(closer)) {
        k += closer.size();
        matched = true;
        break;
      }
    }
  }
  return k;
}

}  // namespace

std::string rater_to_string(const Rater& r) {
  switch (r.kind) {
    case Rater::Kind::human1: return "human-1";
    case Rater::Kind::human2: return "human-2";
    case Rater::Kind::resolved: return "resolved";
    case Rater::Kind::model: return "model(" + std::to_string(r.model_index) + ")";
  }
  return "human-1";
}

Rater rater_from_string(const std::string& s) {
  if (s == "human-1") return {Rater::Kind::human1, -1};
  if (s == "human-2") return {Rater::Kind::human2, -1};
  if (s == "resolved") return {Rater::Kind::resolved, -1};
  if (s.starts_with("model(") && s.ends_with(")")) {
    int idx = std::stoi(s.substr(6, s.size() - 7));
    return {Rater::Kind::model, idx};
  }
  throw ParseError("unknown rater: " + s);
}

std::vector<TextRange> split_words(std::string_view text) {
  std::vector<TextRange> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_byte(text[i])) ++i;
    if (i >= text.size()) break;
    size_t start = i;
    while (i < text.size() && !is_space_byte(text[i])) ++i;
    out.push_back({static_cast<int>(start), static_cast<int>(i)});
  }
  return out;
}

std::vector<TextRange> split_paragraphs(std::string_view text) {
  std::vector<TextRange> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_byte(text[i])) ++i;
    if (i >= text.size()) break;
    size_t start = i;
    while (i < text.size() && text[i] != '\n') ++i;
    size_t end = i;
    while (end > start && is_space_byte(text[end - 1])) --end;
    if (end > start) out.push_back({static_cast<int>(start), static_cast<int>(end)});
  }
  return out;
}

std::vector<TextRange> split_sentences(std::string_view paragraph) {
  std::vector<TextRange> out;
  size_t i = 0;
  const size_t n = paragraph.size();
  while (i < n) {
    while (i < n && is_space_byte(paragraph[i])) ++i;
    if (i >= n) break;
    size_t start = i;
    size_t end = n;
    for (size_t j = i; j < n; ++j) {
      if (!is_terminal(paragraph[j])) continue;
      if (paragraph[j] == '.' && period_is_internal(paragraph, j)) continue;
      size_t k = absorb_sentence_end(paragraph, j);
      if (k < n && !is_space_byte(paragraph[k])) continue;  // mid-token period
      end = k;
      break;
    }
    size_t trimmed = end;
    while (trimmed > start && is_space_byte(paragraph[trimmed - 1])) --trimmed;
    if (trimmed > start)
      out.push_back({static_cast<int>(start), static_cast<int>(trimmed)});
    i = end;
  }
  return out;
}

std::vector<TextRange> split_document_sentences(const AnnotatedDocument& doc) {
  std::vector<TextRange> out;
  for (const TextRange& p : doc.paragraphs) {
    auto local = split_sentences(doc.slice(p));
    for (const TextRange& s : local)
      out.push_back({p.begin + s.begin, p.begin + s.end});
  }
  return out;
}

std::vector<std::string> check_document(const AnnotatedDocument& doc) {
  std::vector<std::string> v;
  const int n = static_cast<int>(doc.text.size());

  auto check_ordered_disjoint = [&](const std::vector<TextRange>& rs, const char* what) {
    int prev_end = 0;
    for (const TextRange& r : rs) {
      if (r.begin < prev_end)
        v.push_back(std::string(what) + " ranges overlap or are unordered");
      if (r.begin >= r.end) v.push_back(std::string(what) + " range is empty");
      if (r.begin < 0 || r.end > n)
        v.push_back(std::string(what) + " range outside text");
      prev_end = r.end;
    }
  };
  check_ordered_disjoint(doc.paragraphs, "paragraph");
  check_ordered_disjoint(doc.words, "word");

  // Paragraphs cover all non-whitespace text.
  {
    size_t pi = 0;
    for (int i = 0; i < n; ++i) {
      if (is_space_byte(doc.text[static_cast<size_t>(i)])) continue;
      while (pi < doc.paragraphs.size() && doc.paragraphs[pi].end <= i) ++pi;
      if (pi >= doc.paragraphs.size() || !doc.paragraphs[pi].contains(i)) {
        v.push_back("non-whitespace byte " + std::to_string(i) + " outside all paragraphs");
        break;
      }
    }
  }

  for (const TextRange& s : doc.sentences) {
    int count = 0;
    for (const TextRange& p : doc.paragraphs)
      if (s.begin >= p.begin && s.end <= p.end) ++count;
    if (count != 1)
      v.push_back("sentence [" + std::to_string(s.begin) + "," + std::to_string(s.end) +
                  ") lies in " + std::to_string(count) + " paragraphs");
  }

  for (const TextRange& w : doc.words) {
    for (int i = w.begin; i < w.end && i < n; ++i) {
      if (is_space_byte(doc.text[static_cast<size_t>(i)])) {
        v.push_back("word range contains whitespace at byte " + std::to_string(i));
        break;
      }
    }
  }

  for (const AnnotationSpan& s : doc.spans) {
    if (s.range.begin >= s.range.end) {
      v.push_back("span " + s.span_id + " has start >= end");
      continue;
    }
    int limit = 0;
    switch (s.unit) {
      case SpanUnit::char_range: limit = n; break;
      case SpanUnit::word_range: limit = static_cast<int>(doc.words.size()); break;
      case SpanUnit::sentence: limit = static_cast<int>(doc.sentences.size()); break;
    }
    if (s.range.begin < 0 || s.range.end > limit)
      v.push_back("span " + s.span_id + " range outside document");
  }

  for (const ArgRelation& r : doc.relations) {
    if (r.source == r.target)
      v.push_back("relation has identical source and target: " + r.source);
  }
  return v;
}

TextRange project_char_span_to_words(const AnnotatedDocument& doc, const TextRange& span,
                                     std::vector<std::string>* warnings) {
  int first = -1, last = -1;
  for (size_t w = 0; w < doc.words.size(); ++w) {
    const TextRange& word = doc.words[w];
    if (word.end <= span.begin) continue;
    if (word.begin >= span.end) break;
    int overlap = std::min(word.end, span.end) - std::max(word.begin, span.begin);
    bool majority = 2 * overlap > word.length();
    bool partial = overlap != word.length();
    if (partial && warnings) {
      warnings->push_back("span boundary inside word " + std::to_string(w) +
                          (majority ? " (assigned by majority overlap)"
                                    : " (excluded by majority overlap)"));
    }
    if (!majority) continue;
    if (first < 0) first = static_cast<int>(w);
    last = static_cast<int>(w);
  }
  if (first < 0) return {0, 0};
  return {first, last + 1};
}

int codepoint_to_byte_offset(std::string_view text, int codepoint_offset) {
  int cp = 0;
  size_t i = 0;
  while (i < text.size() && cp < codepoint_offset) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    i += c < 0x80 ? 1 : (c < 0xE0 ? 2 : (c < 0xF0 ? 3 : 4));
    ++cp;
  }
  if (cp != codepoint_offset)
    throw UsageError("codepoint offset " + std::to_string(codepoint_offset) +
                     " beyond end of text");
  return static_cast<int>(i);
}

int byte_to_codepoint_offset(std::string_view text, int byte_offset) {
  int cp = 0;
  size_t i = 0;
  while (i < static_cast<size_t>(byte_offset) && i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    i += c < 0x80 ? 1 : (c < 0xE0 ? 2 : (c < 0xF0 ? 3 : 4));
    ++cp;
  }
  return cp;
}

bool is_valid_utf8(std::string_view text) {
  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    int extra;
    if (c < 0x80) extra = 0;
    else if ((c & 0xE0) == 0xC0) extra = 1;
    else if ((c & 0xF0) == 0xE0) extra = 2;
    else if ((c & 0xF8) == 0xF0) extra = 3;
    else return false;
    if (i + static_cast<size_t>(extra) >= text.size() + (extra == 0 ? 1 : 0) &&
        extra > 0 && i + static_cast<size_t>(extra) >= text.size())
      return false;
    for (int k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(text[i + static_cast<size_t>(k)]) & 0xC0) != 0x80)
        return false;
    }
    i += static_cast<size_t>(extra) + 1;
  }
  return true;
}

}  // namespace arganno
