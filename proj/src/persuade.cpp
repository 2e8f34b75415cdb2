#include "arganno/persuade.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "arganno/errors.hpp"

namespace arganno {

std::vector<std::vector<std::string>> parse_csv(const std::string& content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  size_t i = 0;
  const size_t n = content.size();
  auto end_field = [&]() {
    row.push_back(field);
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(row);
    row.clear();
  };
  while (i < n) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      // swallow; \r\n handled by the \n branch
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
    }
    ++i;
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

namespace {

int find_column(const std::vector<std::string>& header,
                const std::vector<std::string>& aliases) {
  for (const std::string& alias : aliases) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == alias) return static_cast<int>(i);
    }
  }
  return -1;
}

const std::unordered_map<std::string, std::string>& persuade_tag_map() {
  static const std::unordered_map<std::string, std::string> map = {
      {"Lead", "L"},        {"Position", "P"},           {"Claim", "C1"},
      {"Counterclaim", "C2"}, {"Rebuttal", "R"},         {"Evidence", "E"},
      {"Concluding Statement", "C3"}};
  return map;
}

long parse_offset(const std::string& s, int row_no, const char* what) {
  try {
    double v = std::stod(s);
    return static_cast<long>(std::llround(v));
  } catch (...) {
    throw ParseError("row " + std::to_string(row_no) + ": bad " + what + " '" + s + "'");
  }
}

bool all_whitespace(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
}

}  // namespace

std::vector<AnnotatedDocument> parse_persuade_table(const std::string& csv_content) {
  auto rows = parse_csv(csv_content);
  if (rows.empty()) throw ParseError("persuade csv: missing header row");
  const auto& header = rows[0];

  int col_id = find_column(header, {"essay_id", "id"});
  int col_start = find_column(header, {"discourse_start"});
  int col_end = find_column(header, {"discourse_end"});
  int col_type = find_column(header, {"discourse_type"});
  int col_pred = find_column(header, {"predictionstring"});
  int col_text = find_column(header, {"full_text", "essay_text", "text"});
  for (auto [col, name] :
       {std::pair{col_id, "essay_id"}, {col_start, "discourse_start"},
        {col_end, "discourse_end"}, {col_type, "discourse_type"},
        {col_pred, "predictionstring"}, {col_text, "full_text"}}) {
    if (col < 0) throw ParseError(std::string("persuade csv: missing column ") + name);
  }

  std::vector<std::string> order;
  std::map<std::string, AnnotatedDocument> docs;
  int span_counter = 0;

  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const int row_no = static_cast<int>(r) + 1;
    if (row.size() < header.size())
      throw ParseError("row " + std::to_string(row_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(row.size()));
    const std::string& id = row[static_cast<size_t>(col_id)];
    auto it = docs.find(id);
    if (it == docs.end()) {
      AnnotatedDocument doc;
      doc.doc_id = id;
      doc.text = row[static_cast<size_t>(col_text)];
      if (!is_valid_utf8(doc.text))
        throw ParseError("row " + std::to_string(row_no) + ": essay text is not valid UTF-8");
      doc.source_scheme = "PERSUADE";
      doc.paragraphs = split_paragraphs(doc.text);
      doc.sentences = split_document_sentences(doc);
      doc.words = split_words(doc.text);
      it = docs.emplace(id, std::move(doc)).first;
      order.push_back(id);
    }
    AnnotatedDocument& doc = it->second;

    const std::string& type = row[static_cast<size_t>(col_type)];
    if (type == "Unannotated" || type.empty()) continue;
    auto tag_it = persuade_tag_map().find(type);
    if (tag_it == persuade_tag_map().end())
      throw ParseError("row " + std::to_string(row_no) + ": unknown discourse type '" +
                       type + "'");

    // Word indices from the prediction string are authoritative.
    std::istringstream pred(row[static_cast<size_t>(col_pred)]);
    long first = -1, last = -1, idx;
    long expected = -1;
    while (pred >> idx) {
      if (first < 0) first = idx;
      if (expected >= 0 && idx != expected)
        throw DataError("row " + std::to_string(row_no) +
                        ": prediction string indices are not contiguous");
      expected = idx + 1;
      last = idx;
    }
    if (first < 0)
      throw ParseError("row " + std::to_string(row_no) + ": empty prediction string");
    if (last >= static_cast<long>(doc.words.size()))
      throw DataError("row " + std::to_string(row_no) + ": word index " +
                      std::to_string(last) + " beyond word count " +
                      std::to_string(doc.words.size()));

    // Char offsets must agree with the word range up to surrounding whitespace.
    long cs = parse_offset(row[static_cast<size_t>(col_start)], row_no, "discourse_start");
    long ce = parse_offset(row[static_cast<size_t>(col_end)], row_no, "discourse_end");
    const TextRange& wfirst = doc.words[static_cast<size_t>(first)];
    const TextRange& wlast = doc.words[static_cast<size_t>(last)];
    cs = std::clamp(cs, 0L, static_cast<long>(doc.text.size()));
    ce = std::clamp(ce, 0L, static_cast<long>(doc.text.size()));
    bool ok = true;
    if (cs <= wfirst.begin) {
      ok = ok && all_whitespace(std::string_view(doc.text).substr(
                     static_cast<size_t>(cs), static_cast<size_t>(wfirst.begin - cs)));
    } else {
      ok = ok && cs < wfirst.end;  // start may fall inside the first word
    }
    if (ce >= wlast.end) {
      ok = ok && all_whitespace(std::string_view(doc.text).substr(
                     static_cast<size_t>(wlast.end), static_cast<size_t>(ce - wlast.end)));
    } else {
      ok = ok && ce > wlast.begin;
    }
    if (!ok)
      throw DataError("row " + std::to_string(row_no) + ": char range [" +
                      std::to_string(cs) + "," + std::to_string(ce) +
                      ") disagrees with word indices " + std::to_string(first) + ".." +
                      std::to_string(last));

    AnnotationSpan span;
    span.span_id = id + "#" + std::to_string(span_counter++);
    span.tag = tag_it->second;
    span.unit = SpanUnit::word_range;
    span.range = {static_cast<int>(first), static_cast<int>(last + 1)};
    span.rater = {Rater::Kind::human1, -1};
    doc.spans.push_back(span);
  }

  std::vector<AnnotatedDocument> out;
  out.reserve(order.size());
  for (const std::string& id : order) out.push_back(std::move(docs.at(id)));
  return out;
}

}  // namespace arganno
