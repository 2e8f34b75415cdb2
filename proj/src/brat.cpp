#include "arganno/brat.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "arganno/errors.hpp"

namespace arganno {

namespace {

std::vector<std::string> split_on(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string map_component_tag(const std::string& type, int line_no) {
  if (type == "MajorClaim") return "MC";
  if (type == "Claim") return "Cl";
  if (type == "Premise") return "Pr";
  throw ParseError("line " + std::to_string(line_no) + ": unknown component type '" +
                   type + "'");
}

// Component text in .ann files flattens newlines to spaces.
bool covered_text_matches(std::string_view doc_text, std::string_view ann_text) {
  if (doc_text.size() != ann_text.size()) return false;
  for (size_t i = 0; i < doc_text.size(); ++i) {
    char a = doc_text[i] == '\n' ? ' ' : doc_text[i];
    char b = ann_text[i] == '\n' ? ' ' : ann_text[i];
    if (a != b) return false;
  }
  return true;
}

}  // namespace

AnnotatedDocument parse_brat_essay(const std::string& txt_content,
                                   const std::string& ann_content,
                                   const std::string& doc_id) {
  if (!is_valid_utf8(txt_content)) throw ParseError("essay text is not valid UTF-8");

  AnnotatedDocument doc;
  doc.doc_id = doc_id;
  doc.text = txt_content;
  doc.source_scheme = "AAE_COMPONENT";
  doc.paragraphs = split_paragraphs(doc.text);
  doc.sentences = split_document_sentences(doc);
  doc.words = split_words(doc.text);

  std::unordered_map<std::string, std::string> span_tag;  // T-id -> component tag
  std::istringstream in(ann_content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    auto fields = split_on(line, '\t');
    const std::string& id = fields[0];
    if (id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty id");

    if (id[0] == 'T') {
      if (fields.size() < 2)
        throw ParseError("line " + std::to_string(line_no) + ": malformed T line");
      std::istringstream spec(fields[1]);
      std::string type;
      long start_cp = -1, end_cp = -1;
      spec >> type >> start_cp >> end_cp;
      if (spec.fail() || type.empty())
        throw ParseError("line " + std::to_string(line_no) + ": malformed T line");
      if (fields[1].find(';') != std::string::npos)
        throw ParseError("line " + std::to_string(line_no) +
                         ": discontinuous spans are not supported");
      std::string tag = map_component_tag(type, line_no);
      int total_cp = byte_to_codepoint_offset(doc.text, static_cast<int>(doc.text.size()));
      if (start_cp < 0 || end_cp <= start_cp || end_cp > total_cp)
        throw DataError("line " + std::to_string(line_no) + ": span offsets [" +
                        std::to_string(start_cp) + "," + std::to_string(end_cp) +
                        ") outside text");
      TextRange r{codepoint_to_byte_offset(doc.text, static_cast<int>(start_cp)),
                  codepoint_to_byte_offset(doc.text, static_cast<int>(end_cp))};
      if (fields.size() >= 3) {
        std::string_view covered = doc.slice(r);
        if (!covered_text_matches(covered, fields[2]))
          throw DataError("line " + std::to_string(line_no) +
                          ": covered text does not match span offsets");
      }
      doc.spans.push_back({id, tag, SpanUnit::char_range, r, {Rater::Kind::human1, -1}, {}});
      span_tag[id] = tag;
    } else if (id[0] == 'R') {
      if (fields.size() < 2)
        throw ParseError("line " + std::to_string(line_no) + ": malformed R line");
      std::istringstream spec(fields[1]);
      std::string type, arg1, arg2;
      spec >> type >> arg1 >> arg2;
      if (spec.fail() || !arg1.starts_with("Arg1:") || !arg2.starts_with("Arg2:"))
        throw ParseError("line " + std::to_string(line_no) + ": malformed R line");
      StanceLabel stance = StanceLabel::none;
      if (type == "supports") stance = StanceLabel::support;
      else if (type == "attacks") stance = StanceLabel::attack;
      else
        throw ParseError("line " + std::to_string(line_no) + ": unknown relation type '" +
                         type + "'");
      doc.relations.push_back({arg1.substr(5), arg2.substr(5), true, stance});
    } else if (id[0] == 'A') {
      if (fields.size() < 2)
        throw ParseError("line " + std::to_string(line_no) + ": malformed A line");
      std::istringstream spec(fields[1]);
      std::string attr, target, value;
      spec >> attr >> target >> value;
      if (spec.fail() || attr != "Stance")
        throw ParseError("line " + std::to_string(line_no) + ": unknown attribute line");
      StanceLabel stance;
      if (value == "For") stance = StanceLabel::support;
      else if (value == "Against") stance = StanceLabel::attack;
      else
        throw ParseError("line " + std::to_string(line_no) + ": unknown stance value '" +
                         value + "'");
      if (!span_tag.count(target))
        throw ParseError("line " + std::to_string(line_no) + ": stance refers to unknown span " +
                         target);
      // Claim stance toward the essay's major claim: no explicit target span.
      doc.relations.push_back({target, "", false, stance});
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown line kind '" +
                       std::string(1, id[0]) + "'");
    }
  }

  std::stable_sort(doc.spans.begin(), doc.spans.end(),
                   [](const AnnotationSpan& a, const AnnotationSpan& b) {
                     return a.range.begin < b.range.begin;
                   });
  return doc;
}

}  // namespace arganno
