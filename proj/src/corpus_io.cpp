#include "arganno/corpus_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arganno/errors.hpp"

namespace arganno {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string unit_name(SpanUnit u) {
  switch (u) {
    case SpanUnit::sentence: return "sentence";
    case SpanUnit::word_range: return "word";
    case SpanUnit::char_range: return "char";
  }
  return "char";
}

SpanUnit unit_from_name(const std::string& s) {
  if (s == "sentence") return SpanUnit::sentence;
  if (s == "word") return SpanUnit::word_range;
  if (s == "char") return SpanUnit::char_range;
  throw ParseError("unknown span unit: " + s);
}

std::string stance_name(StanceLabel s) {
  switch (s) {
    case StanceLabel::none: return "none";
    case StanceLabel::support: return "support";
    case StanceLabel::attack: return "attack";
  }
  return "none";
}

StanceLabel stance_from_name(const std::string& s) {
  if (s == "none") return StanceLabel::none;
  if (s == "support") return StanceLabel::support;
  if (s == "attack") return StanceLabel::attack;
  throw ParseError("unknown stance: " + s);
}

json ranges_to_json(const std::vector<TextRange>& rs) {
  json out = json::array();
  for (const TextRange& r : rs) out.push_back({r.begin, r.end});
  return out;
}

std::vector<TextRange> ranges_from_json(const json& j) {
  std::vector<TextRange> out;
  for (const auto& r : j) out.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
  return out;
}

std::string sanitize_filename(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  if (out.empty()) out = "doc";
  return out;
}

std::string format_count(long n) {
  std::string digits = std::to_string(n < 0 ? -n : n);
  std::string out;
  int c = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (c > 0 && c % 3 == 0) out += ',';
    out += *it;
    ++c;
  }
  if (n < 0) out += '-';
  std::reverse(out.begin(), out.end());
  return out;
}

std::string format_percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", p);
  return buf;
}

}  // namespace

std::string document_to_json(const AnnotatedDocument& doc) {
  json j;
  j["doc_id"] = doc.doc_id;
  j["text"] = doc.text;
  j["source_scheme"] = doc.source_scheme;
  j["paragraphs"] = ranges_to_json(doc.paragraphs);
  j["sentences"] = ranges_to_json(doc.sentences);
  j["words"] = ranges_to_json(doc.words);
  json spans = json::array();
  for (const AnnotationSpan& s : doc.spans) {
    json sj;
    sj["span_id"] = s.span_id;
    sj["tag"] = s.tag;
    sj["unit"] = unit_name(s.unit);
    sj["begin"] = s.range.begin;
    sj["end"] = s.range.end;
    sj["rater"] = rater_to_string(s.rater);
    if (!s.votes.empty()) sj["votes"] = s.votes;
    spans.push_back(sj);
  }
  j["spans"] = spans;
  json rels = json::array();
  for (const ArgRelation& r : doc.relations) {
    json rj;
    rj["source"] = r.source;
    rj["target"] = r.target;
    rj["linked"] = r.linked;
    rj["stance"] = stance_name(r.stance);
    rels.push_back(rj);
  }
  j["relations"] = rels;
  j["warnings"] = doc.warnings;
  return j.dump(2) + "\n";
}

AnnotatedDocument document_from_json(const std::string& json_content) {
  json j;
  try {
    j = json::parse(json_content);
  } catch (const json::exception& e) {
    throw ParseError(std::string("document json: ") + e.what());
  }
  AnnotatedDocument doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.text = j.at("text").get<std::string>();
  doc.source_scheme = j.at("source_scheme").get<std::string>();
  doc.paragraphs = ranges_from_json(j.at("paragraphs"));
  doc.sentences = ranges_from_json(j.at("sentences"));
  doc.words = ranges_from_json(j.at("words"));
  for (const auto& sj : j.at("spans")) {
    AnnotationSpan s;
    s.span_id = sj.at("span_id").get<std::string>();
    s.tag = sj.at("tag").get<std::string>();
    s.unit = unit_from_name(sj.at("unit").get<std::string>());
    s.range = {sj.at("begin").get<int>(), sj.at("end").get<int>()};
    s.rater = rater_from_string(sj.at("rater").get<std::string>());
    if (sj.contains("votes")) s.votes = sj["votes"].get<std::vector<std::string>>();
    doc.spans.push_back(std::move(s));
  }
  for (const auto& rj : j.at("relations")) {
    ArgRelation r;
    r.source = rj.at("source").get<std::string>();
    r.target = rj.at("target").get<std::string>();
    r.linked = rj.at("linked").get<bool>();
    r.stance = stance_from_name(rj.at("stance").get<std::string>());
    doc.relations.push_back(std::move(r));
  }
  doc.warnings = j.value("warnings", std::vector<std::string>{});
  return doc;
}

void save_corpus(const std::vector<AnnotatedDocument>& corpus, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "docs");
  json index;
  index["scheme"] = corpus.empty() ? "" : corpus.front().source_scheme;
  json files = json::array();
  std::map<std::string, int> used;
  for (const AnnotatedDocument& doc : corpus) {
    std::string base = sanitize_filename(doc.doc_id);
    int n = used[base]++;
    if (n > 0) base += "_" + std::to_string(n);
    std::string rel = "docs/" + base + ".json";
    std::ofstream out(fs::path(dir) / rel, std::ios::binary);
    if (!out) throw DataError("cannot write " + rel + " under " + dir);
    out << document_to_json(doc);
    files.push_back(rel);
  }
  index["documents"] = files;
  std::ofstream out(fs::path(dir) / "index.json", std::ios::binary);
  out << index.dump(2) << "\n";
}

std::vector<AnnotatedDocument> load_corpus(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "index.json", std::ios::binary);
  if (!in) throw DataError("no index.json under " + dir);
  std::stringstream buf;
  buf << in.rdbuf();
  json index = json::parse(buf.str());
  std::vector<AnnotatedDocument> out;
  for (const auto& rel : index.at("documents")) {
    std::ifstream doc_in(fs::path(dir) / rel.get<std::string>(), std::ios::binary);
    if (!doc_in) throw DataError("missing document file " + rel.get<std::string>());
    std::stringstream doc_buf;
    doc_buf << doc_in.rdbuf();
    out.push_back(document_from_json(doc_buf.str()));
  }
  return out;
}

std::vector<std::string> bio_labels_from_char_spans(const AnnotatedDocument& doc,
                                                    std::vector<std::string>* warnings) {
  std::vector<std::string> labels(doc.words.size(), "O");
  std::vector<AnnotationSpan> spans;
  for (const AnnotationSpan& s : doc.spans)
    if (s.unit == SpanUnit::char_range) spans.push_back(s);
  std::stable_sort(spans.begin(), spans.end(),
                   [](const AnnotationSpan& a, const AnnotationSpan& b) {
                     return a.range.begin < b.range.begin;
                   });
  for (const AnnotationSpan& s : spans) {
    TextRange wr = project_char_span_to_words(doc, s.range, warnings);
    bool first = true;
    for (int w = wr.begin; w < wr.end; ++w) {
      if (labels[static_cast<size_t>(w)] != "O") {
        if (warnings)
          warnings->push_back("word " + std::to_string(w) +
                              " claimed by overlapping component spans");
        continue;
      }
      labels[static_cast<size_t>(w)] = first ? "B" : "I";
      first = false;
    }
  }
  return labels;
}

CorpusStats corpus_stats(const std::vector<AnnotatedDocument>& corpus) {
  CorpusStats stats;
  if (corpus.empty()) return stats;
  stats.scheme = corpus.front().source_scheme;
  for (const AnnotatedDocument& doc : corpus) {
    if (doc.source_scheme != stats.scheme)
      throw UsageError("corpus_stats: mixed schemes " + stats.scheme + " and " +
                       doc.source_scheme);
  }

  for (const AnnotatedDocument& doc : corpus) {
    if (stats.scheme == "AAE_COMPONENT") {
      auto labels = bio_labels_from_char_spans(doc);
      stats.total_units += static_cast<long>(labels.size());
      for (const std::string& l : labels) stats.tag_counts[l]++;
      std::vector<TextRange> comp_starts;
      for (const AnnotationSpan& s : doc.spans) {
        if (s.unit != SpanUnit::char_range) continue;
        stats.component_counts[s.tag]++;
        comp_starts.push_back(s.range);
      }
      // Relation candidates: ordered pairs of components within one paragraph.
      long candidates = 0;
      for (const TextRange& p : doc.paragraphs) {
        long n = 0;
        for (const TextRange& c : comp_starts)
          if (p.contains(c.begin)) ++n;
        candidates += n * (n - 1);
      }
      for (const ArgRelation& r : doc.relations) {
        if (r.linked) stats.linked++;
        if (r.stance == StanceLabel::support) stats.support++;
        if (r.stance == StanceLabel::attack) stats.attack++;
      }
      stats.not_linked += candidates;
      stats.has_relations = true;
    } else if (stats.scheme == "PERSUADE" || stats.scheme == "AAE_BIO") {
      std::vector<std::string> word_tags(doc.words.size());
      for (const AnnotationSpan& s : doc.spans) {
        if (s.unit != SpanUnit::word_range) continue;
        for (int w = s.range.begin; w < s.range.end; ++w)
          word_tags[static_cast<size_t>(w)] = s.tag;
      }
      stats.total_units += static_cast<long>(word_tags.size());
      for (const std::string& t : word_tags) {
        if (t.empty()) stats.untagged++;
        else stats.tag_counts[t]++;
      }
    } else {
      // Sentence-unit schemes (ARROW).
      std::vector<std::string> sent_tags(doc.sentences.size());
      for (const AnnotationSpan& s : doc.spans) {
        if (s.unit != SpanUnit::sentence) continue;
        for (int k = s.range.begin; k < s.range.end; ++k)
          sent_tags[static_cast<size_t>(k)] = s.tag;
      }
      stats.total_units += static_cast<long>(sent_tags.size());
      for (const std::string& t : sent_tags) {
        if (t.empty() || t == "None") stats.untagged++;
        else stats.tag_counts[t]++;
      }
    }
  }
  if (stats.has_relations) stats.not_linked -= stats.linked;
  return stats;
}

std::string render_stats(const CorpusStats& stats) {
  std::ostringstream out;
  auto row = [&](const std::string& label, long count, long total) {
    double pct = total > 0 ? 100.0 * static_cast<double>(count) / static_cast<double>(total) : 0.0;
    out << "  " << label;
    for (size_t i = label.size(); i < 24; ++i) out << ' ';
    std::string c = format_count(count);
    for (size_t i = c.size(); i < 12; ++i) out << ' ';
    out << c << "  " << format_percent(pct) << "\n";
  };

  out << "Scheme: " << (stats.scheme.empty() ? "(empty corpus)" : stats.scheme) << "\n";
  if (stats.scheme == "AAE_COMPONENT") {
    out << "IOB tagging (words)\n";
    for (const char* t : {"B", "I", "O"})
      row(t, stats.tag_counts.count(t) ? stats.tag_counts.at(t) : 0, stats.total_units);
    long comp_total = 0;
    for (const auto& [t, c] : stats.component_counts) comp_total += c;
    out << "Component classification\n";
    for (const char* t : {"MC", "Cl", "Pr"})
      row(t, stats.component_counts.count(t) ? stats.component_counts.at(t) : 0, comp_total);
    out << "Relation identification\n";
    row("Not Linked", stats.not_linked, stats.not_linked + stats.linked);
    row("Linked", stats.linked, stats.not_linked + stats.linked);
    out << "Stance recognition\n";
    row("Support", stats.support, stats.support + stats.attack);
    row("Attack", stats.attack, stats.support + stats.attack);
  } else {
    out << "Class                          count  percentage\n";
    long shown = 0;
    for (const auto& [tag, count] : stats.tag_counts) {
      row(tag, count, stats.total_units);
      shown += count;
    }
    row("None", stats.untagged, stats.total_units);
    row("Total", shown + stats.untagged, stats.total_units);
  }
  return out.str();
}

}  // namespace arganno
