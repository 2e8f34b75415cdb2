#pragma once

#include <map>
#include <string>
#include <vector>

#include "arganno/document.hpp"

namespace arganno {

/// Canonical document serialization: one JSON object holding text, offsets,
/// spans, and relations. Byte-stable: serialize(parse(x)) round-trips.
std::string document_to_json(const AnnotatedDocument& doc);
AnnotatedDocument document_from_json(const std::string& json_content);

/// Canonical corpus directory: docs/<id>.json plus an index.json naming the
/// scheme and document files in order.
void save_corpus(const std::vector<AnnotatedDocument>& corpus, const std::string& dir);
std::vector<AnnotatedDocument> load_corpus(const std::string& dir);

/// Per-word B/I/O labels projected from char-range component spans.
std::vector<std::string> bio_labels_from_char_spans(const AnnotatedDocument& doc,
                                                    std::vector<std::string>* warnings = nullptr);

struct CorpusStats {
  std::string scheme;
  long total_units = 0;  // sentences (ARROW) or words (PERSUADE, AAE)
  std::map<std::string, long> tag_counts;
  long untagged = 0;
  // AAE-only blocks
  std::map<std::string, long> component_counts;  // MC / Cl / Pr
  long linked = 0;
  long not_linked = 0;
  long support = 0;
  long attack = 0;
  bool has_relations = false;
};

/// Tag distribution at the scheme's native unit; AAE corpora additionally get
/// component, relation-candidate, and stance counts. Mixed schemes are a
/// usage error.
CorpusStats corpus_stats(const std::vector<AnnotatedDocument>& corpus);

/// Text rendering in the layout of the corpus summary tables
/// (class / count / percentage rows, plus the AAE relation and stance blocks).
std::string render_stats(const CorpusStats& stats);

}  // namespace arganno
