#include "arganno/correspondence.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "arganno/errors.hpp"

namespace arganno {

std::vector<std::string> collapse_to_words(const AnnotatedDocument& doc,
                                           const TagSet& scheme) {
  const std::string none = scheme.none_tag.value_or("None");
  std::vector<std::string> tags(doc.words.size(), none);
  std::vector<bool> assigned(doc.words.size(), false);

  // Reading order: earliest span start (in word coordinates) wins overlaps.
  struct Projected {
    int word_begin;
    int word_end;
    const AnnotationSpan* span;
  };
  std::vector<Projected> projected;
  for (const AnnotationSpan& s : doc.spans) {
    Projected p{0, 0, &s};
    switch (s.unit) {
      case SpanUnit::word_range:
        p.word_begin = s.range.begin;
        p.word_end = std::min(s.range.end, static_cast<int>(doc.words.size()));
        break;
      case SpanUnit::sentence: {
        int wb = -1, we = -1;
        for (int k = s.range.begin;
             k < s.range.end && k < static_cast<int>(doc.sentences.size()); ++k) {
          const TextRange& sent = doc.sentences[static_cast<size_t>(k)];
          for (size_t w = 0; w < doc.words.size(); ++w) {
            if (doc.words[w].begin >= sent.begin && doc.words[w].end <= sent.end) {
              if (wb < 0) wb = static_cast<int>(w);
              we = static_cast<int>(w) + 1;
            }
          }
        }
        if (wb < 0) continue;
        p.word_begin = wb;
        p.word_end = we;
        break;
      }
      case SpanUnit::char_range: {
        // a char span tags the words whose first character it covers
        int wb = -1, we = -1;
        for (size_t w = 0; w < doc.words.size(); ++w) {
          if (s.range.contains(doc.words[w].begin)) {
            if (wb < 0) wb = static_cast<int>(w);
            we = static_cast<int>(w) + 1;
          }
        }
        if (wb < 0) continue;
        p.word_begin = wb;
        p.word_end = we;
        break;
      }
    }
    projected.push_back(p);
  }
  std::stable_sort(projected.begin(), projected.end(),
                   [](const Projected& a, const Projected& b) {
                     return a.word_begin < b.word_begin;
                   });
  for (const Projected& p : projected) {
    for (int w = p.word_begin; w < p.word_end; ++w) {
      if (assigned[static_cast<size_t>(w)]) continue;
      tags[static_cast<size_t>(w)] = p.span->tag;
      assigned[static_cast<size_t>(w)] = true;
    }
  }
  return tags;
}

CorrespondenceMatrix cross_tabulate(const std::vector<std::string>& human,
                                    const std::vector<std::string>& synthetic,
                                    const TagSet& human_scheme,
                                    const TagSet& synth_scheme) {
  if (human.size() != synthetic.size())
    throw UsageError("cross_tabulate: length mismatch " + std::to_string(human.size()) +
                     " vs " + std::to_string(synthetic.size()));

  CorrespondenceMatrix m;
  m.row_scheme = human_scheme.name;
  m.col_scheme = synth_scheme.name;
  // collapse_to_words marks untagged words "None" even for schemes without a
  // none tag, so every matrix carries a None row/column
  m.row_tags = human_scheme.tags;
  m.row_tags.push_back(human_scheme.none_tag.value_or("None"));
  m.col_tags = synth_scheme.tags;
  m.col_tags.push_back(synth_scheme.none_tag.value_or("None"));
  m.total_words = static_cast<long>(human.size());

  std::map<std::string, int> row_index, col_index;
  for (size_t i = 0; i < m.row_tags.size(); ++i) row_index[m.row_tags[i]] = static_cast<int>(i);
  for (size_t i = 0; i < m.col_tags.size(); ++i) col_index[m.col_tags[i]] = static_cast<int>(i);

  std::vector<std::vector<long>> counts(m.row_tags.size(),
                                        std::vector<long>(m.col_tags.size(), 0));
  std::vector<long> row_totals(m.row_tags.size(), 0);
  std::vector<long> col_totals(m.col_tags.size(), 0);
  for (size_t i = 0; i < human.size(); ++i) {
    auto r = row_index.find(human[i]);
    auto c = col_index.find(synthetic[i]);
    if (r == row_index.end())
      throw UsageError("cross_tabulate: human tag '" + human[i] + "' not in scheme " +
                       human_scheme.name);
    if (c == col_index.end())
      throw UsageError("cross_tabulate: synthetic tag '" + synthetic[i] +
                       "' not in scheme " + synth_scheme.name);
    counts[static_cast<size_t>(r->second)][static_cast<size_t>(c->second)]++;
    row_totals[static_cast<size_t>(r->second)]++;
    col_totals[static_cast<size_t>(c->second)]++;
  }

  m.cells.assign(m.row_tags.size(), std::vector<double>(m.col_tags.size(), 0.0));
  for (size_t r = 0; r < m.row_tags.size(); ++r) {
    m.row_support.push_back(row_totals[r]);
    m.row_marginals.push_back(m.total_words > 0
                                  ? 100.0 * static_cast<double>(row_totals[r]) /
                                        static_cast<double>(m.total_words)
                                  : 0.0);
    if (row_totals[r] == 0) continue;  // empty row stays all-zero
    for (size_t c = 0; c < m.col_tags.size(); ++c)
      m.cells[r][c] =
          100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(row_totals[r]);
  }
  for (size_t c = 0; c < m.col_tags.size(); ++c)
    m.col_marginals.push_back(m.total_words > 0
                                  ? 100.0 * static_cast<double>(col_totals[c]) /
                                        static_cast<double>(m.total_words)
                                  : 0.0);
  return m;
}

std::string render_correspondence(const std::vector<CorrespondenceMatrix>& blocks) {
  if (blocks.empty()) return "";
  for (const CorrespondenceMatrix& b : blocks) {
    if (b.row_tags != blocks.front().row_tags)
      throw UsageError("render_correspondence: blocks must share the same row tags");
  }
  std::ostringstream out;
  auto pct = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%5.1f", v);
    return std::string(buf);
  };

  out << "        %  ";
  for (const CorrespondenceMatrix& b : blocks) {
    out << "| " << b.col_scheme << ": ";
    for (const std::string& c : b.col_tags) out << c << " ";
  }
  out << "\n";
  const CorrespondenceMatrix& first = blocks.front();
  for (size_t r = 0; r < first.row_tags.size(); ++r) {
    const std::string& tag = first.row_tags[r];
    out << tag;
    for (size_t i = tag.size(); i < 6; ++i) out << ' ';
    out << pct(first.row_marginals[r]) << "  ";
    for (const CorrespondenceMatrix& b : blocks) {
      out << "| ";
      for (size_t c = 0; c < b.col_tags.size(); ++c) out << pct(b.cells[r][c]) << " ";
    }
    out << "\n";
  }
  out << "%            ";
  for (const CorrespondenceMatrix& b : blocks) {
    out << "| ";
    for (size_t c = 0; c < b.col_tags.size(); ++c) out << pct(b.col_marginals[c]) << " ";
  }
  out << "\n";
  return out.str();
}

}  // namespace arganno
