#pragma once

#include <string>
#include <vector>

#include "arganno/document.hpp"
#include "arganno/schemes.hpp"

namespace arganno {

/// Collapses a document's annotations to one tag per word. Sentence tags copy
/// to every word of the sentence; char-range tags apply to words whose first
/// character they cover; word-range tags apply directly. Untagged words get
/// "None"; overlaps resolve in reading order (earliest span wins).
std::vector<std::string> collapse_to_words(const AnnotatedDocument& doc,
                                           const TagSet& scheme);

struct CorrespondenceMatrix {
  std::string row_scheme;
  std::string col_scheme;
  std::vector<std::string> row_tags;
  std::vector<std::string> col_tags;
  std::vector<std::vector<double>> cells;  // row percentages
  std::vector<double> row_marginals;       // % of all words carrying the row tag
  std::vector<double> col_marginals;       // % of all words carrying the column tag
  std::vector<long> row_support;
  long total_words = 0;
};

/// cell(r,c) = 100 · |{words: human=r ∧ synth=c}| / |{words: human=r}|.
/// Rows with zero support stay empty.
CorrespondenceMatrix cross_tabulate(const std::vector<std::string>& human,
                                    const std::vector<std::string>& synthetic,
                                    const TagSet& human_scheme,
                                    const TagSet& synth_scheme);

/// Side-by-side rendering of matrices sharing the same human rows (the
/// correspondence-table layout: one row block, synthetic scheme columns).
std::string render_correspondence(const std::vector<CorrespondenceMatrix>& blocks);

}  // namespace arganno
