#pragma once

#include <string>
#include <vector>

#include "arganno/document.hpp"

namespace arganno {

/// Parses a PERSUADE-style discourse-element table. Required columns (header
/// aliases in parentheses): document id (essay_id/id), discourse_start,
/// discourse_end, discourse_type, predictionstring, and the essay text
/// (full_text/essay_text/text). One document per id; spans carry word-range
/// units reconstructed from the prediction string, with word indices taking
/// precedence over char offsets.
std::vector<AnnotatedDocument> parse_persuade_table(const std::string& csv_content);

/// RFC-4180-ish CSV: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string& content);

}  // namespace arganno
