#pragma once

#include <string>

#include "arganno/document.hpp"

namespace arganno {

/// Reads an essay from an HTML fragment: <p> elements become paragraphs, all
/// other markup is stripped, entities are unescaped, and whitespace inside a
/// paragraph is collapsed. Falls back to one paragraph (with a warning) when
/// no paragraph elements are present.
AnnotatedDocument parse_html_essay(const std::string& html_content,
                                   const std::string& doc_id = "");

/// Strips tags and unescapes entities; whitespace runs collapse to one space.
std::string html_to_text(const std::string& html_content);

}  // namespace arganno
