#pragma once

#include <map>
#include <string>
#include <vector>

#include "arganno/document.hpp"
#include "arganno/schemes.hpp"

namespace arganno {

using Palette = std::map<std::string, std::string>;  // tag -> #rrggbb

/// Fixed per-scheme colors (None renders unhighlighted).
Palette default_palette(const TagSet& scheme);
Palette load_palette(const std::string& json_content);

/// Standalone color-coded essay: contiguous same-tag word runs are wrapped in
/// colored spans, preceded by a legend for the tags that appear. Stripping
/// the markup of the essay body reproduces the document text byte for byte.
/// Unknown tags render in the reserved gray and add a warning.
std::string export_html(const AnnotatedDocument& doc, const TagSet& scheme,
                        const Palette& palette,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace arganno
