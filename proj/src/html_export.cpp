#include "arganno/html_export.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "arganno/correspondence.hpp"
#include "arganno/errors.hpp"

namespace arganno {

namespace {

constexpr const char* kUnknownColor = "#c0c0c0";

const std::vector<std::string>& base_colors() {
  static const std::vector<std::string> colors = {
      "#ffd8a8", "#ffb3c1", "#a5d8ff", "#b2f2bb", "#d0bfff",
      "#ffec99", "#e9ecef", "#96f2d7", "#fcc2d7", "#bac8ff"};
  return colors;
}

std::string escape_html(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Palette default_palette(const TagSet& scheme) {
  Palette p;
  for (size_t i = 0; i < scheme.tags.size(); ++i)
    p[scheme.tags[i]] = base_colors()[i % base_colors().size()];
  return p;
}

Palette load_palette(const std::string& json_content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_content);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("palette file: ") + e.what());
  }
  Palette p;
  for (auto it = j.begin(); it != j.end(); ++it)
    p[it.key()] = it.value().get<std::string>();
  return p;
}

std::string export_html(const AnnotatedDocument& doc, const TagSet& scheme,
                        const Palette& palette, std::vector<std::string>* warnings) {
  std::vector<std::string> word_tags = collapse_to_words(doc, scheme);
  const std::string none = scheme.none_tag.value_or("None");

  auto color_of = [&](const std::string& tag) -> std::string {
    auto it = palette.find(tag);
    if (it != palette.end()) return it->second;
    if (warnings)
      warnings->push_back("tag '" + tag + "' has no palette entry; using reserved color");
    return kUnknownColor;
  };

  // Contiguous same-tag word runs; inter-run whitespace stays unwrapped.
  struct Run {
    std::string tag;
    int char_begin;
    int char_end;
  };
  std::vector<Run> runs;
  size_t w = 0;
  while (w < word_tags.size()) {
    size_t end = w + 1;
    while (end < word_tags.size() && word_tags[end] == word_tags[w]) ++end;
    runs.push_back({word_tags[w], doc.words[w].begin, doc.words[end - 1].end});
    w = end;
  }

  std::set<std::string> used;
  for (const Run& r : runs)
    if (r.tag != none) used.insert(r.tag);

  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>"
      << escape_html(doc.doc_id) << "</title>\n"
      << "<style>\n"
      << "body { font-family: serif; margin: 2em; }\n"
      << ".essay { white-space: pre-wrap; max-width: 48em; }\n"
      << ".legend span { padding: 0 0.5em; margin-right: 0.6em; }\n"
      << "</style>\n</head>\n<body>\n";
  out << "<div class=\"legend\">";
  for (const std::string& tag : scheme.tags) {
    if (!used.count(tag)) continue;
    out << "<span style=\"background-color:" << color_of(tag) << "\">" << escape_html(tag)
        << "</span>";
  }
  for (const std::string& tag : used) {
    if (std::find(scheme.tags.begin(), scheme.tags.end(), tag) != scheme.tags.end())
      continue;
    out << "<span style=\"background-color:" << color_of(tag) << "\">" << escape_html(tag)
        << "</span>";
  }
  out << "</div>\n<hr>\n<div class=\"essay\">";

  int cursor = 0;
  for (const Run& r : runs) {
    if (r.char_begin > cursor)
      out << escape_html(std::string_view(doc.text).substr(
          static_cast<size_t>(cursor), static_cast<size_t>(r.char_begin - cursor)));
    std::string body = escape_html(std::string_view(doc.text).substr(
        static_cast<size_t>(r.char_begin), static_cast<size_t>(r.char_end - r.char_begin)));
    if (r.tag == none) {
      out << body;
    } else {
      out << "<span style=\"background-color:" << color_of(r.tag) << "\">" << body
          << "</span>";
    }
    cursor = r.char_end;
  }
  if (cursor < static_cast<int>(doc.text.size()))
    out << escape_html(std::string_view(doc.text).substr(static_cast<size_t>(cursor)));
  out << "</div>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace arganno
