#include "arganno/html.hpp"

#include <algorithm>
#include <cctype>

#include "arganno/errors.hpp"

namespace arganno {

namespace {

std::string encode_utf8(unsigned long cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

// Decodes the entity starting at s[i] (s[i] == '&'). Appends the replacement
// to out and returns the index one past the entity, or npos if not an entity.
size_t decode_entity(const std::string& s, size_t i, std::string& out) {
  size_t semi = s.find(';', i);
  if (semi == std::string::npos || semi - i > 10) return std::string::npos;
  std::string name = s.substr(i + 1, semi - i - 1);
  if (name == "amp") out += '&';
  else if (name == "lt") out += '<';
  else if (name == "gt") out += '>';
  else if (name == "quot") out += '"';
  else if (name == "apos") out += '\'';
  else if (name == "nbsp") out += ' ';
  else if (name.size() > 1 && name[0] == '#') {
    try {
      unsigned long cp = (name[1] == 'x' || name[1] == 'X')
                             ? std::stoul(name.substr(2), nullptr, 16)
                             : std::stoul(name.substr(1), nullptr, 10);
      out += encode_utf8(cp);
    } catch (...) {
      return std::string::npos;
    }
  } else {
    return std::string::npos;
  }
  return semi + 1;
}

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  bool in_space = true;  // trims leading whitespace
  for (char c : s) {
    bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (space) {
      if (!in_space) out += ' ';
      in_space = true;
    } else {
      out += c;
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string lower_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Tag name at s[i] ('<' position); empty when this is not a well-formed tag.
std::string tag_name_at(const std::string& s, size_t i) {
  size_t j = i + 1;
  if (j < s.size() && s[j] == '/') ++j;
  size_t start = j;
  while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '-'))
    ++j;
  if (j == start) return "";
  return lower_ascii(s.substr(start, j - start));
}

}  // namespace

std::string html_to_text(const std::string& html_content) {
  std::string out;
  size_t i = 0;
  const size_t n = html_content.size();
  while (i < n) {
    char c = html_content[i];
    if (c == '<') {
      size_t close = html_content.find('>', i);
      if (close == std::string::npos) {
        out += c;  // stray '<'
        ++i;
        continue;
      }
      std::string name = tag_name_at(html_content, i);
      if (name == "br") out += ' ';
      i = close + 1;
    } else if (c == '&') {
      size_t next = decode_entity(html_content, i, out);
      if (next == std::string::npos) {
        out += c;
        ++i;
      } else {
        i = next;
      }
    } else {
      out += c;
      ++i;
    }
  }
  return collapse_whitespace(out);
}

AnnotatedDocument parse_html_essay(const std::string& html_content,
                                   const std::string& doc_id) {
  std::vector<std::string> paragraph_texts;
  size_t i = 0;
  const size_t n = html_content.size();
  while (i < n) {
    size_t open = html_content.find('<', i);
    if (open == std::string::npos) break;
    if (tag_name_at(html_content, open) == "p" && html_content[open + 1] != '/') {
      size_t content_start = html_content.find('>', open);
      if (content_start == std::string::npos) break;
      ++content_start;
      // find matching </p>; paragraph elements do not nest
      size_t close = content_start;
      while (true) {
        close = html_content.find('<', close);
        if (close == std::string::npos) {
          close = n;
          break;
        }
        if (html_content[close + 1] == '/' && tag_name_at(html_content, close) == "p") break;
        ++close;
      }
      std::string text = html_to_text(html_content.substr(content_start, close - content_start));
      if (!text.empty()) paragraph_texts.push_back(text);
      size_t end_tag = html_content.find('>', close);
      i = end_tag == std::string::npos ? n : end_tag + 1;
    } else {
      i = open + 1;
    }
  }

  AnnotatedDocument doc;
  doc.doc_id = doc_id;
  doc.source_scheme = "ARROW";
  if (paragraph_texts.empty()) {
    std::string text = html_to_text(html_content);
    if (!text.empty()) paragraph_texts.push_back(text);
    doc.warnings.push_back("no paragraph elements; single-paragraph fallback");
  }
  for (size_t p = 0; p < paragraph_texts.size(); ++p) {
    if (p > 0) doc.text += "\n\n";
    int begin = static_cast<int>(doc.text.size());
    doc.text += paragraph_texts[p];
    doc.paragraphs.push_back({begin, static_cast<int>(doc.text.size())});
  }
  doc.sentences = split_document_sentences(doc);
  doc.words = split_words(doc.text);
  return doc;
}

}  // namespace arganno
