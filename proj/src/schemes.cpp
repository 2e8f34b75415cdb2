#include "arganno/schemes.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "arganno/errors.hpp"

namespace arganno {

std::string scheme_to_string(SchemeId id) {
  switch (id) {
    case SchemeId::ARROW: return "ARROW";
    case SchemeId::PERSUADE: return "PERSUADE";
    case SchemeId::AAE_BIO: return "AAE_BIO";
    case SchemeId::AAE_COMPONENT: return "AAE_COMPONENT";
    case SchemeId::AAE_RELATION: return "AAE_RELATION";
    case SchemeId::AAE_STANCE: return "AAE_STANCE";
  }
  return "ARROW";
}

SchemeId scheme_from_string(const std::string& name) {
  static const std::unordered_map<std::string, SchemeId> map = {
      {"ARROW", SchemeId::ARROW},
      {"PERSUADE", SchemeId::PERSUADE},
      {"AAE_BIO", SchemeId::AAE_BIO},
      {"AAE_COMPONENT", SchemeId::AAE_COMPONENT},
      {"AAE_RELATION", SchemeId::AAE_RELATION},
      {"AAE_STANCE", SchemeId::AAE_STANCE}};
  auto it = map.find(name);
  if (it == map.end()) throw UsageError("unknown scheme: " + name);
  return it->second;
}

bool TagSet::has_tag(const std::string& tag) const {
  if (none_tag && tag == *none_tag) return true;
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

int TagSet::label_index(const std::string& tag) const {
  for (size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == tag) return static_cast<int>(i);
  if (none_tag && tag == *none_tag) return static_cast<int>(tags.size());
  throw UsageError("tag '" + tag + "' not in scheme " + name);
}

const std::string& TagSet::label_name(int index) const {
  if (index >= 0 && index < static_cast<int>(tags.size()))
    return tags[static_cast<size_t>(index)];
  if (none_tag && index == static_cast<int>(tags.size())) return *none_tag;
  throw UsageError("label index " + std::to_string(index) + " out of range for " + name);
}

int TagSet::num_labels() const {
  return static_cast<int>(tags.size()) + (none_tag ? 1 : 0);
}

std::vector<std::string> TagSet::resolution_order() const {
  if (!extended_hierarchy.empty()) return extended_hierarchy;
  std::vector<std::string> order = tags;
  if (none_tag) order.push_back(*none_tag);
  return order;
}

const TagSet& tag_set(SchemeId id) {
  static const std::map<SchemeId, TagSet> registry = [] {
    std::map<SchemeId, TagSet> r;
    r[SchemeId::ARROW] = TagSet{
        "ARROW",
        SpanUnit::sentence,
        {"I1", "I2", "E1", "E2", "O", "C", "T"},
        "None",
        {"I2", "O", "E1", "E2", "T"},
        {"I1", "I2", "O", "E1", "E2", "T", "C", "None"}};
    r[SchemeId::PERSUADE] = TagSet{
        "PERSUADE",
        SpanUnit::word_range,
        {"L", "P", "C1", "C2", "R", "E", "C3"},
        "None",
        {},
        {}};
    r[SchemeId::AAE_BIO] =
        TagSet{"AAE_BIO", SpanUnit::word_range, {"B", "I", "O"}, std::nullopt, {}, {}};
    r[SchemeId::AAE_COMPONENT] = TagSet{
        "AAE_COMPONENT", SpanUnit::char_range, {"MC", "Cl", "Pr"}, std::nullopt, {}, {}};
    r[SchemeId::AAE_RELATION] = TagSet{
        "AAE_RELATION", SpanUnit::char_range, {"linked", "not-linked"}, std::nullopt, {}, {}};
    r[SchemeId::AAE_STANCE] = TagSet{
        "AAE_STANCE", SpanUnit::char_range, {"support", "attack"}, std::nullopt, {}, {}};
    return r;
  }();
  return registry.at(id);
}

namespace {

SpanUnit unit_from_string(const std::string& s) {
  if (s == "sentence") return SpanUnit::sentence;
  if (s == "word") return SpanUnit::word_range;
  if (s == "span" || s == "char") return SpanUnit::char_range;
  throw ParseError("unknown unit: " + s);
}

std::string unit_to_string(SpanUnit u) {
  switch (u) {
    case SpanUnit::sentence: return "sentence";
    case SpanUnit::word_range: return "word";
    case SpanUnit::char_range: return "span";
  }
  return "span";
}

}  // namespace

TagSet load_tag_set(const std::string& json_content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_content);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scheme file: ") + e.what());
  }
  TagSet s;
  s.name = j.at("name").get<std::string>();
  s.unit = unit_from_string(j.value("unit", std::string("span")));
  s.tags = j.at("tags").get<std::vector<std::string>>();
  if (j.contains("none_tag") && !j["none_tag"].is_null())
    s.none_tag = j["none_tag"].get<std::string>();
  s.hierarchy = j.value("hierarchy", std::vector<std::string>{});
  s.extended_hierarchy = j.value("extended_hierarchy", std::vector<std::string>{});
  for (const std::string& h : s.hierarchy) {
    if (std::find(s.tags.begin(), s.tags.end(), h) == s.tags.end())
      throw ParseError("hierarchy tag '" + h + "' not in tag inventory");
  }
  return s;
}

std::string save_tag_set(const TagSet& scheme) {
  nlohmann::json j;
  j["name"] = scheme.name;
  j["unit"] = unit_to_string(scheme.unit);
  j["tags"] = scheme.tags;
  if (scheme.none_tag) j["none_tag"] = *scheme.none_tag;
  j["hierarchy"] = scheme.hierarchy;
  j["extended_hierarchy"] = scheme.extended_hierarchy;
  return j.dump(2) + "\n";
}

namespace {

int resolution_rank(const std::string& tag, const TagSet& scheme) {
  const auto order = scheme.resolution_order();
  for (size_t i = 0; i < order.size(); ++i)
    if (order[i] == tag) return static_cast<int>(i);
  throw UsageError("tag '" + tag + "' has no resolution rank in scheme " + scheme.name);
}

}  // namespace

std::string resolve_pair(const std::string& tag_a, const std::string& tag_b,
                         const TagSet& scheme) {
  if (!scheme.has_tag(tag_a)) throw UsageError("tag '" + tag_a + "' not in scheme");
  if (!scheme.has_tag(tag_b)) throw UsageError("tag '" + tag_b + "' not in scheme");
  if (scheme.hierarchy.empty())
    throw UsageError("scheme " + scheme.name + " has no resolution hierarchy");
  if (tag_a == tag_b) return tag_a;
  return resolution_rank(tag_a, scheme) <= resolution_rank(tag_b, scheme) ? tag_a : tag_b;
}

std::string resolve_votes(const std::vector<std::string>& votes, const TagSet& scheme) {
  if (votes.empty()) throw UsageError("resolve_votes: empty vote list");
  std::map<std::string, int> counts;
  for (const std::string& v : votes) {
    if (!scheme.has_tag(v)) throw UsageError("vote tag '" + v + "' not in scheme");
    counts[v]++;
  }
  int best = 0;
  for (const auto& [tag, c] : counts) best = std::max(best, c);
  std::string winner;
  int winner_rank = -1;
  for (const auto& [tag, c] : counts) {
    if (c != best) continue;
    int rank = resolution_rank(tag, scheme);
    if (winner_rank < 0 || rank < winner_rank) {
      winner = tag;
      winner_rank = rank;
    }
  }
  return winner;
}

std::vector<Violation> validate_annotation(const AnnotatedDocument& doc,
                                           const TagSet& scheme) {
  std::vector<Violation> out;
  for (const AnnotationSpan& s : doc.spans) {
    if (!scheme.has_tag(s.tag))
      out.push_back({"unknown-tag", "span " + s.span_id + " carries tag '" + s.tag +
                                        "' outside scheme " + scheme.name});
  }
  for (size_t i = 0; i < doc.spans.size(); ++i) {
    for (size_t j = i + 1; j < doc.spans.size(); ++j) {
      const AnnotationSpan& a = doc.spans[i];
      const AnnotationSpan& b = doc.spans[j];
      if (a.unit != b.unit) continue;
      if (a.range.begin < b.range.end && b.range.begin < a.range.end)
        out.push_back({"overlap", "spans " + a.span_id + " and " + b.span_id +
                                      " overlap at the same unit"});
    }
  }
  if (scheme.name == "AAE_BIO") {
    // Collapse word-unit spans to per-word tags, then flag I-runs with no B.
    std::vector<std::string> word_tags(doc.words.size(), "O");
    for (const AnnotationSpan& s : doc.spans) {
      if (s.unit != SpanUnit::word_range) continue;
      for (int w = s.range.begin; w < s.range.end && w < static_cast<int>(doc.words.size()); ++w)
        word_tags[static_cast<size_t>(w)] = s.tag;
    }
    for (size_t w = 0; w < word_tags.size(); ++w) {
      if (word_tags[w] == "I" && (w == 0 || word_tags[w - 1] == "O"))
        out.push_back({"orphan-i", "I tag at word " + std::to_string(w) +
                                       " has no preceding B"});
    }
  }
  return out;
}

}  // namespace arganno
