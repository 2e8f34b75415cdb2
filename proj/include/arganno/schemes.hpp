#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arganno/document.hpp"

namespace arganno {

enum class SchemeId { ARROW, PERSUADE, AAE_BIO, AAE_COMPONENT, AAE_RELATION, AAE_STANCE };

std::string scheme_to_string(SchemeId id);
SchemeId scheme_from_string(const std::string& name);

/// A named tag inventory with an annotation granularity and optional
/// resolution orderings for disagreement/vote tie-breaks.
struct TagSet {
  std::string name;
  SpanUnit unit = SpanUnit::sentence;
  std::vector<std::string> tags;
  std::optional<std::string> none_tag;
  // Resolution hierarchy as the raters were trained on (subset of tags).
  std::vector<std::string> hierarchy;
  // Total order covering every tag plus the none tag, used when ensemble
  // ties fall outside the hierarchy. Empty when the scheme has no hierarchy.
  std::vector<std::string> extended_hierarchy;

  bool has_tag(const std::string& tag) const;
  /// Model label index: tags in declaration order, none tag (if any) last.
  int label_index(const std::string& tag) const;
  const std::string& label_name(int index) const;
  int num_labels() const;
  /// Tie-break order: extended hierarchy if present, else declaration order
  /// with the none tag last.
  std::vector<std::string> resolution_order() const;
};

/// Built-in scheme registry.
const TagSet& tag_set(SchemeId id);

/// Declarative scheme file (JSON: name, unit, tags, none_tag, hierarchy,
/// extended_hierarchy).
TagSet load_tag_set(const std::string& json_content);
std::string save_tag_set(const TagSet& scheme);

/// Collapses two raters' tags for one unit to a single tag via the scheme's
/// resolution ordering. Requires a scheme with a hierarchy.
std::string resolve_pair(const std::string& tag_a, const std::string& tag_b,
                         const TagSet& scheme);

/// Majority vote; ties broken by the scheme's resolution order.
std::string resolve_votes(const std::vector<std::string>& votes, const TagSet& scheme);

struct Violation {
  std::string kind;  // "unknown-tag", "overlap", "orphan-i"
  std::string message;
};

/// Structural checks: tags outside the inventory, overlapping spans at the
/// same unit, and BIO I-tags with no opener. Report-only.
std::vector<Violation> validate_annotation(const AnnotatedDocument& doc,
                                           const TagSet& scheme);

}  // namespace arganno
