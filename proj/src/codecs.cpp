#include "arganno/codecs.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "arganno/errors.hpp"
#include "arganno/tape.hpp"

namespace arganno {

std::string task_to_string(Task task) {
  switch (task) {
    case Task::arrow_sentence: return "arrow_sentence";
    case Task::persuade_word: return "persuade_word";
    case Task::aae_bio: return "aae_bio";
    case Task::aae_component: return "aae_component";
    case Task::aae_relation: return "aae_relation";
    case Task::aae_stance: return "aae_stance";
  }
  return "arrow_sentence";
}

Task task_from_string(const std::string& name) {
  for (Task t : {Task::arrow_sentence, Task::persuade_word, Task::aae_bio,
                 Task::aae_component, Task::aae_relation, Task::aae_stance}) {
    if (task_to_string(t) == name) return t;
  }
  throw UsageError("unknown task: " + name);
}

SchemeId task_scheme(Task task) {
  switch (task) {
    case Task::arrow_sentence: return SchemeId::ARROW;
    case Task::persuade_word: return SchemeId::PERSUADE;
    case Task::aae_bio: return SchemeId::AAE_BIO;
    case Task::aae_component: return SchemeId::AAE_COMPONENT;
    case Task::aae_relation: return SchemeId::AAE_RELATION;
    case Task::aae_stance: return SchemeId::AAE_STANCE;
  }
  return SchemeId::ARROW;
}

namespace {

// Word-index range [begin, end) of the words inside a paragraph.
TextRange paragraph_word_range(const AnnotatedDocument& doc, const TextRange& paragraph) {
  int begin = -1, end = -1;
  for (size_t w = 0; w < doc.words.size(); ++w) {
    if (doc.words[w].begin >= paragraph.begin && doc.words[w].end <= paragraph.end) {
      if (begin < 0) begin = static_cast<int>(w);
      end = static_cast<int>(w) + 1;
    }
  }
  if (begin < 0) return {0, 0};
  return {begin, end};
}

void append_ignored(EncodedExample& ex, int token) {
  ex.input_ids.push_back(token);
  ex.target_ids.push_back(kIgnoreTarget);
}

// Appends one word's subwords. The first subword is a labeled position when
// it carries a target or belongs to a block (inference component inputs have
// a block but no target yet).
void append_word(EncodedExample& ex, const std::string& word, const Vocab& vocab,
                 int label, int block_id = -1) {
  TokenizedText tt = encode_words({word}, vocab);
  for (size_t i = 0; i < tt.token_ids.size(); ++i) {
    ex.input_ids.push_back(tt.token_ids[i]);
    bool labeled_slot = i == 0 && (label != kIgnoreTarget || block_id >= 0);
    if (labeled_slot) {
      ex.target_ids.push_back(label);
      ex.labeled_positions.push_back(static_cast<int>(ex.input_ids.size()) - 1);
      if (block_id >= 0) ex.block_ids.push_back(block_id);
    } else {
      ex.target_ids.push_back(kIgnoreTarget);
    }
  }
}

int colon_token(const Vocab& vocab) {
  int id = vocab.piece_id(":");
  return id >= 0 ? id : Vocab::unk_id;
}

std::vector<std::string> sentence_tags_of(const AnnotatedDocument& doc,
                                          const std::string& none_tag) {
  std::vector<std::string> tags(doc.sentences.size(), none_tag);
  for (const AnnotationSpan& s : doc.spans) {
    if (s.unit != SpanUnit::sentence) continue;
    for (int k = s.range.begin; k < s.range.end && k < static_cast<int>(tags.size()); ++k)
      tags[static_cast<size_t>(k)] = s.tag;
  }
  return tags;
}

std::vector<std::string> word_tags_of(const AnnotatedDocument& doc,
                                      const std::string& none_tag) {
  std::vector<std::string> tags(doc.words.size(), none_tag);
  for (const AnnotationSpan& s : doc.spans) {
    if (s.unit != SpanUnit::word_range) continue;
    for (int w = s.range.begin; w < s.range.end && w < static_cast<int>(tags.size()); ++w)
      tags[static_cast<size_t>(w)] = s.tag;
  }
  return tags;
}

}  // namespace

EncodedExample encode_arrow(const AnnotatedDocument& doc, const Vocab& vocab) {
  const TagSet& scheme = tag_set(SchemeId::ARROW);
  EncodedExample ex;
  ex.task = Task::arrow_sentence;
  auto tags = sentence_tags_of(doc, *scheme.none_tag);

  for (size_t p = 0; p < doc.paragraphs.size(); ++p) {
    const TextRange& para = doc.paragraphs[p];
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      const TextRange& sent = doc.sentences[s];
      if (sent.begin < para.begin || sent.end > para.end) continue;
      ex.input_ids.push_back(Vocab::mask_id);
      ex.target_ids.push_back(scheme.label_index(tags[s]));
      ex.labeled_positions.push_back(static_cast<int>(ex.input_ids.size()) - 1);
      for (size_t w = 0; w < doc.words.size(); ++w) {
        if (doc.words[w].begin >= sent.begin && doc.words[w].end <= sent.end) {
          TokenizedText tt = encode_words({std::string(doc.slice(doc.words[w]))}, vocab);
          for (int id : tt.token_ids) append_ignored(ex, id);
        }
      }
    }
    if (p + 1 < doc.paragraphs.size()) append_ignored(ex, Vocab::sep_id);
  }
  append_ignored(ex, Vocab::sep_id);
  append_ignored(ex, Vocab::cls_id);
  return ex;
}

namespace {

// Shared walk for word-labeled tasks: subwords with per-word labels, a
// separator between paragraphs, trailing separator+class tokens.
EncodedExample encode_word_task(const AnnotatedDocument& doc, const Vocab& vocab,
                                Task task, const std::vector<int>& word_labels,
                                const std::vector<int>* word_blocks = nullptr) {
  EncodedExample ex;
  ex.task = task;
  for (size_t p = 0; p < doc.paragraphs.size(); ++p) {
    TextRange wr = paragraph_word_range(doc, doc.paragraphs[p]);
    for (int w = wr.begin; w < wr.end; ++w) {
      int block = word_blocks ? (*word_blocks)[static_cast<size_t>(w)] : -1;
      append_word(ex, std::string(doc.slice(doc.words[static_cast<size_t>(w)])), vocab,
                  word_labels[static_cast<size_t>(w)], block);
    }
    if (p + 1 < doc.paragraphs.size()) append_ignored(ex, Vocab::sep_id);
  }
  append_ignored(ex, Vocab::sep_id);
  append_ignored(ex, Vocab::cls_id);
  return ex;
}

}  // namespace

EncodedExample encode_persuade(const AnnotatedDocument& doc, const Vocab& vocab) {
  const TagSet& scheme = tag_set(SchemeId::PERSUADE);
  auto tags = word_tags_of(doc, *scheme.none_tag);
  std::vector<int> labels(tags.size());
  for (size_t w = 0; w < tags.size(); ++w) labels[w] = scheme.label_index(tags[w]);
  return encode_word_task(doc, vocab, Task::persuade_word, labels);
}

EncodedExample encode_aae_bio(const AnnotatedDocument& doc, const Vocab& vocab,
                              std::vector<std::string>* warnings) {
  const TagSet& scheme = tag_set(SchemeId::AAE_BIO);
  std::vector<std::string> bio(doc.words.size(), "O");
  {
    // char spans -> word B/I/O via majority character overlap
    std::vector<AnnotationSpan> spans;
    for (const AnnotationSpan& s : doc.spans)
      if (s.unit == SpanUnit::char_range) spans.push_back(s);
    std::stable_sort(spans.begin(), spans.end(),
                     [](const AnnotationSpan& a, const AnnotationSpan& b) {
                       return a.range.begin < b.range.begin;
                     });
    for (const AnnotationSpan& s : spans) {
      TextRange wr = project_char_span_to_words(doc, s.range, warnings);
      for (int w = wr.begin; w < wr.end; ++w)
        bio[static_cast<size_t>(w)] = (w == wr.begin) ? "B" : "I";
    }
  }
  std::vector<int> labels(bio.size());
  for (size_t w = 0; w < bio.size(); ++w) labels[w] = scheme.label_index(bio[w]);
  return encode_word_task(doc, vocab, Task::aae_bio, labels);
}

std::vector<TextRange> decode_bio(const std::vector<std::string>& word_labels,
                                  std::vector<std::string>* warnings) {
  std::vector<TextRange> out;
  int open = -1;
  for (size_t w = 0; w < word_labels.size(); ++w) {
    const std::string& l = word_labels[w];
    if (l == "B") {
      if (open >= 0) out.push_back({open, static_cast<int>(w)});
      open = static_cast<int>(w);
    } else if (l == "I") {
      if (open < 0) {
        open = static_cast<int>(w);
        if (warnings)
          warnings->push_back("orphan I at word " + std::to_string(w) +
                              " starts a component");
      }
    } else {
      if (open >= 0) out.push_back({open, static_cast<int>(w)});
      open = -1;
    }
  }
  if (open >= 0) out.push_back({open, static_cast<int>(word_labels.size())});
  return out;
}

EncodedExample encode_aae_component(const AnnotatedDocument& doc,
                                    const std::vector<ComponentSpan>& components,
                                    const Vocab& vocab) {
  const TagSet& scheme = tag_set(SchemeId::AAE_COMPONENT);
  std::vector<int> labels(doc.words.size(), kIgnoreTarget);
  std::vector<int> blocks(doc.words.size(), -1);
  for (size_t c = 0; c < components.size(); ++c) {
    const ComponentSpan& comp = components[c];
    for (int w = comp.words.begin; w < comp.words.end; ++w) {
      if (w < 0 || w >= static_cast<int>(doc.words.size()))
        throw UsageError("component word index " + std::to_string(w) + " out of range");
      labels[static_cast<size_t>(w)] =
          comp.tag.empty() ? kIgnoreTarget : scheme.label_index(comp.tag);
      blocks[static_cast<size_t>(w)] = static_cast<int>(c);
    }
  }
  return encode_word_task(doc, vocab, Task::aae_component, labels, &blocks);
}

std::vector<std::string> decode_component_blocks(const EncodedExample& example,
                                                 const std::vector<int>& predicted_labels) {
  if (predicted_labels.size() != example.labeled_positions.size())
    throw UsageError("decode_component_blocks: prediction count mismatch");
  const TagSet& scheme = tag_set(SchemeId::AAE_COMPONENT);
  int max_block = -1;
  for (int b : example.block_ids) max_block = std::max(max_block, b);
  std::vector<std::vector<std::string>> votes(static_cast<size_t>(max_block + 1));
  for (size_t i = 0; i < predicted_labels.size(); ++i) {
    int block = i < example.block_ids.size() ? example.block_ids[i] : -1;
    if (block < 0) continue;
    votes[static_cast<size_t>(block)].push_back(scheme.label_name(predicted_labels[i]));
  }
  std::vector<std::string> out;
  for (const auto& v : votes)
    out.push_back(v.empty() ? std::string() : resolve_votes(v, scheme));
  return out;
}

namespace {

struct Marker {
  TextRange words;
  bool is_source;
};

// Paragraph tokens with <sep><Source>:/<Target>: ... <sep> wrapping around
// marked components.
void append_marked_paragraph(EncodedExample& ex, const AnnotatedDocument& doc,
                             int paragraph_index, std::vector<Marker> markers,
                             const Vocab& vocab) {
  const TextRange wr = paragraph_word_range(doc, doc.paragraphs[static_cast<size_t>(paragraph_index)]);
  std::sort(markers.begin(), markers.end(),
            [](const Marker& a, const Marker& b) { return a.words.begin < b.words.begin; });
  for (size_t i = 1; i < markers.size(); ++i) {
    if (markers[i].words.begin < markers[i - 1].words.end)
      throw UsageError("marked components overlap");
  }
  size_t next = 0;
  int open_end = -1;
  for (int w = wr.begin; w < wr.end; ++w) {
    if (open_end >= 0 && w == open_end) {
      append_ignored(ex, Vocab::sep_id);
      open_end = -1;
    }
    if (next < markers.size() && w == markers[next].words.begin) {
      append_ignored(ex, Vocab::sep_id);
      append_ignored(ex, markers[next].is_source ? Vocab::source_id : Vocab::target_id);
      append_ignored(ex, colon_token(vocab));
      open_end = markers[next].words.end;
      ++next;
    }
    append_word(ex, std::string(doc.slice(doc.words[static_cast<size_t>(w)])), vocab,
                kIgnoreTarget);
  }
  if (open_end >= 0) append_ignored(ex, Vocab::sep_id);
}

EncodedExample finish_sequence_example(EncodedExample ex, int label) {
  ex.input_ids.push_back(Vocab::cls_id);
  ex.target_ids.push_back(label);
  if (label != kIgnoreTarget)
    ex.labeled_positions.push_back(static_cast<int>(ex.input_ids.size()) - 1);
  append_ignored(ex, Vocab::sep_id);
  return ex;
}

}  // namespace

EncodedExample encode_aae_relation(const AnnotatedDocument& doc, int paragraph_index,
                                   const ComponentSpan& source, const ComponentSpan& target,
                                   const Vocab& vocab, int label) {
  if (paragraph_index < 0 || paragraph_index >= static_cast<int>(doc.paragraphs.size()))
    throw UsageError("encode_aae_relation: paragraph index out of range");
  if (source.words.begin < target.words.end && target.words.begin < source.words.end)
    throw UsageError("encode_aae_relation: source and target overlap");
  EncodedExample ex;
  ex.task = Task::aae_relation;
  append_marked_paragraph(ex, doc, paragraph_index,
                          {{source.words, true}, {target.words, false}}, vocab);
  return finish_sequence_example(std::move(ex), label);
}

std::optional<EncodedExample> encode_aae_stance_pair(const AnnotatedDocument& doc,
                                                     int paragraph_index,
                                                     const ComponentSpan& source,
                                                     const ComponentSpan& target,
                                                     const Vocab& vocab, int label) {
  EncodedExample ex =
      encode_aae_relation(doc, paragraph_index, source, target, vocab, label);
  ex.task = Task::aae_stance;
  return ex;
}

std::optional<EncodedExample> encode_aae_stance_claim(const AnnotatedDocument& doc,
                                                      const AnnotationSpan& claim,
                                                      const Vocab& vocab, int label,
                                                      std::vector<std::string>* warnings) {
  // paragraph of the claim
  int claim_para = -1;
  for (size_t p = 0; p < doc.paragraphs.size(); ++p)
    if (doc.paragraphs[p].contains(claim.range.begin)) claim_para = static_cast<int>(p);
  if (claim_para < 0) throw UsageError("claim span outside all paragraphs");

  // paragraphs containing a Major Claim, with their MC spans
  std::map<int, std::vector<Marker>> markers;  // paragraph -> markers
  markers[claim_para].push_back({project_char_span_to_words(doc, claim.range), true});
  bool any_mc = false;
  for (const AnnotationSpan& s : doc.spans) {
    if (s.tag != "MC" || s.unit != SpanUnit::char_range) continue;
    for (size_t p = 0; p < doc.paragraphs.size(); ++p) {
      if (doc.paragraphs[p].contains(s.range.begin)) {
        markers[static_cast<int>(p)].push_back(
            {project_char_span_to_words(doc, s.range), false});
        any_mc = true;
      }
    }
  }
  if (!any_mc) {
    if (warnings)
      warnings->push_back("claim " + claim.span_id + " skipped: document has no Major Claim");
    return std::nullopt;
  }

  EncodedExample ex;
  ex.task = Task::aae_stance;
  bool first = true;
  for (auto& [para, marks] : markers) {
    if (!first) append_ignored(ex, Vocab::sep_id);
    first = false;
    append_marked_paragraph(ex, doc, para, marks, vocab);
  }
  return finish_sequence_example(std::move(ex), label);
}

std::vector<RelationCandidate> enumerate_relation_candidates(const AnnotatedDocument& doc) {
  std::vector<int> component_spans;
  for (size_t i = 0; i < doc.spans.size(); ++i)
    if (doc.spans[i].unit == SpanUnit::char_range) component_spans.push_back(static_cast<int>(i));

  std::vector<RelationCandidate> out;
  for (size_t p = 0; p < doc.paragraphs.size(); ++p) {
    std::vector<int> here;
    for (int idx : component_spans)
      if (doc.paragraphs[p].contains(doc.spans[static_cast<size_t>(idx)].range.begin))
        here.push_back(idx);
    for (int a : here) {
      for (int b : here) {
        if (a == b) continue;
        RelationCandidate cand;
        cand.source_span = a;
        cand.target_span = b;
        cand.paragraph = static_cast<int>(p);
        for (const ArgRelation& r : doc.relations) {
          if (r.linked && r.source == doc.spans[static_cast<size_t>(a)].span_id &&
              r.target == doc.spans[static_cast<size_t>(b)].span_id) {
            cand.linked = true;
            cand.stance = r.stance;
          }
        }
        out.push_back(cand);
      }
    }
  }
  return out;
}

std::vector<EncodedExample> build_task_dataset(const std::vector<AnnotatedDocument>& corpus,
                                               Task task, const Vocab& vocab,
                                               std::vector<std::string>* warnings) {
  std::vector<EncodedExample> out;
  const TagSet& rel_scheme = tag_set(SchemeId::AAE_RELATION);
  const TagSet& stance_scheme = tag_set(SchemeId::AAE_STANCE);
  for (const AnnotatedDocument& doc : corpus) {
    switch (task) {
      case Task::arrow_sentence:
        out.push_back(encode_arrow(doc, vocab));
        break;
      case Task::persuade_word:
        out.push_back(encode_persuade(doc, vocab));
        break;
      case Task::aae_bio:
        out.push_back(encode_aae_bio(doc, vocab, warnings));
        break;
      case Task::aae_component: {
        std::vector<ComponentSpan> comps;
        for (const AnnotationSpan& s : doc.spans) {
          if (s.unit != SpanUnit::char_range) continue;
          comps.push_back({project_char_span_to_words(doc, s.range, warnings), s.tag});
        }
        out.push_back(encode_aae_component(doc, comps, vocab));
        break;
      }
      case Task::aae_relation: {
        for (const RelationCandidate& cand : enumerate_relation_candidates(doc)) {
          const AnnotationSpan& s = doc.spans[static_cast<size_t>(cand.source_span)];
          const AnnotationSpan& t = doc.spans[static_cast<size_t>(cand.target_span)];
          ComponentSpan src{project_char_span_to_words(doc, s.range), s.tag};
          ComponentSpan tgt{project_char_span_to_words(doc, t.range), t.tag};
          int label = rel_scheme.label_index(cand.linked ? "linked" : "not-linked");
          out.push_back(encode_aae_relation(doc, cand.paragraph, src, tgt, vocab, label));
        }
        break;
      }
      case Task::aae_stance: {
        std::map<std::string, const AnnotationSpan*> by_id;
        for (const AnnotationSpan& s : doc.spans) by_id[s.span_id] = &s;
        for (const ArgRelation& r : doc.relations) {
          if (r.stance == StanceLabel::none) continue;
          int label = stance_scheme.label_index(
              r.stance == StanceLabel::support ? "support" : "attack");
          if (r.linked) {
            auto si = by_id.find(r.source);
            auto ti = by_id.find(r.target);
            if (si == by_id.end() || ti == by_id.end()) {
              if (warnings) warnings->push_back("relation references unknown span");
              continue;
            }
            int para = -1;
            for (size_t p = 0; p < doc.paragraphs.size(); ++p)
              if (doc.paragraphs[p].contains(si->second->range.begin) &&
                  doc.paragraphs[p].contains(ti->second->range.begin))
                para = static_cast<int>(p);
            if (para < 0) {
              if (warnings)
                warnings->push_back("linked pair " + r.source + "->" + r.target +
                                    " skipped: spans not in one paragraph");
              continue;
            }
            ComponentSpan src{project_char_span_to_words(doc, si->second->range), ""};
            ComponentSpan tgt{project_char_span_to_words(doc, ti->second->range), ""};
            auto ex = encode_aae_stance_pair(doc, para, src, tgt, vocab, label);
            if (ex) out.push_back(std::move(*ex));
          } else {
            auto si = by_id.find(r.source);
            if (si == by_id.end()) {
              if (warnings) warnings->push_back("stance references unknown span");
              continue;
            }
            auto ex = encode_aae_stance_claim(doc, *si->second, vocab, label, warnings);
            if (ex) out.push_back(std::move(*ex));
          }
        }
        break;
      }
    }
  }
  return out;
}

AnnotatedDocument doc_with_sentence_tags(const AnnotatedDocument& doc,
                                         const std::vector<std::string>& tags, Rater rater) {
  if (tags.size() != doc.sentences.size())
    throw UsageError("sentence tag count " + std::to_string(tags.size()) +
                     " does not match sentence count " + std::to_string(doc.sentences.size()));
  AnnotatedDocument out = doc;
  out.spans.clear();
  out.relations.clear();
  for (size_t s = 0; s < tags.size(); ++s) {
    if (tags[s] == "None" || tags[s].empty()) continue;
    out.spans.push_back({"s" + std::to_string(s), tags[s], SpanUnit::sentence,
                         {static_cast<int>(s), static_cast<int>(s) + 1}, rater, {}});
  }
  return out;
}

AnnotatedDocument doc_with_word_tags(const AnnotatedDocument& doc,
                                     const std::vector<std::string>& tags, Rater rater) {
  if (tags.size() != doc.words.size())
    throw UsageError("word tag count " + std::to_string(tags.size()) +
                     " does not match word count " + std::to_string(doc.words.size()));
  AnnotatedDocument out = doc;
  out.spans.clear();
  out.relations.clear();
  int span_no = 0;
  size_t w = 0;
  while (w < tags.size()) {
    if (tags[w] == "None" || tags[w].empty()) {
      ++w;
      continue;
    }
    size_t end = w + 1;
    while (end < tags.size() && tags[end] == tags[w]) ++end;
    out.spans.push_back({"w" + std::to_string(span_no++), tags[w], SpanUnit::word_range,
                         {static_cast<int>(w), static_cast<int>(end)}, rater, {}});
    w = end;
  }
  return out;
}

std::string render_example(const EncodedExample& example, const Vocab& vocab) {
  const TagSet& scheme = tag_set(task_scheme(example.task));
  std::ostringstream tokens, targets, positions;
  for (size_t i = 0; i < example.input_ids.size(); ++i) {
    std::string tok = vocab.token_name(example.input_ids[i]);
    std::string tgt = example.target_ids[i] == kIgnoreTarget
                          ? "<->"
                          : scheme.label_name(example.target_ids[i]);
    std::string pos = std::to_string(i);
    size_t width = std::max({tok.size(), tgt.size(), pos.size()}) + 1;
    tokens << tok << std::string(width - tok.size(), ' ');
    targets << tgt << std::string(width - tgt.size(), ' ');
    positions << pos << std::string(width - pos.size(), ' ');
  }
  return tokens.str() + "\n" + targets.str() + "\n" + positions.str() + "\n";
}

}  // namespace arganno
