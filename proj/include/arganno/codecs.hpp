#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arganno/document.hpp"
#include "arganno/schemes.hpp"
#include "arganno/tokenizer.hpp"

namespace arganno {

enum class Task {
  arrow_sentence,
  persuade_word,
  aae_bio,
  aae_component,
  aae_relation,
  aae_stance
};

std::string task_to_string(Task task);
Task task_from_string(const std::string& name);
SchemeId task_scheme(Task task);

/// Model input/target pair. Targets use kIgnoreTarget (-1) everywhere except
/// the labeled positions, which carry label indices into the task's scheme.
struct EncodedExample {
  Task task = Task::arrow_sentence;
  std::vector<int> input_ids;
  std::vector<int> target_ids;
  std::vector<int> labeled_positions;
  std::vector<int> block_ids;  // component index per labeled position (aae_component)
};

/// One mask token per sentence, a separator between paragraphs, trailing
/// separator+class tokens. The mask's target is the sentence tag (explicit
/// None when untagged); every other position is ignored.
EncodedExample encode_arrow(const AnnotatedDocument& doc, const Vocab& vocab);

/// Word-level encoding: the first subword of each word carries the word's tag
/// (None when untagged); other subwords and separators are ignored.
EncodedExample encode_persuade(const AnnotatedDocument& doc, const Vocab& vocab);

/// B/I/O word labels projected from char-range component spans, then
/// first-subword alignment as in encode_persuade.
EncodedExample encode_aae_bio(const AnnotatedDocument& doc, const Vocab& vocab,
                              std::vector<std::string>* warnings = nullptr);

/// Word-index ranges of maximal B/I runs; an orphan I opens a component and
/// logs a warning.
std::vector<TextRange> decode_bio(const std::vector<std::string>& word_labels,
                                  std::vector<std::string>* warnings = nullptr);

struct ComponentSpan {
  TextRange words;  // word-index range
  std::string tag;  // MC/Cl/Pr, empty when unknown (inference input)
};

/// Every first-subword inside a component carries the component's class;
/// O-region positions are ignored. block_ids records the owning component per
/// labeled position for majority decoding.
EncodedExample encode_aae_component(const AnnotatedDocument& doc,
                                    const std::vector<ComponentSpan>& components,
                                    const Vocab& vocab);

/// Majority vote per block over predicted labels at the labeled positions;
/// ties break by the scheme's declaration order (MC > Cl > Pr).
std::vector<std::string> decode_component_blocks(const EncodedExample& example,
                                                 const std::vector<int>& predicted_labels);

/// Paragraph text with source/target components wrapped in marker+separator
/// tokens, trailing class+separator. `label` is the scheme's label index or
/// kIgnoreTarget for inference inputs.
EncodedExample encode_aae_relation(const AnnotatedDocument& doc, int paragraph_index,
                                   const ComponentSpan& source, const ComponentSpan& target,
                                   const Vocab& vocab, int label);

/// Stance input for a linked premise pair (same paragraph) — identical layout
/// to encode_aae_relation — or for a Claim paired with every paragraph
/// containing a Major Claim. Returns nothing (with a warning) for a claim in
/// a document without Major Claims.
std::optional<EncodedExample> encode_aae_stance_pair(const AnnotatedDocument& doc,
                                                     int paragraph_index,
                                                     const ComponentSpan& source,
                                                     const ComponentSpan& target,
                                                     const Vocab& vocab, int label);
std::optional<EncodedExample> encode_aae_stance_claim(const AnnotatedDocument& doc,
                                                      const AnnotationSpan& claim,
                                                      const Vocab& vocab, int label,
                                                      std::vector<std::string>* warnings = nullptr);

struct RelationCandidate {
  int source_span = 0;  // indices into the document's char-range spans
  int target_span = 0;
  int paragraph = 0;
  bool linked = false;
  StanceLabel stance = StanceLabel::none;  // for linked pairs
};

/// All ordered pairs of components within one paragraph, joined against the
/// document's relations.
std::vector<RelationCandidate> enumerate_relation_candidates(const AnnotatedDocument& doc);

/// Dataset builders: one EncodedExample per document (token tasks) or per
/// candidate/stance item (sequence tasks).
std::vector<EncodedExample> build_task_dataset(const std::vector<AnnotatedDocument>& corpus,
                                               Task task, const Vocab& vocab,
                                               std::vector<std::string>* warnings = nullptr);

/// Writes predicted tags back into a copy of the document.
AnnotatedDocument doc_with_sentence_tags(const AnnotatedDocument& doc,
                                         const std::vector<std::string>& tags, Rater rater);
AnnotatedDocument doc_with_word_tags(const AnnotatedDocument& doc,
                                     const std::vector<std::string>& tags, Rater rater);

/// Three aligned rows (tokens / targets / positions) for debugging.
std::string render_example(const EncodedExample& example, const Vocab& vocab);

}  // namespace arganno
