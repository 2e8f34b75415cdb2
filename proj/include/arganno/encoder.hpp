#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arganno/tape.hpp"
#include "arganno/tensor.hpp"

namespace arganno {

struct ModelConfig {
  int layers = 2;       // N
  int heads = 2;        // h
  int width = 16;       // d (divisible by h)
  int segment_len = 8;  // L
  int vocab_size = 0;
  int num_labels = 2;
  int mem_len = 8;      // cached positions per layer

  int head_width() const { return width / heads; }
  int ff_width() const { return 4 * width; }
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

struct LayerParams {
  Tensor att_gain, att_bias;  // layer norm before attention
  Tensor wq, wk, wv, wo;      // [d×d]
  Tensor wkr;                 // position-key projection [d×d]
  Tensor u, v;                // content/position bias rows [1×d]
  Tensor ff_gain, ff_bias;    // layer norm before feed-forward
  Tensor ff_w1, ff_b1, ff_w2, ff_b2;
};

struct Params {
  ModelConfig config;
  Tensor token_embedding;  // [vocab×d]
  std::vector<LayerParams> layers;
  Tensor final_gain, final_bias;
  Tensor label_head;  // [d×num_labels]
  Tensor seq_head;    // [d×num_labels]

  /// Scaled-uniform init (bound 1/sqrt(fan_in)) from a fixed seed.
  static Params init(const ModelConfig& config, unsigned long long seed);
  static Params zeros_like(const Params& shape);

  std::vector<std::pair<std::string, Tensor*>> entries();
  std::vector<std::pair<std::string, const Tensor*>> entries() const;
  long parameter_count() const;
};

/// Per-layer caches of the previous segments' pre-update hidden states.
/// Entries never carry gradient: they re-enter each forward pass as plain
/// values (the stop-gradient in the recurrence).
struct MemoryState {
  std::vector<Tensor> layers;  // N entries, each [m×d] with m ≤ mem_len

  static MemoryState empty(const ModelConfig& config);
};

struct EncoderTrace {
  std::vector<Tensor> queries;              // per layer [T×d]
  std::vector<std::vector<Tensor>> scores;  // per layer, per head, pre-softmax [T×S]
};

/// Builds encoder forward graphs on an autodiff tape. Parameters are
/// registered once per pass; gradients are read back after backward().
class EncoderPass {
 public:
  explicit EncoderPass(const Params& params);

  Tape& tape() { return tape_; }

  /// One segment (|segment| ≤ L, non-empty). Consumes `memory` and replaces
  /// it with the updated caches; returns the final hidden states [T×d].
  Tape::Id forward_segment_node(const std::vector<int>& segment, MemoryState& memory,
                                EncoderTrace* trace = nullptr);

  /// Splits the input into consecutive ≤L segments with threaded memory and
  /// concatenates the outputs; empty input yields an empty node.
  Tape::Id stream_document_node(const std::vector<int>& tokens,
                                EncoderTrace* trace = nullptr);

  Tape::Id label_scores_node(Tape::Id hidden, std::vector<int> positions);
  Tape::Id sequence_scores_node(Tape::Id hidden, int cls_position);

  void backward(Tape::Id root) { tape_.backward(root); }
  /// Adds this pass's parameter gradients into a Params-shaped accumulator.
  void add_param_grads(Params& grads) const;

 private:
  const Params& params_;
  Tape tape_;
  std::vector<Tape::Id> param_nodes_;  // parallel to params_.entries()
};

// Value-level wrappers.
std::pair<Tensor, MemoryState> forward_segment(const Params& params,
                                               const std::vector<int>& segment,
                                               const MemoryState& memory,
                                               EncoderTrace* trace = nullptr);

Tensor stream_document(const Params& params, const std::vector<int>& tokens);

/// Label-head scores at the given positions of one segment.
Tensor classify_positions(const Params& params, const std::vector<int>& segment,
                          const MemoryState& memory, const std::vector<int>& positions);

/// Sequence-head scores at the class-token position (streams the whole input).
Tensor classify_sequence(const Params& params, const std::vector<int>& tokens);

}  // namespace arganno
