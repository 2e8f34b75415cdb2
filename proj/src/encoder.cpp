#include "arganno/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "arganno/errors.hpp"
#include "arganno/rng.hpp"
#include "arganno/tokenizer.hpp"

namespace arganno {

void ModelConfig::validate() const {
  if (layers < 1) throw UsageError("model config: layers must be >= 1");
  if (heads < 1 || width % heads != 0)
    throw UsageError("model config: width must be divisible by heads");
  if (segment_len < 1) throw UsageError("model config: segment_len must be >= 1");
  if (mem_len < 0) throw UsageError("model config: mem_len must be >= 0");
  if (vocab_size < 1) throw UsageError("model config: vocab_size must be >= 1");
  if (num_labels < 1) throw UsageError("model config: num_labels must be >= 1");
}

namespace {

Tensor uniform_init(Rng& rng, int rows, int cols, double bound) {
  Tensor t(rows, cols);
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

Tensor ones_row(int cols) {
  Tensor t(1, cols);
  for (double& v : t.data) v = 1.0;
  return t;
}

Tensor tail_rows(const Tensor& t, int max_rows) {
  int keep = std::min(t.rows, max_rows);
  Tensor out(keep, t.cols);
  for (int i = 0; i < keep; ++i)
    for (int j = 0; j < t.cols; ++j) out.at(i, j) = t.at(t.rows - keep + i, j);
  return out;
}

}  // namespace

Params Params::init(const ModelConfig& config, unsigned long long seed) {
  config.validate();
  Rng rng(seed);
  const int d = config.width;
  const double bd = 1.0 / std::sqrt(static_cast<double>(d));
  const double bff = 1.0 / std::sqrt(static_cast<double>(config.ff_width()));

  Params p;
  p.config = config;
  p.token_embedding = uniform_init(rng, config.vocab_size, d, bd);
  for (int l = 0; l < config.layers; ++l) {
    LayerParams lp;
    lp.att_gain = ones_row(d);
    lp.att_bias = Tensor(1, d);
    lp.wq = uniform_init(rng, d, d, bd);
    lp.wk = uniform_init(rng, d, d, bd);
    lp.wv = uniform_init(rng, d, d, bd);
    lp.wo = uniform_init(rng, d, d, bd);
    lp.wkr = uniform_init(rng, d, d, bd);
    lp.u = Tensor(1, d);
    lp.v = Tensor(1, d);
    lp.ff_gain = ones_row(d);
    lp.ff_bias = Tensor(1, d);
    lp.ff_w1 = uniform_init(rng, d, config.ff_width(), bd);
    lp.ff_b1 = Tensor(1, config.ff_width());
    lp.ff_w2 = uniform_init(rng, config.ff_width(), d, bff);
    lp.ff_b2 = Tensor(1, d);
    p.layers.push_back(std::move(lp));
  }
  p.final_gain = ones_row(d);
  p.final_bias = Tensor(1, d);
  p.label_head = uniform_init(rng, d, config.num_labels, bd);
  p.seq_head = uniform_init(rng, d, config.num_labels, bd);
  return p;
}

Params Params::zeros_like(const Params& shape) {
  Params p;
  p.config = shape.config;
  p.token_embedding = Tensor(shape.token_embedding.rows, shape.token_embedding.cols);
  for (const LayerParams& src : shape.layers) {
    LayerParams lp;
    auto z = [](const Tensor& t) { return Tensor(t.rows, t.cols); };
    lp.att_gain = z(src.att_gain);
    lp.att_bias = z(src.att_bias);
    lp.wq = z(src.wq);
    lp.wk = z(src.wk);
    lp.wv = z(src.wv);
    lp.wo = z(src.wo);
    lp.wkr = z(src.wkr);
    lp.u = z(src.u);
    lp.v = z(src.v);
    lp.ff_gain = z(src.ff_gain);
    lp.ff_bias = z(src.ff_bias);
    lp.ff_w1 = z(src.ff_w1);
    lp.ff_b1 = z(src.ff_b1);
    lp.ff_w2 = z(src.ff_w2);
    lp.ff_b2 = z(src.ff_b2);
    p.layers.push_back(std::move(lp));
  }
  p.final_gain = Tensor(shape.final_gain.rows, shape.final_gain.cols);
  p.final_bias = Tensor(shape.final_bias.rows, shape.final_bias.cols);
  p.label_head = Tensor(shape.label_head.rows, shape.label_head.cols);
  p.seq_head = Tensor(shape.seq_head.rows, shape.seq_head.cols);
  return p;
}

template <typename P, typename T>
static std::vector<std::pair<std::string, T*>> entries_impl(P& p) {
  std::vector<std::pair<std::string, T*>> out;
  out.emplace_back("embedding", &p.token_embedding);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& lp = p.layers[l];
    std::string prefix = "layer" + std::to_string(l) + ".";
    out.emplace_back(prefix + "att_gain", &lp.att_gain);
    out.emplace_back(prefix + "att_bias", &lp.att_bias);
    out.emplace_back(prefix + "wq", &lp.wq);
    out.emplace_back(prefix + "wk", &lp.wk);
    out.emplace_back(prefix + "wv", &lp.wv);
    out.emplace_back(prefix + "wo", &lp.wo);
    out.emplace_back(prefix + "wkr", &lp.wkr);
    out.emplace_back(prefix + "u", &lp.u);
    out.emplace_back(prefix + "v", &lp.v);
    out.emplace_back(prefix + "ff_gain", &lp.ff_gain);
    out.emplace_back(prefix + "ff_bias", &lp.ff_bias);
    out.emplace_back(prefix + "ff_w1", &lp.ff_w1);
    out.emplace_back(prefix + "ff_b1", &lp.ff_b1);
    out.emplace_back(prefix + "ff_w2", &lp.ff_w2);
    out.emplace_back(prefix + "ff_b2", &lp.ff_b2);
  }
  out.emplace_back("final_gain", &p.final_gain);
  out.emplace_back("final_bias", &p.final_bias);
  out.emplace_back("label_head", &p.label_head);
  out.emplace_back("seq_head", &p.seq_head);
  return out;
}

std::vector<std::pair<std::string, Tensor*>> Params::entries() {
  return entries_impl<Params, Tensor>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> Params::entries() const {
  return entries_impl<const Params, const Tensor>(*this);
}

long Params::parameter_count() const {
  long n = 0;
  for (const auto& [name, t] : entries()) n += static_cast<long>(t->size());
  return n;
}

MemoryState MemoryState::empty(const ModelConfig& config) {
  MemoryState m;
  m.layers.assign(static_cast<size_t>(config.layers), Tensor(0, config.width));
  return m;
}

EncoderPass::EncoderPass(const Params& params) : params_(params) {
  params_.config.validate();
  for (const auto& [name, tensor] : params_.entries())
    param_nodes_.push_back(tape_.leaf(*tensor));
}

Tape::Id EncoderPass::forward_segment_node(const std::vector<int>& segment,
                                           MemoryState& memory, EncoderTrace* trace) {
  const ModelConfig& cfg = params_.config;
  const int t_len = static_cast<int>(segment.size());
  if (t_len == 0) throw UsageError("forward_segment: empty segment");
  if (t_len > cfg.segment_len)
    throw UsageError("forward_segment: segment length " + std::to_string(t_len) +
                     " exceeds L=" + std::to_string(cfg.segment_len));
  if (static_cast<int>(memory.layers.size()) != cfg.layers)
    throw NumericError("forward_segment: memory holds " +
                       std::to_string(memory.layers.size()) + " layers, model has " +
                       std::to_string(cfg.layers));
  const int d = cfg.width;
  const int dh = cfg.head_width();
  const double att_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  // Parameter node lookup by entries() order: embedding, per-layer block, tail.
  constexpr int kPerLayer = 15;
  auto layer_node = [&](int layer, int offset) {
    return param_nodes_[static_cast<size_t>(1 + layer * kPerLayer + offset)];
  };
  const Tape::Id embedding_node = param_nodes_[0];
  const size_t tail = param_nodes_.size();
  const Tape::Id final_gain_node = param_nodes_[tail - 4];
  const Tape::Id final_bias_node = param_nodes_[tail - 3];

  Tape::Id x = tape_.lookup_rows(embedding_node, segment);

  MemoryState new_memory;
  for (int l = 0; l < cfg.layers; ++l) {
    const Tensor& mem_value = memory.layers[static_cast<size_t>(l)];
    if (mem_value.cols != d) throw NumericError("memory width mismatch at layer " + std::to_string(l));
    const int m_len = mem_value.rows;
    const int s_len = m_len + t_len;

    // Cache this layer's pre-update hidden state (detached) for the next segment.
    {
      Tensor grown(m_len + t_len, d);
      for (int i = 0; i < m_len; ++i)
        for (int j = 0; j < d; ++j) grown.at(i, j) = mem_value.at(i, j);
      const Tensor& cur = tape_.value(x);
      for (int i = 0; i < t_len; ++i)
        for (int j = 0; j < d; ++j) grown.at(m_len + i, j) = cur.at(i, j);
      new_memory.layers.push_back(tail_rows(grown, cfg.mem_len));
    }

    const Tape::Id att_gain = layer_node(l, 0), att_bias = layer_node(l, 1);
    const Tape::Id wq = layer_node(l, 2), wk = layer_node(l, 3), wv = layer_node(l, 4),
                   wo = layer_node(l, 5), wkr = layer_node(l, 6);
    const Tape::Id u = layer_node(l, 7), v = layer_node(l, 8);
    const Tape::Id ff_gain = layer_node(l, 9), ff_bias = layer_node(l, 10);
    const Tape::Id ff_w1 = layer_node(l, 11), ff_b1 = layer_node(l, 12);
    const Tape::Id ff_w2 = layer_node(l, 13), ff_b2 = layer_node(l, 14);

    // Keys/values read the stop-gradient memory concatenated with the current
    // hidden; queries read the current hidden only.
    Tape::Id cat = x;
    if (m_len > 0) {
      Tape::Id mem_leaf = tape_.leaf(mem_value);
      cat = tape_.concat_rows({mem_leaf, x});
    }
    Tape::Id normed = tape_.layer_norm(cat, att_gain, att_bias);
    Tape::Id normed_cur = normed;
    if (m_len > 0) {
      std::vector<int> current_rows(static_cast<size_t>(t_len));
      for (int i = 0; i < t_len; ++i) current_rows[static_cast<size_t>(i)] = m_len + i;
      normed_cur = tape_.select_rows(normed, current_rows);
    }
    Tape::Id q = tape_.matmul(normed_cur, wq);
    Tape::Id k = tape_.matmul(normed, wk);
    Tape::Id val = tape_.matmul(normed, wv);

    // Relative offsets run from -(T-1) (key after query) to S-1 (oldest key).
    const int offsets = s_len + t_len - 1;
    Tape::Id rel = tape_.leaf(sinusoid_offsets(-(t_len - 1), offsets, d));
    Tape::Id pos_keys = tape_.matmul(rel, wkr);

    Tape::Id q_content = tape_.add_row(q, u);
    Tape::Id q_position = tape_.add_row(q, v);

    if (trace) {
      trace->queries.push_back(tape_.value(q));
      trace->scores.emplace_back();
    }

    std::vector<Tape::Id> head_outputs;
    for (int h = 0; h < cfg.heads; ++h) {
      const int c0 = h * dh, c1 = (h + 1) * dh;
      Tape::Id content = tape_.matmul_nt(tape_.slice_cols(q_content, c0, c1),
                                         tape_.slice_cols(k, c0, c1));
      Tape::Id position = tape_.rel_gather(
          tape_.matmul_nt(tape_.slice_cols(q_position, c0, c1),
                          tape_.slice_cols(pos_keys, c0, c1)),
          m_len);
      Tape::Id scores = tape_.scale(tape_.add(content, position), att_scale);
      if (trace) trace->scores.back().push_back(tape_.value(scores));
      Tape::Id probs = tape_.softmax_rows(scores);
      head_outputs.push_back(tape_.matmul(probs, tape_.slice_cols(val, c0, c1)));
    }
    Tape::Id ctx = cfg.heads == 1 ? head_outputs[0] : tape_.concat_cols(head_outputs);
    x = tape_.add(x, tape_.matmul(ctx, wo));

    Tape::Id ff_normed = tape_.layer_norm(x, ff_gain, ff_bias);
    Tape::Id ff_hidden = tape_.gelu(tape_.add_row(tape_.matmul(ff_normed, ff_w1), ff_b1));
    x = tape_.add(x, tape_.add_row(tape_.matmul(ff_hidden, ff_w2), ff_b2));
  }

  memory = std::move(new_memory);
  return tape_.layer_norm(x, final_gain_node, final_bias_node);
}

Tape::Id EncoderPass::stream_document_node(const std::vector<int>& tokens,
                                           EncoderTrace* trace) {
  const ModelConfig& cfg = params_.config;
  if (tokens.empty()) return tape_.leaf(Tensor(0, cfg.width));
  MemoryState memory = MemoryState::empty(cfg);
  std::vector<Tape::Id> parts;
  for (size_t start = 0; start < tokens.size(); start += static_cast<size_t>(cfg.segment_len)) {
    size_t end = std::min(tokens.size(), start + static_cast<size_t>(cfg.segment_len));
    std::vector<int> segment(tokens.begin() + static_cast<long>(start),
                             tokens.begin() + static_cast<long>(end));
    parts.push_back(forward_segment_node(segment, memory, trace));
  }
  return parts.size() == 1 ? parts[0] : tape_.concat_rows(parts);
}

Tape::Id EncoderPass::label_scores_node(Tape::Id hidden, std::vector<int> positions) {
  const Tape::Id label_head = param_nodes_[param_nodes_.size() - 2];
  return tape_.matmul(tape_.select_rows(hidden, std::move(positions)), label_head);
}

Tape::Id EncoderPass::sequence_scores_node(Tape::Id hidden, int cls_position) {
  const Tape::Id seq_head = param_nodes_.back();
  return tape_.matmul(tape_.select_rows(hidden, {cls_position}), seq_head);
}

void EncoderPass::add_param_grads(Params& grads) const {
  auto slots = grads.entries();
  if (slots.size() != param_nodes_.size())
    throw NumericError("gradient accumulator shape mismatch");
  for (size_t i = 0; i < slots.size(); ++i) {
    const Tensor& g = tape_.grad(param_nodes_[i]);
    if (g.size() == 0) continue;  // backward not run or unreachable
    if (!all_finite(g))
      throw NumericError("non-finite gradient in " + slots[i].first);
    add_inplace(*slots[i].second, g);
  }
}

std::pair<Tensor, MemoryState> forward_segment(const Params& params,
                                               const std::vector<int>& segment,
                                               const MemoryState& memory,
                                               EncoderTrace* trace) {
  EncoderPass pass(params);
  MemoryState mem = memory;
  Tape::Id out = pass.forward_segment_node(segment, mem, trace);
  return {pass.tape().value(out), std::move(mem)};
}

Tensor stream_document(const Params& params, const std::vector<int>& tokens) {
  EncoderPass pass(params);
  return pass.tape().value(pass.stream_document_node(tokens));
}

Tensor classify_positions(const Params& params, const std::vector<int>& segment,
                          const MemoryState& memory, const std::vector<int>& positions) {
  for (int p : positions) {
    if (p < 0 || p >= static_cast<int>(segment.size()))
      throw UsageError("classify_positions: position " + std::to_string(p) +
                       " outside segment of length " + std::to_string(segment.size()));
  }
  if (positions.empty()) return Tensor(0, params.config.num_labels);
  EncoderPass pass(params);
  MemoryState mem = memory;
  Tape::Id hidden = pass.forward_segment_node(segment, mem);
  Tape::Id scores = pass.label_scores_node(hidden, positions);
  return pass.tape().value(scores);
}

Tensor classify_sequence(const Params& params, const std::vector<int>& tokens) {
  int cls_pos = -1;
  for (size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == Vocab::cls_id) cls_pos = static_cast<int>(i);
  if (cls_pos < 0) throw UsageError("classify_sequence: input has no class token");
  EncoderPass pass(params);
  Tape::Id hidden = pass.stream_document_node(tokens);
  Tape::Id scores = pass.sequence_scores_node(hidden, cls_pos);
  return pass.tape().value(scores);
}

}  // namespace arganno
