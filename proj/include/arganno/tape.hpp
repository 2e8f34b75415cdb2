#pragma once

#include <functional>
#include <vector>

#include "arganno/tensor.hpp"

namespace arganno {

// Target value marking a position as excluded from the loss.
constexpr int kIgnoreTarget = -1;

struct LossReport {
  double total_loss = 0.0;
  long contributing_positions = 0;
};

/// Reverse-mode autodiff over Tensor values. Nodes are appended in forward
/// order; backward() replays them in reverse. Leaves created from plain
/// values are cut points: cached segment memory re-enters the graph as a
/// fresh leaf, which is exactly the stop-gradient semantics.
class Tape {
 public:
  using Id = int;

  Id leaf(Tensor value);

  Id matmul(Id a, Id b);     // value(a) · value(b)
  Id matmul_nt(Id a, Id b);  // value(a) · value(b)^T
  Id add(Id a, Id b);
  Id add_row(Id a, Id row);  // broadcast [1×n] over rows of a
  Id scale(Id a, double s);
  Id concat_rows(const std::vector<Id>& parts);
  Id slice_cols(Id a, int col_begin, int col_end);
  Id concat_cols(const std::vector<Id>& parts);
  Id layer_norm(Id x, Id gain, Id bias);  // per-row, eps 1e-5
  Id softmax_rows(Id x);
  Id gelu(Id x);
  Id lookup_rows(Id table, std::vector<int> ids);
  Id select_rows(Id x, std::vector<int> positions);
  /// Relative-position gather: b is [T × (S+T-1)] scores per offset,
  /// out[i][j] = b[i][i + mem_len - j + T - 1] for keys j in [0, S).
  Id rel_gather(Id b, int mem_len);
  /// Mean NLL over positions whose target is not kIgnoreTarget. Scalar node.
  Id masked_nll(Id scores, const std::vector<int>& targets, LossReport* report = nullptr);

  void backward(Id root);

  const Tensor& value(Id id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Tensor& grad(Id id) const { return nodes_[static_cast<size_t>(id)].grad; }
  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&)> back;  // empty for leaves
  };
  std::vector<Node> nodes_;

  Id push(Tensor value, std::function<void(Tape&)> back);
  Tensor& grad_ref(Id id) { return nodes_[static_cast<size_t>(id)].grad; }
};

/// Standalone masked cross-entropy (the same kernel the tape op uses):
/// mean NLL over non-ignored positions plus the gradient w.r.t. scores.
LossReport masked_cross_entropy(const Tensor& scores, const std::vector<int>& targets,
                                Tensor* grad_out = nullptr);

}  // namespace arganno
