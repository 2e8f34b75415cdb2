#include "arganno/tape.hpp"

#include <cmath>

#include "arganno/errors.hpp"

namespace arganno {

namespace {

constexpr double kLayerNormEps = 1e-5;

Tensor softmax_rows_value(const Tensor& x) {
  Tensor y(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < x.cols; ++j) mx = std::max(mx, x.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < x.cols; ++j) {
      double e = std::exp(x.at(i, j) - mx);
      y.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < x.cols; ++j) y.at(i, j) /= sum;
  }
  return y;
}

}  // namespace

Tape::Id Tape::push(Tensor value, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(value), Tensor{}, std::move(back)});
  return static_cast<Id>(nodes_.size()) - 1;
}

Tape::Id Tape::leaf(Tensor value) { return push(std::move(value), {}); }

Tape::Id Tape::matmul(Id a, Id b) {
  Tensor out = arganno::matmul(value(a), value(b));
  Id id = push(std::move(out), [a, b, self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    add_inplace(t.grad_ref(a), arganno::matmul_nt(dout, t.value(b)));
    add_inplace(t.grad_ref(b), arganno::matmul_tn(t.value(a), dout));
  });
  return id;
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
  Tensor out = arganno::matmul_nt(value(a), value(b));
  Id id = push(std::move(out), [a, b, self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    add_inplace(t.grad_ref(a), arganno::matmul(dout, t.value(b)));
    add_inplace(t.grad_ref(b), arganno::matmul_tn(dout, t.value(a)));
  });
  return id;
}

Tape::Id Tape::add(Id a, Id b) {
  if (!value(a).same_shape(value(b))) throw NumericError("tape add shape mismatch");
  Tensor out = value(a);
  add_inplace(out, value(b));
  return push(std::move(out), [a, b, self = static_cast<Id>(nodes_.size())](Tape& t) {
    add_inplace(t.grad_ref(a), t.grad(self));
    add_inplace(t.grad_ref(b), t.grad(self));
  });
}

Tape::Id Tape::add_row(Id a, Id row) {
  const Tensor& r = value(row);
  if (r.rows != 1 || r.cols != value(a).cols)
    throw NumericError("tape add_row expects [1×cols] broadcast row");
  Tensor out = value(a);
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out.at(i, j) += r.at(0, j);
  return push(std::move(out), [a, row, self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    add_inplace(t.grad_ref(a), dout);
    Tensor& drow = t.grad_ref(row);
    for (int i = 0; i < dout.rows; ++i)
      for (int j = 0; j < dout.cols; ++j) drow.at(0, j) += dout.at(i, j);
  });
}

Tape::Id Tape::scale(Id a, double s) {
  Tensor out = value(a);
  scale_inplace(out, s);
  return push(std::move(out), [a, s, self = static_cast<Id>(nodes_.size())](Tape& t) {
    Tensor d = t.grad(self);
    scale_inplace(d, s);
    add_inplace(t.grad_ref(a), d);
  });
}

Tape::Id Tape::concat_rows(const std::vector<Id>& parts) {
  if (parts.empty()) throw NumericError("concat_rows: no parts");
  int cols = value(parts[0]).cols;
  int rows = 0;
  for (Id p : parts) {
    if (value(p).cols != cols) throw NumericError("concat_rows: column mismatch");
    rows += value(p).rows;
  }
  Tensor out(rows, cols);
  int r = 0;
  for (Id p : parts) {
    const Tensor& v = value(p);
    for (int i = 0; i < v.rows; ++i)
      for (int j = 0; j < cols; ++j) out.at(r + i, j) = v.at(i, j);
    r += v.rows;
  }
  return push(std::move(out), [parts, self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    int r = 0;
    for (Id p : parts) {
      Tensor& dp = t.grad_ref(p);
      for (int i = 0; i < dp.rows; ++i)
        for (int j = 0; j < dp.cols; ++j) dp.at(i, j) += dout.at(r + i, j);
      r += dp.rows;
    }
  });
}

Tape::Id Tape::slice_cols(Id a, int col_begin, int col_end) {
  const Tensor& v = value(a);
  if (col_begin < 0 || col_end > v.cols || col_begin >= col_end)
    throw NumericError("slice_cols out of range");
  Tensor out(v.rows, col_end - col_begin);
  for (int i = 0; i < v.rows; ++i)
    for (int j = col_begin; j < col_end; ++j) out.at(i, j - col_begin) = v.at(i, j);
  return push(std::move(out),
              [a, col_begin, self = static_cast<Id>(nodes_.size())](Tape& t) {
                const Tensor& dout = t.grad(self);
                Tensor& da = t.grad_ref(a);
                for (int i = 0; i < dout.rows; ++i)
                  for (int j = 0; j < dout.cols; ++j) da.at(i, col_begin + j) += dout.at(i, j);
              });
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
  if (parts.empty()) throw NumericError("concat_cols: no parts");
  int rows = value(parts[0]).rows;
  int cols = 0;
  for (Id p : parts) {
    if (value(p).rows != rows) throw NumericError("concat_cols: row mismatch");
    cols += value(p).cols;
  }
  Tensor out(rows, cols);
  int c = 0;
  for (Id p : parts) {
    const Tensor& v = value(p);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < v.cols; ++j) out.at(i, c + j) = v.at(i, j);
    c += v.cols;
  }
  return push(std::move(out), [parts, self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    int c = 0;
    for (Id p : parts) {
      Tensor& dp = t.grad_ref(p);
      for (int i = 0; i < dp.rows; ++i)
        for (int j = 0; j < dp.cols; ++j) dp.at(i, j) += dout.at(i, c + j);
      c += dp.cols;
    }
  });
}

Tape::Id Tape::layer_norm(Id x, Id gain, Id bias) {
  const Tensor& v = value(x);
  const Tensor& g = value(gain);
  const Tensor& b = value(bias);
  if (g.rows != 1 || g.cols != v.cols || b.rows != 1 || b.cols != v.cols)
    throw NumericError("layer_norm parameter shape mismatch");
  Tensor normalized(v.rows, v.cols);  // x-hat, captured for backward
  Tensor inv_std(v.rows, 1);
  Tensor out(v.rows, v.cols);
  for (int i = 0; i < v.rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < v.cols; ++j) mean += v.at(i, j);
    mean /= v.cols;
    double var = 0.0;
    for (int j = 0; j < v.cols; ++j) {
      double d = v.at(i, j) - mean;
      var += d * d;
    }
    var /= v.cols;
    double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    inv_std.at(i, 0) = inv;
    for (int j = 0; j < v.cols; ++j) {
      double nh = (v.at(i, j) - mean) * inv;
      normalized.at(i, j) = nh;
      out.at(i, j) = nh * g.at(0, j) + b.at(0, j);
    }
  }
  return push(std::move(out), [x, gain, bias, normalized = std::move(normalized),
                               inv_std = std::move(inv_std),
                               self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    const Tensor& g = t.value(gain);
    Tensor& dx = t.grad_ref(x);
    Tensor& dg = t.grad_ref(gain);
    Tensor& db = t.grad_ref(bias);
    const int n = dout.cols;
    for (int i = 0; i < dout.rows; ++i) {
      double sum_gy = 0.0, sum_gy_nh = 0.0;
      for (int j = 0; j < n; ++j) {
        double gy = dout.at(i, j) * g.at(0, j);
        sum_gy += gy;
        sum_gy_nh += gy * normalized.at(i, j);
        dg.at(0, j) += dout.at(i, j) * normalized.at(i, j);
        db.at(0, j) += dout.at(i, j);
      }
      double mean_gy = sum_gy / n;
      double mean_gy_nh = sum_gy_nh / n;
      for (int j = 0; j < n; ++j) {
        double gy = dout.at(i, j) * g.at(0, j);
        dx.at(i, j) += inv_std.at(i, 0) * (gy - mean_gy - normalized.at(i, j) * mean_gy_nh);
      }
    }
  });
}

Tape::Id Tape::softmax_rows(Id x) {
  Tensor y = softmax_rows_value(value(x));
  Tensor out = y;  // copied before the lambda capture moves y
  return push(std::move(out), [x, y = std::move(y), self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    Tensor& dx = t.grad_ref(x);
    for (int i = 0; i < y.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < y.cols; ++j) dot += dout.at(i, j) * y.at(i, j);
      for (int j = 0; j < y.cols; ++j)
        dx.at(i, j) += y.at(i, j) * (dout.at(i, j) - dot);
    }
  });
}

Tape::Id Tape::gelu(Id x) {
  const Tensor& v = value(x);
  Tensor out(v.rows, v.cols);
  for (size_t i = 0; i < v.data.size(); ++i) {
    double xv = v.data[i];
    out.data[i] = 0.5 * xv * (1.0 + std::erf(xv * M_SQRT1_2));
  }
  return push(std::move(out), [x, self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    const Tensor& v = t.value(x);
    Tensor& dx = t.grad_ref(x);
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    for (size_t i = 0; i < v.data.size(); ++i) {
      double xv = v.data[i];
      double cdf = 0.5 * (1.0 + std::erf(xv * M_SQRT1_2));
      double pdf = inv_sqrt_2pi * std::exp(-0.5 * xv * xv);
      dx.data[i] += dout.data[i] * (cdf + xv * pdf);
    }
  });
}

Tape::Id Tape::lookup_rows(Id table, std::vector<int> ids) {
  const Tensor& tb = value(table);
  Tensor out(static_cast<int>(ids.size()), tb.cols);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= tb.rows)
      throw UsageError("token id " + std::to_string(ids[i]) + " outside table rows " +
                       std::to_string(tb.rows));
    for (int j = 0; j < tb.cols; ++j)
      out.at(static_cast<int>(i), j) = tb.at(ids[i], j);
  }
  return push(std::move(out),
              [table, ids = std::move(ids), self = static_cast<Id>(nodes_.size())](Tape& t) {
                const Tensor& dout = t.grad(self);
                Tensor& dt = t.grad_ref(table);
                for (size_t i = 0; i < ids.size(); ++i)
                  for (int j = 0; j < dout.cols; ++j)
                    dt.at(ids[i], j) += dout.at(static_cast<int>(i), j);
              });
}

Tape::Id Tape::select_rows(Id x, std::vector<int> positions) {
  const Tensor& v = value(x);
  Tensor out(static_cast<int>(positions.size()), v.cols);
  for (size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] < 0 || positions[i] >= v.rows)
      throw UsageError("position " + std::to_string(positions[i]) + " outside rows " +
                       std::to_string(v.rows));
    for (int j = 0; j < v.cols; ++j)
      out.at(static_cast<int>(i), j) = v.at(positions[i], j);
  }
  return push(std::move(out), [x, positions = std::move(positions),
                               self = static_cast<Id>(nodes_.size())](Tape& t) {
    const Tensor& dout = t.grad(self);
    Tensor& dx = t.grad_ref(x);
    for (size_t i = 0; i < positions.size(); ++i)
      for (int j = 0; j < dout.cols; ++j)
        dx.at(positions[i], j) += dout.at(static_cast<int>(i), j);
  });
}

Tape::Id Tape::rel_gather(Id b, int mem_len) {
  const Tensor& v = value(b);
  const int t_len = v.rows;
  const int offsets = v.cols;
  const int s_len = offsets - t_len + 1;
  if (s_len != mem_len + t_len)
    throw NumericError("rel_gather: offset table has " + std::to_string(offsets) +
                       " columns, expected " + std::to_string(mem_len + 2 * t_len - 1));
  Tensor out(t_len, s_len);
  for (int i = 0; i < t_len; ++i)
    for (int j = 0; j < s_len; ++j)
      out.at(i, j) = v.at(i, i + mem_len - j + t_len - 1);
  return push(std::move(out),
              [b, mem_len, self = static_cast<Id>(nodes_.size())](Tape& t) {
                const Tensor& dout = t.grad(self);
                Tensor& db = t.grad_ref(b);
                const int t_len = dout.rows;
                for (int i = 0; i < t_len; ++i)
                  for (int j = 0; j < dout.cols; ++j)
                    db.at(i, i + mem_len - j + t_len - 1) += dout.at(i, j);
              });
}

Tape::Id Tape::masked_nll(Id scores, const std::vector<int>& targets, LossReport* report) {
  Tensor grad_scores;
  LossReport local = masked_cross_entropy(value(scores), targets, &grad_scores);
  if (report) *report = local;
  Tensor out(1, 1);
  out.at(0, 0) = local.total_loss;
  return push(std::move(out), [scores, grad_scores = std::move(grad_scores),
                               self = static_cast<Id>(nodes_.size())](Tape& t) {
    double d = t.grad(self).at(0, 0);
    Tensor scaled = grad_scores;
    scale_inplace(scaled, d);
    add_inplace(t.grad_ref(scores), scaled);
  });
}

void Tape::backward(Id root) {
  const Tensor& rv = value(root);
  if (rv.rows != 1 || rv.cols != 1) throw UsageError("backward root must be a scalar node");
  for (Node& n : nodes_) {
    n.grad = Tensor(n.value.rows, n.value.cols);
  }
  grad_ref(root).at(0, 0) = 1.0;
  for (int id = root; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.back) n.back(*this);
  }
}

LossReport masked_cross_entropy(const Tensor& scores, const std::vector<int>& targets,
                                Tensor* grad_out) {
  if (static_cast<int>(targets.size()) != scores.rows)
    throw UsageError("masked_cross_entropy: " + std::to_string(scores.rows) +
                     " score rows vs " + std::to_string(targets.size()) + " targets");
  long count = 0;
  for (int t : targets)
    if (t != kIgnoreTarget) ++count;

  LossReport report;
  report.contributing_positions = count;
  if (grad_out) *grad_out = Tensor(scores.rows, scores.cols);
  if (count == 0) return report;  // all ignored: zero loss, zero gradient

  double total = 0.0;
  for (int i = 0; i < scores.rows; ++i) {
    int t = targets[static_cast<size_t>(i)];
    if (t == kIgnoreTarget) continue;
    if (t < 0 || t >= scores.cols)
      throw UsageError("target label " + std::to_string(t) + " outside " +
                       std::to_string(scores.cols) + " classes");
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < scores.cols; ++j) mx = std::max(mx, scores.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < scores.cols; ++j) sum += std::exp(scores.at(i, j) - mx);
    double lse = mx + std::log(sum);
    total += lse - scores.at(i, t);
    if (grad_out) {
      for (int j = 0; j < scores.cols; ++j) {
        double p = std::exp(scores.at(i, j) - mx) / sum;
        grad_out->at(i, j) = (p - (j == t ? 1.0 : 0.0)) / static_cast<double>(count);
      }
    }
  }
  report.total_loss = total / static_cast<double>(count);
  return report;
}

}  // namespace arganno
