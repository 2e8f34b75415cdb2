#include "arganno/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arganno/errors.hpp"
#include "arganno/rng.hpp"

namespace arganno {

void TrainConfig::validate() const {
  if (epochs < 1) throw UsageError("train config: epochs must be >= 1");
  if (batch_size < 1) throw UsageError("train config: batch_size must be >= 1");
  if (learning_rate <= 0.0) throw UsageError("train config: learning_rate must be > 0");
  if (dev_fraction <= 0.0 || dev_fraction >= 1.0)
    throw UsageError("train config: dev_fraction must lie in (0, 1)");
  if (max_tokens < 1) throw UsageError("train config: max_tokens must be >= 1");
}

namespace {

bool is_sequence_task(Task task) {
  return task == Task::aae_relation || task == Task::aae_stance;
}

struct TruncatedView {
  std::vector<int> input;
  std::vector<int> targets;  // at labeled positions
  std::vector<int> positions;
};

TruncatedView truncate_example(const EncodedExample& ex, int max_tokens) {
  TruncatedView v;
  size_t limit = max_tokens > 0 ? std::min(ex.input_ids.size(), static_cast<size_t>(max_tokens))
                                : ex.input_ids.size();
  v.input.assign(ex.input_ids.begin(), ex.input_ids.begin() + static_cast<long>(limit));
  for (int p : ex.labeled_positions) {
    if (p < 0 || p >= static_cast<int>(ex.input_ids.size()))
      throw UsageError("labeled position " + std::to_string(p) + " outside example");
    if (p >= static_cast<int>(limit)) continue;
    v.positions.push_back(p);
    v.targets.push_back(ex.target_ids[static_cast<size_t>(p)]);
  }
  return v;
}

}  // namespace

LossReport compute_gradients(const Params& params, const EncodedExample& example,
                             Params& grads, int max_tokens) {
  TruncatedView view = truncate_example(example, max_tokens);
  LossReport report;
  if (view.positions.empty() || view.input.empty()) return report;

  EncoderPass pass(params);
  Tape::Id hidden = pass.stream_document_node(view.input);
  Tape::Id scores;
  if (is_sequence_task(example.task)) {
    scores = pass.sequence_scores_node(hidden, view.positions[0]);
    if (view.positions.size() != 1)
      throw UsageError("sequence task example must have exactly one labeled position");
  } else {
    scores = pass.label_scores_node(hidden, view.positions);
  }
  Tape::Id loss = pass.tape().masked_nll(scores, view.targets, &report);
  if (report.contributing_positions == 0) return report;
  if (!std::isfinite(report.total_loss)) throw NumericError("non-finite training loss");
  pass.backward(loss);
  pass.add_param_grads(grads);
  return report;
}

std::vector<int> predict_labels(const Params& params, const EncodedExample& example) {
  TruncatedView view = truncate_example(example, 0);
  std::vector<int> out;
  if (view.positions.empty()) return out;
  Tensor hidden = stream_document(params, view.input);
  const Tensor& head = is_sequence_task(example.task) ? params.seq_head : params.label_head;
  for (int p : view.positions) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < head.cols; ++c) {
      double score = 0.0;
      for (int j = 0; j < head.rows; ++j) score += hidden.at(p, j) * head.at(j, c);
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    out.push_back(best);
  }
  return out;
}

EvalReport evaluate_examples(const Params& params,
                             const std::vector<EncodedExample>& examples) {
  if (examples.empty()) return EvalReport{};
  const TagSet& scheme = tag_set(task_scheme(examples.front().task));
  std::vector<std::string> pred, gold;
  for (const EncodedExample& ex : examples) {
    if (ex.task != examples.front().task)
      throw UsageError("evaluate_examples: mixed tasks in dataset");
    std::vector<int> labels = predict_labels(params, ex);
    TruncatedView view = truncate_example(ex, 0);
    for (size_t i = 0; i < labels.size(); ++i) {
      if (view.targets[i] == kIgnoreTarget) continue;
      pred.push_back(scheme.label_name(labels[i]));
      gold.push_back(scheme.label_name(view.targets[i]));
    }
  }
  if (pred.empty()) return EvalReport{};
  return evaluate_labels(pred, gold, scheme);
}

namespace {

struct AdamState {
  Params m;
  Params v;
  long step = 0;
};

void adam_step(Params& params, const Params& grads, AdamState& state,
               const TrainConfig& cfg, double grad_scale) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  auto ps = params.entries();
  auto gs = grads.entries();
  auto ms = state.m.entries();
  auto vs = state.v.entries();
  for (size_t i = 0; i < ps.size(); ++i) {
    Tensor& p = *ps[i].second;
    const Tensor& g = *gs[i].second;
    Tensor& m = *ms[i].second;
    Tensor& v = *vs[i].second;
    for (size_t k = 0; k < p.data.size(); ++k) {
      double gk = g.data[k] * grad_scale;
      m.data[k] = cfg.beta1 * m.data[k] + (1.0 - cfg.beta1) * gk;
      v.data[k] = cfg.beta2 * v.data[k] + (1.0 - cfg.beta2) * gk * gk;
      double mhat = m.data[k] / bc1;
      double vhat = v.data[k] / bc2;
      p.data[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

}  // namespace

TrainResult train_with_dev(const Params& init,
                           const std::vector<EncodedExample>& train_set,
                           const std::vector<EncodedExample>& dev_set,
                           const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) throw UsageError("train: empty training set");

  Params params = init;
  AdamState adam{Params::zeros_like(init), Params::zeros_like(init), 0};

  TrainResult result;
  result.params = params;
  double best_metric = -std::numeric_limits<double>::infinity();
  result.best_epoch = -1;

  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(config.seed * 0x9E3779B9ull + static_cast<unsigned long long>(epoch));
    rng.shuffle(order);

    double loss_sum = 0.0;
    long contributing_examples = 0;
    long skipped = 0;
    size_t cursor = 0;
    while (cursor < order.size()) {
      size_t batch_end = std::min(order.size(), cursor + static_cast<size_t>(config.batch_size));
      Params grads = Params::zeros_like(params);
      long batch_contrib = 0;
      for (size_t b = cursor; b < batch_end; ++b) {
        LossReport r =
            compute_gradients(params, train_set[order[b]], grads, config.max_tokens);
        if (r.contributing_positions == 0) {
          ++skipped;
          continue;
        }
        loss_sum += r.total_loss;
        ++contributing_examples;
        ++batch_contrib;
      }
      if (batch_contrib > 0)
        adam_step(params, grads, adam, config, 1.0 / static_cast<double>(batch_contrib));
      cursor = batch_end;
    }

    EvalReport dev_report = evaluate_examples(params, dev_set);
    double dev_metric = dev_report.metric_sum(config.stop_on_kappa);
    result.log.push_back({epoch,
                          contributing_examples > 0
                              ? loss_sum / static_cast<double>(contributing_examples)
                              : 0.0,
                          dev_metric, skipped});
    if (dev_metric > best_metric) {
      best_metric = dev_metric;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  if (result.best_epoch < 0) {
    result.best_epoch = config.epochs;
    result.params = params;
  }
  return result;
}

TrainResult train(const Params& init, const std::vector<EncodedExample>& dataset,
                  const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw UsageError("train: empty dataset");
  std::vector<size_t> order(dataset.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);
  rng.shuffle(order);
  size_t dev_count = static_cast<size_t>(
      std::llround(config.dev_fraction * static_cast<double>(dataset.size())));
  dev_count = std::min(dev_count, dataset.size() - 1);
  std::vector<EncodedExample> dev_set, train_set;
  for (size_t i = 0; i < order.size(); ++i) {
    (i < dev_count ? dev_set : train_set).push_back(dataset[order[i]]);
  }
  return train_with_dev(init, train_set, dev_set, config);
}

std::string format_metric_log(const std::vector<EpochRecord>& log) {
  std::ostringstream out;
  for (const EpochRecord& r : log) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "{\"epoch\": %d, \"train_loss\": %.12g, \"dev_metric\": %.12g, "
                  "\"skipped\": %ld}\n",
                  r.epoch, r.train_loss, r.dev_metric, r.skipped_examples);
    out << buf;
  }
  return out.str();
}

}  // namespace arganno
