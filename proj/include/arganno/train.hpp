#pragma once

#include <string>
#include <vector>

#include "arganno/codecs.hpp"
#include "arganno/encoder.hpp"
#include "arganno/metrics.hpp"
#include "arganno/tape.hpp"

namespace arganno {

struct TrainConfig {
  int epochs = 20;
  int max_tokens = 2048;
  int batch_size = 1;
  double learning_rate = 1e-3;
  double dev_fraction = 0.10;
  unsigned long long seed = 0;
  bool stop_on_kappa = true;  // dev stop metric: sum of kappas vs macro F1
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_metric = 0.0;
  long skipped_examples = 0;  // zero-contribution batches (all targets ignored)
};

struct TrainResult {
  Params params;  // best dev-metric epoch
  std::vector<EpochRecord> log;
  int best_epoch = 0;
};

/// Loss and parameter gradients for one example. Inputs longer than
/// `max_tokens` (when > 0) train as their prefix; cached memories contribute
/// forward context but receive no gradient.
LossReport compute_gradients(const Params& params, const EncodedExample& example,
                             Params& grads, int max_tokens = 0);

/// Greedy (argmax) label predictions at the example's labeled positions.
std::vector<int> predict_labels(const Params& params, const EncodedExample& example);

/// Flattened per-position evaluation of a set of same-task examples.
EvalReport evaluate_examples(const Params& params,
                             const std::vector<EncodedExample>& examples);

/// Splits the dataset into train/dev by the config seed, runs every epoch,
/// and restores the parameters from the best dev-metric epoch.
TrainResult train(const Params& init, const std::vector<EncodedExample>& dataset,
                  const TrainConfig& config);

TrainResult train_with_dev(const Params& init,
                           const std::vector<EncodedExample>& train_set,
                           const std::vector<EncodedExample>& dev_set,
                           const TrainConfig& config);

/// Line-delimited records (one JSON object per epoch).
std::string format_metric_log(const std::vector<EpochRecord>& log);

}  // namespace arganno
