#pragma once

#include <map>
#include <string>
#include <vector>

#include "arganno/document.hpp"
#include "arganno/schemes.hpp"
#include "arganno/tokenizer.hpp"
#include "arganno/train.hpp"

namespace arganno {

/// Leave-prompt-out plan: model i tests on prompt i and uses prompt
/// (i+1 mod k) as its development set; every other prompt trains.
struct SeedPlan {
  std::vector<std::string> prompts;
  struct ModelSplit {
    std::vector<std::string> train_prompts;
    std::string dev_prompt;
    std::string test_prompt;
  };
  std::vector<ModelSplit> models;
};

SeedPlan build_seed_plan(const std::vector<std::string>& prompts, int k);
/// Throws when any model's dev/test prompt leaks into its training prompts.
void validate_seed_plan(const SeedPlan& plan);
std::string seed_plan_to_json(const SeedPlan& plan);
SeedPlan seed_plan_from_json(const std::string& json_content);

/// Applies every model to each sentence and resolves the k votes through the
/// scheme hierarchy. Every sentence gets a span (None included) carrying the
/// raw votes as provenance; rater is `resolved`.
std::vector<AnnotatedDocument> synthesize_labels(const std::vector<Params>& models,
                                                 const std::vector<AnnotatedDocument>& corpus,
                                                 const TagSet& scheme, const Vocab& vocab);

/// Standard training on an ensemble-labeled corpus.
TrainResult train_universal(const Params& init,
                            const std::vector<AnnotatedDocument>& synthetic_corpus,
                            const Vocab& vocab, const TrainConfig& config);

struct EnsembleRun {
  SeedPlan plan;
  std::vector<TrainResult> seed_models;
  std::vector<AnnotatedDocument> synthetic;
  TrainResult universal;
};

/// Full protocol: k leave-prompt-out seed models, synthetic labels over the
/// unlabeled corpus, then one universal model. Seed i trains with seed
/// config.seed + i; the universal model with config.seed + 1000. Document
/// leakage (a test-prompt document in a model's train/dev data) is a hard
/// error.
EnsembleRun run_ensemble(const std::map<std::string, std::vector<AnnotatedDocument>>& by_prompt,
                         const std::vector<AnnotatedDocument>& unlabeled,
                         const Vocab& vocab, const ModelConfig& model_config,
                         const TrainConfig& train_config, int k);

}  // namespace arganno
