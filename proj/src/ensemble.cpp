#include "arganno/ensemble.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "arganno/codecs.hpp"
#include "arganno/errors.hpp"

namespace arganno {

SeedPlan build_seed_plan(const std::vector<std::string>& prompts, int k) {
  if (k < 1) throw UsageError("seed plan: k must be >= 1");
  if (k > static_cast<int>(prompts.size()))
    throw UsageError("seed plan: k = " + std::to_string(k) + " exceeds " +
                     std::to_string(prompts.size()) + " prompts");
  std::set<std::string> unique(prompts.begin(), prompts.end());
  if (unique.size() != prompts.size()) throw UsageError("seed plan: duplicate prompt ids");

  SeedPlan plan;
  plan.prompts = prompts;
  for (int i = 0; i < k; ++i) {
    SeedPlan::ModelSplit split;
    split.test_prompt = prompts[static_cast<size_t>(i)];
    split.dev_prompt = prompts[static_cast<size_t>((i + 1) % k)];
    for (const std::string& p : prompts) {
      if (p != split.test_prompt && p != split.dev_prompt) split.train_prompts.push_back(p);
    }
    if (split.train_prompts.empty())
      throw UsageError("seed plan: model " + std::to_string(i) +
                       " would have no training prompts (need more prompts than held-out sets)");
    plan.models.push_back(std::move(split));
  }
  validate_seed_plan(plan);
  return plan;
}

void validate_seed_plan(const SeedPlan& plan) {
  for (size_t i = 0; i < plan.models.size(); ++i) {
    const auto& m = plan.models[i];
    for (const std::string& t : m.train_prompts) {
      if (t == m.test_prompt || t == m.dev_prompt)
        throw DataError("seed plan: model " + std::to_string(i) +
                        " trains on its held-out prompt " + t);
    }
  }
}

std::string seed_plan_to_json(const SeedPlan& plan) {
  nlohmann::json j;
  j["prompts"] = plan.prompts;
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : plan.models) {
    nlohmann::json mj;
    mj["train"] = m.train_prompts;
    mj["dev"] = m.dev_prompt;
    mj["test"] = m.test_prompt;
    models.push_back(mj);
  }
  j["models"] = models;
  return j.dump(2) + "\n";
}

SeedPlan seed_plan_from_json(const std::string& json_content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_content);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("seed plan: ") + e.what());
  }
  SeedPlan plan;
  plan.prompts = j.at("prompts").get<std::vector<std::string>>();
  for (const auto& mj : j.at("models")) {
    SeedPlan::ModelSplit m;
    m.train_prompts = mj.at("train").get<std::vector<std::string>>();
    m.dev_prompt = mj.at("dev").get<std::string>();
    m.test_prompt = mj.at("test").get<std::string>();
    plan.models.push_back(std::move(m));
  }
  validate_seed_plan(plan);
  return plan;
}

std::vector<AnnotatedDocument> synthesize_labels(const std::vector<Params>& models,
                                                 const std::vector<AnnotatedDocument>& corpus,
                                                 const TagSet& scheme, const Vocab& vocab) {
  if (models.empty()) throw UsageError("synthesize_labels: no models");
  for (const Params& m : models) {
    if (m.config.num_labels != scheme.num_labels())
      throw UsageError("synthesize_labels: model label count " +
                       std::to_string(m.config.num_labels) + " does not match scheme " +
                       scheme.name);
    if (m.config.vocab_size != vocab.size())
      throw UsageError("synthesize_labels: model vocab size mismatch");
  }

  std::vector<AnnotatedDocument> out;
  out.reserve(corpus.size());
  for (const AnnotatedDocument& doc : corpus) {
    EncodedExample ex = encode_arrow(doc, vocab);
    std::vector<std::vector<std::string>> votes(doc.sentences.size());
    for (const Params& model : models) {
      std::vector<int> labels = predict_labels(model, ex);
      if (labels.size() != doc.sentences.size())
        throw NumericError("synthesize_labels: prediction count mismatch");
      for (size_t s = 0; s < labels.size(); ++s)
        votes[s].push_back(scheme.label_name(labels[s]));
    }
    AnnotatedDocument labeled = doc;
    labeled.spans.clear();
    labeled.relations.clear();
    for (size_t s = 0; s < votes.size(); ++s) {
      AnnotationSpan span;
      span.span_id = "s" + std::to_string(s);
      span.tag = resolve_votes(votes[s], scheme);
      span.unit = SpanUnit::sentence;
      span.range = {static_cast<int>(s), static_cast<int>(s) + 1};
      span.rater = {Rater::Kind::resolved, -1};
      span.votes = votes[s];
      labeled.spans.push_back(std::move(span));
    }
    out.push_back(std::move(labeled));
  }
  return out;
}

TrainResult train_universal(const Params& init,
                            const std::vector<AnnotatedDocument>& synthetic_corpus,
                            const Vocab& vocab, const TrainConfig& config) {
  if (synthetic_corpus.empty()) throw UsageError("train_universal: empty synthetic corpus");
  std::vector<EncodedExample> dataset =
      build_task_dataset(synthetic_corpus, Task::arrow_sentence, vocab);
  return train(init, dataset, config);
}

EnsembleRun run_ensemble(const std::map<std::string, std::vector<AnnotatedDocument>>& by_prompt,
                         const std::vector<AnnotatedDocument>& unlabeled,
                         const Vocab& vocab, const ModelConfig& model_config,
                         const TrainConfig& train_config, int k) {
  std::vector<std::string> prompts;
  for (const auto& [prompt, docs] : by_prompt) prompts.push_back(prompt);

  EnsembleRun run;
  run.plan = build_seed_plan(prompts, k);
  const TagSet& scheme = tag_set(SchemeId::ARROW);

  std::vector<Params> seed_params;
  for (size_t i = 0; i < run.plan.models.size(); ++i) {
    const auto& split = run.plan.models[i];

    std::vector<AnnotatedDocument> train_docs, dev_docs;
    std::set<std::string> test_ids;
    for (const AnnotatedDocument& d : by_prompt.at(split.test_prompt))
      test_ids.insert(d.doc_id);
    for (const std::string& p : split.train_prompts)
      for (const AnnotatedDocument& d : by_prompt.at(p)) train_docs.push_back(d);
    for (const AnnotatedDocument& d : by_prompt.at(split.dev_prompt)) dev_docs.push_back(d);

    // Hard leakage assertion: no test-prompt document in train or dev data.
    for (const AnnotatedDocument& d : train_docs)
      if (test_ids.count(d.doc_id))
        throw DataError("leakage: test document " + d.doc_id + " in training data of model " +
                        std::to_string(i));
    for (const AnnotatedDocument& d : dev_docs)
      if (test_ids.count(d.doc_id))
        throw DataError("leakage: test document " + d.doc_id + " in dev data of model " +
                        std::to_string(i));

    TrainConfig cfg = train_config;
    cfg.seed = train_config.seed + i;
    auto train_ds = build_task_dataset(train_docs, Task::arrow_sentence, vocab);
    auto dev_ds = build_task_dataset(dev_docs, Task::arrow_sentence, vocab);
    Params init = Params::init(model_config, cfg.seed);
    run.seed_models.push_back(train_with_dev(init, train_ds, dev_ds, cfg));
    seed_params.push_back(run.seed_models.back().params);
  }

  run.synthetic = synthesize_labels(seed_params, unlabeled, scheme, vocab);

  TrainConfig cfg = train_config;
  cfg.seed = train_config.seed + 1000;
  Params init = Params::init(model_config, cfg.seed);
  run.universal = train_universal(init, run.synthetic, vocab, cfg);
  return run;
}

}  // namespace arganno
