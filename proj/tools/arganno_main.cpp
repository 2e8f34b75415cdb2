// arganno: corpus ingestion, model training, prediction, evaluation,
// ensembling, correspondence tables, and color-coded HTML export.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "arganno/brat.hpp"
#include "arganno/checkpoint.hpp"
#include "arganno/codecs.hpp"
#include "arganno/corpus_io.hpp"
#include "arganno/correspondence.hpp"
#include "arganno/ensemble.hpp"
#include "arganno/errors.hpp"
#include "arganno/html.hpp"
#include "arganno/html_export.hpp"
#include "arganno/metrics.hpp"
#include "arganno/persuade.hpp"
#include "arganno/schemes.hpp"
#include "arganno/tokenizer.hpp"
#include "arganno/train.hpp"

namespace fs = std::filesystem;
using namespace arganno;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---- run manifest ---------------------------------------------------------

struct ManifestBuilder {
  std::string command;
  std::string config_path;
  std::vector<std::string> inputs;
  std::vector<fs::path> outputs;
  unsigned long long seed = 0;

  void write(const fs::path& out_dir) const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config_path;
    j["inputs"] = inputs;
    j["seed"] = seed;
    j["version"] = kVersion;
    nlohmann::json outs = nlohmann::json::array();
    std::vector<std::string> digest_parts;
    for (const fs::path& p : outputs) {
      char hex[32];
      std::snprintf(hex, sizeof(hex), "%016llx",
                    static_cast<unsigned long long>(fnv1a(read_file(p))));
      nlohmann::json o;
      std::string rel = fs::relative(p, out_dir).string();
      o["path"] = rel;
      o["fnv64"] = hex;
      outs.push_back(o);
      digest_parts.push_back(rel + ":" + hex);
    }
    std::sort(digest_parts.begin(), digest_parts.end());
    std::string combined;
    for (const std::string& s : digest_parts) combined += s + "\n";
    char digest[32];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(fnv1a(combined)));
    j["outputs"] = outs;
    j["digest"] = digest;  // timestamp deliberately excluded from the digest
    j["timestamp"] = static_cast<long long>(::time(nullptr));
    write_file(out_dir / "manifest.json", j.dump(2) + "\n");
  }
};

// ---- flat key/value config ------------------------------------------------

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) out[key] = value;
  }
  return out;
}

const std::string& require_key(const std::map<std::string, std::string>& cfg,
                               const std::string& key) {
  auto it = cfg.find(key);
  if (it == cfg.end()) throw UsageError("missing config key: " + key);
  return it->second;
}

ModelConfig model_config_from(const std::map<std::string, std::string>& cfg,
                              int vocab_size, int num_labels) {
  ModelConfig mc;
  mc.layers = std::stoi(require_key(cfg, "layers"));
  mc.heads = std::stoi(require_key(cfg, "heads"));
  mc.width = std::stoi(require_key(cfg, "width"));
  mc.segment_len = std::stoi(require_key(cfg, "segment_len"));
  mc.mem_len = std::stoi(require_key(cfg, "mem_len"));
  const std::string& vs = require_key(cfg, "vocab_size");
  mc.vocab_size = vs == "auto" ? vocab_size : std::stoi(vs);
  const std::string& nl = require_key(cfg, "num_labels");
  mc.num_labels = nl == "auto" ? num_labels : std::stoi(nl);
  mc.validate();
  return mc;
}

TrainConfig train_config_from(const std::map<std::string, std::string>& cfg) {
  TrainConfig tc;
  tc.epochs = std::stoi(require_key(cfg, "epochs"));
  tc.max_tokens = std::stoi(require_key(cfg, "max_tokens"));
  tc.batch_size = std::stoi(require_key(cfg, "batch_size"));
  tc.learning_rate = std::stod(require_key(cfg, "learning_rate"));
  tc.dev_fraction = std::stod(require_key(cfg, "dev_fraction"));
  tc.seed = std::stoull(require_key(cfg, "seed"));
  const std::string& metric = require_key(cfg, "stop_metric");
  if (metric == "sum_kappa") tc.stop_on_kappa = true;
  else if (metric == "macro_f1") tc.stop_on_kappa = false;
  else throw UsageError("stop_metric must be sum_kappa or macro_f1, got " + metric);
  tc.validate();
  return tc;
}

// ---- shared loaders -------------------------------------------------------

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
  if (!fs::exists(dir)) throw DataError("no such directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// ---- subcommand bodies ----------------------------------------------------

int cmd_ingest(const std::string& format, const std::string& in_dir,
               const std::string& out_dir) {
  std::vector<AnnotatedDocument> corpus;
  std::vector<std::string> failures;
  if (format == "brat") {
    for (const fs::path& txt : sorted_files(in_dir, ".txt")) {
      fs::path ann = txt;
      ann.replace_extension(".ann");
      if (!fs::exists(ann)) {
        failures.push_back(ann.string() + ": missing annotation file");
        continue;
      }
      try {
        corpus.push_back(parse_brat_essay(read_file(txt), read_file(ann), txt.stem().string()));
      } catch (const std::exception& e) {
        failures.push_back(txt.string() + ": " + e.what());
      }
    }
  } else if (format == "persuade") {
    for (const fs::path& csv : sorted_files(in_dir, ".csv")) {
      try {
        auto docs = parse_persuade_table(read_file(csv));
        corpus.insert(corpus.end(), docs.begin(), docs.end());
      } catch (const std::exception& e) {
        failures.push_back(csv.string() + ": " + e.what());
      }
    }
  } else if (format == "html") {
    for (const fs::path& html : sorted_files(in_dir, ".html")) {
      try {
        corpus.push_back(parse_html_essay(read_file(html), html.stem().string()));
      } catch (const std::exception& e) {
        failures.push_back(html.string() + ": " + e.what());
      }
    }
  } else {
    throw UsageError("unknown ingest format: " + format);
  }
  if (!failures.empty()) {
    for (const std::string& f : failures) std::cerr << "error: " << f << "\n";
    return 1;
  }
  if (corpus.empty()) std::cerr << "warning: no documents found in " << in_dir << "\n";

  save_corpus(corpus, out_dir);
  std::string stats = render_stats(corpus_stats(corpus));
  write_file(fs::path(out_dir) / "stats.txt", stats);
  std::cout << stats;

  ManifestBuilder manifest{"ingest " + format, "", {in_dir}, {}, 0};
  manifest.outputs.push_back(fs::path(out_dir) / "index.json");
  manifest.outputs.push_back(fs::path(out_dir) / "stats.txt");
  manifest.write(out_dir);
  return 0;
}

int cmd_vocab(const std::string& in_dir, const std::string& out_file, int size) {
  std::vector<AnnotatedDocument> corpus = load_corpus(in_dir);
  std::vector<std::string> texts;
  for (const AnnotatedDocument& d : corpus) texts.push_back(d.text);
  Vocab vocab = train_vocab(texts, size);
  save_vocab(vocab, out_file);
  std::cout << "vocab: " << vocab.size() << " tokens (" << vocab.pieces.size()
            << " pieces)\n";
  return 0;
}

int cmd_train(const std::string& task_name, const std::string& in_dir,
              const std::string& vocab_file, const std::string& config_file,
              const std::string& out_dir, long long seed_override) {
  Task task = task_from_string(task_name);
  const TagSet& scheme = tag_set(task_scheme(task));
  Vocab vocab = load_vocab(vocab_file);
  auto cfg = parse_config_file(config_file);
  ModelConfig mc = model_config_from(cfg, vocab.size(), scheme.num_labels());
  TrainConfig tc = train_config_from(cfg);
  if (seed_override >= 0) tc.seed = static_cast<unsigned long long>(seed_override);

  std::vector<AnnotatedDocument> corpus = load_corpus(in_dir);
  std::vector<std::string> warnings;
  std::vector<EncodedExample> dataset = build_task_dataset(corpus, task, vocab, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  Params init = Params::init(mc, tc.seed);
  TrainResult result = train(init, dataset, tc);

  fs::create_directories(out_dir);
  save_checkpoint(result.params, (fs::path(out_dir) / "model.ckpt").string());
  write_file(fs::path(out_dir) / "metrics.log", format_metric_log(result.log));
  std::cout << "best epoch: " << result.best_epoch << " (dev metric "
            << result.log[static_cast<size_t>(result.best_epoch - 1)].dev_metric << ")\n";

  ManifestBuilder manifest{"train " + task_name, config_file, {in_dir, vocab_file}, {}, tc.seed};
  manifest.outputs.push_back(fs::path(out_dir) / "model.ckpt");
  manifest.outputs.push_back(fs::path(out_dir) / "metrics.log");
  manifest.write(out_dir);
  return 0;
}

std::vector<AnnotatedDocument> predict_corpus(const Params& params, Task task,
                                              const std::vector<AnnotatedDocument>& corpus,
                                              const Vocab& vocab, int model_index) {
  const TagSet& scheme = tag_set(task_scheme(task));
  Rater rater{Rater::Kind::model, model_index};
  std::vector<AnnotatedDocument> out;
  for (const AnnotatedDocument& doc : corpus) {
    switch (task) {
      case Task::arrow_sentence: {
        EncodedExample ex = encode_arrow(doc, vocab);
        std::vector<int> labels = predict_labels(params, ex);
        std::vector<std::string> tags;
        for (int l : labels) tags.push_back(scheme.label_name(l));
        out.push_back(doc_with_sentence_tags(doc, tags, rater));
        break;
      }
      case Task::persuade_word: {
        EncodedExample ex = encode_persuade(doc, vocab);
        std::vector<int> labels = predict_labels(params, ex);
        std::vector<std::string> tags;
        for (int l : labels) tags.push_back(scheme.label_name(l));
        out.push_back(doc_with_word_tags(doc, tags, rater));
        break;
      }
      case Task::aae_bio: {
        EncodedExample ex = encode_aae_bio(doc, vocab);
        std::vector<int> labels = predict_labels(params, ex);
        std::vector<std::string> tags;
        for (int l : labels) tags.push_back(scheme.label_name(l));
        AnnotatedDocument tagged = doc_with_word_tags(doc, tags, rater);
        tagged.source_scheme = "AAE_BIO";
        out.push_back(std::move(tagged));
        break;
      }
      case Task::aae_component: {
        std::vector<ComponentSpan> comps;
        for (const AnnotationSpan& s : doc.spans)
          if (s.unit == SpanUnit::char_range)
            comps.push_back({project_char_span_to_words(doc, s.range), s.tag});
        EncodedExample ex = encode_aae_component(doc, comps, vocab);
        std::vector<int> labels = predict_labels(params, ex);
        std::vector<std::string> block_tags = decode_component_blocks(ex, labels);
        AnnotatedDocument pred = doc;
        size_t block = 0;
        for (AnnotationSpan& s : pred.spans) {
          if (s.unit != SpanUnit::char_range) continue;
          if (block < block_tags.size() && !block_tags[block].empty())
            s.tag = block_tags[block];
          s.rater = rater;
          ++block;
        }
        out.push_back(std::move(pred));
        break;
      }
      case Task::aae_relation: {
        AnnotatedDocument pred = doc;
        pred.relations.clear();
        for (const RelationCandidate& cand : enumerate_relation_candidates(doc)) {
          const AnnotationSpan& s = doc.spans[static_cast<size_t>(cand.source_span)];
          const AnnotationSpan& t = doc.spans[static_cast<size_t>(cand.target_span)];
          ComponentSpan src{project_char_span_to_words(doc, s.range), ""};
          ComponentSpan tgt{project_char_span_to_words(doc, t.range), ""};
          EncodedExample ex = encode_aae_relation(doc, cand.paragraph, src, tgt, vocab, 0);
          std::vector<int> labels = predict_labels(params, ex);
          if (!labels.empty() && scheme.label_name(labels[0]) == "linked")
            pred.relations.push_back({s.span_id, t.span_id, true, StanceLabel::none});
        }
        out.push_back(std::move(pred));
        break;
      }
      case Task::aae_stance: {
        AnnotatedDocument pred = doc;
        std::map<std::string, const AnnotationSpan*> by_id;
        for (const AnnotationSpan& s : doc.spans) by_id[s.span_id] = &s;
        for (ArgRelation& r : pred.relations) {
          r.stance = StanceLabel::none;  // skipped items stay unpredicted
          std::optional<EncodedExample> ex;
          if (r.linked) {
            auto si = by_id.find(r.source);
            auto ti = by_id.find(r.target);
            if (si == by_id.end() || ti == by_id.end()) continue;
            int para = -1;
            for (size_t p = 0; p < doc.paragraphs.size(); ++p)
              if (doc.paragraphs[p].contains(si->second->range.begin) &&
                  doc.paragraphs[p].contains(ti->second->range.begin))
                para = static_cast<int>(p);
            if (para < 0) continue;
            ex = encode_aae_stance_pair(
                doc, para, {project_char_span_to_words(doc, si->second->range), ""},
                {project_char_span_to_words(doc, ti->second->range), ""}, vocab,
                kIgnoreTarget);
          } else {
            auto si = by_id.find(r.source);
            if (si == by_id.end()) continue;
            ex = encode_aae_stance_claim(doc, *si->second, vocab, kIgnoreTarget);
          }
          if (!ex) continue;
          // inference input has no labeled position; classify at the cls token
          Tensor scores = classify_sequence(params, ex->input_ids);
          int best = 0;
          for (int c = 1; c < scores.cols; ++c)
            if (scores.at(0, c) > scores.at(0, best)) best = c;
          r.stance = scheme.label_name(best) == "support" ? StanceLabel::support
                                                          : StanceLabel::attack;
        }
        out.push_back(std::move(pred));
        break;
      }
    }
  }
  return out;
}

int cmd_predict(const std::string& task_name, const std::string& in_dir,
                const std::string& vocab_file, const std::string& checkpoint_file,
                const std::string& out_dir, int model_index) {
  Task task = task_from_string(task_name);
  Vocab vocab = load_vocab(vocab_file);
  Params params = load_checkpoint(checkpoint_file);
  std::vector<AnnotatedDocument> corpus = load_corpus(in_dir);
  std::vector<AnnotatedDocument> pred =
      predict_corpus(params, task, corpus, vocab, model_index);
  save_corpus(pred, out_dir);
  ManifestBuilder manifest{"predict " + task_name, "", {in_dir, vocab_file, checkpoint_file},
                           {fs::path(out_dir) / "index.json"}, 0};
  manifest.write(out_dir);
  std::cout << "predicted " << pred.size() << " documents\n";
  return 0;
}

// Task-aware corpus comparison: per-tag rows for the task's own unit.
EvalReport evaluate_corpus_task(const std::vector<AnnotatedDocument>& pred,
                                const std::vector<AnnotatedDocument>& gold, Task task) {
  const TagSet& scheme = tag_set(task_scheme(task));
  switch (task) {
    case Task::arrow_sentence:
      return evaluate(pred, gold, scheme, SpanUnit::sentence);
    case Task::persuade_word:
      return evaluate(pred, gold, scheme, SpanUnit::word_range);
    case Task::aae_bio: {
      auto bio_labels = [](const AnnotatedDocument& d) {
        bool has_char = false;
        for (const AnnotationSpan& s : d.spans)
          if (s.unit == SpanUnit::char_range) has_char = true;
        if (has_char) return bio_labels_from_char_spans(d);
        std::vector<std::string> tags(d.words.size(), "O");
        for (const AnnotationSpan& s : d.spans) {
          if (s.unit != SpanUnit::word_range) continue;
          for (int w = s.range.begin; w < s.range.end; ++w)
            tags[static_cast<size_t>(w)] = s.tag;
        }
        return tags;
      };
      std::map<std::string, const AnnotatedDocument*> gold_by_id;
      for (const AnnotatedDocument& g : gold) gold_by_id[g.doc_id] = &g;
      std::vector<std::string> flat_pred, flat_gold;
      for (const AnnotatedDocument& p : pred) {
        auto it = gold_by_id.find(p.doc_id);
        if (it == gold_by_id.end())
          throw UsageError("evaluate: document " + p.doc_id + " missing from gold");
        auto pt = bio_labels(p);
        auto gt = bio_labels(*it->second);
        flat_pred.insert(flat_pred.end(), pt.begin(), pt.end());
        flat_gold.insert(flat_gold.end(), gt.begin(), gt.end());
      }
      return evaluate_labels(flat_pred, flat_gold, scheme);
    }
    case Task::aae_component: {
      std::map<std::string, const AnnotatedDocument*> gold_by_id;
      for (const AnnotatedDocument& g : gold) gold_by_id[g.doc_id] = &g;
      std::vector<std::string> flat_pred, flat_gold;
      for (const AnnotatedDocument& p : pred) {
        auto it = gold_by_id.find(p.doc_id);
        if (it == gold_by_id.end())
          throw UsageError("evaluate: document " + p.doc_id + " missing from gold");
        std::map<std::string, std::string> gold_tags;
        for (const AnnotationSpan& s : it->second->spans)
          if (s.unit == SpanUnit::char_range) gold_tags[s.span_id] = s.tag;
        for (const AnnotationSpan& s : p.spans) {
          if (s.unit != SpanUnit::char_range) continue;
          auto g = gold_tags.find(s.span_id);
          if (g == gold_tags.end()) continue;
          flat_pred.push_back(s.tag);
          flat_gold.push_back(g->second);
        }
      }
      return evaluate_labels(flat_pred, flat_gold, scheme);
    }
    case Task::aae_relation: {
      std::map<std::string, const AnnotatedDocument*> pred_by_id;
      for (const AnnotatedDocument& p : pred) pred_by_id[p.doc_id] = &p;
      std::vector<std::string> flat_pred, flat_gold;
      for (const AnnotatedDocument& g : gold) {
        auto it = pred_by_id.find(g.doc_id);
        if (it == pred_by_id.end())
          throw UsageError("evaluate: document " + g.doc_id + " missing from pred");
        for (const RelationCandidate& cand : enumerate_relation_candidates(g)) {
          flat_gold.push_back(cand.linked ? "linked" : "not-linked");
          bool plinked = false;
          const std::string& sid = g.spans[static_cast<size_t>(cand.source_span)].span_id;
          const std::string& tid = g.spans[static_cast<size_t>(cand.target_span)].span_id;
          for (const ArgRelation& r : it->second->relations)
            if (r.linked && r.source == sid && r.target == tid) plinked = true;
          flat_pred.push_back(plinked ? "linked" : "not-linked");
        }
      }
      return evaluate_labels(flat_pred, flat_gold, scheme);
    }
    case Task::aae_stance: {
      std::map<std::string, const AnnotatedDocument*> pred_by_id;
      for (const AnnotatedDocument& p : pred) pred_by_id[p.doc_id] = &p;
      auto stance_name = [](StanceLabel s) {
        return s == StanceLabel::support ? "support" : "attack";
      };
      std::vector<std::string> flat_pred, flat_gold;
      for (const AnnotatedDocument& g : gold) {
        auto it = pred_by_id.find(g.doc_id);
        if (it == pred_by_id.end())
          throw UsageError("evaluate: document " + g.doc_id + " missing from pred");
        for (const ArgRelation& gr : g.relations) {
          if (gr.stance == StanceLabel::none) continue;
          for (const ArgRelation& pr : it->second->relations) {
            if (pr.source == gr.source && pr.target == gr.target &&
                pr.stance != StanceLabel::none) {
              flat_gold.push_back(stance_name(gr.stance));
              flat_pred.push_back(stance_name(pr.stance));
              break;
            }
          }
        }
      }
      return evaluate_labels(flat_pred, flat_gold, scheme);
    }
  }
  throw UsageError("unhandled task");
}

int cmd_evaluate(const std::string& task_name, const std::string& pred_dir,
                 const std::string& gold_dir, const std::string& out_dir) {
  Task task = task_from_string(task_name);
  auto pred = load_corpus(pred_dir);
  auto gold = load_corpus(gold_dir);
  EvalReport report = evaluate_corpus_task(pred, gold, task);
  std::string rendered = render_report(report);
  std::cout << rendered;
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "report.txt", rendered);
    ManifestBuilder manifest{"evaluate " + task_name, "", {pred_dir, gold_dir},
                             {fs::path(out_dir) / "report.txt"}, 0};
    manifest.write(out_dir);
  }
  return 0;
}

int cmd_ensemble(const std::string& in_dir, const std::string& unlabeled_dir,
                 const std::string& vocab_file, const std::string& config_file,
                 int k, const std::string& out_dir, long long seed_override) {
  Vocab vocab = load_vocab(vocab_file);
  auto cfg = parse_config_file(config_file);
  const TagSet& scheme = tag_set(SchemeId::ARROW);
  ModelConfig mc = model_config_from(cfg, vocab.size(), scheme.num_labels());
  TrainConfig tc = train_config_from(cfg);
  if (seed_override >= 0) tc.seed = static_cast<unsigned long long>(seed_override);

  std::map<std::string, std::vector<AnnotatedDocument>> by_prompt;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    if (!entry.is_directory()) continue;
    by_prompt[entry.path().filename().string()] = load_corpus(entry.path().string());
  }
  if (by_prompt.empty()) throw DataError("no prompt corpora under " + in_dir);
  std::vector<AnnotatedDocument> unlabeled = load_corpus(unlabeled_dir);

  EnsembleRun run = run_ensemble(by_prompt, unlabeled, vocab, mc, tc, k);

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "plan.json", seed_plan_to_json(run.plan));
  ManifestBuilder manifest{"ensemble", config_file, {in_dir, unlabeled_dir, vocab_file}, {}, tc.seed};
  manifest.outputs.push_back(fs::path(out_dir) / "plan.json");
  for (size_t i = 0; i < run.seed_models.size(); ++i) {
    fs::path ckpt = fs::path(out_dir) / ("seed" + std::to_string(i) + ".ckpt");
    save_checkpoint(run.seed_models[i].params, ckpt.string());
    manifest.outputs.push_back(ckpt);
  }
  save_corpus(run.synthetic, (fs::path(out_dir) / "synthetic").string());
  save_checkpoint(run.universal.params, (fs::path(out_dir) / "universal.ckpt").string());
  write_file(fs::path(out_dir) / "universal_metrics.log", format_metric_log(run.universal.log));
  manifest.outputs.push_back(fs::path(out_dir) / "synthetic" / "index.json");
  manifest.outputs.push_back(fs::path(out_dir) / "universal.ckpt");
  manifest.outputs.push_back(fs::path(out_dir) / "universal_metrics.log");
  manifest.write(out_dir);
  std::cout << "ensemble: " << run.seed_models.size() << " seed models, "
            << run.synthetic.size() << " synthetic documents\n";
  return 0;
}

int cmd_correspond(const std::string& human_dir, const std::vector<std::string>& synth_dirs,
                   const std::string& out_dir) {
  auto human = load_corpus(human_dir);
  if (human.empty()) throw DataError("empty human corpus");
  const TagSet& human_scheme = tag_set(scheme_from_string(human.front().source_scheme));

  std::vector<CorrespondenceMatrix> blocks;
  for (const std::string& dir : synth_dirs) {
    auto synth = load_corpus(dir);
    if (synth.empty()) throw DataError("empty synthetic corpus " + dir);
    const TagSet& synth_scheme = tag_set(scheme_from_string(synth.front().source_scheme));
    std::map<std::string, const AnnotatedDocument*> by_id;
    for (const AnnotatedDocument& d : synth) by_id[d.doc_id] = &d;
    std::vector<std::string> human_tags, synth_tags;
    for (const AnnotatedDocument& h : human) {
      auto it = by_id.find(h.doc_id);
      if (it == by_id.end())
        throw UsageError("correspond: document " + h.doc_id + " missing from " + dir);
      auto ht = collapse_to_words(h, human_scheme);
      auto st = collapse_to_words(*it->second, synth_scheme);
      if (ht.size() != st.size())
        throw UsageError("correspond: word count mismatch in " + h.doc_id);
      human_tags.insert(human_tags.end(), ht.begin(), ht.end());
      synth_tags.insert(synth_tags.end(), st.begin(), st.end());
    }
    blocks.push_back(cross_tabulate(human_tags, synth_tags, human_scheme, synth_scheme));
  }
  std::string rendered = render_correspondence(blocks);
  std::cout << rendered;
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "correspondence.txt", rendered);
    ManifestBuilder manifest{"correspond", "", {human_dir}, {fs::path(out_dir) / "correspondence.txt"}, 0};
    for (const std::string& d : synth_dirs) manifest.inputs.push_back(d);
    manifest.write(out_dir);
  }
  return 0;
}

int cmd_export_html(const std::string& in_file, const std::string& scheme_name,
                    const std::string& palette_file, const std::string& out_file) {
  AnnotatedDocument doc = document_from_json(read_file(in_file));
  const TagSet& scheme = tag_set(scheme_from_string(
      scheme_name.empty() ? doc.source_scheme : scheme_name));
  Palette palette =
      palette_file.empty() ? default_palette(scheme) : load_palette(read_file(palette_file));
  std::vector<std::string> warnings;
  std::string html = export_html(doc, scheme, palette, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  write_file(out_file, html);
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argument annotation pipeline"};
  app.require_subcommand(1);

  std::string format, in_path, out_path, task, vocab_path, config_path, checkpoint_path;
  std::string pred_path, gold_path, human_path, scheme_name, palette_path, unlabeled_path;
  std::vector<std::string> synth_paths;
  int size = 4000, k = 5, model_index = 0;
  long long seed = -1;

  auto* ingest = app.add_subcommand("ingest", "read a raw corpus into canonical form");
  ingest->add_option("--format", format, "brat|persuade|html")->required();
  ingest->add_option("--in", in_path)->required();
  ingest->add_option("--out", out_path)->required();

  auto* vocab = app.add_subcommand("vocab", "train a subword vocabulary");
  vocab->add_option("--in", in_path, "canonical corpus directory")->required();
  vocab->add_option("--out", out_path)->required();
  vocab->add_option("--size", size, "total vocabulary budget");

  auto* train_cmd = app.add_subcommand("train", "fine-tune on one task");
  train_cmd->add_option("--task", task)->required();
  train_cmd->add_option("--in", in_path)->required();
  train_cmd->add_option("--vocab", vocab_path)->required();
  train_cmd->add_option("--config", config_path)->required();
  train_cmd->add_option("--out", out_path)->required();
  train_cmd->add_option("--seed", seed);

  auto* predict = app.add_subcommand("predict", "annotate a corpus with a checkpoint");
  predict->add_option("--task", task)->required();
  predict->add_option("--in", in_path)->required();
  predict->add_option("--vocab", vocab_path)->required();
  predict->add_option("--checkpoint", checkpoint_path)->required();
  predict->add_option("--out", out_path)->required();
  predict->add_option("--model-index", model_index);

  auto* evaluate = app.add_subcommand("evaluate", "compare predictions against gold");
  evaluate->add_option("--task", task)->required();
  evaluate->add_option("--pred", pred_path)->required();
  evaluate->add_option("--gold", gold_path)->required();
  evaluate->add_option("--out", out_path);

  auto* ensemble = app.add_subcommand("ensemble", "leave-prompt-out seed models + universal model");
  ensemble->add_option("--in", in_path, "directory of per-prompt corpora")->required();
  ensemble->add_option("--unlabeled", unlabeled_path)->required();
  ensemble->add_option("--vocab", vocab_path)->required();
  ensemble->add_option("--config", config_path)->required();
  ensemble->add_option("--k", k);
  ensemble->add_option("--out", out_path)->required();
  ensemble->add_option("--seed", seed);

  auto* correspond = app.add_subcommand("correspond", "cross-scheme word-level tables");
  correspond->add_option("--human", human_path)->required();
  correspond->add_option("--synth", synth_paths)->required()->expected(1, 2);
  correspond->add_option("--out", out_path);

  auto* export_html_cmd = app.add_subcommand("export-html", "color-coded essay rendering");
  export_html_cmd->add_option("--in", in_path, "canonical document json")->required();
  export_html_cmd->add_option("--scheme", scheme_name);
  export_html_cmd->add_option("--palette", palette_path);
  export_html_cmd->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
    if (ingest->parsed()) return cmd_ingest(format, in_path, out_path);
    if (vocab->parsed()) return cmd_vocab(in_path, out_path, size);
    if (train_cmd->parsed())
      return cmd_train(task, in_path, vocab_path, config_path, out_path, seed);
    if (predict->parsed())
      return cmd_predict(task, in_path, vocab_path, checkpoint_path, out_path, model_index);
    if (evaluate->parsed()) return cmd_evaluate(task, pred_path, gold_path, out_path);
    if (ensemble->parsed())
      return cmd_ensemble(in_path, unlabeled_path, vocab_path, config_path, k, out_path, seed);
    if (correspond->parsed()) return cmd_correspond(human_path, synth_paths, out_path);
    if (export_html_cmd->parsed())
      return cmd_export_html(in_path, scheme_name, palette_path, out_path);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
