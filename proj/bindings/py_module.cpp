// Python bindings for the core pipeline: ingestion, schemes, tokenizer,
// encoder, training, metrics, correspondence, and HTML export.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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

namespace py = pybind11;
using namespace arganno;

namespace {

std::vector<std::vector<double>> tensor_to_rows(const Tensor& t) {
  std::vector<std::vector<double>> out(static_cast<size_t>(t.rows));
  for (int i = 0; i < t.rows; ++i) {
    out[static_cast<size_t>(i)].resize(static_cast<size_t>(t.cols));
    for (int j = 0; j < t.cols; ++j)
      out[static_cast<size_t>(i)][static_cast<size_t>(j)] = t.at(i, j);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_arganno, m) {
  m.doc() = "argument annotation pipeline: corpora, schemes, recurrent encoder, metrics";

  py::register_exception<UsageError>(m, "UsageError");
  py::register_exception<ParseError>(m, "ParseFault");
  py::register_exception<DataError>(m, "DataError");

  // ---- documents ----------------------------------------------------------
  py::class_<TextRange>(m, "TextRange")
      .def(py::init<>())
      .def(py::init<int, int>())
      .def_readwrite("begin", &TextRange::begin)
      .def_readwrite("end", &TextRange::end)
      .def("__repr__", [](const TextRange& r) {
        return "TextRange(" + std::to_string(r.begin) + ", " + std::to_string(r.end) + ")";
      });

  py::enum_<SpanUnit>(m, "SpanUnit")
      .value("sentence", SpanUnit::sentence)
      .value("word_range", SpanUnit::word_range)
      .value("char_range", SpanUnit::char_range);

  py::enum_<StanceLabel>(m, "StanceLabel")
      .value("none", StanceLabel::none)
      .value("support", StanceLabel::support)
      .value("attack", StanceLabel::attack);

  py::class_<AnnotationSpan>(m, "AnnotationSpan")
      .def(py::init<>())
      .def_readwrite("span_id", &AnnotationSpan::span_id)
      .def_readwrite("tag", &AnnotationSpan::tag)
      .def_readwrite("unit", &AnnotationSpan::unit)
      .def_readwrite("range", &AnnotationSpan::range)
      .def_readwrite("votes", &AnnotationSpan::votes);

  py::class_<ArgRelation>(m, "ArgRelation")
      .def(py::init<>())
      .def_readwrite("source", &ArgRelation::source)
      .def_readwrite("target", &ArgRelation::target)
      .def_readwrite("linked", &ArgRelation::linked)
      .def_readwrite("stance", &ArgRelation::stance);

  py::class_<AnnotatedDocument>(m, "AnnotatedDocument")
      .def(py::init<>())
      .def_readwrite("doc_id", &AnnotatedDocument::doc_id)
      .def_readwrite("text", &AnnotatedDocument::text)
      .def_readwrite("source_scheme", &AnnotatedDocument::source_scheme)
      .def_readwrite("paragraphs", &AnnotatedDocument::paragraphs)
      .def_readwrite("sentences", &AnnotatedDocument::sentences)
      .def_readwrite("words", &AnnotatedDocument::words)
      .def_readwrite("spans", &AnnotatedDocument::spans)
      .def_readwrite("relations", &AnnotatedDocument::relations)
      .def_readwrite("warnings", &AnnotatedDocument::warnings);

  m.def("split_words", [](const std::string& t) { return split_words(t); });
  m.def("split_paragraphs", [](const std::string& t) { return split_paragraphs(t); });
  m.def("split_sentences", [](const std::string& t) { return split_sentences(t); });
  m.def("check_document", &check_document);

  // ---- ingestion ----------------------------------------------------------
  m.def("parse_brat_essay", &parse_brat_essay, py::arg("txt_content"),
        py::arg("ann_content"), py::arg("doc_id") = "");
  m.def("parse_persuade_table", &parse_persuade_table);
  m.def("parse_html_essay", &parse_html_essay, py::arg("html_content"),
        py::arg("doc_id") = "");
  m.def("document_to_json", &document_to_json);
  m.def("document_from_json", &document_from_json);
  m.def("save_corpus", &save_corpus);
  m.def("load_corpus", &load_corpus);
  m.def("render_stats", [](const std::vector<AnnotatedDocument>& corpus) {
    return render_stats(corpus_stats(corpus));
  });

  // ---- schemes ------------------------------------------------------------
  py::enum_<SchemeId>(m, "SchemeId")
      .value("ARROW", SchemeId::ARROW)
      .value("PERSUADE", SchemeId::PERSUADE)
      .value("AAE_BIO", SchemeId::AAE_BIO)
      .value("AAE_COMPONENT", SchemeId::AAE_COMPONENT)
      .value("AAE_RELATION", SchemeId::AAE_RELATION)
      .value("AAE_STANCE", SchemeId::AAE_STANCE);

  py::class_<TagSet>(m, "TagSet")
      .def_readonly("name", &TagSet::name)
      .def_readonly("tags", &TagSet::tags)
      .def_readonly("none_tag", &TagSet::none_tag)
      .def_readonly("hierarchy", &TagSet::hierarchy)
      .def_readonly("extended_hierarchy", &TagSet::extended_hierarchy)
      .def("num_labels", &TagSet::num_labels)
      .def("label_index", &TagSet::label_index)
      .def("label_name", &TagSet::label_name);

  m.def("tag_set", &tag_set, py::return_value_policy::reference);
  m.def("resolve_pair", &resolve_pair);
  m.def("resolve_votes", &resolve_votes);
  m.def("load_tag_set", &load_tag_set);
  m.def("save_tag_set", &save_tag_set);

  // ---- tokenizer ----------------------------------------------------------
  py::class_<Vocab>(m, "Vocab")
      .def_readonly("pieces", &Vocab::pieces)
      .def("size", &Vocab::size)
      .def("piece_id", &Vocab::piece_id)
      .def("token_name", &Vocab::token_name)
      .def_readonly_static("mask_id", &Vocab::mask_id)
      .def_readonly_static("sep_id", &Vocab::sep_id)
      .def_readonly_static("cls_id", &Vocab::cls_id)
      .def_readonly_static("unk_id", &Vocab::unk_id)
      .def_readonly_static("ignore_id", &Vocab::ignore_id);

  py::class_<TokenizedText>(m, "TokenizedText")
      .def_readonly("token_ids", &TokenizedText::token_ids)
      .def_readonly("word_alignment", &TokenizedText::word_alignment);

  m.def("train_vocab", &train_vocab);
  m.def("encode_words", &encode_words);
  m.def("decode", &decode);
  m.def("save_vocab", &save_vocab);
  m.def("load_vocab", &load_vocab);

  // ---- encoder ------------------------------------------------------------
  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("layers", &ModelConfig::layers)
      .def_readwrite("heads", &ModelConfig::heads)
      .def_readwrite("width", &ModelConfig::width)
      .def_readwrite("segment_len", &ModelConfig::segment_len)
      .def_readwrite("vocab_size", &ModelConfig::vocab_size)
      .def_readwrite("num_labels", &ModelConfig::num_labels)
      .def_readwrite("mem_len", &ModelConfig::mem_len)
      .def("validate", &ModelConfig::validate);

  py::class_<Params>(m, "Params")
      .def_readonly("config", &Params::config)
      .def("parameter_count", &Params::parameter_count)
      .def_static("init", &Params::init);

  py::class_<MemoryState>(m, "MemoryState").def_static("empty", &MemoryState::empty);

  m.def("forward_segment",
        [](const Params& p, const std::vector<int>& segment, const MemoryState& memory) {
          auto [out, mem] = forward_segment(p, segment, memory);
          return py::make_tuple(tensor_to_rows(out), mem);
        });
  m.def("stream_document", [](const Params& p, const std::vector<int>& tokens) {
    return tensor_to_rows(stream_document(p, tokens));
  });
  m.def("classify_positions",
        [](const Params& p, const std::vector<int>& segment, const MemoryState& memory,
           const std::vector<int>& positions) {
          return tensor_to_rows(classify_positions(p, segment, memory, positions));
        });
  m.def("classify_sequence", [](const Params& p, const std::vector<int>& tokens) {
    return tensor_to_rows(classify_sequence(p, tokens))[0];
  });
  m.def("save_checkpoint", &save_checkpoint);
  m.def("load_checkpoint", &load_checkpoint);

  // ---- codecs -------------------------------------------------------------
  py::enum_<Task>(m, "Task")
      .value("arrow_sentence", Task::arrow_sentence)
      .value("persuade_word", Task::persuade_word)
      .value("aae_bio", Task::aae_bio)
      .value("aae_component", Task::aae_component)
      .value("aae_relation", Task::aae_relation)
      .value("aae_stance", Task::aae_stance);

  py::class_<EncodedExample>(m, "EncodedExample")
      .def_readonly("task", &EncodedExample::task)
      .def_readonly("input_ids", &EncodedExample::input_ids)
      .def_readonly("target_ids", &EncodedExample::target_ids)
      .def_readonly("labeled_positions", &EncodedExample::labeled_positions)
      .def_readonly("block_ids", &EncodedExample::block_ids);

  m.attr("IGNORE_TARGET") = kIgnoreTarget;
  m.def("encode_arrow", &encode_arrow);
  m.def("encode_persuade", &encode_persuade);
  m.def("encode_aae_bio",
        [](const AnnotatedDocument& d, const Vocab& v) { return encode_aae_bio(d, v); });
  m.def("decode_bio",
        [](const std::vector<std::string>& labels) { return decode_bio(labels); });
  m.def("build_task_dataset",
        [](const std::vector<AnnotatedDocument>& corpus, Task task, const Vocab& vocab) {
          return build_task_dataset(corpus, task, vocab);
        });
  m.def("render_example", &render_example);

  // ---- training -----------------------------------------------------------
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("max_tokens", &TrainConfig::max_tokens)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("dev_fraction", &TrainConfig::dev_fraction)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("stop_on_kappa", &TrainConfig::stop_on_kappa);

  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("epoch", &EpochRecord::epoch)
      .def_readonly("train_loss", &EpochRecord::train_loss)
      .def_readonly("dev_metric", &EpochRecord::dev_metric);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("params", &TrainResult::params)
      .def_readonly("log", &TrainResult::log)
      .def_readonly("best_epoch", &TrainResult::best_epoch);

  m.def("train", &train, py::call_guard<py::gil_scoped_release>());
  m.def("train_with_dev", &train_with_dev, py::call_guard<py::gil_scoped_release>());
  m.def("predict_labels", &predict_labels);
  m.def("evaluate_examples", &evaluate_examples);

  // ---- metrics ------------------------------------------------------------
  py::class_<TagMetrics>(m, "TagMetrics")
      .def_readonly("kappa", &TagMetrics::kappa)
      .def_readonly("precision", &TagMetrics::precision)
      .def_readonly("recall", &TagMetrics::recall)
      .def_readonly("f1", &TagMetrics::f1)
      .def_readonly("support", &TagMetrics::support);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("per_tag", &EvalReport::per_tag)
      .def_readonly("macro_f1", &EvalReport::macro_f1)
      .def_readonly("micro_accuracy", &EvalReport::micro_accuracy)
      .def_readonly("sum_kappa", &EvalReport::sum_kappa)
      .def_readonly("sum_f1", &EvalReport::sum_f1);

  m.def("cohen_kappa", &cohen_kappa);
  m.def("prf1", [](const std::vector<std::string>& pred,
                   const std::vector<std::string>& gold, const std::string& tag) {
    Prf1 r = prf1(pred, gold, tag);
    return py::make_tuple(r.precision, r.recall, r.f1);
  });
  m.def("evaluate_labels", &evaluate_labels);
  m.def("evaluate", &evaluate);
  m.def("render_report", &render_report);

  // ---- ensembling and correspondence --------------------------------------
  py::class_<SeedPlan::ModelSplit>(m, "ModelSplit")
      .def_readonly("train_prompts", &SeedPlan::ModelSplit::train_prompts)
      .def_readonly("dev_prompt", &SeedPlan::ModelSplit::dev_prompt)
      .def_readonly("test_prompt", &SeedPlan::ModelSplit::test_prompt);

  py::class_<SeedPlan>(m, "SeedPlan")
      .def_readonly("prompts", &SeedPlan::prompts)
      .def_readonly("models", &SeedPlan::models);

  m.def("build_seed_plan", &build_seed_plan);
  m.def("synthesize_labels", &synthesize_labels);

  py::class_<CorrespondenceMatrix>(m, "CorrespondenceMatrix")
      .def_readonly("row_tags", &CorrespondenceMatrix::row_tags)
      .def_readonly("col_tags", &CorrespondenceMatrix::col_tags)
      .def_readonly("cells", &CorrespondenceMatrix::cells)
      .def_readonly("row_marginals", &CorrespondenceMatrix::row_marginals)
      .def_readonly("col_marginals", &CorrespondenceMatrix::col_marginals)
      .def_readonly("row_support", &CorrespondenceMatrix::row_support);

  m.def("collapse_to_words", &collapse_to_words);
  m.def("cross_tabulate", &cross_tabulate);
  m.def("render_correspondence", &render_correspondence);

  // ---- html ---------------------------------------------------------------
  m.def("html_to_text", &html_to_text);
  m.def("default_palette", &default_palette);
  m.def("export_html",
        [](const AnnotatedDocument& doc, const TagSet& scheme, const Palette& palette) {
          return export_html(doc, scheme, palette);
        });
}
