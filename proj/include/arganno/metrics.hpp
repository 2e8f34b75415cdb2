#pragma once

#include <string>
#include <vector>

#include "arganno/document.hpp"
#include "arganno/schemes.hpp"

namespace arganno {

/// Per-tag Cohen's kappa over the one-vs-rest binary indicator for `tag`.
/// Degenerate chance agreement (p_e = 1) yields 1 for identical indicator
/// sequences and 0 otherwise.
double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b, const std::string& tag);

struct Prf1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0, fp = 0, fn = 0;
};

/// Precision/recall/F1 for one tag; zero denominators yield 0.
Prf1 prf1(const std::vector<std::string>& pred, const std::vector<std::string>& gold,
          const std::string& tag);

struct TagMetrics {
  double kappa = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;  // gold occurrences
  long tp = 0, fp = 0, fn = 0;
};

struct EvalReport {
  std::vector<std::pair<std::string, TagMetrics>> per_tag;
  double macro_f1 = 0.0;        // scheme tags only (no None), absent tags excluded
  double micro_accuracy = 0.0;
  double sum_kappa = 0.0;       // over every row including None
  double sum_f1 = 0.0;
  long total_units = 0;

  double metric_sum(bool use_kappa) const { return use_kappa ? sum_kappa : sum_f1; }
};

/// All per-tag metrics plus macro/micro aggregates over one flattened unit
/// sequence (report rows follow the scheme's tag order, None last).
EvalReport evaluate_labels(const std::vector<std::string>& pred,
                           const std::vector<std::string>& gold, const TagSet& scheme);

/// Flattens all units across the corpus (sentences or words, per `unit`) and
/// evaluates pred against gold. Documents are matched by doc_id.
EvalReport evaluate(const std::vector<AnnotatedDocument>& pred,
                    const std::vector<AnnotatedDocument>& gold, const TagSet& scheme,
                    SpanUnit unit);

/// Per-tag rows plus average rows, in the layout of the results tables.
std::string render_report(const EvalReport& report);

}  // namespace arganno
