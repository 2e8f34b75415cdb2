#include "arganno/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "arganno/correspondence.hpp"
#include "arganno/errors.hpp"

namespace arganno {

double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b, const std::string& tag) {
  if (labels_a.size() != labels_b.size())
    throw UsageError("cohen_kappa: length mismatch " + std::to_string(labels_a.size()) +
                     " vs " + std::to_string(labels_b.size()));
  if (labels_a.empty()) throw UsageError("cohen_kappa: empty label lists");

  const long n = static_cast<long>(labels_a.size());
  long both = 0, a_only = 0, b_only = 0, neither = 0;
  for (size_t i = 0; i < labels_a.size(); ++i) {
    bool a = labels_a[i] == tag;
    bool b = labels_b[i] == tag;
    if (a && b) ++both;
    else if (a) ++a_only;
    else if (b) ++b_only;
    else ++neither;
  }
  const long a1 = both + a_only, b1 = both + b_only;
  // Degenerate marginals make chance agreement exactly 1.
  if ((a1 == n && b1 == n) || (a1 == 0 && b1 == 0)) return 1.0;
  if ((a1 == n && b1 == 0) || (a1 == 0 && b1 == n)) return 0.0;

  const double dn = static_cast<double>(n);
  double p_o = static_cast<double>(both + neither) / dn;
  double p_e = (static_cast<double>(a1) * static_cast<double>(b1) +
                static_cast<double>(n - a1) * static_cast<double>(n - b1)) /
               (dn * dn);
  return (p_o - p_e) / (1.0 - p_e);
}

Prf1 prf1(const std::vector<std::string>& pred, const std::vector<std::string>& gold,
          const std::string& tag) {
  if (pred.size() != gold.size())
    throw UsageError("prf1: length mismatch " + std::to_string(pred.size()) + " vs " +
                     std::to_string(gold.size()));
  Prf1 out;
  for (size_t i = 0; i < pred.size(); ++i) {
    bool p = pred[i] == tag;
    bool g = gold[i] == tag;
    if (p && g) ++out.tp;
    else if (p) ++out.fp;
    else if (g) ++out.fn;
  }
  if (out.tp + out.fp > 0)
    out.precision = static_cast<double>(out.tp) / static_cast<double>(out.tp + out.fp);
  if (out.tp + out.fn > 0)
    out.recall = static_cast<double>(out.tp) / static_cast<double>(out.tp + out.fn);
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

EvalReport evaluate_labels(const std::vector<std::string>& pred,
                           const std::vector<std::string>& gold, const TagSet& scheme) {
  if (pred.size() != gold.size())
    throw UsageError("evaluate_labels: length mismatch " + std::to_string(pred.size()) +
                     " vs " + std::to_string(gold.size()));
  EvalReport report;
  report.total_units = static_cast<long>(pred.size());

  std::vector<std::string> rows = scheme.tags;
  if (scheme.none_tag) rows.push_back(*scheme.none_tag);

  double macro_sum = 0.0;
  long macro_count = 0;
  for (const std::string& tag : rows) {
    TagMetrics m;
    Prf1 p = prf1(pred, gold, tag);
    m.precision = p.precision;
    m.recall = p.recall;
    m.f1 = p.f1;
    m.tp = p.tp;
    m.fp = p.fp;
    m.fn = p.fn;
    m.support = p.tp + p.fn;
    m.kappa = pred.empty() ? 0.0 : cohen_kappa(pred, gold, tag);
    report.per_tag.emplace_back(tag, m);
    report.sum_kappa += m.kappa;
    report.sum_f1 += m.f1;
    bool is_none = scheme.none_tag && tag == *scheme.none_tag;
    if (!is_none && m.tp + m.fp + m.fn > 0) {
      macro_sum += m.f1;
      ++macro_count;
    }
  }
  report.macro_f1 = macro_count > 0 ? macro_sum / static_cast<double>(macro_count) : 0.0;

  long correct = 0;
  for (size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == gold[i]) ++correct;
  report.micro_accuracy =
      pred.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(pred.size());
  return report;
}

namespace {

std::vector<std::string> flatten_units(const AnnotatedDocument& doc, const TagSet& scheme,
                                       SpanUnit unit) {
  if (unit == SpanUnit::sentence) {
    std::string none = scheme.none_tag.value_or("None");
    std::vector<std::string> tags(doc.sentences.size(), none);
    for (const AnnotationSpan& s : doc.spans) {
      if (s.unit != SpanUnit::sentence) continue;
      for (int k = s.range.begin;
           k < s.range.end && k < static_cast<int>(tags.size()); ++k)
        tags[static_cast<size_t>(k)] = s.tag;
    }
    return tags;
  }
  return collapse_to_words(doc, scheme);
}

}  // namespace

EvalReport evaluate(const std::vector<AnnotatedDocument>& pred,
                    const std::vector<AnnotatedDocument>& gold, const TagSet& scheme,
                    SpanUnit unit) {
  std::map<std::string, const AnnotatedDocument*> gold_by_id;
  for (const AnnotatedDocument& g : gold) gold_by_id[g.doc_id] = &g;
  std::string missing;
  std::vector<std::string> flat_pred, flat_gold;
  for (const AnnotatedDocument& p : pred) {
    auto it = gold_by_id.find(p.doc_id);
    if (it == gold_by_id.end()) {
      missing += (missing.empty() ? "" : ", ") + p.doc_id;
      continue;
    }
    auto pt = flatten_units(p, scheme, unit);
    auto gt = flatten_units(*it->second, scheme, unit);
    if (pt.size() != gt.size())
      throw UsageError("evaluate: unit count mismatch in document " + p.doc_id);
    flat_pred.insert(flat_pred.end(), pt.begin(), pt.end());
    flat_gold.insert(flat_gold.end(), gt.begin(), gt.end());
    gold_by_id.erase(it);
  }
  for (const auto& [id, g] : gold_by_id) missing += (missing.empty() ? "" : ", ") + id;
  if (!missing.empty())
    throw UsageError("evaluate: documents present on one side only: " + missing);
  return evaluate_labels(flat_pred, flat_gold, scheme);
}

std::string render_report(const EvalReport& report) {
  std::ostringstream out;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%6.3f", v);
    return std::string(buf);
  };
  out << "Element               kappa      P      R     F1  support\n";
  double kappa_sum = 0.0;
  for (const auto& [tag, m] : report.per_tag) {
    out << tag;
    for (size_t i = tag.size(); i < 20; ++i) out << ' ';
    out << num(m.kappa) << " " << num(m.precision) << " " << num(m.recall) << " "
        << num(m.f1) << "  " << m.support << "\n";
    kappa_sum += m.kappa;
  }
  double avg_kappa =
      report.per_tag.empty() ? 0.0 : kappa_sum / static_cast<double>(report.per_tag.size());
  out << "Average             " << num(avg_kappa) << "\n";
  out << "Macro Avg           " << std::string(21, ' ') << num(report.macro_f1) << "\n";
  out << "Micro accuracy      " << num(report.micro_accuracy) << "\n";
  return out.str();
}

}  // namespace arganno
