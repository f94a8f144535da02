#include "krf/metrics.hpp"

#include <algorithm>
#include <sstream>

#include "krf/errors.hpp"

#include "json.hpp"

namespace krf {

double one_error(const std::vector<std::vector<double>>& scores,
                 const std::vector<LabelSet>& gold) {
  if (scores.size() != gold.size()) {
    throw DataError("one_error: scores and gold size mismatch");
  }
  if (scores.empty()) return 0.0;
  std::size_t misses = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (gold[i].empty()) {
      throw DataError("one_error: empty gold set at sample " + std::to_string(i));
    }
    std::size_t top = 0;
    for (std::size_t c = 1; c < scores[i].size(); ++c) {
      if (scores[i][c] > scores[i][top]) top = c;  // ties keep lowest index
    }
    if (gold[i].count(top) == 0) ++misses;
  }
  return static_cast<double>(misses) / static_cast<double>(scores.size());
}

double hamming_loss(const std::vector<LabelSet>& pred,
                    const std::vector<LabelSet>& gold, std::size_t n_labels) {
  if (pred.size() != gold.size()) {
    throw DataError("hamming_loss: pred and gold size mismatch");
  }
  if (pred.empty()) return 0.0;
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t c : pred[i]) mismatches += gold[i].count(c) == 0;
    for (std::size_t c : gold[i]) mismatches += pred[i].count(c) == 0;
  }
  return static_cast<double>(mismatches) /
         (static_cast<double>(pred.size()) * static_cast<double>(n_labels));
}

F1Result f1_scores(const std::vector<LabelSet>& pred,
                   const std::vector<LabelSet>& gold, std::size_t n_labels,
                   const std::vector<std::string>& label_names) {
  if (pred.size() != gold.size()) {
    throw DataError("f1_scores: pred and gold size mismatch");
  }
  std::vector<std::size_t> tp(n_labels, 0), fp(n_labels, 0), fn(n_labels, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t c : pred[i]) {
      if (gold[i].count(c)) {
        ++tp[c];
      } else {
        ++fp[c];
      }
    }
    for (std::size_t c : gold[i]) {
      if (pred[i].count(c) == 0) ++fn[c];
    }
  }
  F1Result res;
  double macro_sum = 0.0;
  std::size_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (std::size_t c = 0; c < n_labels; ++c) {
    PerLabelStats s;
    s.label = c < label_names.size() ? label_names[c] : std::to_string(c);
    s.support = tp[c] + fn[c];
    const std::size_t denom_p = tp[c] + fp[c];
    const std::size_t denom_r = tp[c] + fn[c];
    s.precision = denom_p ? static_cast<double>(tp[c]) / denom_p : 0.0;
    s.recall = denom_r ? static_cast<double>(tp[c]) / denom_r : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    macro_sum += s.f1;
    tp_all += tp[c];
    fp_all += fp[c];
    fn_all += fn[c];
    res.per_label.push_back(std::move(s));
  }
  res.macro_f1 = n_labels ? macro_sum / static_cast<double>(n_labels) : 0.0;
  const double micro_p =
      (tp_all + fp_all) ? static_cast<double>(tp_all) / (tp_all + fp_all) : 0.0;
  const double micro_r =
      (tp_all + fn_all) ? static_cast<double>(tp_all) / (tp_all + fn_all) : 0.0;
  res.micro_f1 = (micro_p + micro_r) > 0.0
                     ? 2.0 * micro_p * micro_r / (micro_p + micro_r)
                     : 0.0;
  return res;
}

EvalReport evaluate_predictions(const std::vector<std::vector<double>>& scores,
                                const std::vector<LabelSet>& pred,
                                const std::vector<LabelSet>& gold,
                                std::size_t n_labels,
                                const std::vector<std::string>& label_names) {
  EvalReport report;
  report.one_error = one_error(scores, gold);
  report.hamming_loss = hamming_loss(pred, gold, n_labels);
  F1Result f1 = f1_scores(pred, gold, n_labels, label_names);
  report.macro_f1 = f1.macro_f1;
  report.micro_f1 = f1.micro_f1;
  report.per_label = std::move(f1.per_label);
  return report;
}

std::string EvalReport::to_json(int indent) const {
  nlohmann::json j;
  j["one_error"] = one_error;
  j["hamming_loss"] = hamming_loss;
  j["macro_f1"] = macro_f1;
  j["micro_f1"] = micro_f1;
  j["per_label"] = nlohmann::json::array();
  for (const PerLabelStats& s : per_label) {
    j["per_label"].push_back({{"label", s.label},
                              {"precision", s.precision},
                              {"recall", s.recall},
                              {"f1", s.f1},
                              {"support", s.support}});
  }
  return j.dump(indent);
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %-10s %-10s %-10s\n", "OE", "HL",
                "MacroF1", "MicroF1");
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-10.4f %-10.4f %-10.4f %-10.4f\n",
                one_error, hamming_loss, macro_f1, micro_f1);
  os << buf;
  return os.str();
}

}  // namespace krf
