#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace krf {

using LabelSet = std::set<std::size_t>;

struct PerLabelStats {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold occurrences
};

struct EvalReport {
  double one_error = 0.0;
  double hamming_loss = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<PerLabelStats> per_label;

  std::string to_json(int indent = 2) const;
  // Aligned one-row table in the order OE, HL, Macro F1, Micro F1.
  std::string to_table() const;
};

// Fraction of samples whose argmax-score label is outside the gold set.
// Ties break to the lowest label index. Every gold set must be non-empty.
double one_error(const std::vector<std::vector<double>>& scores,
                 const std::vector<LabelSet>& gold);

// (sum over samples of |pred symdiff gold|) / (N * n_labels).
double hamming_loss(const std::vector<LabelSet>& pred,
                    const std::vector<LabelSet>& gold, std::size_t n_labels);

struct F1Result {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<PerLabelStats> per_label;
};

// Per-label precision/recall/F1 with the 0/0 -> 0 convention. Macro F1 is the
// unweighted mean over all n_labels labels (zero-support labels included);
// micro F1 pools TP/FP/FN across labels.
F1Result f1_scores(const std::vector<LabelSet>& pred,
                   const std::vector<LabelSet>& gold, std::size_t n_labels,
                   const std::vector<std::string>& label_names = {});

EvalReport evaluate_predictions(const std::vector<std::vector<double>>& scores,
                                const std::vector<LabelSet>& pred,
                                const std::vector<LabelSet>& gold,
                                std::size_t n_labels,
                                const std::vector<std::string>& label_names = {});

}  // namespace krf
