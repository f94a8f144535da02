#pragma once

#include <string>
#include <vector>

#include "krf/data.hpp"
#include "krf/style_graph.hpp"
#include "krf/tensor.hpp"

namespace krf {

enum class Ablation { kFull, kNoStat, kNoKnowledge, kHanOnly };

std::string ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& name);

// All stages of the label-correlation construction, kept around for export
// and inspection. `integrated` stacks the two normalized matrices as a
// (2, |C|, |C|) tensor: slice 0 statistical, slice 1 knowledge.
struct CorrelationMatrices {
  std::vector<std::string> styles;
  Tensor statistical_raw;
  Tensor statistical_filtered;
  Tensor knowledge;      // with unit self-loops added
  Tensor normalized_statistical;
  Tensor normalized_knowledge;
  Tensor integrated;
};

// Co-occurrence counts over the training gold sets: A[i][j] (i != j) is the
// number of samples containing both labels, A[i][i] the number containing
// label i.
Tensor cooccurrence_counts(const std::vector<SongSample>& train,
                           const std::vector<std::string>& styles);

// Zeroes off-diagonal entries strictly below tau; the diagonal is exempt.
Tensor threshold_filter(const Tensor& a, double tau);

// Symmetric degree normalization D^(-1/2) A D^(-1/2) with D_ii = sum_j A_ij.
// Zero-degree rows map to zero. Rejects negative entries.
Tensor normalize_adjacency(const Tensor& a);

// Stacks two normalized |C|x|C| matrices into a (2,|C|,|C|) tensor,
// statistical slice first.
Tensor integrate(const Tensor& statistical, const Tensor& knowledge);

// Full pipeline: counts -> tau filter -> normalize; knowledge scores ->
// unit self-loops -> normalize; stack. Ablations zero the corresponding
// normalized slice before stacking (kNoStat zeroes statistical, kNoKnowledge
// zeroes knowledge).
CorrelationMatrices build_correlation_matrices(
    const std::vector<SongSample>& train, const StyleGraph& graph,
    const RelationScores& scores, double tau, Ablation ablation = Ablation::kFull);

// CSV with a style-name header row and a leading style-name column. Optional
// comment lines are written first, each prefixed with "# ".
void write_matrix_csv(const std::string& path, const std::vector<std::string>& names,
                      const Tensor& matrix,
                      const std::vector<std::string>& comments = {});

}  // namespace krf
