#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "krf/style_graph.hpp"
#include "krf/tensor.hpp"

namespace krf {

struct SongSample {
  std::string id;
  std::string title;
  std::vector<std::string> reviews;  // K >= 1
  std::vector<std::string> labels;   // M >= 1, deduplicated
};

// One JSON object per line: {"id","title","reviews","labels"}. A leading
// object containing only "krf_config" is treated as embedded run metadata and
// skipped. When `style_names` is non-empty every label must be one of them.
std::vector<SongSample> load_dataset(const std::string& path,
                                     const std::vector<std::string>& style_names = {});
void save_dataset(const std::string& path, const std::vector<SongSample>& samples,
                  const std::string& config_json = "");

struct DatasetSplits {
  std::vector<SongSample> train;
  std::vector<SongSample> validation;
  std::vector<SongSample> test;
  std::uint64_t seed = 0;
};

// Deterministic shuffle by seed, then 70% / 21% / 9%: validation and test
// sizes are floored, the remainder goes to train. Requires N >= 10.
DatasetSplits split_dataset(const std::vector<SongSample>& samples,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic corpus with planted style correlations.

struct SynthConfig {
  std::size_t n_samples = 2000;
  std::uint64_t seed = 7;
  std::size_t reviews_per_song = 3;
  // Indicator tokens planted per gold label, uniform in [min,max].
  std::size_t indicators_min = 3;
  std::size_t indicators_max = 8;
  std::size_t indicator_vocab_per_style = 12;
  std::size_t noise_vocab_size = 120;
  // Fraction of a sample's tokens that are indicators; the rest is noise.
  double signal_ratio = 0.45;
  // Relative draw weight multiplier for styles related (in the graph) to an
  // already-chosen style.
  double related_boost = 5.0;
  // Fraction of samples whose label set is replaced by a uniformly random
  // unrelated pair; these spurious rare pairs pollute low co-occurrence
  // counts.
  double noise_pair_rate = 0.0;
  // Style kept at low frequency; must share a graph relation with the style
  // holding the largest base weight. Empty string picks one automatically.
  std::string minority_style;
  double minority_weight = 0.012;  // base draw weight (others follow a ramp)
};

struct SyntheticTruth {
  std::vector<std::string> styles;
  // Exact pair-inclusion probabilities P(i and j both in the gold set)
  // under the generator's sampling process; diagonal holds marginals.
  Tensor pair_probs;
  std::string minority_style;
  double minority_marginal = 0.0;
};

struct SyntheticDataset {
  std::vector<SongSample> samples;
  SyntheticTruth truth;
};

// Draws 2-3 labels per sample from a base-weight distribution in which
// graph-related styles are boosted, then fills reviews with per-style
// indicator tokens and shared noise tokens. Requires >= 6 styles and a
// non-empty graph.
SyntheticDataset generate_synthetic(const StyleGraph& graph, const SynthConfig& cfg);

// Expected pair counts (pair_probs * n_samples) as CSV with style headers.
void write_planted_truth_csv(const std::string& path, const SyntheticTruth& truth,
                             std::size_t n_samples,
                             const std::vector<std::string>& config_comments = {});

}  // namespace krf
