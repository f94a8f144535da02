#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "krf/rng.hpp"
#include "krf/tensor.hpp"

namespace krf {

struct GcnConfig {
  std::size_t label_dim = 128;   // width of the initial label embeddings
  std::size_t hidden_dim = 512;  // first layer output
  std::size_t out_dim = 128;     // final label representation width
  double leaky_slope = 0.01;
};

struct GcnParams {
  Tensor h0;  // n_labels x label_dim, trainable initial embeddings
  Tensor w1;  // label_dim x hidden_dim
  Tensor w2;  // hidden_dim x out_dim

  static GcnParams init(const GcnConfig& cfg, std::size_t n_labels, Rng& rng);
  void append_named(const std::string& prefix,
                    std::vector<std::pair<std::string, Tensor>>& out) const;
};

// One propagation step H' = LeakyReLU((A[0] + A[1]) H W) over the integrated
// correlation tensor (2 x |C| x |C|). The slices are summed, so zeroing one
// slice exactly removes that relation source.
Tensor gcn_layer(Tape& tape, const Tensor& a_integrated, const Tensor& h,
                 const Tensor& w, double leaky_slope);

// Two propagation steps: H2 = layer(A, layer(A, H0, W1), W2).
Tensor style_representations(Tape& tape, const Tensor& a_integrated,
                             const GcnParams& params, double leaky_slope);

// Pairwise dot products of the label representations, min-max scaled to
// [0, 1] over all entries; a constant similarity matrix maps to all 0.5.
Tensor label_similarity_heatmap(const Tensor& h2);

}  // namespace krf
