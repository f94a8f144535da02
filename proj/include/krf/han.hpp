#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "krf/rng.hpp"
#include "krf/tensor.hpp"

namespace krf {

struct HanConfig {
  std::size_t embed_dim = 128;      // word embedding dimensionality
  std::size_t word_hidden = 64;     // per direction; word states are 2x this
  std::size_t review_hidden = 64;   // per direction; song vector is 2x this
};

// One GRU direction: gates z, r and candidate h. Input matrices are
// (in x hidden), recurrent matrices (hidden x hidden), biases (1 x hidden).
struct GruWeights {
  Tensor w_z, u_z, b_z;
  Tensor w_r, u_r, b_r;
  Tensor w_h, u_h, b_h;

  static GruWeights init(std::size_t in_dim, std::size_t hidden, Rng& rng);
};

struct AttentionWeights {
  Tensor proj;     // state_dim x state_dim
  Tensor bias;     // 1 x state_dim
  Tensor context;  // state_dim x 1

  static AttentionWeights init(std::size_t state_dim, Rng& rng);
};

struct HanParams {
  Tensor embedding;  // vocab_size x embed_dim, trainable
  GruWeights word_fwd, word_bwd;
  AttentionWeights word_attn;
  GruWeights review_fwd, review_bwd;
  AttentionWeights review_attn;

  static HanParams init(const HanConfig& cfg, Tensor embedding_table, Rng& rng);

  void append_named(const std::string& prefix,
                    std::vector<std::pair<std::string, Tensor>>& out) const;
};

// One GRU step over a batch of independent rows:
//   z = sigmoid(x W_z + h U_z + b_z)
//   r = sigmoid(x W_r + h U_r + b_r)
//   cand = tanh(x W_h + (r * h) U_h + b_h)
//   h' = (1 - z) * h + z * cand
Tensor gru_cell(Tape& tape, const Tensor& x, const Tensor& h_prev,
                const GruWeights& w);

// Word-level encoder over a batch of reviews (rows of token indices, PAD
// excluded from attention). Returns one row per review, each of width
// 2*word_hidden. Every review must be non-empty.
Tensor encode_reviews(Tape& tape, const std::vector<std::vector<std::size_t>>& reviews,
                      const HanParams& params, const HanConfig& cfg);

// Single-review convenience wrapper: 1 x 2*word_hidden.
Tensor encode_review(Tape& tape, const std::vector<std::size_t>& tokens,
                     const HanParams& params, const HanConfig& cfg);

// Review-level encoder over precomputed review vectors (K x 2*word_hidden):
// bidirectional GRU along the review sequence plus attention pooling.
// Returns 1 x 2*review_hidden.
Tensor encode_review_sequence(Tape& tape, const Tensor& review_vectors,
                              const HanParams& params, const HanConfig& cfg);

// Full per-song path: word level over the song's reviews, then review level.
Tensor encode_song(Tape& tape, const std::vector<std::vector<std::size_t>>& reviews,
                   const HanParams& params, const HanConfig& cfg,
                   const std::string& sample_id = "");

}  // namespace krf
