#include "krf/han.hpp"

#include <algorithm>

#include "krf/errors.hpp"

namespace krf {

namespace {

constexpr double kMaskedLogit = -1e9;

// b is 1 x h; returns a K x h tensor adding b to every row.
Tensor add_bias(Tape& tape, const Tensor& x, const Tensor& b, const Tensor& ones_col) {
  if (x.rows() == 1) return tape.add(x, b);
  return tape.add(x, tape.matmul(ones_col, b));
}

}  // namespace

GruWeights GruWeights::init(std::size_t in_dim, std::size_t hidden, Rng& rng) {
  GruWeights w;
  w.w_z = Tensor::uniform({in_dim, hidden}, rng, -0.08, 0.08, true);
  w.u_z = Tensor::orthogonal(hidden, rng, true);
  w.b_z = Tensor::zeros({1, hidden});
  w.b_z.set_requires_grad(true);
  w.w_r = Tensor::uniform({in_dim, hidden}, rng, -0.08, 0.08, true);
  w.u_r = Tensor::orthogonal(hidden, rng, true);
  w.b_r = Tensor::zeros({1, hidden});
  w.b_r.set_requires_grad(true);
  w.w_h = Tensor::uniform({in_dim, hidden}, rng, -0.08, 0.08, true);
  w.u_h = Tensor::orthogonal(hidden, rng, true);
  w.b_h = Tensor::zeros({1, hidden});
  w.b_h.set_requires_grad(true);
  return w;
}

AttentionWeights AttentionWeights::init(std::size_t state_dim, Rng& rng) {
  AttentionWeights a;
  a.proj = Tensor::uniform({state_dim, state_dim}, rng, -0.08, 0.08, true);
  a.bias = Tensor::zeros({1, state_dim});
  a.bias.set_requires_grad(true);
  a.context = Tensor::uniform({state_dim, 1}, rng, -0.08, 0.08, true);
  return a;
}

HanParams HanParams::init(const HanConfig& cfg, Tensor embedding_table, Rng& rng) {
  HanParams p;
  if (embedding_table.cols() != cfg.embed_dim) {
    throw DataError("embedding table width " +
                    std::to_string(embedding_table.cols()) +
                    " does not match configured embed_dim " +
                    std::to_string(cfg.embed_dim));
  }
  p.embedding = std::move(embedding_table);
  p.embedding.set_requires_grad(true);
  p.word_fwd = GruWeights::init(cfg.embed_dim, cfg.word_hidden, rng);
  p.word_bwd = GruWeights::init(cfg.embed_dim, cfg.word_hidden, rng);
  p.word_attn = AttentionWeights::init(2 * cfg.word_hidden, rng);
  p.review_fwd = GruWeights::init(2 * cfg.word_hidden, cfg.review_hidden, rng);
  p.review_bwd = GruWeights::init(2 * cfg.word_hidden, cfg.review_hidden, rng);
  p.review_attn = AttentionWeights::init(2 * cfg.review_hidden, rng);
  return p;
}

namespace {

void append_gru(const std::string& prefix, const GruWeights& w,
                std::vector<std::pair<std::string, Tensor>>& out) {
  out.emplace_back(prefix + ".w_z", w.w_z);
  out.emplace_back(prefix + ".u_z", w.u_z);
  out.emplace_back(prefix + ".b_z", w.b_z);
  out.emplace_back(prefix + ".w_r", w.w_r);
  out.emplace_back(prefix + ".u_r", w.u_r);
  out.emplace_back(prefix + ".b_r", w.b_r);
  out.emplace_back(prefix + ".w_h", w.w_h);
  out.emplace_back(prefix + ".u_h", w.u_h);
  out.emplace_back(prefix + ".b_h", w.b_h);
}

void append_attn(const std::string& prefix, const AttentionWeights& a,
                 std::vector<std::pair<std::string, Tensor>>& out) {
  out.emplace_back(prefix + ".proj", a.proj);
  out.emplace_back(prefix + ".bias", a.bias);
  out.emplace_back(prefix + ".context", a.context);
}

}  // namespace

void HanParams::append_named(const std::string& prefix,
                             std::vector<std::pair<std::string, Tensor>>& out) const {
  out.emplace_back(prefix + ".embedding", embedding);
  append_gru(prefix + ".word.fwd", word_fwd, out);
  append_gru(prefix + ".word.bwd", word_bwd, out);
  append_attn(prefix + ".word.attn", word_attn, out);
  append_gru(prefix + ".review.fwd", review_fwd, out);
  append_gru(prefix + ".review.bwd", review_bwd, out);
  append_attn(prefix + ".review.attn", review_attn, out);
}

Tensor gru_cell(Tape& tape, const Tensor& x, const Tensor& h_prev,
                const GruWeights& w) {
  if (x.rank() != 2 || h_prev.rank() != 2 || x.rows() != h_prev.rows() ||
      x.cols() != w.w_z.rows() || h_prev.cols() != w.u_z.rows()) {
    throw std::invalid_argument("gru_cell shape mismatch: x " + x.shape_str() +
                                ", h " + h_prev.shape_str() + ", w_z " +
                                w.w_z.shape_str());
  }
  const std::size_t k = x.rows();
  Tensor ones_col = Tensor::full({k, 1}, 1.0);
  Tensor z = tape.sigmoid(add_bias(
      tape, tape.add(tape.matmul(x, w.w_z), tape.matmul(h_prev, w.u_z)), w.b_z,
      ones_col));
  Tensor r = tape.sigmoid(add_bias(
      tape, tape.add(tape.matmul(x, w.w_r), tape.matmul(h_prev, w.u_r)), w.b_r,
      ones_col));
  Tensor cand = tape.tanh(add_bias(
      tape,
      tape.add(tape.matmul(x, w.w_h), tape.matmul(tape.mul(r, h_prev), w.u_h)),
      w.b_h, ones_col));
  return tape.add(tape.mul(tape.sub(1.0, z), h_prev), tape.mul(z, cand));
}

namespace {

// Bidirectional GRU over a padded step sequence with per-step masks, followed
// by attention pooling; shared between the word and review levels.
//
// step_inputs[t] is the K x in matrix at step t; mask[t][k] says whether row
// k is live at step t (dead rows carry their previous state). Returns K x
// 2*hidden pooled vectors.
struct BiGruAttention {
  Tape& tape;
  const GruWeights& fwd;
  const GruWeights& bwd;
  const AttentionWeights& attn;
  std::size_t hidden;

  Tensor run(const std::vector<Tensor>& step_inputs,
             const std::vector<std::vector<bool>>& mask) {
    const std::size_t steps = step_inputs.size();
    const std::size_t k = step_inputs.front().rows();

    std::vector<Tensor> mask_full(steps), mask_inv(steps);
    bool any_masked = false;
    for (std::size_t t = 0; t < steps; ++t) {
      bool all_live = true;
      for (std::size_t r = 0; r < k; ++r) all_live = all_live && mask[t][r];
      if (!all_live) {
        any_masked = true;
        Tensor m = Tensor::zeros({k, hidden});
        Tensor mi = Tensor::zeros({k, hidden});
        for (std::size_t r = 0; r < k; ++r) {
          for (std::size_t c = 0; c < hidden; ++c) {
            (mask[t][r] ? m : mi).data()[r * hidden + c] = 1.0;
          }
        }
        mask_full[t] = m;
        mask_inv[t] = mi;
      }
    }

    auto blend = [&](const Tensor& h_new, const Tensor& h_prev, std::size_t t) {
      if (!mask_full[t].defined()) return h_new;
      return tape.add(tape.mul(h_new, mask_full[t]),
                      tape.mul(h_prev, mask_inv[t]));
    };

    std::vector<Tensor> h_fwd(steps), h_bwd(steps);
    Tensor h = Tensor::zeros({k, hidden});
    for (std::size_t t = 0; t < steps; ++t) {
      h = blend(gru_cell(tape, step_inputs[t], h, fwd), h, t);
      h_fwd[t] = h;
    }
    h = Tensor::zeros({k, hidden});
    for (std::size_t t = steps; t-- > 0;) {
      h = blend(gru_cell(tape, step_inputs[t], h, bwd), h, t);
      h_bwd[t] = h;
    }

    std::vector<Tensor> states(steps);   // K x 2*hidden per step
    std::vector<Tensor> scores(steps);   // K x 1 per step
    Tensor ones_col = Tensor::full({k, 1}, 1.0);
    for (std::size_t t = 0; t < steps; ++t) {
      states[t] = tape.concat(h_fwd[t], h_bwd[t], 1);
      Tensor u = tape.tanh(add_bias(tape, tape.matmul(states[t], attn.proj),
                                    attn.bias, ones_col));
      scores[t] = tape.matmul(u, attn.context);
    }
    Tensor logits = steps == 1 ? scores[0] : tape.concat(scores, 1);  // K x steps
    if (any_masked) {
      Tensor neg = Tensor::zeros({k, steps});
      for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t r = 0; r < k; ++r) {
          if (!mask[t][r]) neg.data()[r * steps + t] = kMaskedLogit;
        }
      }
      logits = tape.add(logits, neg);
    }
    Tensor alpha = tape.softmax(logits, 1);  // rows sum to 1 over live steps

    Tensor ones_row = Tensor::full({1, 2 * hidden}, 1.0);
    Tensor pooled;
    for (std::size_t t = 0; t < steps; ++t) {
      Tensor w_col = tape.slice_cols(alpha, t, t + 1);           // K x 1
      Tensor w_rep = tape.matmul(w_col, ones_row);               // K x 2h
      Tensor weighted = tape.mul(w_rep, states[t]);
      pooled = pooled.defined() ? tape.add(pooled, weighted) : weighted;
    }
    return pooled;
  }
};

}  // namespace

Tensor encode_reviews(Tape& tape, const std::vector<std::vector<std::size_t>>& reviews,
                      const HanParams& params, const HanConfig& cfg) {
  if (reviews.empty()) {
    throw DataError("encode_reviews: no reviews given");
  }
  std::size_t max_len = 0;
  for (const auto& r : reviews) {
    if (r.empty()) {
      throw DataError("encode_reviews: empty review after masking");
    }
    max_len = std::max(max_len, r.size());
  }
  const std::size_t k = reviews.size();

  std::vector<Tensor> step_inputs(max_len);
  std::vector<std::vector<bool>> mask(max_len, std::vector<bool>(k, false));
  for (std::size_t t = 0; t < max_len; ++t) {
    std::vector<std::size_t> ids(k, 0);  // PAD rows where the review ended
    for (std::size_t r = 0; r < k; ++r) {
      if (t < reviews[r].size()) {
        ids[r] = reviews[r][t];
        mask[t][r] = true;
      }
    }
    step_inputs[t] = tape.gather_rows(params.embedding, ids);
  }

  BiGruAttention word_level{tape, params.word_fwd, params.word_bwd,
                            params.word_attn, cfg.word_hidden};
  return word_level.run(step_inputs, mask);
}

Tensor encode_review(Tape& tape, const std::vector<std::size_t>& tokens,
                     const HanParams& params, const HanConfig& cfg) {
  return encode_reviews(tape, {tokens}, params, cfg);
}

Tensor encode_review_sequence(Tape& tape, const Tensor& review_vectors,
                              const HanParams& params, const HanConfig& cfg) {
  const std::size_t k = review_vectors.rows();
  std::vector<Tensor> step_inputs(k);
  std::vector<std::vector<bool>> mask(k, std::vector<bool>(1, true));
  for (std::size_t t = 0; t < k; ++t) {
    step_inputs[t] = tape.slice_rows(review_vectors, t, t + 1);
  }
  BiGruAttention review_level{tape, params.review_fwd, params.review_bwd,
                              params.review_attn, cfg.review_hidden};
  return review_level.run(step_inputs, mask);
}

Tensor encode_song(Tape& tape, const std::vector<std::vector<std::size_t>>& reviews,
                   const HanParams& params, const HanConfig& cfg,
                   const std::string& sample_id) {
  if (reviews.empty()) {
    throw DataError("sample '" + sample_id + "' has no usable reviews");
  }
  Tensor review_vectors = encode_reviews(tape, reviews, params, cfg);
  return encode_review_sequence(tape, review_vectors, params, cfg);
}

}  // namespace krf
