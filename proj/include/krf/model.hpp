#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "krf/corr.hpp"
#include "krf/data.hpp"
#include "krf/gcn.hpp"
#include "krf/han.hpp"
#include "krf/metrics.hpp"
#include "krf/style_graph.hpp"
#include "krf/tensor.hpp"
#include "krf/text.hpp"

namespace krf {

struct ModelConfig {
  HanConfig han;
  GcnConfig gcn;
  std::size_t max_tokens_per_review = 50;
  std::size_t max_reviews_per_song = 40;
  std::size_t min_count = 2;
};

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double tau = 4.0;
  std::uint64_t seed = 42;
  Ablation ablation = Ablation::kFull;
  double prediction_threshold = 0.5;
  double clip_norm = 5.0;  // global gradient norm cap

  void validate() const;
};

// Every trainable tensor of the model, addressable by a stable name. The
// kHanOnly ablation swaps the GCN parameters for a directly trained label
// table.
struct ModelParams {
  HanParams han;
  GcnParams gcn;       // unset under kHanOnly
  Tensor label_table;  // set only under kHanOnly: n_labels x gcn.out_dim
  Tensor fusion_w;     // 2*review_hidden x gcn.out_dim
  Ablation ablation = Ablation::kFull;
  std::size_t n_labels = 0;

  static ModelParams init(const ModelConfig& cfg, Tensor embedding,
                          std::size_t n_labels, Ablation ablation, Rng& rng);

  // Stable registry order; each trainable tensor appears exactly once.
  std::vector<std::pair<std::string, Tensor>> named() const;
  ModelParams clone() const;
  void zero_grads() const;
};

// A sample after tokenization: per-review token ids (PAD-free, non-empty)
// plus gold label indices.
struct EncodedSample {
  std::string id;
  std::vector<std::vector<std::size_t>> reviews;
  LabelSet labels;
};

std::vector<EncodedSample> encode_dataset(const std::vector<SongSample>& samples,
                                          const Vocabulary& vocab,
                                          const std::vector<std::string>& styles,
                                          const ModelConfig& cfg);

// Raw fusion scores for a batch: row b holds X'(b) W H2^T over the label set
// (label_table instead of H2 under kHanOnly).
Tensor forward_scores(Tape& tape, const std::vector<EncodedSample>& batch,
                      const ModelParams& params, const Tensor& a_integrated,
                      const ModelConfig& cfg);

// Gold 0/1 matrix for a batch.
Tensor gold_matrix(const std::vector<EncodedSample>& batch, std::size_t n_labels);

// Mean over the batch of the per-sample multi-label binary cross entropy.
Tensor multilabel_loss(Tape& tape, const Tensor& scores, const Tensor& gold);

// ---------------------------------------------------------------------------
// Optimization

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(const std::vector<std::pair<std::string, Tensor>>& params);
  // One bias-corrected update from the gradients currently held by params.
  void step(const std::vector<std::pair<std::string, Tensor>>& params, double lr,
            const AdamConfig& cfg = {});
  std::size_t t() const { return t_; }

 private:
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

// Scales all gradients so their global L2 norm is at most max_norm; returns
// the pre-clip norm.
double clip_global_norm(const std::vector<std::pair<std::string, Tensor>>& params,
                        double max_norm);

// ---------------------------------------------------------------------------
// Prediction and evaluation

struct Prediction {
  std::vector<double> scores;        // sigmoid scores per label
  std::vector<std::size_t> ranking;  // labels by descending score
  LabelSet labels;                   // thresholded, top-1 fallback
};

Prediction predict(const EncodedSample& sample, const ModelParams& params,
                   const Tensor& a_integrated, const ModelConfig& cfg,
                   double threshold);

EvalReport evaluate(const std::vector<EncodedSample>& samples,
                    const ModelParams& params, const Tensor& a_integrated,
                    const ModelConfig& cfg, double threshold,
                    const std::vector<std::string>& label_names = {});

// ---------------------------------------------------------------------------
// Training

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  EvalReport validation;
};

struct TrainResult {
  ModelParams params;           // checkpoint with the best validation micro F1
  std::size_t best_epoch = 0;   // 1-based; ties keep the earlier epoch
  std::vector<EpochStats> log;
  Vocabulary vocab;
  CorrelationMatrices matrices;
};

// Builds vocabulary and correlation matrices from the training split only,
// trains with Adam for `epochs` epochs, and returns the parameters of the
// epoch with the best validation micro F1. `pretrained` optionally supplies
// a skip-gram embedding table matching the training vocabulary.
TrainResult train(const DatasetSplits& splits, const StyleGraph& graph,
                  const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const EmbeddingTable* pretrained = nullptr,
                  const RelationScores& scores = {});

struct SweepPoint {
  double tau = 0.0;
  EvalReport validation;
  EvalReport test;
};

// Trains one model per tau value with an otherwise identical configuration.
std::vector<SweepPoint> sweep_tau(const DatasetSplits& splits,
                                  const StyleGraph& graph,
                                  const ModelConfig& model_cfg,
                                  const TrainConfig& train_cfg,
                                  const std::vector<double>& taus);

// ---------------------------------------------------------------------------
// Checkpointing
//
// Binary layout, little-endian: magic "KRFCKPT", u32 version, u32 config
// length, UTF-8 key=value lines, u32 record count, then per record
// u32 name length, name bytes, u32 rank, u32 dims[rank], f64 data.

struct Checkpoint {
  ModelParams params;
  ModelConfig model_cfg;
  TrainConfig train_cfg;
  std::map<std::string, std::string> extra;  // e.g. n_labels, vocab_size
};

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                     const std::map<std::string, std::string>& extra = {});
Checkpoint load_checkpoint(const std::string& path);

}  // namespace krf
