#include "krf/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "krf/errors.hpp"

namespace krf {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw DataError("learning_rate must be positive");
  if (epochs < 1) throw DataError("epochs must be >= 1");
  if (batch_size < 1) throw DataError("batch_size must be >= 1");
  if (tau < 0.0) throw DataError("tau must be non-negative");
  if (prediction_threshold <= 0.0 || prediction_threshold >= 1.0) {
    throw DataError("prediction_threshold must be in (0, 1)");
  }
  if (clip_norm <= 0.0) throw DataError("clip_norm must be positive");
}

// ---------------------------------------------------------------------------
// Parameters

ModelParams ModelParams::init(const ModelConfig& cfg, Tensor embedding,
                              std::size_t n_labels, Ablation ablation, Rng& rng) {
  ModelParams p;
  p.ablation = ablation;
  p.n_labels = n_labels;
  p.han = HanParams::init(cfg.han, std::move(embedding), rng);
  if (ablation == Ablation::kHanOnly) {
    p.label_table = Tensor::uniform({n_labels, cfg.gcn.out_dim}, rng, -0.1, 0.1, true);
  } else {
    p.gcn = GcnParams::init(cfg.gcn, n_labels, rng);
  }
  const std::size_t fusion_in = 2 * cfg.han.review_hidden;
  const double bound = std::sqrt(6.0 / static_cast<double>(fusion_in + cfg.gcn.out_dim));
  p.fusion_w = Tensor::uniform({fusion_in, cfg.gcn.out_dim}, rng, -bound, bound, true);
  return p;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  han.append_named("han", out);
  if (ablation == Ablation::kHanOnly) {
    out.emplace_back("label.table", label_table);
  } else {
    gcn.append_named("gcn", out);
  }
  out.emplace_back("fusion.w", fusion_w);
  return out;
}

namespace {

Tensor clone_param(const Tensor& t) {
  Tensor c = t.detached_copy();
  c.set_requires_grad(true);
  return c;
}

GruWeights clone_gru(const GruWeights& w) {
  return {clone_param(w.w_z), clone_param(w.u_z), clone_param(w.b_z),
          clone_param(w.w_r), clone_param(w.u_r), clone_param(w.b_r),
          clone_param(w.w_h), clone_param(w.u_h), clone_param(w.b_h)};
}

AttentionWeights clone_attn(const AttentionWeights& a) {
  return {clone_param(a.proj), clone_param(a.bias), clone_param(a.context)};
}

}  // namespace

ModelParams ModelParams::clone() const {
  ModelParams p;
  p.ablation = ablation;
  p.n_labels = n_labels;
  p.han.embedding = clone_param(han.embedding);
  p.han.word_fwd = clone_gru(han.word_fwd);
  p.han.word_bwd = clone_gru(han.word_bwd);
  p.han.word_attn = clone_attn(han.word_attn);
  p.han.review_fwd = clone_gru(han.review_fwd);
  p.han.review_bwd = clone_gru(han.review_bwd);
  p.han.review_attn = clone_attn(han.review_attn);
  if (ablation == Ablation::kHanOnly) {
    p.label_table = clone_param(label_table);
  } else {
    p.gcn.h0 = clone_param(gcn.h0);
    p.gcn.w1 = clone_param(gcn.w1);
    p.gcn.w2 = clone_param(gcn.w2);
  }
  p.fusion_w = clone_param(fusion_w);
  return p;
}

void ModelParams::zero_grads() const {
  for (auto& [name, t] : named()) const_cast<Tensor&>(t).zero_grad();
}

// ---------------------------------------------------------------------------
// Encoding

std::vector<EncodedSample> encode_dataset(const std::vector<SongSample>& samples,
                                          const Vocabulary& vocab,
                                          const std::vector<std::string>& styles,
                                          const ModelConfig& cfg) {
  std::map<std::string, std::size_t> style_index;
  for (std::size_t i = 0; i < styles.size(); ++i) style_index[styles[i]] = i;

  std::vector<EncodedSample> out;
  out.reserve(samples.size());
  for (const SongSample& s : samples) {
    EncodedSample e;
    e.id = s.id;
    for (const std::string& review : s.reviews) {
      if (e.reviews.size() >= cfg.max_reviews_per_song) break;
      std::vector<std::string> tokens = tokenize(review);
      if (tokens.empty()) continue;  // drop reviews with no usable tokens
      if (tokens.size() > cfg.max_tokens_per_review) {
        tokens.resize(cfg.max_tokens_per_review);
      }
      e.reviews.push_back(vocab.encode_all(tokens));
    }
    if (e.reviews.empty()) {
      throw DataError("sample '" + s.id + "' has no usable reviews");
    }
    for (const std::string& label : s.labels) {
      auto it = style_index.find(label);
      if (it == style_index.end()) {
        throw DataError("sample '" + s.id + "' carries unknown label '" +
                        label + "'");
      }
      e.labels.insert(it->second);
    }
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward

Tensor forward_scores(Tape& tape, const std::vector<EncodedSample>& batch,
                      const ModelParams& params, const Tensor& a_integrated,
                      const ModelConfig& cfg) {
  if (batch.empty()) {
    throw DataError("forward on an empty batch");
  }
  Tensor label_repr =
      params.ablation == Ablation::kHanOnly
          ? params.label_table
          : style_representations(tape, a_integrated, params.gcn,
                                  cfg.gcn.leaky_slope);
  Tensor label_repr_t = tape.transpose(label_repr);

  // Word level over every review in the batch at once, then per-song review
  // level on the corresponding row slices.
  std::vector<std::vector<std::size_t>> all_reviews;
  std::vector<std::size_t> offsets;
  for (const EncodedSample& s : batch) {
    offsets.push_back(all_reviews.size());
    all_reviews.insert(all_reviews.end(), s.reviews.begin(), s.reviews.end());
  }
  offsets.push_back(all_reviews.size());
  Tensor review_vectors = encode_reviews(tape, all_reviews, params.han, cfg.han);

  std::vector<Tensor> rows;
  rows.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    Tensor song_reviews =
        tape.slice_rows(review_vectors, offsets[b], offsets[b + 1]);
    Tensor x = encode_review_sequence(tape, song_reviews, params.han, cfg.han);
    Tensor x_rect = tape.relu(x);
    rows.push_back(
        tape.matmul(tape.matmul(x_rect, params.fusion_w), label_repr_t));
  }
  return rows.size() == 1 ? rows[0] : tape.concat(rows, 0);
}

Tensor gold_matrix(const std::vector<EncodedSample>& batch, std::size_t n_labels) {
  Tensor gold = Tensor::zeros({batch.size(), n_labels});
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t c : batch[b].labels) {
      gold.data()[b * n_labels + c] = 1.0;
    }
  }
  return gold;
}

Tensor multilabel_loss(Tape& tape, const Tensor& scores, const Tensor& gold) {
  return tape.bce_with_logits(scores, gold);
}

// ---------------------------------------------------------------------------
// Optimization

AdamState::AdamState(const std::vector<std::pair<std::string, Tensor>>& params) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& [name, t] : params) {
    m_.emplace_back(t.numel(), 0.0);
    v_.emplace_back(t.numel(), 0.0);
  }
}

void AdamState::step(const std::vector<std::pair<std::string, Tensor>>& params,
                     double lr, const AdamConfig& cfg) {
  if (params.size() != m_.size()) {
    throw DataError("AdamState was built for a different parameter set");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor t = params[pi].second;
    const std::vector<double>& g = t.grad();
    std::vector<double>& m = m_[pi];
    std::vector<double>& v = v_[pi];
    std::vector<double>& x = t.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      x[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

double clip_global_norm(const std::vector<std::pair<std::string, Tensor>>& params,
                        double max_norm) {
  double sq = 0.0;
  for (const auto& [name, t] : params) {
    for (double g : t.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const auto& [name, t] : params) {
      for (double& g : const_cast<Tensor&>(t).grad()) g *= scale;
    }
  }
  return norm;
}

// ---------------------------------------------------------------------------
// Prediction / evaluation

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Prediction prediction_from_scores(const std::vector<double>& raw, double threshold) {
  Prediction p;
  p.scores.reserve(raw.size());
  for (double s : raw) p.scores.push_back(stable_sigmoid(s));
  p.ranking.resize(raw.size());
  std::iota(p.ranking.begin(), p.ranking.end(), std::size_t{0});
  std::stable_sort(p.ranking.begin(), p.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return p.scores[a] > p.scores[b];  // stable: ties by index
                   });
  for (std::size_t c = 0; c < p.scores.size(); ++c) {
    if (p.scores[c] > threshold) p.labels.insert(c);
  }
  if (p.labels.empty() && !p.ranking.empty()) {
    p.labels.insert(p.ranking.front());  // never predict the empty set
  }
  return p;
}

}  // namespace

Prediction predict(const EncodedSample& sample, const ModelParams& params,
                   const Tensor& a_integrated, const ModelConfig& cfg,
                   double threshold) {
  Tape tape(false);
  Tensor scores = forward_scores(tape, {sample}, params, a_integrated, cfg);
  return prediction_from_scores(scores.data(), threshold);
}

EvalReport evaluate(const std::vector<EncodedSample>& samples,
                    const ModelParams& params, const Tensor& a_integrated,
                    const ModelConfig& cfg, double threshold,
                    const std::vector<std::string>& label_names) {
  std::vector<std::vector<double>> raw_scores;
  std::vector<LabelSet> pred, gold;
  const std::size_t chunk = 64;
  for (std::size_t start = 0; start < samples.size(); start += chunk) {
    const std::size_t end = std::min(samples.size(), start + chunk);
    std::vector<EncodedSample> batch(samples.begin() + start, samples.begin() + end);
    Tape tape(false);
    Tensor scores = forward_scores(tape, batch, params, a_integrated, cfg);
    const std::size_t n_labels = scores.cols();
    for (std::size_t b = 0; b < batch.size(); ++b) {
      std::vector<double> row(scores.data().begin() + b * n_labels,
                              scores.data().begin() + (b + 1) * n_labels);
      Prediction p = prediction_from_scores(row, threshold);
      raw_scores.push_back(std::move(p.scores));
      pred.push_back(std::move(p.labels));
      gold.push_back(batch[b].labels);
    }
  }
  const std::size_t n_labels =
      params.n_labels ? params.n_labels : (raw_scores.empty() ? 0 : raw_scores[0].size());
  return evaluate_predictions(raw_scores, pred, gold, n_labels, label_names);
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(const DatasetSplits& splits, const StyleGraph& graph,
                  const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const EmbeddingTable* pretrained, const RelationScores& scores) {
  train_cfg.validate();
  if (splits.train.empty() || splits.validation.empty()) {
    throw DataError("train and validation splits must be non-empty");
  }

  std::vector<std::vector<std::string>> corpus;
  for (const SongSample& s : splits.train) {
    for (const std::string& review : s.reviews) corpus.push_back(tokenize(review));
  }
  Vocabulary vocab = Vocabulary::build(corpus, model_cfg.min_count);

  ModelConfig cfg = model_cfg;
  Tensor embedding;
  Rng rng(train_cfg.seed);
  if (pretrained != nullptr) {
    if (pretrained->vocab_size() != vocab.size()) {
      throw DataError("pretrained embedding table has " +
                      std::to_string(pretrained->vocab_size()) +
                      " rows but the training vocabulary has " +
                      std::to_string(vocab.size()));
    }
    cfg.han.embed_dim = pretrained->dim();
    embedding = pretrained->table.detached_copy();
  } else {
    embedding = Tensor::uniform({vocab.size(), cfg.han.embed_dim}, rng, -0.05, 0.05);
  }

  CorrelationMatrices matrices = build_correlation_matrices(
      splits.train, graph, scores, train_cfg.tau, train_cfg.ablation);

  std::vector<EncodedSample> train_set =
      encode_dataset(splits.train, vocab, graph.styles(), cfg);
  std::vector<EncodedSample> val_set =
      encode_dataset(splits.validation, vocab, graph.styles(), cfg);

  ModelParams params = ModelParams::init(cfg, std::move(embedding), graph.size(),
                                         train_cfg.ablation, rng);
  auto named = params.named();
  AdamState adam(named);

  TrainResult result;
  result.vocab = vocab;
  result.matrices = matrices;

  double best_micro = -1.0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t sample_count = 0;
    for (std::size_t start = 0; start < order.size();
         start += train_cfg.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + train_cfg.batch_size);
      std::vector<EncodedSample> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);

      Tape tape;
      Tensor batch_scores =
          forward_scores(tape, batch, params, matrices.integrated, cfg);
      Tensor gold = gold_matrix(batch, graph.size());
      Tensor loss = multilabel_loss(tape, batch_scores, gold);
      if (!std::isfinite(loss.item())) {
        throw NumericError("non-finite training loss at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(start / train_cfg.batch_size));
      }
      tape.backward(loss);
      clip_global_norm(named, train_cfg.clip_norm);
      adam.step(named, train_cfg.learning_rate);
      params.zero_grads();

      loss_sum += loss.item() * static_cast<double>(batch.size());
      sample_count += batch.size();
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(sample_count);
    stats.validation = evaluate(val_set, params, matrices.integrated, cfg,
                                train_cfg.prediction_threshold, graph.styles());
    if (stats.validation.micro_f1 > best_micro) {
      best_micro = stats.validation.micro_f1;
      result.params = params.clone();
      result.best_epoch = epoch;
    }
    result.log.push_back(std::move(stats));
  }
  return result;
}

std::vector<SweepPoint> sweep_tau(const DatasetSplits& splits,
                                  const StyleGraph& graph,
                                  const ModelConfig& model_cfg,
                                  const TrainConfig& train_cfg,
                                  const std::vector<double>& taus) {
  std::vector<SweepPoint> points;
  for (double tau : taus) {
    TrainConfig cfg = train_cfg;
    cfg.tau = tau;
    TrainResult run = train(splits, graph, model_cfg, cfg);
    std::vector<EncodedSample> test_set =
        encode_dataset(splits.test, run.vocab, graph.styles(), model_cfg);
    SweepPoint p;
    p.tau = tau;
    p.validation = run.log[run.best_epoch - 1].validation;
    p.test = evaluate(test_set, run.params, run.matrices.integrated, model_cfg,
                      cfg.prediction_threshold, graph.styles());
    points.push_back(std::move(p));
  }
  return points;
}

// ---------------------------------------------------------------------------
// Checkpointing

namespace {

constexpr char kCheckpointMagic[7] = {'K', 'R', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw DataError("truncated checkpoint '" + path + "'");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::map<std::string, std::string> config_kv(const ModelConfig& m,
                                             const TrainConfig& t) {
  std::map<std::string, std::string> kv;
  kv["embed_dim"] = std::to_string(m.han.embed_dim);
  kv["word_hidden"] = std::to_string(m.han.word_hidden);
  kv["review_hidden"] = std::to_string(m.han.review_hidden);
  kv["label_dim"] = std::to_string(m.gcn.label_dim);
  kv["gcn_hidden"] = std::to_string(m.gcn.hidden_dim);
  kv["gcn_out"] = std::to_string(m.gcn.out_dim);
  kv["leaky_slope"] = format_double(m.gcn.leaky_slope);
  kv["max_tokens_per_review"] = std::to_string(m.max_tokens_per_review);
  kv["max_reviews_per_song"] = std::to_string(m.max_reviews_per_song);
  kv["min_count"] = std::to_string(m.min_count);
  kv["learning_rate"] = format_double(t.learning_rate);
  kv["epochs"] = std::to_string(t.epochs);
  kv["batch_size"] = std::to_string(t.batch_size);
  kv["tau"] = format_double(t.tau);
  kv["seed"] = std::to_string(t.seed);
  kv["ablation"] = ablation_name(t.ablation);
  kv["prediction_threshold"] = format_double(t.prediction_threshold);
  kv["clip_norm"] = format_double(t.clip_norm);
  return kv;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                     const std::map<std::string, std::string>& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write checkpoint '" + path + "'");
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_u32(out, kCheckpointVersion);

  std::map<std::string, std::string> kv = config_kv(model_cfg, train_cfg);
  kv["n_labels"] = std::to_string(params.n_labels);
  kv["vocab_size"] = std::to_string(params.han.embedding.rows());
  for (const auto& [k, v] : extra) kv[k] = v;
  std::ostringstream cfg_block;
  for (const auto& [k, v] : kv) cfg_block << k << "=" << v << "\n";
  const std::string cfg_str = cfg_block.str();
  write_u32(out, static_cast<std::uint32_t>(cfg_str.size()));
  out.write(cfg_str.data(), static_cast<std::streamsize>(cfg_str.size()));

  const auto named = params.named();
  write_u32(out, static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, t] : named) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) write_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.data().size() * sizeof(double)));
  }
  if (!out) {
    throw DataError("failed writing checkpoint '" + path + "'");
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint '" + path + "'");
  }
  char magic[7];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw DataError("'" + path + "' is not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = read_u32(in, path);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t cfg_len = read_u32(in, path);
  std::string cfg_str(cfg_len, '\0');
  in.read(cfg_str.data(), cfg_len);
  if (!in) throw DataError("truncated checkpoint '" + path + "'");

  Checkpoint ckpt;
  std::istringstream cfg_in(cfg_str);
  std::string line;
  while (std::getline(cfg_in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    ckpt.extra[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> std::string {
    auto it = ckpt.extra.find(key);
    if (it == ckpt.extra.end()) {
      throw DataError("checkpoint missing config key '" + key + "'");
    }
    return it->second;
  };
  ckpt.model_cfg.han.embed_dim = std::stoul(get("embed_dim"));
  ckpt.model_cfg.han.word_hidden = std::stoul(get("word_hidden"));
  ckpt.model_cfg.han.review_hidden = std::stoul(get("review_hidden"));
  ckpt.model_cfg.gcn.label_dim = std::stoul(get("label_dim"));
  ckpt.model_cfg.gcn.hidden_dim = std::stoul(get("gcn_hidden"));
  ckpt.model_cfg.gcn.out_dim = std::stoul(get("gcn_out"));
  ckpt.model_cfg.gcn.leaky_slope = std::stod(get("leaky_slope"));
  ckpt.model_cfg.max_tokens_per_review = std::stoul(get("max_tokens_per_review"));
  ckpt.model_cfg.max_reviews_per_song = std::stoul(get("max_reviews_per_song"));
  ckpt.model_cfg.min_count = std::stoul(get("min_count"));
  ckpt.train_cfg.learning_rate = std::stod(get("learning_rate"));
  ckpt.train_cfg.epochs = std::stoul(get("epochs"));
  ckpt.train_cfg.batch_size = std::stoul(get("batch_size"));
  ckpt.train_cfg.tau = std::stod(get("tau"));
  ckpt.train_cfg.seed = std::stoull(get("seed"));
  ckpt.train_cfg.ablation = ablation_from_name(get("ablation"));
  ckpt.train_cfg.prediction_threshold = std::stod(get("prediction_threshold"));
  ckpt.train_cfg.clip_norm = std::stod(get("clip_norm"));
  const std::size_t n_labels = std::stoul(get("n_labels"));
  const std::size_t vocab_size = std::stoul(get("vocab_size"));

  Rng rng(0);
  Tensor embedding = Tensor::zeros({vocab_size, ckpt.model_cfg.han.embed_dim});
  ckpt.params = ModelParams::init(ckpt.model_cfg, std::move(embedding), n_labels,
                                  ckpt.train_cfg.ablation, rng);

  std::map<std::string, Tensor> by_name;
  for (const auto& [name, t] : ckpt.params.named()) by_name.emplace(name, t);

  const std::uint32_t n_records = read_u32(in, path);
  std::set<std::string> seen;
  for (std::uint32_t r = 0; r < n_records; ++r) {
    const std::uint32_t name_len = read_u32(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const std::uint32_t rank = read_u32(in, path);
    std::vector<std::size_t> shape(rank);
    for (std::uint32_t d = 0; d < rank; ++d) shape[d] = read_u32(in, path);
    std::size_t numel = 1;
    for (std::size_t s : shape) numel *= s;
    std::vector<double> data(numel);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(numel * sizeof(double)));
    if (!in) throw DataError("truncated checkpoint '" + path + "'");

    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw DataError("checkpoint record '" + name +
                      "' does not match any model parameter");
    }
    if (it->second.shape() != shape) {
      throw DataError("checkpoint record '" + name + "' has shape mismatch");
    }
    std::copy(data.begin(), data.end(), it->second.data().begin());
    seen.insert(name);
  }
  if (seen.size() != by_name.size()) {
    throw DataError("checkpoint is missing " +
                    std::to_string(by_name.size() - seen.size()) +
                    " parameter records");
  }
  return ckpt;
}

}  // namespace krf
