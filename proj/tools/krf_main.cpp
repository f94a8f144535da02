#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "krf/corr.hpp"
#include "krf/data.hpp"
#include "krf/errors.hpp"
#include "krf/gcn.hpp"
#include "krf/model.hpp"
#include "krf/style_graph.hpp"
#include "krf/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string dataset;
  std::string kg;
  std::string out_dir;
  std::string checkpoint;
  std::string embeddings;
  krf::ModelConfig model;
  krf::TrainConfig train;
  std::string ablation = "full";
};

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("KRF_OUT_DIR")) return env;
  return ".";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw krf::DataError("cannot create output directory '" + dir + "': " +
                         ec.message());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Resolved configuration echoed into every artifact a command writes.
std::map<std::string, std::string> echo_config(const CommonOpts& opts) {
  std::map<std::string, std::string> kv;
  kv["dataset"] = opts.dataset;
  kv["kg"] = opts.kg;
  kv["embed_dim"] = std::to_string(opts.model.han.embed_dim);
  kv["word_hidden"] = std::to_string(opts.model.han.word_hidden);
  kv["review_hidden"] = std::to_string(opts.model.han.review_hidden);
  kv["label_dim"] = std::to_string(opts.model.gcn.label_dim);
  kv["gcn_hidden"] = std::to_string(opts.model.gcn.hidden_dim);
  kv["gcn_out"] = std::to_string(opts.model.gcn.out_dim);
  kv["leaky_slope"] = format_double(opts.model.gcn.leaky_slope);
  kv["max_tokens_per_review"] = std::to_string(opts.model.max_tokens_per_review);
  kv["max_reviews_per_song"] = std::to_string(opts.model.max_reviews_per_song);
  kv["min_count"] = std::to_string(opts.model.min_count);
  kv["learning_rate"] = format_double(opts.train.learning_rate);
  kv["epochs"] = std::to_string(opts.train.epochs);
  kv["batch_size"] = std::to_string(opts.train.batch_size);
  kv["tau"] = format_double(opts.train.tau);
  kv["seed"] = std::to_string(opts.train.seed);
  kv["ablation"] = opts.ablation;
  kv["prediction_threshold"] = format_double(opts.train.prediction_threshold);
  return kv;
}

std::vector<std::string> comment_lines(const std::map<std::string, std::string>& kv) {
  std::vector<std::string> lines;
  for (const auto& [k, v] : kv) lines.push_back(k + "=" + v);
  return lines;
}

json config_json(const std::map<std::string, std::string>& kv) {
  json j;
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

void add_model_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--embed-dim", opts.model.han.embed_dim, "Word embedding width");
  cmd->add_option("--word-hidden", opts.model.han.word_hidden,
                  "Word GRU hidden size per direction");
  cmd->add_option("--review-hidden", opts.model.han.review_hidden,
                  "Review GRU hidden size per direction");
  cmd->add_option("--label-dim", opts.model.gcn.label_dim,
                  "Initial label embedding width");
  cmd->add_option("--gcn-hidden", opts.model.gcn.hidden_dim,
                  "First GCN layer output width");
  cmd->add_option("--gcn-out", opts.model.gcn.out_dim,
                  "Final label representation width");
  cmd->add_option("--leaky-slope", opts.model.gcn.leaky_slope,
                  "LeakyReLU negative slope");
  cmd->add_option("--max-tokens", opts.model.max_tokens_per_review,
                  "Token cap per review");
  cmd->add_option("--max-reviews", opts.model.max_reviews_per_song,
                  "Review cap per song");
  cmd->add_option("--min-count", opts.model.min_count,
                  "Vocabulary frequency threshold");
}

void add_train_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--lr", opts.train.learning_rate, "Adam learning rate");
  cmd->add_option("--epochs", opts.train.epochs, "Training epochs");
  cmd->add_option("--batch", opts.train.batch_size, "Batch size");
  cmd->add_option("--tau", opts.train.tau, "Co-occurrence filter threshold");
  cmd->add_option("--seed", opts.train.seed, "Run seed");
  cmd->add_option("--ablation", opts.ablation,
                  "Variant: full, no-stat, no-knowledge, han-only");
  cmd->add_option("--threshold", opts.train.prediction_threshold,
                  "Sigmoid decision threshold");
  add_model_flags(cmd, opts);
}

void write_epoch_log(const std::string& path, const std::vector<krf::EpochStats>& log,
                     const std::vector<std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw krf::DataError("cannot write epoch log '" + path + "'");
  out.precision(17);
  for (const std::string& c : comments) out << "# " << c << "\n";
  out << "epoch,train_loss,val_one_error,val_hamming_loss,val_macro_f1,val_micro_f1\n";
  for (const krf::EpochStats& e : log) {
    out << e.epoch << "," << e.train_loss << "," << e.validation.one_error << ","
        << e.validation.hamming_loss << "," << e.validation.macro_f1 << ","
        << e.validation.micro_f1 << "\n";
  }
}

const std::vector<krf::SongSample>& pick_split(const krf::DatasetSplits& splits,
                                               const std::string& name) {
  if (name == "train") return splits.train;
  if (name == "validation") return splits.validation;
  if (name == "test") return splits.test;
  throw krf::DataError("unknown split '" + name +
                       "' (expected train, validation, test)");
}

// Shared by eval / predict / heatmap: restore a checkpoint and rebuild the
// vocabulary and correlation matrices it was trained with.
struct RestoredRun {
  krf::Checkpoint ckpt;
  krf::StyleGraph graph;
  krf::DatasetSplits splits;
  krf::Vocabulary vocab;
  krf::CorrelationMatrices matrices;
};

RestoredRun restore(const std::string& checkpoint_path, const std::string& dataset_path,
                    const std::string& kg_path) {
  krf::Checkpoint ckpt = krf::load_checkpoint(checkpoint_path);
  krf::StyleGraph graph = krf::parse_style_graph(kg_path);
  if (graph.size() != ckpt.params.n_labels) {
    throw krf::DataError("checkpoint was trained with " +
                         std::to_string(ckpt.params.n_labels) +
                         " styles but the graph declares " +
                         std::to_string(graph.size()));
  }
  std::vector<krf::SongSample> samples =
      krf::load_dataset(dataset_path, graph.styles());
  krf::DatasetSplits splits = krf::split_dataset(samples, ckpt.train_cfg.seed);

  std::vector<std::vector<std::string>> corpus;
  for (const krf::SongSample& s : splits.train) {
    for (const std::string& review : s.reviews) corpus.push_back(krf::tokenize(review));
  }
  krf::Vocabulary vocab = krf::Vocabulary::build(corpus, ckpt.model_cfg.min_count);
  if (vocab.size() != ckpt.params.han.embedding.rows()) {
    throw krf::DataError(
        "rebuilt vocabulary size " + std::to_string(vocab.size()) +
        " does not match the checkpoint embedding rows " +
        std::to_string(ckpt.params.han.embedding.rows()) +
        "; evaluate against the dataset the model was trained on");
  }
  krf::CorrelationMatrices matrices = krf::build_correlation_matrices(
      splits.train, graph, {}, ckpt.train_cfg.tau, ckpt.train_cfg.ablation);
  return {std::move(ckpt), std::move(graph), std::move(splits), std::move(vocab),
          std::move(matrices)};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_gen_synth(const CommonOpts& opts, const krf::SynthConfig& synth) {
  krf::StyleGraph graph = krf::parse_style_graph(opts.kg);
  krf::SyntheticDataset ds = krf::generate_synthetic(graph, synth);

  std::map<std::string, std::string> kv;
  kv["command"] = "gen-synth";
  kv["kg"] = opts.kg;
  kv["n"] = std::to_string(synth.n_samples);
  kv["seed"] = std::to_string(synth.seed);
  kv["reviews_per_song"] = std::to_string(synth.reviews_per_song);
  kv["signal_ratio"] = format_double(synth.signal_ratio);
  kv["related_boost"] = format_double(synth.related_boost);
  kv["noise_pair_rate"] = format_double(synth.noise_pair_rate);
  kv["minority_style"] = ds.truth.minority_style;
  kv["minority_weight"] = format_double(synth.minority_weight);

  ensure_dir(opts.out_dir);
  const std::string data_path = opts.out_dir + "/dataset.jsonl";
  const std::string truth_path = opts.out_dir + "/planted_pairs.csv";
  krf::save_dataset(data_path, ds.samples, config_json(kv).dump());
  krf::write_planted_truth_csv(truth_path, ds.truth, synth.n_samples,
                               comment_lines(kv));
  std::cout << "wrote " << data_path << " (" << ds.samples.size()
            << " samples) and " << truth_path << "\n";
  std::cout << "minority style: " << ds.truth.minority_style
            << " (expected frequency "
            << format_double(ds.truth.minority_marginal) << ")\n";
  return 0;
}

int cmd_train(CommonOpts& opts) {
  opts.train.ablation = krf::ablation_from_name(opts.ablation);
  krf::StyleGraph graph = krf::parse_style_graph(opts.kg);
  std::vector<krf::SongSample> samples = krf::load_dataset(opts.dataset, graph.styles());
  krf::DatasetSplits splits = krf::split_dataset(samples, opts.train.seed);

  krf::EmbeddingTable pretrained;
  const krf::EmbeddingTable* pretrained_ptr = nullptr;
  if (!opts.embeddings.empty()) {
    pretrained = krf::EmbeddingTable::load(opts.embeddings);
    pretrained_ptr = &pretrained;
  }

  krf::TrainResult result =
      krf::train(splits, graph, opts.model, opts.train, pretrained_ptr);

  ensure_dir(opts.out_dir);
  std::map<std::string, std::string> kv = echo_config(opts);
  kv["command"] = "train";
  const std::string ckpt_path = opts.out_dir + "/checkpoint.krf";
  krf::save_checkpoint(ckpt_path, result.params, opts.model, opts.train,
                       {{"best_epoch", std::to_string(result.best_epoch)}});
  write_epoch_log(opts.out_dir + "/epoch_log.csv", result.log, comment_lines(kv));
  krf::write_matrix_csv(opts.out_dir + "/statistical_matrix.csv", graph.styles(),
                        result.matrices.statistical_filtered, comment_lines(kv));
  krf::write_matrix_csv(opts.out_dir + "/knowledge_matrix.csv", graph.styles(),
                        result.matrices.knowledge, comment_lines(kv));

  const krf::EpochStats& best = result.log[result.best_epoch - 1];
  std::cout << "best epoch " << result.best_epoch << " (validation micro F1 "
            << best.validation.micro_f1 << ")\n";
  std::cout << "checkpoint: " << ckpt_path << "\n";
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& split_name) {
  RestoredRun run = restore(opts.checkpoint, opts.dataset, opts.kg);
  const std::vector<krf::SongSample>& split = pick_split(run.splits, split_name);
  std::vector<krf::EncodedSample> encoded =
      krf::encode_dataset(split, run.vocab, run.graph.styles(), run.ckpt.model_cfg);
  krf::EvalReport report = krf::evaluate(
      encoded, run.ckpt.params, run.matrices.integrated, run.ckpt.model_cfg,
      run.ckpt.train_cfg.prediction_threshold, run.graph.styles());

  ensure_dir(opts.out_dir);
  json j = json::parse(report.to_json());
  j["split"] = split_name;
  j["config"] = json::object();
  for (const auto& [k, v] : run.ckpt.extra) j["config"][k] = v;
  const std::string report_path = opts.out_dir + "/eval_" + split_name + ".json";
  std::ofstream out(report_path, std::ios::binary);
  out << j.dump(2) << "\n";
  std::cout << report.to_table();
  std::cout << "report: " << report_path << "\n";
  return 0;
}

int cmd_predict(const CommonOpts& opts, const std::string& split_name,
                const std::string& sample_id) {
  RestoredRun run = restore(opts.checkpoint, opts.dataset, opts.kg);
  const std::vector<krf::SongSample>& split = pick_split(run.splits, split_name);
  std::vector<krf::EncodedSample> encoded =
      krf::encode_dataset(split, run.vocab, run.graph.styles(), run.ckpt.model_cfg);

  auto predict_to_json = [&](const krf::EncodedSample& s) {
    krf::Prediction p =
        krf::predict(s, run.ckpt.params, run.matrices.integrated,
                     run.ckpt.model_cfg, run.ckpt.train_cfg.prediction_threshold);
    json j;
    j["id"] = s.id;
    j["scores"] = p.scores;
    json ranked = json::array();
    for (std::size_t c : p.ranking) ranked.push_back(run.graph.styles()[c]);
    j["ranking"] = ranked;
    json labels = json::array();
    for (std::size_t c : p.labels) labels.push_back(run.graph.styles()[c]);
    j["labels"] = labels;
    return j;
  };

  if (!sample_id.empty()) {
    for (const krf::EncodedSample& s : encoded) {
      if (s.id == sample_id) {
        std::cout << predict_to_json(s).dump(2) << "\n";
        return 0;
      }
    }
    throw krf::DataError("sample id '" + sample_id + "' not found in split '" +
                         split_name + "'");
  }
  ensure_dir(opts.out_dir);
  const std::string path = opts.out_dir + "/predictions_" + split_name + ".jsonl";
  std::ofstream out(path, std::ios::binary);
  json meta;
  meta["krf_config"] = json::object();
  for (const auto& [k, v] : run.ckpt.extra) meta["krf_config"][k] = v;
  out << meta.dump() << "\n";
  for (const krf::EncodedSample& s : encoded) out << predict_to_json(s).dump() << "\n";
  std::cout << "wrote " << path << " (" << encoded.size() << " samples)\n";
  return 0;
}

int cmd_heatmap(const CommonOpts& opts) {
  RestoredRun run = restore(opts.checkpoint, opts.dataset, opts.kg);
  krf::Tensor label_repr;
  if (run.ckpt.train_cfg.ablation == krf::Ablation::kHanOnly) {
    label_repr = run.ckpt.params.label_table;
  } else {
    krf::Tape tape(false);
    label_repr = krf::style_representations(tape, run.matrices.integrated,
                                            run.ckpt.params.gcn,
                                            run.ckpt.model_cfg.gcn.leaky_slope);
  }
  krf::Tensor heat = krf::label_similarity_heatmap(label_repr);
  ensure_dir(opts.out_dir);
  std::vector<std::string> comments;
  for (const auto& [k, v] : run.ckpt.extra) comments.push_back(k + "=" + v);
  const std::string path = opts.out_dir + "/heatmap.csv";
  krf::write_matrix_csv(path, run.graph.styles(), heat, comments);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_sweep_tau(CommonOpts& opts, double tau_min, double tau_max, double tau_step) {
  if (tau_step <= 0.0 || tau_max < tau_min) {
    throw krf::DataError("invalid tau range");
  }
  opts.train.ablation = krf::ablation_from_name(opts.ablation);
  krf::StyleGraph graph = krf::parse_style_graph(opts.kg);
  std::vector<krf::SongSample> samples = krf::load_dataset(opts.dataset, graph.styles());
  krf::DatasetSplits splits = krf::split_dataset(samples, opts.train.seed);

  std::vector<double> taus;
  for (double t = tau_min; t <= tau_max + 1e-9; t += tau_step) taus.push_back(t);
  std::vector<krf::SweepPoint> points =
      krf::sweep_tau(splits, graph, opts.model, opts.train, taus);

  ensure_dir(opts.out_dir);
  std::map<std::string, std::string> kv = echo_config(opts);
  kv["command"] = "sweep-tau";
  kv["tau_min"] = format_double(tau_min);
  kv["tau_max"] = format_double(tau_max);
  kv["tau_step"] = format_double(tau_step);
  const std::string path = opts.out_dir + "/tau_sweep.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw krf::DataError("cannot write '" + path + "'");
  out.precision(17);
  for (const std::string& c : comment_lines(kv)) out << "# " << c << "\n";
  out << "tau,val_micro_f1,test_one_error,test_hamming_loss,test_macro_f1,test_micro_f1\n";
  for (const krf::SweepPoint& p : points) {
    out << p.tau << "," << p.validation.micro_f1 << "," << p.test.one_error << ","
        << p.test.hamming_loss << "," << p.test.macro_f1 << ","
        << p.test.micro_f1 << "\n";
  }
  std::cout << "wrote " << path << " (" << points.size() << " rows)\n";
  return 0;
}

int cmd_pretrain_embeddings(const CommonOpts& opts, krf::SkipgramConfig sg) {
  std::vector<krf::SongSample> samples = krf::load_dataset(opts.dataset);
  krf::DatasetSplits splits = krf::split_dataset(samples, opts.train.seed);
  std::vector<std::vector<std::string>> corpus;
  for (const krf::SongSample& s : splits.train) {
    for (const std::string& review : s.reviews) corpus.push_back(krf::tokenize(review));
  }
  krf::Vocabulary vocab = krf::Vocabulary::build(corpus, opts.model.min_count);
  krf::SkipgramResult result = krf::train_skipgram(corpus, vocab, sg);

  ensure_dir(opts.out_dir);
  const std::string emb_path = opts.out_dir + "/embeddings.krfemb";
  const std::string vocab_path = opts.out_dir + "/vocab.txt";
  result.embeddings.save(emb_path);
  vocab.save(vocab_path);
  std::cout << "wrote " << emb_path << " (" << vocab.size() << " x " << sg.dim
            << ") and " << vocab_path << "\n";
  std::cout << "final epoch skip-gram loss: "
            << result.epoch_loss.back() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Review-driven multi-label music style classifier"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string out_flag;

  // gen-synth
  krf::SynthConfig synth;
  CLI::App* gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
  gen->add_option("--kg", opts.kg, "Style graph file")->required();
  gen->add_option("--n", synth.n_samples, "Number of samples");
  gen->add_option("--seed", synth.seed, "Generator seed");
  gen->add_option("--reviews", synth.reviews_per_song, "Reviews per song");
  gen->add_option("--signal-ratio", synth.signal_ratio,
                  "Fraction of indicator tokens per sample");
  gen->add_option("--related-boost", synth.related_boost,
                  "Co-occurrence boost for graph-related styles");
  gen->add_option("--noise-pair-rate", synth.noise_pair_rate,
                  "Fraction of samples with a random unrelated label pair");
  gen->add_option("--minority-style", synth.minority_style,
                  "Style kept at low frequency");
  gen->add_option("--minority-weight", synth.minority_weight,
                  "Base draw weight of the minority style");
  gen->add_option("--out", out_flag, "Output directory");

  // train
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--dataset", opts.dataset, "Dataset JSONL")->required();
  train_cmd->add_option("--kg", opts.kg, "Style graph file")->required();
  train_cmd->add_option("--embeddings", opts.embeddings,
                        "Pretrained embedding file (optional)");
  train_cmd->add_option("--out", out_flag, "Output directory");
  add_train_flags(train_cmd, opts);

  // eval
  std::string split_name = "test";
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", opts.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--dataset", opts.dataset, "Dataset JSONL")->required();
  eval_cmd->add_option("--kg", opts.kg, "Style graph file")->required();
  eval_cmd->add_option("--split", split_name, "train, validation or test");
  eval_cmd->add_option("--out", out_flag, "Output directory");

  // predict
  std::string sample_id;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict label sets");
  predict_cmd->add_option("--checkpoint", opts.checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--dataset", opts.dataset, "Dataset JSONL")->required();
  predict_cmd->add_option("--kg", opts.kg, "Style graph file")->required();
  predict_cmd->add_option("--split", split_name, "train, validation or test");
  predict_cmd->add_option("--id", sample_id, "Predict a single sample id");
  predict_cmd->add_option("--out", out_flag, "Output directory");

  // heatmap
  CLI::App* heatmap_cmd = app.add_subcommand("heatmap", "Export label similarity heatmap");
  heatmap_cmd->add_option("--checkpoint", opts.checkpoint, "Checkpoint file")->required();
  heatmap_cmd->add_option("--dataset", opts.dataset, "Dataset JSONL")->required();
  heatmap_cmd->add_option("--kg", opts.kg, "Style graph file")->required();
  heatmap_cmd->add_option("--out", out_flag, "Output directory");

  // sweep-tau
  double tau_min = 0.0, tau_max = 8.0, tau_step = 1.0;
  CLI::App* sweep_cmd = app.add_subcommand("sweep-tau", "Train across a tau range");
  sweep_cmd->add_option("--dataset", opts.dataset, "Dataset JSONL")->required();
  sweep_cmd->add_option("--kg", opts.kg, "Style graph file")->required();
  sweep_cmd->add_option("--tau-min", tau_min, "Lowest tau");
  sweep_cmd->add_option("--tau-max", tau_max, "Highest tau");
  sweep_cmd->add_option("--tau-step", tau_step, "Tau increment");
  sweep_cmd->add_option("--out", out_flag, "Output directory");
  add_train_flags(sweep_cmd, opts);

  // pretrain-embeddings
  krf::SkipgramConfig sg;
  CLI::App* pretrain_cmd =
      app.add_subcommand("pretrain-embeddings", "Skip-gram pretraining");
  pretrain_cmd->add_option("--dataset", opts.dataset, "Dataset JSONL")->required();
  pretrain_cmd->add_option("--dim", sg.dim, "Embedding width");
  pretrain_cmd->add_option("--window", sg.window, "Context window");
  pretrain_cmd->add_option("--negatives", sg.negatives, "Negative samples per pair");
  pretrain_cmd->add_option("--sg-epochs", sg.epochs, "Skip-gram epochs");
  pretrain_cmd->add_option("--sg-lr", sg.learning_rate, "Skip-gram learning rate");
  pretrain_cmd->add_option("--seed", sg.seed, "Skip-gram seed");
  pretrain_cmd->add_option("--min-count", opts.model.min_count,
                           "Vocabulary frequency threshold");
  pretrain_cmd->add_option("--split-seed", opts.train.seed,
                           "Seed for the train split the vocabulary is built from");
  pretrain_cmd->add_option("--out", out_flag, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  opts.out_dir = resolve_out_dir(out_flag);
  try {
    if (gen->parsed()) return cmd_gen_synth(opts, synth);
    if (train_cmd->parsed()) return cmd_train(opts);
    if (eval_cmd->parsed()) return cmd_eval(opts, split_name);
    if (predict_cmd->parsed()) return cmd_predict(opts, split_name, sample_id);
    if (heatmap_cmd->parsed()) return cmd_heatmap(opts);
    if (sweep_cmd->parsed()) return cmd_sweep_tau(opts, tau_min, tau_max, tau_step);
    if (pretrain_cmd->parsed()) return cmd_pretrain_embeddings(opts, sg);
  } catch (const krf::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const krf::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
