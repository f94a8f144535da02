#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "krf/rng.hpp"
#include "krf/tensor.hpp"

namespace krf {

// Lowercases ASCII letters, splits on whitespace and punctuation, drops the
// punctuation. CJK ideographs become single-character tokens; other non-ASCII
// letters stay inside their word. Deterministic; empty text gives no tokens.
std::vector<std::string> tokenize(const std::string& text);

// Token/index bijection with PAD at 0 and UNK at 1. Built from the training
// split only: every token with frequency >= min_count is included, ordered by
// descending frequency (ties by token string).
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary() = default;  // empty; fill via build() or load()

  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus,
                          std::size_t min_count);

  std::size_t size() const { return tokens_.size(); }
  std::size_t min_count() const { return min_count_; }
  // Index of a token, or kUnk when absent.
  std::size_t encode(const std::string& token) const;
  const std::string& decode(std::size_t index) const;
  bool contains(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  // Training-corpus frequency of the token at `index` (0 for PAD/UNK).
  std::size_t frequency(std::size_t index) const { return counts_[index]; }

  std::vector<std::size_t> encode_all(const std::vector<std::string>& tokens) const;

  // One token per line, line number = index.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t min_count_ = 0;
};

// Row i holds the d-dimensional embedding of vocabulary index i.
struct EmbeddingTable {
  Tensor table;  // vocab_size x d

  std::size_t vocab_size() const { return table.rows(); }
  std::size_t dim() const { return table.cols(); }

  static EmbeddingTable random_init(std::size_t vocab_size, std::size_t d, Rng& rng);

  // Binary format: magic "KRFEMB", u32 vocab_size, u32 d, then row-major f64.
  void save(const std::string& path) const;
  static EmbeddingTable load(const std::string& path);
};

struct SkipgramConfig {
  std::size_t dim = 128;
  std::size_t window = 4;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 0;
};

struct SkipgramResult {
  EmbeddingTable embeddings;
  std::vector<double> epoch_loss;  // mean loss per epoch
};

// Skip-gram with negative sampling over the tokenized corpus (one sentence
// per entry); negatives follow the unigram^0.75 distribution. Single-threaded
// and deterministic given the seed. Errors when no sentence holds two
// in-window positions.
SkipgramResult train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                              const Vocabulary& vocab, const SkipgramConfig& cfg);

}  // namespace krf
