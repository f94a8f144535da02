#include "krf/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "krf/errors.hpp"

namespace krf {

namespace {

bool is_cjk(std::uint32_t cp) {
  return (cp >= 0x3400 && cp <= 0x9FFF) ||   // unified ideographs + ext A
         (cp >= 0xF900 && cp <= 0xFAFF);     // compatibility ideographs
}

// Decodes one UTF-8 codepoint starting at `i`; advances `i` past it. Invalid
// bytes decode as U+FFFD one byte at a time.
std::uint32_t decode_utf8(const std::string& s, std::size_t& i) {
  const unsigned char c = s[i];
  std::size_t len = 1;
  std::uint32_t cp = 0xFFFD;
  if (c < 0x80) {
    cp = c;
  } else if ((c >> 5) == 0x6) {
    len = 2;
    cp = c & 0x1F;
  } else if ((c >> 4) == 0xE) {
    len = 3;
    cp = c & 0x0F;
  } else if ((c >> 3) == 0x1E) {
    len = 4;
    cp = c & 0x07;
  } else {
    ++i;
    return cp;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char cc = s[i + k];
    if ((cc >> 6) != 0x2) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = text[i];
    if (c < 0x80) {
      if (std::isalnum(c)) {
        current.push_back(static_cast<char>(std::tolower(c)));
      } else {
        flush();  // ASCII punctuation and whitespace both end a token
      }
      ++i;
      continue;
    }
    const std::uint32_t cp = decode_utf8(text, i);
    if (is_cjk(cp)) {
      flush();
      std::string single;
      append_utf8(single, cp);
      tokens.push_back(std::move(single));
    } else if (cp == 0xFFFD) {
      flush();
    } else {
      append_utf8(current, cp);  // non-CJK letters stay inside the word
    }
  }
  flush();
  return tokens;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus,
                             std::size_t min_count) {
  if (corpus.empty()) {
    throw DataError("cannot build a vocabulary from an empty corpus");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus) {
    for (const std::string& tok : sentence) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, cnt] : counts) {
    if (cnt >= min_count) kept.emplace_back(tok, cnt);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  v.min_count_ = min_count;
  v.tokens_ = {kPadToken, kUnkToken};
  v.counts_ = {0, 0};
  for (auto& [tok, cnt] : kept) {
    v.tokens_.push_back(tok);
    v.counts_.push_back(cnt);
  }
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) v.index_[v.tokens_[i]] = i;
  return v;
}

std::size_t Vocabulary::encode(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::decode(std::size_t index) const {
  if (index >= tokens_.size()) {
    throw DataError("vocabulary index " + std::to_string(index) +
                    " out of range (size " + std::to_string(tokens_.size()) + ")");
  }
  return tokens_[index];
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) > 0;
}

std::vector<std::size_t> Vocabulary::encode_all(
    const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(encode(t));
  return out;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write vocabulary file '" + path + "'");
  }
  for (const std::string& t : tokens_) out << t << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open vocabulary file '" + path + "'");
  }
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    v.tokens_.push_back(line);
    v.counts_.push_back(0);
  }
  if (v.tokens_.size() < 2 || v.tokens_[0] != kPadToken || v.tokens_[1] != kUnkToken) {
    throw DataError("vocabulary file '" + path +
                    "' must start with the PAD and UNK tokens");
  }
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second) {
      throw DataError("duplicate token '" + v.tokens_[i] + "' in '" + path + "'");
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Embeddings

EmbeddingTable EmbeddingTable::random_init(std::size_t vocab_size, std::size_t d,
                                           Rng& rng) {
  return EmbeddingTable{Tensor::uniform({vocab_size, d}, rng, -0.05, 0.05)};
}

namespace {
constexpr char kEmbeddingMagic[6] = {'K', 'R', 'F', 'E', 'M', 'B'};

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw DataError("truncated file '" + path + "'");
  return v;
}
}  // namespace

void EmbeddingTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write embedding file '" + path + "'");
  }
  out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  write_u32(out, static_cast<std::uint32_t>(vocab_size()));
  write_u32(out, static_cast<std::uint32_t>(dim()));
  out.write(reinterpret_cast<const char*>(table.data().data()),
            static_cast<std::streamsize>(table.data().size() * sizeof(double)));
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open embedding file '" + path + "'");
  }
  char magic[6];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kEmbeddingMagic, sizeof(magic)) != 0) {
    throw DataError("'" + path + "' is not an embedding file (bad magic)");
  }
  const std::uint32_t vocab = read_u32(in, path);
  const std::uint32_t d = read_u32(in, path);
  std::vector<double> data(static_cast<std::size_t>(vocab) * d);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw DataError("truncated embedding file '" + path + "'");
  return EmbeddingTable{Tensor::from({vocab, d}, std::move(data))};
}

// ---------------------------------------------------------------------------
// Skip-gram with negative sampling

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Cumulative unigram^0.75 table over vocabulary indices >= 1 (PAD excluded).
struct NegativeSampler {
  std::vector<double> cdf;
  std::vector<std::size_t> ids;

  NegativeSampler(const Vocabulary& vocab,
                  const std::vector<std::size_t>& freq) {
    double total = 0.0;
    for (std::size_t i = 1; i < vocab.size(); ++i) {
      if (freq[i] == 0) continue;
      total += std::pow(static_cast<double>(freq[i]), 0.75);
      ids.push_back(i);
      cdf.push_back(total);
    }
    for (double& c : cdf) c /= total;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    return ids[std::min(k, ids.size() - 1)];
  }
};

}  // namespace

SkipgramResult train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                              const Vocabulary& vocab, const SkipgramConfig& cfg) {
  if (cfg.window < 1 || cfg.negatives < 1) {
    throw DataError("skip-gram window and negatives must be >= 1");
  }
  std::vector<std::vector<std::size_t>> sentences;
  std::size_t n_pairs = 0;
  std::vector<std::size_t> freq(vocab.size(), 0);
  for (const auto& sent : corpus) {
    std::vector<std::size_t> ids = vocab.encode_all(sent);
    for (std::size_t id : ids) ++freq[id];
    if (ids.size() >= 2) n_pairs += ids.size();
    sentences.push_back(std::move(ids));
  }
  if (n_pairs == 0) {
    throw DataError("corpus too small for skip-gram: no sentence has two tokens");
  }

  Rng rng(cfg.seed);
  Tensor in_table = Tensor::uniform({vocab.size(), cfg.dim}, rng,
                                    -0.5 / static_cast<double>(cfg.dim),
                                    0.5 / static_cast<double>(cfg.dim));
  Tensor out_table = Tensor::zeros({vocab.size(), cfg.dim});
  NegativeSampler sampler(vocab, freq);

  const std::size_t d = cfg.dim;
  std::vector<double> grad_center(d);
  SkipgramResult result;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const auto& ids : sentences) {
      for (std::size_t pos = 0; pos < ids.size(); ++pos) {
        const std::size_t center = ids[pos];
        if (center == Vocabulary::kPad) continue;
        const std::size_t lo = pos >= cfg.window ? pos - cfg.window : 0;
        const std::size_t hi = std::min(ids.size(), pos + cfg.window + 1);
        for (std::size_t cpos = lo; cpos < hi; ++cpos) {
          if (cpos == pos) continue;
          const std::size_t context = ids[cpos];
          if (context == Vocabulary::kPad) continue;

          double* v_c = in_table.data().data() + center * d;
          std::fill(grad_center.begin(), grad_center.end(), 0.0);
          double pair_loss = 0.0;

          auto update_output = [&](std::size_t target, double label) {
            double* u_t = out_table.data().data() + target * d;
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += v_c[k] * u_t[k];
            const double p = stable_sigmoid(dot);
            // -log sigma(dot) for positives, -log sigma(-dot) for negatives
            pair_loss += label > 0.5
                             ? std::max(dot, 0.0) - dot + std::log1p(std::exp(-std::abs(dot)))
                             : std::max(dot, 0.0) + std::log1p(std::exp(-std::abs(dot)));
            const double g = (p - label) * cfg.learning_rate;
            for (std::size_t k = 0; k < d; ++k) {
              grad_center[k] += g * u_t[k];
              u_t[k] -= g * v_c[k];
            }
          };

          update_output(context, 1.0);
          for (std::size_t neg = 0; neg < cfg.negatives; ++neg) {
            std::size_t sample = sampler.draw(rng);
            if (sample == context) continue;
            update_output(sample, 0.0);
          }
          for (std::size_t k = 0; k < d; ++k) v_c[k] -= grad_center[k];
          loss_sum += pair_loss;
          ++loss_count;
        }
      }
    }
    result.epoch_loss.push_back(loss_count ? loss_sum / loss_count : 0.0);
  }
  result.embeddings = EmbeddingTable{std::move(in_table)};
  return result;
}

}  // namespace krf
