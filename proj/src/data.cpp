#include "krf/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "krf/errors.hpp"

#include "json.hpp"

namespace krf {

namespace {
using nlohmann::json;
}

std::vector<SongSample> load_dataset(const std::string& path,
                                     const std::vector<std::string>& style_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open dataset file '" + path + "'");
  }
  std::set<std::string> allowed(style_names.begin(), style_names.end());
  std::vector<SongSample> samples;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t record_index = 0;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("dataset record " + std::to_string(record_index) +
                      " is malformed JSON: " + e.what());
    }
    if (first_line && j.is_object() && j.contains("krf_config")) {
      first_line = false;
      continue;  // embedded run metadata, not a record
    }
    first_line = false;
    SongSample s;
    try {
      if (!j.is_object() || !j.contains("id") || !j.contains("reviews") ||
          !j.contains("labels")) {
        throw DataError("missing required field (id/reviews/labels)");
      }
      s.id = j.at("id").get<std::string>();
      s.title = j.value("title", std::string{});
      s.reviews = j.at("reviews").get<std::vector<std::string>>();
      std::vector<std::string> raw_labels =
          j.at("labels").get<std::vector<std::string>>();
      std::set<std::string> dedup;
      for (std::string& label : raw_labels) {
        if (dedup.insert(label).second) s.labels.push_back(std::move(label));
      }
    } catch (const json::exception& e) {
      throw DataError("dataset record " + std::to_string(record_index) +
                      " is malformed: " + e.what());
    } catch (const DataError& e) {
      throw DataError("dataset record " + std::to_string(record_index) + ": " +
                      e.what());
    }
    if (s.labels.empty()) {
      throw DataError("dataset record " + std::to_string(record_index) +
                      " ('" + s.id + "') has no labels");
    }
    if (s.reviews.empty()) {
      throw DataError("dataset record " + std::to_string(record_index) +
                      " ('" + s.id + "') has no reviews");
    }
    if (!seen_ids.insert(s.id).second) {
      throw DataError("duplicate sample id '" + s.id + "' at record " +
                      std::to_string(record_index));
    }
    if (!allowed.empty()) {
      for (const std::string& label : s.labels) {
        if (allowed.count(label) == 0) {
          throw DataError("sample '" + s.id + "' carries unknown label '" +
                          label + "'");
        }
      }
    }
    samples.push_back(std::move(s));
    ++record_index;
  }
  return samples;
}

void save_dataset(const std::string& path, const std::vector<SongSample>& samples,
                  const std::string& config_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write dataset file '" + path + "'");
  }
  if (!config_json.empty()) {
    json meta;
    try {
      meta["krf_config"] = json::parse(config_json);
    } catch (const json::exception&) {
      meta["krf_config"] = config_json;
    }
    out << meta.dump() << "\n";
  }
  for (const SongSample& s : samples) {
    json j;
    j["id"] = s.id;
    j["title"] = s.title;
    j["reviews"] = s.reviews;
    j["labels"] = s.labels;
    out << j.dump() << "\n";
  }
}

DatasetSplits split_dataset(const std::vector<SongSample>& samples,
                            std::uint64_t seed) {
  const std::size_t n = samples.size();
  if (n < 10) {
    throw DataError("need at least 10 samples to split, got " +
                    std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n_validation = static_cast<std::size_t>(0.21 * static_cast<double>(n));
  const std::size_t n_test = static_cast<std::size_t>(0.09 * static_cast<double>(n));
  const std::size_t n_train = n - n_validation - n_test;

  DatasetSplits splits;
  splits.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const SongSample& s = samples[order[i]];
    if (i < n_train) {
      splits.train.push_back(s);
    } else if (i < n_train + n_validation) {
      splits.validation.push_back(s);
    } else {
      splits.test.push_back(s);
    }
  }
  return splits;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

// State shared between sampling and the exact probability enumeration.
struct PlantedDistribution {
  std::size_t n_styles = 0;
  std::vector<double> base_weight;
  std::vector<std::vector<bool>> related;
  double related_boost = 5.0;
  std::vector<std::pair<std::size_t, std::size_t>> noise_pairs;
  double noise_pair_rate = 0.0;

  double boost(std::size_t candidate, const std::vector<std::size_t>& chosen) const {
    for (std::size_t s : chosen) {
      if (related[candidate][s]) return related_boost;
    }
    return 1.0;
  }

  // Conditional weight of drawing `candidate` given the chosen set.
  double weight(std::size_t candidate, const std::vector<std::size_t>& chosen) const {
    for (std::size_t s : chosen) {
      if (s == candidate) return 0.0;
    }
    return base_weight[candidate] * boost(candidate, chosen);
  }

  std::size_t draw(Rng& rng, const std::vector<std::size_t>& chosen) const {
    double total = 0.0;
    for (std::size_t c = 0; c < n_styles; ++c) total += weight(c, chosen);
    double u = rng.uniform() * total;
    for (std::size_t c = 0; c < n_styles; ++c) {
      const double w = weight(c, chosen);
      if (w <= 0.0) continue;
      if (u < w) return c;
      u -= w;
    }
    return n_styles - 1;
  }

  // Exact inclusion probabilities by enumerating ordered label sequences of
  // length 2 and 3 (each with probability 1/2). Returns a matrix whose
  // diagonal holds marginals and off-diagonal holds pair probabilities.
  Tensor exact_pair_probs() const {
    const std::size_t n = n_styles;
    Tensor probs = Tensor::zeros({n, n});
    auto add_sequence = [&](const std::vector<std::size_t>& seq, double p) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        probs.data()[seq[i] * n + seq[i]] += p;
        for (std::size_t j = i + 1; j < seq.size(); ++j) {
          probs.data()[seq[i] * n + seq[j]] += p;
          probs.data()[seq[j] * n + seq[i]] += p;
        }
      }
    };
    const double structured = 1.0 - noise_pair_rate;
    double w_total = 0.0;
    for (std::size_t c = 0; c < n; ++c) w_total += base_weight[c];
    for (std::size_t a = 0; a < n; ++a) {
      const double pa = base_weight[a] / w_total;
      std::vector<std::size_t> set_a = {a};
      double total_b = 0.0;
      for (std::size_t c = 0; c < n; ++c) total_b += weight(c, set_a);
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a) continue;
        const double pb = weight(b, set_a) / total_b;
        std::vector<std::size_t> set_ab = {a, b};
        // half the samples stop at two labels
        add_sequence(set_ab, structured * 0.5 * pa * pb);
        double total_c = 0.0;
        for (std::size_t c = 0; c < n; ++c) total_c += weight(c, set_ab);
        for (std::size_t c = 0; c < n; ++c) {
          if (c == a || c == b) continue;
          const double pc = weight(c, set_ab) / total_c;
          add_sequence({a, b, c}, structured * 0.5 * pa * pb * pc);
        }
      }
    }
    if (!noise_pairs.empty() && noise_pair_rate > 0.0) {
      const double per_pair = noise_pair_rate / static_cast<double>(noise_pairs.size());
      for (const auto& [i, j] : noise_pairs) add_sequence({i, j}, per_pair);
    }
    return probs;
  }
};

}  // namespace

SyntheticDataset generate_synthetic(const StyleGraph& graph, const SynthConfig& cfg) {
  const std::size_t n = graph.size();
  if (n < 6) {
    throw DataError("synthetic generator needs at least 6 styles, got " +
                    std::to_string(n));
  }
  if (graph.edges().empty()) {
    throw DataError("synthetic generator needs a non-empty style graph");
  }
  if (cfg.indicators_min < 1 || cfg.indicators_max < cfg.indicators_min) {
    throw DataError("synthetic generator: invalid indicator count range");
  }
  if (cfg.signal_ratio <= 0.0 || cfg.signal_ratio > 1.0) {
    throw DataError("synthetic generator: signal_ratio must be in (0, 1]");
  }
  if (cfg.reviews_per_song < 1) {
    throw DataError("synthetic generator: reviews_per_song must be >= 1");
  }
  if (cfg.noise_pair_rate < 0.0 || cfg.noise_pair_rate >= 1.0) {
    throw DataError("synthetic generator: noise_pair_rate must be in [0, 1)");
  }
  if (cfg.minority_weight <= 0.0) {
    throw DataError("synthetic generator: minority_weight must be positive");
  }

  PlantedDistribution dist;
  dist.n_styles = n;
  dist.related_boost = cfg.related_boost;
  dist.noise_pair_rate = cfg.noise_pair_rate;
  dist.related.assign(n, std::vector<bool>(n, false));
  for (const StyleEdge& e : graph.edges()) {
    dist.related[e.a][e.b] = true;
    dist.related[e.b][e.a] = true;
  }

  // Long-tail ramp over declaration order.
  dist.base_weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist.base_weight[i] = 1.0 / std::pow(static_cast<double>(i + 1), 0.6);
  }

  // The minority style must be graph-related to one of the three heaviest
  // styles so knowledge propagation has something to work with.
  std::size_t minority = n;  // invalid
  if (!cfg.minority_style.empty()) {
    minority = graph.index_of(cfg.minority_style);
    bool linked = false;
    for (std::size_t major = 0; major < std::min<std::size_t>(3, n); ++major) {
      linked = linked || (major != minority && dist.related[minority][major]);
    }
    if (!linked) {
      throw DataError("minority style '" + cfg.minority_style +
                      "' has no relation to any of the three most frequent styles");
    }
  } else {
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t major = 0; major < std::min<std::size_t>(3, n); ++major) {
        if (major != i && dist.related[i][major]) {
          minority = i;
          break;
        }
      }
      if (minority != n) break;
    }
    if (minority == n) {
      throw DataError("no style is graph-related to a majority style; "
                      "configure minority_style explicitly");
    }
  }
  dist.base_weight[minority] = cfg.minority_weight;

  // Spurious pairs: unrelated style pairs not touching the minority style.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (i == minority || j == minority) continue;
      if (!dist.related[i][j]) dist.noise_pairs.emplace_back(i, j);
    }
  }
  if (cfg.noise_pair_rate > 0.0 && dist.noise_pairs.empty()) {
    throw DataError("noise_pair_rate > 0 but every style pair is related");
  }

  Rng rng(cfg.seed);
  SyntheticDataset out;
  out.truth.styles = graph.styles();
  out.truth.minority_style = graph.styles()[minority];
  out.truth.pair_probs = dist.exact_pair_probs();
  out.truth.minority_marginal = out.truth.pair_probs.at(minority, minority);

  char buf[64];
  for (std::size_t si = 0; si < cfg.n_samples; ++si) {
    std::vector<std::size_t> labels;
    if (cfg.noise_pair_rate > 0.0 && rng.uniform() < cfg.noise_pair_rate) {
      const auto& pair =
          dist.noise_pairs[rng.uniform_index(dist.noise_pairs.size())];
      labels = {pair.first, pair.second};
    } else {
      const std::size_t m = 2 + (rng.uniform() < 0.5 ? 0 : 1);
      while (labels.size() < m) labels.push_back(dist.draw(rng, labels));
    }

    // Indicator tokens for each gold label, then noise to reach the target
    // signal ratio.
    std::vector<std::string> tokens;
    for (std::size_t label : labels) {
      const std::size_t count =
          cfg.indicators_min +
          rng.uniform_index(cfg.indicators_max - cfg.indicators_min + 1);
      for (std::size_t k = 0; k < count; ++k) {
        std::snprintf(buf, sizeof(buf), "sty%02zutok%02zu", label,
                      rng.uniform_index(cfg.indicator_vocab_per_style));
        tokens.emplace_back(buf);
      }
    }
    const std::size_t n_indicators = tokens.size();
    std::size_t total_slots = std::max(
        cfg.reviews_per_song,
        static_cast<std::size_t>(
            std::ceil(static_cast<double>(n_indicators) / cfg.signal_ratio)));
    while (tokens.size() < total_slots) {
      std::snprintf(buf, sizeof(buf), "noise%03zu",
                    rng.uniform_index(cfg.noise_vocab_size));
      tokens.emplace_back(buf);
    }
    rng.shuffle(tokens);

    SongSample sample;
    std::snprintf(buf, sizeof(buf), "synth-%06zu", si);
    sample.id = buf;
    std::snprintf(buf, sizeof(buf), "Synthetic song %zu", si);
    sample.title = buf;
    const std::size_t k = cfg.reviews_per_song;
    const std::size_t per_review = tokens.size() / k;
    const std::size_t remainder = tokens.size() % k;
    std::size_t cursor = 0;
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t len = per_review + (r < remainder ? 1 : 0);
      std::string review;
      for (std::size_t t = 0; t < len; ++t) {
        if (t) review += " ";
        review += tokens[cursor++];
      }
      sample.reviews.push_back(std::move(review));
    }
    for (std::size_t label : labels) {
      sample.labels.push_back(graph.styles()[label]);
    }
    out.samples.push_back(std::move(sample));
  }
  return out;
}

void write_planted_truth_csv(const std::string& path, const SyntheticTruth& truth,
                             std::size_t n_samples,
                             const std::vector<std::string>& config_comments) {
  const std::size_t n = truth.styles.size();
  Tensor expected = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n * n; ++i) {
    expected.data()[i] = truth.pair_probs.data()[i] * static_cast<double>(n_samples);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write planted truth CSV '" + path + "'");
  }
  out.precision(17);
  for (const std::string& c : config_comments) out << "# " << c << "\n";
  out << "# expected pair counts; diagonal = expected per-style sample counts\n";
  out << "# minority_style=" << truth.minority_style << "\n";
  out << "style";
  for (const std::string& name : truth.styles) out << "," << name;
  out << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << truth.styles[i];
    for (std::size_t j = 0; j < n; ++j) out << "," << expected.at(i, j);
    out << "\n";
  }
}

}  // namespace krf
