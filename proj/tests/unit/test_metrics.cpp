#include "krf/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "krf/errors.hpp"
#include "krf/rng.hpp"

using krf::LabelSet;

namespace {

// Brute-force recount oracle, written against the metric definitions rather
// than the implementation: per-pair loops and explicit set membership.
struct Oracle {
  static double one_error(const std::vector<std::vector<double>>& scores,
                          const std::vector<LabelSet>& gold) {
    std::size_t miss = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      double best = scores[i][0];
      std::size_t arg = 0;
      for (std::size_t c = 0; c < scores[i].size(); ++c) {
        if (scores[i][c] > best) {
          best = scores[i][c];
          arg = c;
        }
      }
      bool found = false;
      for (std::size_t g : gold[i]) found = found || g == arg;
      if (!found) ++miss;
    }
    return double(miss) / double(scores.size());
  }

  static double hamming(const std::vector<LabelSet>& pred,
                        const std::vector<LabelSet>& gold, std::size_t n_labels) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      for (std::size_t c = 0; c < n_labels; ++c) {
        const bool p = pred[i].count(c) > 0;
        const bool g = gold[i].count(c) > 0;
        if (p != g) ++bad;
      }
    }
    return double(bad) / double(pred.size() * n_labels);
  }

  static std::pair<double, double> f1(const std::vector<LabelSet>& pred,
                                      const std::vector<LabelSet>& gold,
                                      std::size_t n_labels) {
    double macro_sum = 0.0;
    double tp_all = 0, fp_all = 0, fn_all = 0;
    for (std::size_t c = 0; c < n_labels; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i].count(c) > 0;
        const bool g = gold[i].count(c) > 0;
        tp += p && g;
        fp += p && !g;
        fn += !p && g;
      }
      const double f = (2 * tp + fp + fn) > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
      macro_sum += f;
      tp_all += tp;
      fp_all += fp;
      fn_all += fn;
    }
    const double micro =
        (2 * tp_all + fp_all + fn_all) > 0
            ? 2 * tp_all / (2 * tp_all + fp_all + fn_all)
            : 0.0;
    return {macro_sum / double(n_labels), micro};
  }
};

LabelSet random_set(krf::Rng& rng, std::size_t n_labels, bool allow_empty) {
  LabelSet s;
  for (std::size_t c = 0; c < n_labels; ++c) {
    if (rng.uniform() < 0.3) s.insert(c);
  }
  if (!allow_empty && s.empty()) s.insert(rng.uniform_index(n_labels));
  return s;
}

}  // namespace

TEST_CASE("one_error trivial and counted cases") {
  std::vector<std::vector<double>> scores = {{0.9, 0.1}, {0.2, 0.8}};
  std::vector<LabelSet> gold_hit = {{0}, {1}};
  CHECK(krf::one_error(scores, gold_hit) == 0.0);

  std::vector<LabelSet> gold_miss = {{1}, {0}};
  CHECK(krf::one_error(scores, gold_miss) == 1.0);

  std::vector<std::vector<double>> s3 = {{1, 0}, {1, 0}, {0, 1}};
  std::vector<LabelSet> g3 = {{0}, {1}, {1}};  // hits: 1st and 3rd
  CHECK(krf::one_error(s3, g3) == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(krf::one_error({{1.0, 0.0}}, {LabelSet{}}), krf::DataError);
}

TEST_CASE("one_error breaks ties toward the lowest index") {
  std::vector<std::vector<double>> scores = {{0.5, 0.5, 0.5}};
  CHECK(krf::one_error(scores, {LabelSet{0}}) == 0.0);
  CHECK(krf::one_error(scores, {LabelSet{2}}) == 1.0);
}

TEST_CASE("hamming_loss trivial and hand-counted cases") {
  std::vector<LabelSet> gold = {{0, 1}, {2}};
  CHECK(krf::hamming_loss(gold, gold, 4) == 0.0);

  std::vector<LabelSet> complement = {{2, 3}, {0, 1, 3}};
  CHECK(krf::hamming_loss(complement, gold, 4) == 1.0);

  CHECK(krf::hamming_loss({LabelSet{0}}, {LabelSet{0, 1}}, 4) ==
        doctest::Approx(0.25));
}

TEST_CASE("hamming_loss is symmetric in its arguments") {
  krf::Rng rng(4);
  for (int it = 0; it < 50; ++it) {
    std::vector<LabelSet> a, b;
    for (int i = 0; i < 6; ++i) {
      a.push_back(random_set(rng, 5, true));
      b.push_back(random_set(rng, 5, true));
    }
    CHECK(krf::hamming_loss(a, b, 5) == krf::hamming_loss(b, a, 5));
  }
}

TEST_CASE("f1 worked example: both averages equal 2/3") {
  // label A: TP=1 FP=1 FN=0; label B: TP=1 FP=0 FN=1
  std::vector<LabelSet> pred = {{0, 1}, {0}};
  std::vector<LabelSet> gold = {{0, 1}, {1}};
  auto res = krf::f1_scores(pred, gold, 2);
  CHECK(res.per_label[0].f1 == doctest::Approx(2.0 / 3.0));
  CHECK(res.per_label[1].f1 == doctest::Approx(2.0 / 3.0));
  CHECK(res.macro_f1 == doctest::Approx(2.0 / 3.0));
  CHECK(res.micro_f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("f1 conventions: perfect prediction and absent labels") {
  std::vector<LabelSet> gold = {{0}, {1}};
  auto perfect = krf::f1_scores(gold, gold, 3);
  CHECK(perfect.micro_f1 == 1.0);
  // label 2 never appears: its F1 is 0 under the 0/0 convention and it is
  // still averaged into the macro score
  CHECK(perfect.per_label[2].f1 == 0.0);
  CHECK(perfect.macro_f1 == doctest::Approx(2.0 / 3.0));
  CHECK(perfect.per_label[2].support == 0);
}

TEST_CASE("per-label supports sum to the total gold label count") {
  krf::Rng rng(12);
  std::vector<LabelSet> pred, gold;
  std::size_t total = 0;
  for (int i = 0; i < 40; ++i) {
    pred.push_back(random_set(rng, 7, true));
    gold.push_back(random_set(rng, 7, false));
    total += gold.back().size();
  }
  auto res = krf::f1_scores(pred, gold, 7);
  std::size_t sum = 0;
  for (const auto& s : res.per_label) sum += s.support;
  CHECK(sum == total);
}

TEST_CASE("metrics match the brute-force oracle on random instances") {
  krf::Rng rng(99);
  for (int it = 0; it < 300; ++it) {
    const std::size_t n_labels = 2 + rng.uniform_index(8);
    const std::size_t n = 1 + rng.uniform_index(12);
    std::vector<std::vector<double>> scores;
    std::vector<LabelSet> pred, gold;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(n_labels);
      for (double& v : row) v = rng.uniform(-1.0, 1.0);
      scores.push_back(std::move(row));
      pred.push_back(random_set(rng, n_labels, true));
      gold.push_back(random_set(rng, n_labels, false));
    }
    CHECK(std::abs(krf::one_error(scores, gold) -
                   Oracle::one_error(scores, gold)) < 1e-12);
    CHECK(std::abs(krf::hamming_loss(pred, gold, n_labels) -
                   Oracle::hamming(pred, gold, n_labels)) < 1e-12);
    auto res = krf::f1_scores(pred, gold, n_labels);
    auto [macro, micro] = Oracle::f1(pred, gold, n_labels);
    CHECK(std::abs(res.macro_f1 - macro) < 1e-12);
    CHECK(std::abs(res.micro_f1 - micro) < 1e-12);
  }
}

TEST_CASE("micro F1 is invariant under label permutations") {
  krf::Rng rng(7);
  const std::size_t n_labels = 6;
  std::vector<LabelSet> pred, gold;
  for (int i = 0; i < 30; ++i) {
    pred.push_back(random_set(rng, n_labels, true));
    gold.push_back(random_set(rng, n_labels, false));
  }
  std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};
  auto apply = [&](const std::vector<LabelSet>& sets) {
    std::vector<LabelSet> out;
    for (const LabelSet& s : sets) {
      LabelSet p;
      for (std::size_t c : s) p.insert(perm[c]);
      out.push_back(std::move(p));
    }
    return out;
  };
  auto base = krf::f1_scores(pred, gold, n_labels);
  auto permuted = krf::f1_scores(apply(pred), apply(gold), n_labels);
  CHECK(base.micro_f1 == doctest::Approx(permuted.micro_f1).epsilon(1e-12));
}

TEST_CASE("report serialization carries the table order OE HL MacroF1 MicroF1") {
  krf::EvalReport r;
  r.one_error = 0.25;
  r.hamming_loss = 0.125;
  r.macro_f1 = 0.5;
  r.micro_f1 = 0.75;
  const std::string table = r.to_table();
  CHECK(table.find("OE") < table.find("HL"));
  CHECK(table.find("HL") < table.find("MacroF1"));
  CHECK(table.find("MacroF1") < table.find("MicroF1"));
  const std::string j = r.to_json();
  CHECK(j.find("\"one_error\": 0.25") != std::string::npos);
}
