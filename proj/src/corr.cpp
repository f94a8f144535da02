#include "krf/corr.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "krf/errors.hpp"

namespace krf {

std::string ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kNoStat: return "no-stat";
    case Ablation::kNoKnowledge: return "no-knowledge";
    case Ablation::kHanOnly: return "han-only";
  }
  return "?";
}

Ablation ablation_from_name(const std::string& name) {
  if (name == "full") return Ablation::kFull;
  if (name == "no-stat" || name == "no_stat") return Ablation::kNoStat;
  if (name == "no-knowledge" || name == "no_knowledge") return Ablation::kNoKnowledge;
  if (name == "han-only" || name == "han_only") return Ablation::kHanOnly;
  throw DataError("unknown ablation '" + name +
                  "' (expected full, no-stat, no-knowledge, han-only)");
}

Tensor cooccurrence_counts(const std::vector<SongSample>& train,
                           const std::vector<std::string>& styles) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < styles.size(); ++i) index[styles[i]] = i;
  const std::size_t n = styles.size();
  Tensor a = Tensor::zeros({n, n});
  for (const SongSample& s : train) {
    std::vector<std::size_t> ids;
    ids.reserve(s.labels.size());
    for (const std::string& label : s.labels) {
      auto it = index.find(label);
      if (it == index.end()) {
        throw DataError("sample '" + s.id + "' carries unknown label '" +
                        label + "'");
      }
      ids.push_back(it->second);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      a.data()[ids[i] * n + ids[i]] += 1.0;
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        a.data()[ids[i] * n + ids[j]] += 1.0;
        a.data()[ids[j] * n + ids[i]] += 1.0;
      }
    }
  }
  return a;
}

Tensor threshold_filter(const Tensor& a, double tau) {
  if (tau < 0.0) {
    throw DataError("threshold tau must be non-negative");
  }
  const std::size_t n = a.rows();
  if (a.cols() != n) {
    throw DataError("threshold_filter expects a square matrix, got " +
                    a.shape_str());
  }
  Tensor out = a.detached_copy();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && out.data()[i * n + j] < tau) out.data()[i * n + j] = 0.0;
    }
  }
  return out;
}

Tensor normalize_adjacency(const Tensor& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) {
    throw DataError("normalize expects a square matrix, got " + a.shape_str());
  }
  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a.data()[i * n + j];
      if (v < 0.0) {
        throw DataError("normalize: negative entry at (" + std::to_string(i) +
                        "," + std::to_string(j) + ")");
      }
      deg += v;
    }
    inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Tensor out = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.data()[i * n + j] =
          inv_sqrt_deg[i] * a.data()[i * n + j] * inv_sqrt_deg[j];
    }
  }
  return out;
}

Tensor integrate(const Tensor& statistical, const Tensor& knowledge) {
  if (statistical.rank() != 2 || statistical.shape() != knowledge.shape() ||
      statistical.rows() != statistical.cols()) {
    throw DataError("integrate expects two equal square matrices, got " +
                    statistical.shape_str() + " and " + knowledge.shape_str());
  }
  const std::size_t n = statistical.rows();
  Tensor out = Tensor::zeros({2, n, n});
  std::copy(statistical.data().begin(), statistical.data().end(),
            out.data().begin());
  std::copy(knowledge.data().begin(), knowledge.data().end(),
            out.data().begin() + n * n);
  return out;
}

CorrelationMatrices build_correlation_matrices(
    const std::vector<SongSample>& train, const StyleGraph& graph,
    const RelationScores& scores, double tau, Ablation ablation) {
  CorrelationMatrices m;
  m.styles = graph.styles();
  const std::size_t n = graph.size();

  m.statistical_raw = cooccurrence_counts(train, m.styles);
  m.statistical_filtered = threshold_filter(m.statistical_raw, tau);
  m.normalized_statistical = normalize_adjacency(m.statistical_filtered);

  m.knowledge = knowledge_matrix(graph, scores);
  for (std::size_t i = 0; i < n; ++i) m.knowledge.data()[i * n + i] = 1.0;
  m.normalized_knowledge = normalize_adjacency(m.knowledge);

  Tensor stat_slice = m.normalized_statistical;
  Tensor knowl_slice = m.normalized_knowledge;
  if (ablation == Ablation::kNoStat) stat_slice = Tensor::zeros({n, n});
  if (ablation == Ablation::kNoKnowledge) knowl_slice = Tensor::zeros({n, n});
  m.integrated = integrate(stat_slice, knowl_slice);
  return m;
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& names,
                      const Tensor& matrix,
                      const std::vector<std::string>& comments) {
  if (matrix.rank() != 2 || matrix.rows() != names.size() ||
      matrix.cols() != names.size()) {
    throw DataError("matrix CSV export: shape " + matrix.shape_str() +
                    " does not match " + std::to_string(names.size()) +
                    " names");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write CSV file '" + path + "'");
  }
  out.precision(17);
  for (const std::string& c : comments) out << "# " << c << "\n";
  out << "style";
  for (const std::string& name : names) out << "," << name;
  out << "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i];
    for (std::size_t j = 0; j < names.size(); ++j) {
      out << "," << matrix.at(i, j);
    }
    out << "\n";
  }
}

}  // namespace krf
