#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "krf/tensor.hpp"

namespace krf {

enum class Relation { kSuperSubordinate, kCoordinate, kFusion };

std::string relation_name(Relation r);
Relation relation_from_name(const std::string& name);

struct StyleEdge {
  std::size_t a = 0;  // declared first (parent for super-subordinate edges)
  std::size_t b = 0;
  Relation relation = Relation::kFusion;
};

// Per-relation scores used to fill the knowledge correlation matrix.
struct RelationScores {
  double fusion = 1.0;
  double super_subordinate = 2.0;
  double coordinate = 3.0;

  double score(Relation r) const;
  void validate() const;  // all scores strictly positive
};

// Typed, undirected relation graph over the style vocabulary. The style order
// defines the label indexing used by every correlation matrix.
class StyleGraph {
 public:
  StyleGraph(std::vector<std::string> styles, std::vector<StyleEdge> edges);

  const std::vector<std::string>& styles() const { return styles_; }
  const std::vector<StyleEdge>& edges() const { return edges_; }
  std::size_t size() const { return styles_.size(); }

  bool has_style(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // throws DataError
  // True when an edge exists between the two styles (either declared order).
  bool related(std::size_t i, std::size_t j) const;

 private:
  std::vector<std::string> styles_;
  std::vector<StyleEdge> edges_;
  std::map<std::string, std::size_t> index_;
};

// Parses the text graph format:
//   # comment
//   styles:
//   <one style name per line>
//   edges:
//   <style_a> <style_b> <relation>
// Relations: super_subordinate (declared parent first), coordinate, fusion.
// Errors carry the offending line number.
StyleGraph parse_style_graph(const std::string& path);
StyleGraph parse_style_graph_text(const std::string& text,
                                  const std::string& origin = "<string>");

void write_style_graph(const StyleGraph& g, const std::string& path);

// A^knowledge: A[i][j] = score of the relation between styles i and j, or 0
// when unrelated. Symmetric with a zero diagonal; self-loops are added later
// by the correlation pipeline.
Tensor knowledge_matrix(const StyleGraph& g, const RelationScores& scores);

}  // namespace krf
