#include "krf/style_graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "krf/errors.hpp"

namespace krf {

std::string relation_name(Relation r) {
  switch (r) {
    case Relation::kSuperSubordinate: return "super_subordinate";
    case Relation::kCoordinate: return "coordinate";
    case Relation::kFusion: return "fusion";
  }
  return "?";
}

Relation relation_from_name(const std::string& name) {
  if (name == "super_subordinate") return Relation::kSuperSubordinate;
  if (name == "coordinate") return Relation::kCoordinate;
  if (name == "fusion") return Relation::kFusion;
  throw DataError("unknown relation keyword '" + name + "'");
}

double RelationScores::score(Relation r) const {
  switch (r) {
    case Relation::kSuperSubordinate: return super_subordinate;
    case Relation::kCoordinate: return coordinate;
    case Relation::kFusion: return fusion;
  }
  return 0.0;
}

void RelationScores::validate() const {
  if (fusion <= 0.0 || super_subordinate <= 0.0 || coordinate <= 0.0) {
    throw DataError("relation scores must be strictly positive");
  }
}

StyleGraph::StyleGraph(std::vector<std::string> styles,
                       std::vector<StyleEdge> edges)
    : styles_(std::move(styles)), edges_(std::move(edges)) {
  if (styles_.empty()) {
    throw DataError("style graph declares no styles");
  }
  for (std::size_t i = 0; i < styles_.size(); ++i) {
    if (!index_.emplace(styles_[i], i).second) {
      throw DataError("duplicate style declaration '" + styles_[i] + "'");
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const StyleEdge& e : edges_) {
    if (e.a >= styles_.size() || e.b >= styles_.size()) {
      throw DataError("edge endpoint out of range");
    }
    if (e.a == e.b) {
      throw DataError("self-edge on style '" + styles_[e.a] + "'");
    }
    auto key = std::minmax(e.a, e.b);
    if (!seen.insert({key.first, key.second}).second) {
      throw DataError("duplicate relation between '" + styles_[e.a] +
                      "' and '" + styles_[e.b] + "'");
    }
  }
}

bool StyleGraph::has_style(const std::string& name) const {
  return index_.count(name) > 0;
}

std::size_t StyleGraph::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw DataError("unknown style '" + name + "'");
  }
  return it->second;
}

bool StyleGraph::related(std::size_t i, std::size_t j) const {
  for (const StyleEdge& e : edges_) {
    if ((e.a == i && e.b == j) || (e.a == j && e.b == i)) return true;
  }
  return false;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line_no,
                             const std::string& msg) {
  throw DataError(origin + ":" + std::to_string(line_no) + ": " + msg);
}

}  // namespace

StyleGraph parse_style_graph_text(const std::string& text,
                                  const std::string& origin) {
  enum class Section { kNone, kStyles, kEdges };
  Section section = Section::kNone;
  std::vector<std::string> styles;
  std::map<std::string, std::size_t> index;
  std::vector<StyleEdge> edges;
  std::set<std::pair<std::size_t, std::size_t>> seen_pairs;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "styles:") {
      section = Section::kStyles;
      continue;
    }
    if (line == "edges:") {
      section = Section::kEdges;
      continue;
    }
    switch (section) {
      case Section::kNone:
        parse_fail(origin, line_no, "content before a 'styles:' block");
      case Section::kStyles: {
        if (line.find_first_of(" \t") != std::string::npos) {
          parse_fail(origin, line_no, "style name contains whitespace: '" + line + "'");
        }
        if (!index.emplace(line, styles.size()).second) {
          parse_fail(origin, line_no, "duplicate style declaration '" + line + "'");
        }
        styles.push_back(line);
        break;
      }
      case Section::kEdges: {
        std::istringstream es(line);
        std::string a, b, rel, extra;
        if (!(es >> a >> b >> rel) || (es >> extra)) {
          parse_fail(origin, line_no,
                     "expected '<style_a> <style_b> <relation>', got '" + line + "'");
        }
        auto ia = index.find(a);
        if (ia == index.end()) {
          parse_fail(origin, line_no, "unknown style '" + a + "' in edge");
        }
        auto ib = index.find(b);
        if (ib == index.end()) {
          parse_fail(origin, line_no, "unknown style '" + b + "' in edge");
        }
        if (ia->second == ib->second) {
          parse_fail(origin, line_no, "self-edge on style '" + a + "'");
        }
        Relation r;
        try {
          r = relation_from_name(rel);
        } catch (const DataError& e) {
          parse_fail(origin, line_no, e.what());
        }
        auto key = std::minmax(ia->second, ib->second);
        if (!seen_pairs.insert({key.first, key.second}).second) {
          parse_fail(origin, line_no,
                     "duplicate relation between '" + a + "' and '" + b + "'");
        }
        edges.push_back({ia->second, ib->second, r});
        break;
      }
    }
  }
  if (styles.empty()) {
    throw DataError(origin + ": no styles declared");
  }
  return StyleGraph(std::move(styles), std::move(edges));
}

StyleGraph parse_style_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open style graph file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_style_graph_text(buf.str(), path);
}

void write_style_graph(const StyleGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write style graph file '" + path + "'");
  }
  out << "styles:\n";
  for (const std::string& s : g.styles()) out << s << "\n";
  out << "edges:\n";
  for (const StyleEdge& e : g.edges()) {
    out << g.styles()[e.a] << " " << g.styles()[e.b] << " "
        << relation_name(e.relation) << "\n";
  }
}

Tensor knowledge_matrix(const StyleGraph& g, const RelationScores& scores) {
  scores.validate();
  const std::size_t n = g.size();
  Tensor a = Tensor::zeros({n, n});
  for (const StyleEdge& e : g.edges()) {
    const double s = scores.score(e.relation);
    a.data()[e.a * n + e.b] = s;
    a.data()[e.b * n + e.a] = s;
  }
  return a;
}

}  // namespace krf
