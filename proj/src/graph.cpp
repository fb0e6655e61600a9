#include "qwalk/graph.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qwalk/errors.hpp"

namespace qwalk {

Graph::Graph(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
}

Graph::Graph(int n, const std::vector<Edge>& edges) : Graph(n) {
  for (const auto& [j, k] : edges) edges_.insert(normalized(j, k));
}

Graph::Edge Graph::normalized(int j, int k) const {
  if (j < 1 || j > n_ || k < 1 || k > n_) {
    throw std::out_of_range("node index out of range: (" + std::to_string(j) + "," +
                            std::to_string(k) + ") for n=" + std::to_string(n_));
  }
  return {std::min(j, k), std::max(j, k)};
}

bool Graph::has_edge(int j, int k) const { return edges_.contains(normalized(j, k)); }

Graph Graph::with_edge(int j, int k) const {
  Graph g = *this;
  g.edges_.insert(normalized(j, k));
  return g;
}

Graph Graph::without_edge(int j, int k) const {
  Graph g = *this;
  if (g.edges_.erase(normalized(j, k)) == 0) {
    throw NotFoundError("no edge (" + std::to_string(j) + "," + std::to_string(k) + ")");
  }
  return g;
}

std::vector<int> Graph::neighbors(int j) const {
  std::vector<int> out;
  for (int k = 1; k <= n_; ++k) {
    if (has_edge(j, k)) out.push_back(k);
  }
  return out;
}

Graph complete_graph(int n) {
  if (n < 1) throw std::invalid_argument("complete_graph: n must be positive");
  std::vector<Graph::Edge> edges;
  for (int j = 1; j <= n; ++j) {
    for (int k = j; k <= n; ++k) edges.emplace_back(j, k);
  }
  return Graph(n, edges);
}

Graph cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle_graph: n must be at least 3");
  std::vector<Graph::Edge> edges;
  for (int j = 1; j <= n; ++j) edges.emplace_back(j, j % n + 1);
  return Graph(n, edges);
}

Graph path_graph(int n) {
  std::vector<Graph::Edge> edges;
  for (int j = 1; j < n; ++j) edges.emplace_back(j, j + 1);
  return Graph(n, edges);
}

EdgeMask::EdgeMask(const Graph& g)
    : n_(g.size()), bits_(static_cast<std::size_t>(n_) * n_, 0) {
  for (const auto& [j, k] : g.edges()) {
    bits_[idx(j, k)] = 1;
    bits_[idx(k, j)] = 1;
  }
}

std::size_t EdgeMask::idx(int j, int k) const {
  if (j < 1 || j > n_ || k < 1 || k > n_) throw std::out_of_range("mask index out of range");
  return static_cast<std::size_t>(j - 1) * n_ + (k - 1);
}

std::vector<bool> EdgeMask::row(int j) const {
  std::vector<bool> r(n_);
  for (int k = 1; k <= n_; ++k) r[k - 1] = present(j, k);
  return r;
}

namespace {

Graph parse_json_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON graph: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
    throw ParseError("JSON graph needs fields \"n\" and \"edges\"");
  }
  if (doc.value("directed", false)) throw ParseError("directed graphs are not supported");
  if (!doc["n"].is_number_integer() || doc["n"].get<long>() < 1) {
    throw ParseError("\"n\" must be a positive integer");
  }
  const int n = doc["n"].get<int>();
  std::vector<Graph::Edge> edges;
  std::size_t i = 0;
  for (const auto& e : doc["edges"]) {
    ++i;
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer()) {
      throw ParseError("edge " + std::to_string(i) + " is not a [j, k] integer pair");
    }
    const int j = e[0].get<int>(), k = e[1].get<int>();
    if (j < 1 || j > n || k < 1 || k > n) {
      throw ParseError("edge " + std::to_string(i) + " index out of range [1, " +
                       std::to_string(n) + "]");
    }
    edges.emplace_back(j, k);
  }
  return Graph(n, edges);
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ||
                               line[i] == ',')) {
      ++i;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
           line[i] != ',') {
      ++i;
    }
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

int to_int(std::string_view tok, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  }
  return v;
}

Graph parse_text_graph(std::string_view text) {
  int line_no = 0;
  int n = 0;
  std::vector<Graph::Edge> edges;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find("->") != std::string_view::npos) {
      throw ParseError("directed edges are not supported", line_no);
    }
    auto tok = tokens(line);
    if (tok.empty()) continue;
    if (n == 0) {
      if (tok.size() != 1) throw ParseError("expected node count header", line_no);
      n = to_int(tok[0], line_no);
      if (n < 1) throw ParseError("node count must be positive", line_no);
      continue;
    }
    if (tok.size() != 2) throw ParseError("expected 'j k'", line_no);
    const int j = to_int(tok[0], line_no), k = to_int(tok[1], line_no);
    if (j < 1 || j > n || k < 1 || k > n) {
      throw ParseError("node index out of range [1, " + std::to_string(n) + "]", line_no);
    }
    edges.emplace_back(j, k);
  }
  if (n == 0) throw ParseError("empty graph document");
  return Graph(n, edges);
}

}  // namespace

Graph parse_graph(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json_graph(text);
  return parse_text_graph(text);
}

std::string format_graph(const Graph& g) {
  std::ostringstream os;
  os << g.size() << '\n';
  for (const auto& [j, k] : g.edges()) os << j << ' ' << k << '\n';
  return os.str();
}

}  // namespace qwalk
