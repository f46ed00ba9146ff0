#include "otdag/io.hpp"

#include "otdag/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace otdag {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RawEdges {
  std::vector<std::pair<int, int>> pairs;  // (first, second) as written
  std::vector<std::size_t> lines;
  std::optional<int> declared_nodes;
};

RawEdges read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  RawEdges raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::istringstream comment(line.substr(hash + 1));
      std::string key;
      int n = 0;
      if (comment >> key && key == "nodes" && comment >> n) raw.declared_nodes = n;
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    long long a = 0, b = 0;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra))
      throw ParseError(path, lineno, "expected two integer indices");
    if (a < 0 || b < 0) throw ParseError(path, lineno, "negative node index");
    raw.pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    raw.lines.push_back(lineno);
  }
  return raw;
}

int resolve_nodes(const std::string& path, const RawEdges& raw, std::optional<int> nodes) {
  int d = 0;
  if (raw.declared_nodes) d = *raw.declared_nodes;
  else if (nodes) d = *nodes;
  else
    for (const auto& [a, b] : raw.pairs) d = std::max({d, a + 1, b + 1});
  if (nodes && *nodes != d)
    throw ParseError(path, 0, "file declares " + std::to_string(d) + " nodes, expected " +
                                  std::to_string(*nodes));
  for (std::size_t e = 0; e < raw.pairs.size(); ++e) {
    const auto [a, b] = raw.pairs[e];
    if (a >= d || b >= d) throw ParseError(path, raw.lines[e], "node index out of range");
    if (a == b) throw ParseError(path, raw.lines[e], "self-loop on node " + std::to_string(a));
  }
  return d;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  Dataset data;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (data.names.empty()) {
      data.names = std::move(cells);
      continue;
    }
    if (cells.size() != data.names.size())
      throw ParseError(path, lineno, "expected " + std::to_string(data.names.size()) + " fields, found " +
                                         std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_double(cells[c], row[c]))
        throw ParseError(path, lineno, "non-numeric cell '" + cells[c] + "' in column " + std::to_string(c + 1));
    rows.push_back(std::move(row));
  }
  if (data.names.size() < 2) throw ParseError(path, lineno, "need at least 2 columns");
  if (rows.size() < 2) throw ParseError(path, lineno, "need at least 2 data rows");
  data.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  auto out = open_out(path);
  for (int c = 0; c < data.variables(); ++c) {
    if (c) out << ',';
    out << (c < static_cast<int>(data.names.size()) ? data.names[c] : "X" + std::to_string(c));
  }
  out << '\n';
  for (int r = 0; r < data.samples(); ++r) {
    for (int c = 0; c < data.variables(); ++c) {
      if (c) out << ',';
      out << format_double(data.values(r, c));
    }
    out << '\n';
  }
}

AdjMatrix load_edge_list(const std::string& path, std::optional<int> nodes, bool allow_cycles) {
  const RawEdges raw = read_pairs(path);
  const int d = resolve_nodes(path, raw, nodes);
  AdjMatrix adj = AdjMatrix::Zero(d, d);
  for (const auto& [parent, child] : raw.pairs) adj(child, parent) = 1;
  if (!allow_cycles && !is_acyclic(adj)) throw ParseError(path, 0, "edge list contains a directed cycle");
  return adj;
}

TrueGraph load_graph(const std::string& path, std::optional<int> nodes) {
  return make_true_graph(load_edge_list(path, nodes, false));
}

Skeleton load_skeleton(const std::string& path, std::optional<int> nodes) {
  const RawEdges raw = read_pairs(path);
  const int d = resolve_nodes(path, raw, nodes);
  Skeleton sk{AdjMatrix::Zero(d, d)};
  for (const auto& [a, b] : raw.pairs) sk.adjacency(a, b) = sk.adjacency(b, a) = 1;
  return sk;
}

void save_edge_list(const std::string& path, const AdjMatrix& adj) {
  auto out = open_out(path);
  out << "# nodes " << adj.rows() << '\n';
  for (int parent = 0; parent < adj.cols(); ++parent)
    for (int child = 0; child < adj.rows(); ++child)
      if (adj(child, parent) == 1) out << parent << ' ' << child << '\n';
}

void save_skeleton(const std::string& path, const Skeleton& skeleton) {
  auto out = open_out(path);
  const AdjMatrix& a = skeleton.adjacency;
  out << "# nodes " << a.rows() << '\n';
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != 0) out << i << ' ' << j << '\n';
}

nlohmann::ordered_json sem_to_json(const SemInstance& sem) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["model"] = std::string(to_string(sem.model.kind));
  doc["hidden_width"] = sem.model.hidden_width;
  doc["noise_std"] = sem.model.noise_std;
  doc["weight_seed"] = sem.seed;
  doc["topo_order"] = sem.graph.topo_order;
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < sem.nodes.size(); ++i) {
    const NodeMechanism& m = sem.nodes[i];
    ordered_json node;
    node["node"] = i;
    node["mechanism"] = std::string(to_string(m.kind));
    node["parents"] = m.parents;
    if (m.alpha.size()) node["alpha"] = std::vector<double>(m.alpha.data(), m.alpha.data() + m.alpha.size());
    if (m.kind == Mechanism::SigmoidMix || m.kind == Mechanism::SigmoidScaled) node["beta"] = m.beta;
    if (m.w1.size()) {
      ordered_json rows = ordered_json::array();
      for (Eigen::Index r = 0; r < m.w1.rows(); ++r) {
        const Eigen::RowVectorXd row = m.w1.row(r);
        rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
      }
      node["w1"] = std::move(rows);
      node["w2"] = std::vector<double>(m.w2.data(), m.w2.data() + m.w2.size());
    }
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  return doc;
}

void write_json(const std::string& path, const nlohmann::ordered_json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

}  // namespace otdag
