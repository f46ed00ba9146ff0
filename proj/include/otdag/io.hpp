#pragma once

#include "otdag/graph.hpp"
#include "otdag/synthdata.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace otdag {

/// CSV with a header row of names, then comma-separated decimal rows.
/// Throws ParseError naming the offending line.
Dataset load_dataset(const std::string& path);

/// Values printed with 17 significant digits, '\n' line endings.
void save_dataset(const std::string& path, const Dataset& data);

/// Edge-list text: one "parent child" pair of 0-based indices per line,
/// '#' starts a comment, and an optional "# nodes N" line fixes the node
/// count. Without it the count is `nodes`, else the largest index + 1.
/// Cycles are rejected unless `allow_cycles`.
AdjMatrix load_edge_list(const std::string& path, std::optional<int> nodes = std::nullopt,
                         bool allow_cycles = false);

/// Acyclic ground-truth graph from an edge list.
TrueGraph load_graph(const std::string& path, std::optional<int> nodes = std::nullopt);

/// Undirected "i j" pairs; both orientations are set.
Skeleton load_skeleton(const std::string& path, std::optional<int> nodes = std::nullopt);

/// Writes "# nodes d" and then each edge (entries equal to 1) as
/// "parent child", ordered by parent then child.
void save_edge_list(const std::string& path, const AdjMatrix& adj);

/// Skeleton as "i j" lines with i < j.
void save_skeleton(const std::string& path, const Skeleton& skeleton);

/// Seeds, mechanisms and weight draws of a generated instance.
nlohmann::ordered_json sem_to_json(const SemInstance& sem);

void write_json(const std::string& path, const nlohmann::ordered_json& doc);

}  // namespace otdag
