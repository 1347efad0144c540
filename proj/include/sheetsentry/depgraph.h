// Copyright 2026 The SheetSentry Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHEETSENTRY_DEPGRAPH_H_
#define SHEETSENTRY_DEPGRAPH_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sheetsentry/formula.h"
#include "sheetsentry/workbook.h"

namespace sheetsentry {

// Ranges covering more cells than this become one aggregate node instead of
// one edge per covered cell.
inline constexpr std::uint64_t kRangeExpansionCap = 100000;

// A cell, or an aggregate standing for a capped range (cell is the top-left
// corner, range_end the bottom-right).
struct GraphNode {
  CellKey cell;
  std::optional<CellKey> range_end;

  bool is_aggregate() const { return range_end.has_value(); }

  friend auto operator<=>(const GraphNode&, const GraphNode&) = default;
  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct ExternalLink {
  CellKey source;
  std::string workbook;
  std::string sheet;
  std::string target;  // "A1" or "A1:B9"

  friend bool operator==(const ExternalLink&, const ExternalLink&) = default;
};

// Precedent -> dependent edges over cells. Immutable once built.
class DepGraph {
 public:
  using NodeId = std::uint32_t;

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  std::optional<NodeId> find(const GraphNode& node) const;
  std::optional<NodeId> find(const CellKey& cell) const {
    return find(GraphNode{cell, std::nullopt});
  }

  // Sorted by node order.
  std::span<const NodeId> precedents_of(NodeId id) const { return preds_[id]; }
  std::span<const NodeId> dependents_of(NodeId id) const { return deps_[id]; }

  const std::vector<ExternalLink>& external_links() const { return external_; }
  const std::vector<std::string>& sheet_names() const { return sheet_names_; }

  std::string label(const GraphNode& node) const;

 private:
  friend DepGraph build_graph(const Workbook& wb,
                              std::span<const ParsedFormula> formulas);

  std::vector<GraphNode> nodes_;  // sorted, unique
  std::vector<std::vector<NodeId>> preds_;
  std::vector<std::vector<NodeId>> deps_;
  std::size_t edge_count_ = 0;
  std::vector<ExternalLink> external_;
  std::vector<std::string> sheet_names_;
};

DepGraph build_graph(const Workbook& wb, std::span<const ParsedFormula> formulas);
DepGraph build_graph(const Workbook& wb);

// Strongly connected components that form cycles (size >= 2 or a self-loop),
// each sorted, ordered by first member.
struct CycleReport {
  std::vector<std::vector<GraphNode>> components;

  friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

enum class TieBreak { kAddressOrder, kReverseAddressOrder };

using TopoResult = std::variant<std::vector<GraphNode>, CycleReport>;

// Kahn ordering; among ready nodes the smallest (sheet, row, column) goes
// first, or the largest under kReverseAddressOrder.
TopoResult topo_order(const DepGraph& g,
                      TieBreak tie_break = TieBreak::kAddressOrder);

// Evaluation schedule that tolerates cycles: every node outside a cycle in
// dependency order, plus a flag per node marking cycle members.
struct EvaluationPlan {
  std::vector<DepGraph::NodeId> order;
  std::vector<bool> cyclic;
};

EvaluationPlan evaluation_plan(const DepGraph& g,
                               TieBreak tie_break = TieBreak::kAddressOrder);

// Direct neighbours in node order. Throw UnknownNode if `cell` is not a node.
std::vector<GraphNode> precedents(const DepGraph& g, const CellKey& cell);
std::vector<GraphNode> dependents(const DepGraph& g, const CellKey& cell);
std::vector<GraphNode> precedents(const DepGraph& g, const CellAddress& cell);
std::vector<GraphNode> dependents(const DepGraph& g, const CellAddress& cell);

// Graphviz rendering: one node per cell, one edge per dependency, and a box
// per external workbook with dashed edges to the cells reading from it.
std::string to_dot(const DepGraph& g);

}  // namespace sheetsentry

#endif  // SHEETSENTRY_DEPGRAPH_H_
