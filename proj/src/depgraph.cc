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

#include "sheetsentry/depgraph.h"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

#include "sheetsentry/errors.h"

namespace sheetsentry {

namespace {

using NodeId = DepGraph::NodeId;

// Resolves a reference's sheet against the workbook, relative to the cell
// holding the formula. nullopt for unknown sheets.
std::optional<int> ResolveSheet(const Workbook& wb, const Reference& r,
                                int origin_sheet) {
  if (!r.sheet) return origin_sheet;
  return wb.find_sheet(*r.sheet);
}

std::string QuoteDot(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::optional<NodeId> DepGraph::find(const GraphNode& node) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) return std::nullopt;
  return static_cast<NodeId>(it - nodes_.begin());
}

std::string DepGraph::label(const GraphNode& node) const {
  std::string out = sheet_names_.at(node.cell.sheet) + "!" +
                    render_address(node.cell.col, node.cell.row);
  if (node.range_end) {
    out += ":" + render_address(node.range_end->col, node.range_end->row);
  }
  return out;
}

DepGraph build_graph(const Workbook& wb,
                     std::span<const ParsedFormula> formulas) {
  DepGraph g;
  for (const Sheet& s : wb.sheets) g.sheet_names_.push_back(s.name);

  // Calls on_edge(from, to) for every in-workbook dependency of `pf`, where
  // `to` is the formula cell or, for stored cells under a capped range, the
  // aggregate node.
  auto for_each_edge = [&wb](const ParsedFormula& pf, auto&& on_edge) {
    const GraphNode self{pf.cell, std::nullopt};
    for (const AnyReference& any : collect_references(pf.ast)) {
      if (const auto* r = std::get_if<Reference>(&any)) {
        if (r->is_external()) continue;
        const auto sheet = ResolveSheet(wb, *r, pf.cell.sheet);
        if (!sheet) continue;
        on_edge(GraphNode{CellKey{*sheet, r->row, r->col}, std::nullopt}, self);
        continue;
      }
      const auto& rr = std::get<RangeRef>(any);
      if (rr.start.is_external()) continue;
      const auto sheet = ResolveSheet(wb, rr.start, pf.cell.sheet);
      if (!sheet) continue;
      if (rr.cell_count() <= kRangeExpansionCap) {
        for (int row = rr.start.row; row <= rr.end.row; ++row) {
          for (int col = rr.start.col; col <= rr.end.col; ++col) {
            on_edge(GraphNode{CellKey{*sheet, row, col}, std::nullopt}, self);
          }
        }
        continue;
      }
      const GraphNode agg{CellKey{*sheet, rr.start.row, rr.start.col},
                          CellKey{*sheet, rr.end.row, rr.end.col}};
      on_edge(agg, self);
      const auto& cells = wb.sheets[*sheet].cells;
      for (auto it = cells.lower_bound(GridPos{rr.start.row, 0});
           it != cells.end() && it->first.row <= rr.end.row; ++it) {
        if (it->first.col < rr.start.col || it->first.col > rr.end.col) continue;
        on_edge(GraphNode{CellKey{*sheet, it->first.row, it->first.col},
                          std::nullopt},
                agg);
      }
    }
  };

  std::vector<GraphNode> nodes;
  for (const ParsedFormula& pf : formulas) {
    nodes.push_back(GraphNode{pf.cell, std::nullopt});
    for_each_edge(pf, [&nodes](const GraphNode& from, const GraphNode&) {
      nodes.push_back(from);
    });
    for (const AnyReference& any : collect_references(pf.ast)) {
      if (const auto* r = std::get_if<Reference>(&any)) {
        if (!r->is_external()) continue;
        g.external_.push_back(ExternalLink{pf.cell, *r->external,
                                           r->sheet.value_or(""),
                                           render_address(r->col, r->row)});
      } else if (const auto& rr = std::get<RangeRef>(any);
                 rr.start.is_external()) {
        g.external_.push_back(ExternalLink{
            pf.cell, *rr.start.external, rr.start.sheet.value_or(""),
            render_address(rr.start.col, rr.start.row) + ":" +
                render_address(rr.end.col, rr.end.row)});
      }
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  g.nodes_ = std::move(nodes);

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const ParsedFormula& pf : formulas) {
    for_each_edge(pf, [&](const GraphNode& from, const GraphNode& to) {
      edges.emplace_back(*g.find(from), *g.find(to));
    });
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  g.preds_.assign(g.nodes_.size(), {});
  g.deps_.assign(g.nodes_.size(), {});
  for (const auto& [from, to] : edges) {
    g.deps_[from].push_back(to);
    g.preds_[to].push_back(from);
  }
  for (auto& p : g.preds_) std::sort(p.begin(), p.end());
  g.edge_count_ = edges.size();
  return g;
}

DepGraph build_graph(const Workbook& wb) {
  const std::vector<ParsedFormula> formulas = parse_all(wb);
  return build_graph(wb, formulas);
}

namespace {

// Iterative Tarjan. Returns components with >= 2 nodes or a self-loop.
std::vector<std::vector<NodeId>> CyclicComponents(const DepGraph& g) {
  const std::size_t n = g.node_count();
  constexpr std::uint32_t kUnvisited = 0xffffffffu;
  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::vector<std::vector<NodeId>> out;
  std::uint32_t next_index = 0;

  struct Frame {
    NodeId node;
    std::size_t child;
  };
  std::vector<Frame> call;
  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto succ = g.dependents_of(f.node);
      if (f.child < succ.size()) {
        const NodeId w = succ[f.child++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const NodeId v = f.node;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().node] = std::min(low[call.back().node], low[v]);
      }
      if (low[v] != index[v]) continue;
      std::vector<NodeId> comp;
      NodeId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      const auto deps = g.dependents_of(v);
      const bool self_loop = std::find(deps.begin(), deps.end(), v) != deps.end();
      if (comp.size() >= 2 || self_loop) {
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> Kahn(const DepGraph& g, const std::vector<bool>& skip,
                         TieBreak tie_break) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> indegree(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (skip[v]) continue;
    for (NodeId p : g.precedents_of(v)) indegree[v] += !skip[p];
  }
  // Node ids are assigned in address order, so comparing ids compares
  // addresses.
  std::function<bool(NodeId, NodeId)> later =
      tie_break == TieBreak::kAddressOrder
          ? std::function<bool(NodeId, NodeId)>(std::greater<NodeId>())
          : std::function<bool(NodeId, NodeId)>(std::less<NodeId>());
  std::priority_queue<NodeId, std::vector<NodeId>, std::function<bool(NodeId, NodeId)>>
      ready(later);
  for (NodeId v = 0; v < n; ++v) {
    if (!skip[v] && indegree[v] == 0) ready.push(v);
  }
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (NodeId d : g.dependents_of(v)) {
      if (!skip[d] && --indegree[d] == 0) ready.push(d);
    }
  }
  return order;
}

}  // namespace

TopoResult topo_order(const DepGraph& g, TieBreak tie_break) {
  const auto cycles = CyclicComponents(g);
  if (!cycles.empty()) {
    CycleReport report;
    for (const auto& comp : cycles) {
      std::vector<GraphNode> nodes;
      for (NodeId id : comp) nodes.push_back(g.nodes()[id]);
      report.components.push_back(std::move(nodes));
    }
    return report;
  }
  std::vector<GraphNode> order;
  for (NodeId id : Kahn(g, std::vector<bool>(g.node_count(), false), tie_break)) {
    order.push_back(g.nodes()[id]);
  }
  return order;
}

EvaluationPlan evaluation_plan(const DepGraph& g, TieBreak tie_break) {
  EvaluationPlan plan;
  plan.cyclic.assign(g.node_count(), false);
  for (const auto& comp : CyclicComponents(g)) {
    for (NodeId id : comp) plan.cyclic[id] = true;
  }
  plan.order = Kahn(g, plan.cyclic, tie_break);
  return plan;
}

namespace {

NodeId RequireNode(const DepGraph& g, const CellKey& cell) {
  const auto id = g.find(cell);
  if (!id) {
    const std::string sheet = cell.sheet >= 0 &&
                                      cell.sheet < static_cast<int>(g.sheet_names().size())
                                  ? g.sheet_names()[cell.sheet]
                                  : "?";
    throw UnknownNode("no graph node for " + sheet + "!" +
                      render_address(cell.col, cell.row));
  }
  return *id;
}

CellKey KeyOf(const DepGraph& g, const CellAddress& cell) {
  const auto& names = g.sheet_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (iequals(names[i], cell.sheet)) {
      return CellKey{static_cast<int>(i), cell.row, cell.col};
    }
  }
  throw UnknownNode("no graph node for " + to_string(cell));
}

std::vector<GraphNode> ToNodes(const DepGraph& g, std::span<const NodeId> ids) {
  std::vector<GraphNode> out;
  out.reserve(ids.size());
  for (NodeId id : ids) out.push_back(g.nodes()[id]);
  return out;
}

}  // namespace

std::vector<GraphNode> precedents(const DepGraph& g, const CellKey& cell) {
  return ToNodes(g, g.precedents_of(RequireNode(g, cell)));
}

std::vector<GraphNode> dependents(const DepGraph& g, const CellKey& cell) {
  return ToNodes(g, g.dependents_of(RequireNode(g, cell)));
}

std::vector<GraphNode> precedents(const DepGraph& g, const CellAddress& cell) {
  return precedents(g, KeyOf(g, cell));
}

std::vector<GraphNode> dependents(const DepGraph& g, const CellAddress& cell) {
  return dependents(g, KeyOf(g, cell));
}

std::string to_dot(const DepGraph& g) {
  std::string out = "digraph workbook {\n";
  for (const GraphNode& node : g.nodes()) {
    out += "  " + QuoteDot(g.label(node)) + ";\n";
  }
  for (DepGraph::NodeId from = 0; from < g.node_count(); ++from) {
    for (DepGraph::NodeId to : g.dependents_of(from)) {
      out += "  " + QuoteDot(g.label(g.nodes()[from])) + " -> " +
             QuoteDot(g.label(g.nodes()[to])) + ";\n";
    }
  }
  std::set<std::string> boxes;
  std::set<std::pair<std::string, CellKey>> dashed;
  for (const ExternalLink& link : g.external_links()) {
    const std::string box = "[" + link.workbook + "]";
    if (boxes.insert(box).second) {
      out += "  " + QuoteDot(box) + " [shape=box];\n";
    }
    if (dashed.insert({box, link.source}).second) {
      out += "  " + QuoteDot(box) + " -> " +
             QuoteDot(g.label(GraphNode{link.source, std::nullopt})) +
             " [style=dashed];\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace sheetsentry
