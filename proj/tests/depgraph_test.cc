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

#include <gtest/gtest.h>

#include <set>

#include "sheetsentry/errors.h"
#include "testing/generators.h"

namespace sheetsentry {
namespace {

CellKey K(std::string_view a1, int sheet = 0) {
  const AddressParts p = parse_address(a1);
  return CellKey{sheet, p.row, p.col};
}

GraphNode N(std::string_view a1, int sheet = 0) { return GraphNode{K(a1, sheet), std::nullopt}; }

Workbook Make(std::initializer_list<std::pair<const char*, Cell>> cells) {
  Workbook wb;
  Sheet& s = wb.add_sheet("S");
  for (const auto& [a1, cell] : cells) s.set(a1, cell);
  return wb;
}

bool HasEdge(const DepGraph& g, const GraphNode& from, const GraphNode& to) {
  const auto f = g.find(from);
  const auto t = g.find(to);
  if (!f || !t) return false;
  for (auto d : g.dependents_of(*f)) {
    if (d == *t) return true;
  }
  return false;
}

TEST(BuildGraphTest, SpecExamples) {
  DepGraph g = build_graph(Make({{"A1", Cell::Value(1.0)}, {"B1", Cell::Formula("=A1*2")}}));
  EXPECT_TRUE(HasEdge(g, N("A1"), N("B1")));
  EXPECT_EQ(g.edge_count(), 1u);

  g = build_graph(Make({{"B1", Cell::Formula("=SUM(A1:A3)")}}));
  for (const char* a : {"A1", "A2", "A3"}) EXPECT_TRUE(HasEdge(g, N(a), N("B1"))) << a;
  EXPECT_EQ(g.edge_count(), 3u);

  g = build_graph(Make({{"C1", Cell::Formula("=[Rates]S1!A1")}}));
  EXPECT_EQ(g.edge_count(), 0u);
  ASSERT_EQ(g.external_links().size(), 1u);
  EXPECT_EQ(g.external_links()[0].workbook, "Rates");
  EXPECT_EQ(g.external_links()[0].sheet, "S1");
  EXPECT_EQ(g.external_links()[0].target, "A1");
  EXPECT_EQ(g.external_links()[0].source, K("C1"));
}

TEST(BuildGraphTest, DeduplicatesAndCrossSheet) {
  Workbook wb;
  wb.add_sheet("In").set("A1", Cell::Value(2.0));
  Sheet& s = wb.add_sheet("Out");
  s.set("A1", Cell::Formula("=In!A1+in!A1+SUM(In!A1:A2)"));
  const DepGraph g = build_graph(wb);
  EXPECT_TRUE(HasEdge(g, N("A1", 0), N("A1", 1)));
  EXPECT_TRUE(HasEdge(g, N("A2", 0), N("A1", 1)));
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.external_links().empty());
}

TEST(BuildGraphTest, EdgeCountMatchesReferencePairs) {
  testing::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Workbook wb = testing::RandomAcyclicWorkbook(rng);
    const auto formulas = parse_all(wb);
    std::set<std::pair<CellKey, CellKey>> pairs;
    for (const auto& pf : formulas) {
      for (const auto& any : collect_references(pf.ast)) {
        auto add_cell = [&](const Reference& r, int row, int col) {
          const int sheet = r.sheet ? *wb.find_sheet(*r.sheet) : pf.cell.sheet;
          pairs.insert({CellKey{sheet, row, col}, pf.cell});
        };
        if (const auto* r = std::get_if<Reference>(&any)) {
          add_cell(*r, r->row, r->col);
        } else {
          const auto& rr = std::get<RangeRef>(any);
          for (int row = rr.start.row; row <= rr.end.row; ++row) {
            for (int col = rr.start.col; col <= rr.end.col; ++col) add_cell(rr.start, row, col);
          }
        }
      }
    }
    const DepGraph g = build_graph(wb, formulas);
    ASSERT_EQ(g.edge_count(), pairs.size());
    for (const auto& [from, to] : pairs) {
      ASSERT_TRUE(HasEdge(g, GraphNode{from, std::nullopt}, GraphNode{to, std::nullopt}));
    }
  }
}

TEST(BuildGraphTest, HugeRangeBecomesAggregate) {
  Workbook wb;
  Sheet& s = wb.add_sheet("S");
  s.set("A5", Cell::Value(1.0));
  s.set("B1", Cell::Formula("=SUM(A1:A200000)"));
  const DepGraph g = build_graph(wb);
  const GraphNode agg{K("A1"), K("A200000")};
  ASSERT_TRUE(g.find(agg).has_value());
  EXPECT_TRUE(HasEdge(g, N("A5"), agg));
  EXPECT_TRUE(HasEdge(g, agg, N("B1")));
  EXPECT_LT(g.node_count(), 10u);
}

TEST(TopoOrderTest, SpecExamples) {
  const DepGraph chain = build_graph(Make({{"A1", Cell::Value(1.0)},
                                           {"C1", Cell::Formula("=B1")},
                                           {"B1", Cell::Formula("=A1")}}));
  const auto order = topo_order(chain);
  ASSERT_TRUE(std::holds_alternative<std::vector<GraphNode>>(order));
  EXPECT_EQ(std::get<std::vector<GraphNode>>(order),
            (std::vector<GraphNode>{N("A1"), N("B1"), N("C1")}));

  const DepGraph cyc = build_graph(Make({{"A1", Cell::Formula("=B1")}, {"B1", Cell::Formula("=A1")}}));
  const auto report = topo_order(cyc);
  ASSERT_TRUE(std::holds_alternative<CycleReport>(report));
  EXPECT_EQ(std::get<CycleReport>(report).components,
            (std::vector<std::vector<GraphNode>>{{N("A1"), N("B1")}}));

  Workbook empty;
  empty.add_sheet("S");
  EXPECT_TRUE(std::get<std::vector<GraphNode>>(topo_order(build_graph(empty))).empty());
}

TEST(TopoOrderTest, SelfLoopAndSeparateComponents) {
  const DepGraph g = build_graph(Make({{"A1", Cell::Formula("=A1+1")},
                                       {"B1", Cell::Formula("=C1")},
                                       {"C1", Cell::Formula("=B1")},
                                       {"D1", Cell::Formula("=E1")}}));
  const auto comps = std::get<CycleReport>(topo_order(g)).components;
  EXPECT_EQ(comps, (std::vector<std::vector<GraphNode>>{{N("A1")}, {N("B1"), N("C1")}}));
}

TEST(TopoOrderTest, EveryEdgeForwardUnderBothTieBreaks) {
  testing::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const DepGraph g = build_graph(testing::RandomAcyclicWorkbook(rng));
    for (TieBreak tb : {TieBreak::kAddressOrder, TieBreak::kReverseAddressOrder}) {
      const auto order = std::get<std::vector<GraphNode>>(topo_order(g, tb));
      ASSERT_EQ(order.size(), g.node_count());
      std::map<GraphNode, std::size_t> pos;
      for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
      ASSERT_EQ(pos.size(), order.size());
      for (DepGraph::NodeId id = 0; id < g.node_count(); ++id) {
        for (auto d : g.dependents_of(id)) {
          ASSERT_LT(pos[g.nodes()[id]], pos[g.nodes()[d]]);
        }
      }
    }
  }
}

TEST(NeighbourTest, SpecExamples) {
  const DepGraph g = build_graph(Make({{"A1", Cell::Value(1.0)}, {"B1", Cell::Formula("=A1")}}));
  EXPECT_EQ(precedents(g, K("B1")), std::vector<GraphNode>{N("A1")});
  EXPECT_EQ(dependents(g, K("A1")), std::vector<GraphNode>{N("B1")});
  EXPECT_TRUE(precedents(g, K("A1")).empty());
  EXPECT_THROW(precedents(g, K("Z9")), UnknownNode);
  EXPECT_EQ(dependents(g, CellAddress{"s", 1, 1}), std::vector<GraphNode>{N("B1")});
  EXPECT_THROW(dependents(g, CellAddress{"Nope", 1, 1}), UnknownNode);
}

TEST(ExternalLinksTest, EmptyIffNoExternalQualifier) {
  testing::Rng rng(31);
  testing::AstOptions opt;
  opt.max_depth = 3;
  opt.max_row = 20;
  opt.max_col = 10;
  for (int trial = 0; trial < 200; ++trial) {
    Workbook wb;
    wb.add_sheet("S");
    for (const auto& name : testing::SheetNamePool()) wb.add_sheet(name);
    bool has_external = false;
    for (int i = 1; i <= 3; ++i) {
      const FormulaAst f = testing::RandomAst(rng, opt);
      for (const auto& any : collect_references(f)) {
        const Reference& r = std::holds_alternative<Reference>(any)
                                 ? std::get<Reference>(any)
                                 : std::get<RangeRef>(any).start;
        has_external |= r.is_external();
      }
      wb.sheets[0].set(render_address(30, i), Cell::Formula("=" + serialize_formula(f)));
    }
    EXPECT_EQ(build_graph(wb).external_links().empty(), !has_external);
  }
}

TEST(DotTest, RendersCellsEdgesAndExternalBoxes) {
  const DepGraph g = build_graph(Make({{"A1", Cell::Value(1.0)},
                                       {"B1", Cell::Formula("=A1+[Rates]S1!A1")}}));
  const std::string dot = to_dot(g);
  EXPECT_NE(dot.find("\"S!A1\" -> \"S!B1\";"), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"[Rates]\" [shape=box];"), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"[Rates]\" -> \"S!B1\" [style=dashed];"), std::string::npos) << dot;
}

}  // namespace
}  // namespace sheetsentry
