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

#include "sheetsentry/metrics.h"

#include <gtest/gtest.h>

#include <cmath>

#include "sheetsentry/errors.h"
#include "testing/generators.h"

namespace sheetsentry {
namespace {

TEST(ErrorProbabilityTest, ReferenceSamples) {
  const std::pair<int, int> rows[] = {{351, 97}, {37, 31}, {284, 94},
                                      {209, 88}, {260, 93}, {164, 81}};
  for (const auto& [n, pct] : rows) {
    EXPECT_EQ(error_probability_pct(error_probability(0.01, n)), pct) << n;
  }
}

TEST(ErrorProbabilityTest, Edges) {
  EXPECT_EQ(error_probability(0.3, 0), 0.0);
  EXPECT_EQ(error_probability(1.0, 5), 1.0);
  EXPECT_EQ(error_probability(0.0, 1000), 0.0);
  EXPECT_NEAR(error_probability(0.5, 2), 0.75, 1e-15);
  EXPECT_THROW(error_probability(-0.1, 3), DomainError);
  EXPECT_THROW(error_probability(1.5, 3), DomainError);
  EXPECT_THROW(error_probability(std::nan(""), 3), DomainError);
  EXPECT_THROW(error_probability(0.1, -1), DomainError);
  EXPECT_EQ(error_probability_pct(0.005), 1);
  EXPECT_EQ(error_probability_pct(0.0049), 0);
}

TEST(ErrorProbabilityTest, MonotoneInBothArguments) {
  for (int n = 0; n < 500; ++n) {
    EXPECT_LE(error_probability(0.01, n), error_probability(0.01, n + 1));
  }
  for (int i = 0; i < 100; ++i) {
    EXPECT_LE(error_probability(i / 100.0, 50), error_probability((i + 1) / 100.0, 50));
  }
}

FormulaAst P(std::string_view text) { return parse_formula(text); }

TEST(BranchCountTest, SpecExamples) {
  EXPECT_EQ(branch_count(P("=A1+1")), 0u);
  EXPECT_EQ(branch_count(P("=IF(A1>0,1,2)")), 2u);
  EXPECT_EQ(branch_count(P("=IF(A1,IF(B1,IF(C1,IF(D1,IF(E1,IF(F1,1,2),3),4),5),6),7)")), 7u);
}

// Counts leaves of the IF tree by walking it directly: an IF contributes the
// leaves of its then/else branches, anything else is a single leaf.
std::size_t LeafOracle(const FormulaAst& node) {
  const auto* c = node.as<Call>();
  if (c == nullptr || c->name != "IF") return 1;
  std::size_t leaves = 0;
  for (std::size_t i = 1; i < 3; ++i) leaves += i < c->args.size() ? LeafOracle(c->args[i]) : 1;
  return leaves;
}

// Random nest of IFs placed only in then/else positions.
std::string RandomNest(testing::Rng& rng, int depth) {
  if (depth == 0 || testing::Chance(rng, 0.3)) return std::to_string(testing::Uniform(rng, 0, 9));
  return "IF(A" + std::to_string(depth) + "," + RandomNest(rng, depth - 1) + "," +
         RandomNest(rng, depth - 1) + ")";
}

TEST(BranchCountTest, MatchesLeafOracleOnChainNests) {
  testing::Rng rng(5);
  int checked = 0;
  while (checked < 300) {
    const FormulaAst f = P("=" + RandomNest(rng, 6));
    const auto* c = f.as<Call>();
    if (c == nullptr) continue;
    // The IF+1 rule describes chains; restrict to nests where each IF holds at
    // most one nested IF.
    bool chain = true;
    visit_nodes(f, [&chain](const FormulaAst& n) {
      const auto* call = n.as<Call>();
      if (call == nullptr || call->name != "IF") return;
      int nested = 0;
      for (const auto& a : call->args) {
        const auto* inner = a.as<Call>();
        nested += inner != nullptr && inner->name == "IF";
      }
      chain &= nested <= 1;
    });
    if (!chain) continue;
    ASSERT_EQ(branch_count(f), LeafOracle(f)) << serialize_formula(f);
    ++checked;
  }
}

TEST(CostTest, SpecExamples) {
  EXPECT_EQ(formula_cost(P("=A1+1")), 2u);
  const auto lookup = formula_cost(P("=VLOOKUP(B7,A1:B100,2)"));
  EXPECT_GE(lookup, 100u);
  EXPECT_GT(lookup, formula_cost(P("=B7")));
  EXPECT_EQ(formula_cost(P("=SUM(A1:C10)")), 31u);
}

TEST(CostTest, StrictlyIncreasingInLookupRows) {
  std::uint64_t prev = 0;
  for (int n = 2; n <= 3000; ++n) {
    const std::string range = "A1:B" + std::to_string(n);
    const auto cost = formula_cost(P("=VLOOKUP(C1," + range + ",2)"));
    ASSERT_GT(cost, prev) << n;
    ASSERT_GT(cost, formula_cost(P("=B" + std::to_string(n))));
    prev = cost;
  }
}

TEST(CostTest, TotalIsSumAndTopKSorted) {
  testing::Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const Workbook wb = testing::RandomAcyclicWorkbook(rng);
    const auto formulas = parse_all(wb);
    std::uint64_t sum = 0;
    for (const auto& pf : formulas) sum += formula_cost(pf.ast);
    const RecalcCost all = recalc_cost(formulas, formulas.size());
    EXPECT_EQ(all.total, sum);
    ASSERT_EQ(all.top.size(), formulas.size());
    for (std::size_t i = 1; i < all.top.size(); ++i) {
      const auto& a = all.top[i - 1];
      const auto& b = all.top[i];
      EXPECT_TRUE(a.cost > b.cost || (a.cost == b.cost && a.cell < b.cell));
    }
    const RecalcCost three = recalc_cost(formulas, 3);
    EXPECT_EQ(three.total, sum);
    EXPECT_EQ(three.top, std::vector<CellCost>(all.top.begin(),
                                               all.top.begin() + std::min<std::size_t>(3, all.top.size())));
  }
}

std::string Lines(int n, const std::string& line) {
  std::string out;
  for (int i = 0; i < n; ++i) out += line + "\n";
  return out;
}

TEST(ScriptMetricsTest, SpecExamples) {
  std::string src = "' header\nSub Run()\n  ' step\n";
  src += Lines(6, "  x = x + 1");
  src += "End Sub\n";
  ScriptMetrics m = script_metrics(ScriptModule{"M", src});
  EXPECT_EQ(m.lines, 10u);
  EXPECT_EQ(m.comment_lines, 2u);
  EXPECT_DOUBLE_EQ(m.comment_ratio, 0.2);
  EXPECT_DOUBLE_EQ(m.indent_ratio, 1.0);

  m = script_metrics(ScriptModule{"Empty", ""});
  EXPECT_EQ(m.lines, 0u);
  EXPECT_EQ(m.comment_ratio, 1.0);
  EXPECT_EQ(m.indent_ratio, 1.0);

  m = script_metrics(ScriptModule{"Flat", "Sub Big()\n" + Lines(7998, "x = 1") + "End Sub"});
  EXPECT_EQ(m.lines, 8000u);
  EXPECT_EQ(m.comment_ratio, 0.0);
  EXPECT_EQ(m.indent_ratio, 0.0);
}

TEST(ScriptMetricsTest, BlocksAndComments) {
  const std::string src =
      "Option Explicit\n"
      "Private Function F(a)\n"
      "  If a > 0 Then\n"
      "    F = 1 ' inline comment\n"
      "  Else\n"
      "F = 2\n"
      "  End If\n"
      "End Function\n"
      "\n"
      "Rem trailing note\n";
  const ScriptMetrics m = script_metrics(ScriptModule{"M", src});
  EXPECT_EQ(m.lines, 10u);
  EXPECT_EQ(m.nonblank_lines, 9u);
  EXPECT_EQ(m.comment_lines, 1u);
  // Body: the If line and both assignments. Else and End If are not counted.
  EXPECT_EQ(m.body_lines, 3u);
  EXPECT_EQ(m.indented_body_lines, 2u);
}

TEST(ComputeMetricsTest, SmallReferenceSample) {
  const Workbook wb = testing::SyntheticWorkbook(164, 3245);
  const WorkbookMetrics m = compute_metrics(wb);
  EXPECT_EQ(m.formula_cells, 3245u);
  EXPECT_EQ(m.unique_formulae, 164u);
  EXPECT_EQ(m.error_probability_pct, 81);
  EXPECT_EQ(m.p, 0.01);
}

TEST(ComputeMetricsTest, EmptyAndExternal) {
  Workbook wb;
  wb.add_sheet("S");
  EXPECT_EQ(compute_metrics(wb), WorkbookMetrics{});

  wb.sheets[0].set("A1", Cell::Formula("=[R]S!A1+[R]S!A2"));
  wb.sheets[0].set("A2", Cell::Formula("=IF(A1,IF(B1,1,2),3)"));
  wb.scripts.push_back(ScriptModule{"M", "a\nb\n"});
  const WorkbookMetrics m = compute_metrics(wb, 0.5);
  EXPECT_EQ(m.external_link_count, 2u);
  EXPECT_EQ(m.max_branching, 3u);
  EXPECT_EQ(m.script_modules, 1u);
  EXPECT_EQ(m.script_lines_total, 2u);
  EXPECT_DOUBLE_EQ(m.error_probability, 0.75);
  EXPECT_THROW(compute_metrics(wb, 2.0), DomainError);
}

}  // namespace
}  // namespace sheetsentry
