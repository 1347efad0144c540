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

// Command-line front end: audit, metrics, graph and explain subcommands.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sheetsentry/depgraph.h"
#include "sheetsentry/errors.h"
#include "sheetsentry/formula.h"
#include "sheetsentry/metrics.h"
#include "sheetsentry/report.h"
#include "sheetsentry/rules.h"
#include "sheetsentry/workbook.h"

namespace {

using sheetsentry::ExitCode;

constexpr int kExitFailure = static_cast<int>(ExitCode::kFailure);

struct Options {
  std::vector<std::string> files;
  std::string config_path;
  std::string format = "text";
  double p = sheetsentry::kDefaultErrorRate;
  std::string fail_on = "error";
  bool dot = false;
  std::string rule_id;
};

// Diagnostic for a file that failed to load, parse or audit.
std::string Describe(const std::string& file, const std::exception& e) {
  if (const auto* fe = dynamic_cast<const sheetsentry::FormatError*>(&e)) {
    return file + ": format error at " +
           (fe->json_path().empty() ? std::string("/") : fe->json_path()) + ": " +
           fe->detail();
  }
  if (dynamic_cast<const sheetsentry::ParseError*>(&e) != nullptr) {
    return file + ": formula parse error: " + e.what();
  }
  return file + ": " + e.what();
}

std::optional<sheetsentry::RuleConfig> LoadConfig(const Options& opt) {
  std::string path = opt.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SHEETSENTRY_CONFIG"); env != nullptr) path = env;
  }
  if (path.empty()) return sheetsentry::RuleConfig();
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "sheetsentry: cannot read config " << path << "\n";
    return std::nullopt;
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return sheetsentry::parse_rule_config(text.str());
  } catch (const sheetsentry::FormatError& e) {
    std::cerr << "sheetsentry: config " << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

int RunAudit(const Options& opt) {
  const auto cfg = LoadConfig(opt);
  if (!cfg) return kExitFailure;
  const auto fail_on = sheetsentry::parse_severity(opt.fail_on);

  using Outcome = std::variant<sheetsentry::AuditReport, std::string>;
  std::vector<std::future<Outcome>> jobs;
  for (const std::string& file : opt.files) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &opt, file]() -> Outcome {
      try {
        return sheetsentry::audit_file(file, *cfg, opt.p);
      } catch (const std::exception& e) {
        return Describe(file, e);
      }
    }));
  }

  int exit_code = static_cast<int>(ExitCode::kClean);
  nlohmann::json reports = nlohmann::json::array();
  bool first = true;
  for (auto& job : jobs) {
    const Outcome outcome = job.get();
    if (const auto* error = std::get_if<std::string>(&outcome)) {
      std::cerr << "sheetsentry: " << *error << "\n";
      exit_code = kExitFailure;
      continue;
    }
    const auto& report = std::get<sheetsentry::AuditReport>(outcome);
    exit_code = std::max(exit_code,
                         static_cast<int>(sheetsentry::exit_code_for(report.findings, *fail_on)));
    if (opt.format == "json") {
      if (opt.files.size() == 1) {
        std::cout << sheetsentry::render_json(report);
      } else {
        reports.push_back(sheetsentry::report_to_json(report));
      }
    } else {
      if (!first) std::cout << "\n";
      std::cout << sheetsentry::render_text(report);
    }
    first = false;
  }
  if (opt.format == "json" && opt.files.size() > 1) std::cout << reports.dump(2) << "\n";
  return exit_code;
}

int RunMetrics(const Options& opt) {
  const std::string& file = opt.files.front();
  try {
    const sheetsentry::Workbook wb = sheetsentry::load_workbook(file);
    const sheetsentry::WorkbookMetrics m = sheetsentry::compute_metrics(wb, opt.p);
    std::cout << (opt.format == "json" ? sheetsentry::render_metrics_json(file, m)
                                       : sheetsentry::render_metrics_text(file, m));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sheetsentry: " << Describe(file, e) << "\n";
    return kExitFailure;
  }
}

int RunGraph(const Options& opt) {
  const std::string& file = opt.files.front();
  try {
    const sheetsentry::Workbook wb = sheetsentry::load_workbook(file);
    const sheetsentry::DepGraph g = sheetsentry::build_graph(wb);
    if (opt.dot) {
      std::cout << sheetsentry::to_dot(g);
      return 0;
    }
    std::cout << "nodes " << g.node_count() << "\n";
    std::cout << "edges " << g.edge_count() << "\n";
    std::cout << "external links " << g.external_links().size() << "\n";
    const auto order = sheetsentry::topo_order(g);
    if (const auto* cycles = std::get_if<sheetsentry::CycleReport>(&order)) {
      std::cout << "cycles " << cycles->components.size() << "\n";
      for (const auto& component : cycles->components) {
        std::cout << " ";
        for (const auto& node : component) std::cout << " " << g.label(node);
        std::cout << "\n";
      }
    } else {
      std::cout << "cycles 0\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "sheetsentry: " << Describe(file, e) << "\n";
    return kExitFailure;
  }
}

int RunExplain(const Options& opt) {
  const auto cfg = LoadConfig(opt);
  if (!cfg) return kExitFailure;
  const sheetsentry::RuleInfo* rule = sheetsentry::find_rule(sheetsentry::to_upper(opt.rule_id));
  if (rule == nullptr) {
    std::cerr << "sheetsentry: unknown rule '" << opt.rule_id << "'. Known rules:\n";
    for (const auto& r : sheetsentry::rule_registry()) std::cerr << "  " << r.id << "\n";
    return kExitFailure;
  }
  std::cout << sheetsentry::render_explain(*rule, *cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static auditor for spreadsheet workbooks", "sheetsentry"};
  app.set_version_flag("--version", std::string(sheetsentry::kToolVersion));
  app.require_subcommand(1);

  Options opt;
  const auto add_format = [&opt](CLI::App* sub) {
    sub->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
  };
  const auto add_p = [&opt](CLI::App* sub) {
    sub->add_option("--p", opt.p, "Per-unique-formula error rate")
        ->check(CLI::Range(0.0, 1.0));
  };
  const auto add_config = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path,
                    "Rule configuration JSON (default: $SHEETSENTRY_CONFIG)");
  };

  CLI::App* audit = app.add_subcommand("audit", "Full audit report");
  audit->add_option("files", opt.files, "Workbook files")->required();
  add_config(audit);
  add_format(audit);
  add_p(audit);
  audit->add_option("--fail-on", opt.fail_on, "Lowest severity that fails the run")
      ->check(CLI::IsMember({"info", "warning", "error"}));

  CLI::App* metrics = app.add_subcommand("metrics", "Workbook metrics only");
  metrics->add_option("file", opt.files, "Workbook file")->required()->expected(1);
  add_format(metrics);
  add_p(metrics);

  CLI::App* graph = app.add_subcommand("graph", "Dependency graph");
  graph->add_option("file", opt.files, "Workbook file")->required()->expected(1);
  graph->add_flag("--dot", opt.dot, "Emit Graphviz DOT");

  CLI::App* explain = app.add_subcommand("explain", "Describe a rule");
  explain->add_option("rule-id", opt.rule_id, "Rule id")->required();
  add_config(explain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFailure;
  }

  if (audit->parsed()) return RunAudit(opt);
  if (metrics->parsed()) return RunMetrics(opt);
  if (graph->parsed()) return RunGraph(opt);
  return RunExplain(opt);
}
