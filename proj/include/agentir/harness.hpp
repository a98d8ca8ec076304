#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentir/bridge.hpp"
#include "agentir/core.hpp"
#include "agentir/env.hpp"
#include "agentir/execution.hpp"
#include "agentir/explore.hpp"
#include "agentir/knowledge.hpp"
#include "agentir/perception.hpp"
#include "agentir/scheduling.hpp"
#include "agentir/search.hpp"

namespace agentir {

// Everything a batch needs besides the knowledge base and the run options.
struct HarnessConfig {
  std::shared_ptr<const Environment> env;
  std::shared_ptr<const Evaluator> evaluator;
  ToolOrder tool_order = ToolOrder::SeededShuffle;
  std::string scheduler = "experience";  // experience | random | remote
  std::vector<DegradationCombination> run_combinations;
  ExplorationConfig exploration;
  std::optional<BridgeConfig> bridge;
};

// {"environment": "paper"|"mechanistic"|{...}, "evaluator": ..., "tool_order": "shuffle"|"registry",
//  "scheduler": ..., "run": {"combinations": [...], "groups": [...]}, "exploration": {...}, "bridge": {...}}
HarnessConfig harness_config_from_json(const nlohmann::json& doc);
HarnessConfig load_harness_config(const std::string& path);
// Built-in calibrated tabular environment, perfect evaluator, group A.
HarnessConfig default_harness_config();

std::vector<DegradationCombination> parse_combinations(const nlohmann::json& block, const std::string& path);

// Builds the scheduler named by `spec`; remote needs a bridge block or AGENT_BRIDGE_URL.
std::shared_ptr<const Scheduler> make_scheduler(const std::string& spec, const std::optional<BridgeConfig>& bridge);

// Initial profile of one workflow run; identical across modes for paired comparisons.
DegradationProfile run_input(const DegradationCombination& c, std::size_t combination_index, std::size_t run,
                             std::uint64_t seed);
// Every degradation of the final profile sits at or below Low.
bool restored(const DegradationProfile& final_profile);

struct RunRecord {
  std::string mode;
  char group = 'A';
  std::string combination;
  std::size_t run = 0;
  bool success = false;
  RunStatus status = RunStatus::Clean;
  SearchCounters counters;
};

struct CellSummary {
  std::string mode;
  char group = 'A';
  std::string combination;  // empty for group rows
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::size_t errors = 0;
  double success_rate = 0.0;
  double mean_invocations = 0.0;
  double mean_rollbacks = 0.0;
  double mean_reschedules = 0.0;
  double mean_compromises = 0.0;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::size_t runs_per_combination = 0;
  std::vector<std::string> modes;
  std::vector<CellSummary> groups;
  std::vector<CellSummary> combinations;
};

struct BatchOptions {
  std::vector<RunMode> modes{RunMode{}};
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool keep_traces = true;
};

struct BatchResult {
  RunReport report;
  std::vector<RunRecord> records;
  std::map<std::string, std::vector<std::string>> trace_lines;  // mode -> JSON lines
  std::map<std::string, double> wall_seconds;                   // mode -> elapsed
};

BatchResult run_batch(const HarnessConfig& config, const KnowledgeBase& kb, const BatchOptions& options);

// Report aggregation from per-run records (also used to re-derive a report from traces).
RunReport summarize_runs(const std::vector<RunRecord>& records, const std::vector<std::string>& modes,
                         std::uint64_t seed, std::size_t runs);
nlohmann::json report_to_json(const RunReport& report);
std::string report_to_text(const RunReport& report);

// report.json, report.txt, timing.json and traces/<mode>.jsonl under `dir`.
void write_batch(const BatchResult& result, const std::string& dir);
// Recomputes every counter and table cell from the trace files. Returns the mismatches.
std::vector<std::string> verify_output(const std::string& dir);

struct ConsistencyRow {
  DegradationCombination combination;
  ConsistencyReport report;
};
std::vector<ConsistencyRow> consistency_table(const Scheduler& scheduler, const KnowledgeBase* kb,
                                              const std::vector<DegradationCombination>& combinations, int n,
                                              std::uint64_t seed);
std::string consistency_to_text(const std::vector<ConsistencyRow>& rows);
nlohmann::json consistency_to_json(const std::vector<ConsistencyRow>& rows);

}  // namespace agentir
