#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentir/core.hpp"
#include "agentir/env.hpp"
#include "agentir/execution.hpp"
#include "agentir/knowledge.hpp"
#include "agentir/perception.hpp"
#include "agentir/scheduling.hpp"

namespace agentir {

// Mechanism switches. Names compose with '+', e.g. "no-retrieval+no-rollback".
struct RunMode {
  bool reflection = true;
  bool rollback = true;
  bool retrieval = true;
  bool strict_threshold = false;

  std::string name() const;
  // "full", "no-reflection", "no-rollback", "no-retrieval", "strict-threshold" or a '+' join.
  static RunMode parse(std::string_view text);
  friend bool operator==(const RunMode&, const RunMode&) = default;
};

struct SearchDeps {
  const Scheduler* scheduler = nullptr;
  const Evaluator* evaluator = nullptr;
  const Toolbox* tools = nullptr;
  const KnowledgeBase* kb = nullptr;
  ExecutionPolicy policy;
  bool rollback = true;
};

// One subtask attempt.
struct TraceNode {
  std::size_t id = 0;
  std::optional<std::size_t> parent;  // attempt whose success opened this frame
  std::size_t frame = 0;
  std::size_t depth = 0;
  std::size_t outer_iteration = 0;
  Plan plan;  // plan of the frame when the attempt started
  TaskKind subtask = TaskKind::Denoising;
  SubtaskStatus status = SubtaskStatus::Failure;
  std::vector<std::string> tools_tried;
  std::size_t invocations = 0;
  bool rolled_back = false;  // passed, but every continuation failed
  bool rescheduled = false;  // the frame produced a new plan after this branch
};

struct OuterIteration {
  Plan plan;
  bool success = false;
  TaskSet consumed;  // tasks removed from the plan by the compromise
};

struct SearchCounters {
  std::size_t rollbacks = 0;
  std::size_t reschedules = 0;
  std::size_t compromises = 0;
  std::size_t invocations = 0;
  std::size_t nodes_expanded = 0;  // frames with a non-empty plan
  friend bool operator==(const SearchCounters&, const SearchCounters&) = default;
};

enum class RunStatus { Clean, Success, Compromise, Error };
std::string_view name(RunStatus s);

struct SearchTrace {
  RunStatus status = RunStatus::Clean;
  Agenda agenda;
  Plan first_plan;
  Plan completed_order;  // tasks accepted on the final path, in order
  std::vector<TraceNode> nodes;
  std::vector<OuterIteration> outer;
  SearchCounters counters;
  std::string error;
};

SearchCounters recompute_counters(const SearchTrace& trace);
nlohmann::json trace_to_json(const SearchTrace& trace);

struct AnnotatedProfile {
  DegradationProfile profile;
  TaskSet completed;                // subtasks accepted on the path that produced it
  Plan completed_order;
  std::optional<TaskKind> rejected;  // subtask whose failure produced it
};

struct DfsResult {
  AnnotatedProfile best;
  bool success = false;
  Plan plan;  // the frame's plan when it returned
};

// Depth-first search over subtask orders with reflection, rollback and rescheduling.
// Appends attempts to `trace`.
DfsResult dfs(const DegradationProfile& profile, const Plan& plan, const SearchDeps& deps, Substream stream,
              SearchTrace& trace, std::size_t outer_iteration = 0);

struct WorkflowResult {
  DegradationProfile final_profile;
  SearchTrace trace;
};

// Evaluate, schedule, search, and compromise on the best result until the plan runs out.
WorkflowResult run_workflow(const DegradationProfile& input, const SearchDeps& deps, Substream stream);

struct OracleResult {
  bool success = false;
  Plan witness;
};

// Exhaustive check over every order of `agenda` for a deterministic environment,
// replaying the acceptance ladder with registry tool order and ground-truth severities.
OracleResult brute_force_oracle(const DegradationProfile& profile, const Agenda& agenda, const Environment& env,
                                const ExecutionPolicy& policy);

}  // namespace agentir
